"""Brute-force display checks used as ground truth in tests.

A binary network displays T iff some resolution (one kept parent per
reticulation) yields a tree whose topology restricted to L(T) equals T.
Trees are compared through a canonical string in which children are
ordered by their smallest leaf label.
"""

import itertools
from typing import Dict, Iterable, List, Optional, Set, Tuple

from loguru import logger

from .network import Network, Tree, clean_up

Canonical = Tuple[str, str]


class OracleRefusal(RuntimeError):
    """The instance is too large for exhaustive search"""


def _join(parts: List[Canonical]) -> Optional[Canonical]:
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0]
    parts.sort()
    return parts[0][0], "(" + ",".join(p[1] for p in parts) + ")"


def _canonical_below(net: Network, start: int, keep) -> Optional[Canonical]:
    """Canonical (min label, text) of the tree below start, restricted by keep(v)"""
    values: Dict[int, Optional[Canonical]] = {}
    stack = [(start, False)]
    while stack:
        v, done = stack.pop()
        children = net.children(v)
        if not done:
            stack.append((v, True))
            stack.extend((c, False) for c in children)
            continue
        if not children:
            label = net.label(v)
            values[v] = (label, label) if label is not None and keep(v) else None
        else:
            values[v] = _join([values[c] for c in children if values[c] is not None])
    return values[start]


def canonical_form(tree: Network, root: Optional[int] = None, labels: Optional[Set[str]] = None) -> str:
    """Canonical string of a tree (or the subtree at root), optionally restricted to labels"""
    start = tree.root if root is None else root
    if start is None:
        return ";"
    keep = (lambda v: True) if labels is None else (lambda v: tree.label(v) in labels)
    value = _canonical_below(tree, start, keep)
    return (value[1] if value else "") + ";"


def _resolutions(net: Network, max_reticulations: int) -> Tuple[List[int], Iterable[Tuple[int, ...]]]:
    rets = sorted(net.reticulations())
    if len(rets) > max_reticulations:
        raise OracleRefusal(
            f"{len(rets)} reticulations exceed the oracle bound of {max_reticulations}"
        )
    return rets, itertools.product(*(net.parents(r) for r in rets))


def _resolution_forms(net: Network, labels: Optional[Set[str]], max_reticulations: int):
    """Yield the restricted canonical string of every resolution"""
    rets, choices = _resolutions(net, max_reticulations)
    order = net.topological_order()
    order.reverse()
    is_ret = {r: True for r in rets}
    for choice in choices:
        chosen = dict(zip(rets, choice))
        values: Dict[int, Optional[Canonical]] = {}
        for v in order:
            children = net.children(v)
            if not children:
                label = net.label(v)
                keep = label is not None and (labels is None or label in labels)
                values[v] = (label, label) if keep else None
                continue
            parts = []
            for c in children:
                if is_ret.get(c) and chosen[c] != v:
                    continue
                if values[c] is not None:
                    parts.append(values[c])
            values[v] = _join(parts)
        root_value = values.get(net.root)
        yield (root_value[1] if root_value else "") + ";"


def oracle_displays(net: Network, t: Network, max_reticulations: int = 16) -> bool:
    """Exhaustive decision of whether net displays t"""
    t_labels = t.labels()
    if not t_labels <= net.labels():
        return False
    target = canonical_form(t)
    for form in _resolution_forms(net, t_labels, max_reticulations):
        if form == target:
            return True
    return False


def displayed_trees(net: Network, max_reticulations: int = 16) -> Set[str]:
    """Canonical strings of all trees displayed by net"""
    forms = set(_resolution_forms(net, None, max_reticulations))
    logger.debug(f"{len(forms)} distinct displayed trees")
    return forms


def resolve_network(net: Network, resolution: Dict[int, int]) -> Tree:
    """Materialize one resolution (reticulation -> kept parent) as a Tree"""
    work = net.copy()
    seeds = []
    for r in work.reticulations():
        keep = resolution.get(r)
        if keep not in work.parents(r):
            raise ValueError(f"Resolution must pick a parent of reticulation {r}")
        for p in list(work.parents(r)):
            if p != keep:
                work.remove_arc(p, r)
                seeds.append(p)
        seeds.append(r)
    clean_up(work, seeds)
    return Tree.from_network(work)


def oracle_subtree_display(
    mul: Network,
    t: Network,
    v: int,
    u: Optional[int] = None,
    max_mul_leaves: int = 14,
) -> bool:
    """Does the subtree of mul at u (default: its root) display T_v?

    Every leaf of T_v is assigned a mul leaf with the same label below u; an
    assignment works iff the spanned subtree has T_v's topology.
    """
    if len(mul.leaves()) > max_mul_leaves:
        raise OracleRefusal(f"MUL-tree has more than {max_mul_leaves} leaves")
    start = mul.root if u is None else u
    below = mul.descendants(start)
    t_leaves = [w for w in t.preorder(v) if t.is_leaf(w)]
    options = []
    for leaf in t_leaves:
        holders = [w for w in mul.label_index.get(t.label(leaf), ()) if w in below]
        if not holders:
            return False
        options.append(holders)
    target = canonical_form(t, root=v)
    for assignment in itertools.product(*options):
        chosen = set(assignment)
        value = _canonical_below(mul, start, chosen.__contains__)
        if value is not None and value[1] + ";" == target:
            return True
    return False


def oracle_minset(mul: Network, t: Network, v: int, max_mul_leaves: int = 14) -> Set[int]:
    """Minimal u such that the subtree of mul at u displays T_v"""
    displaying = {
        u for u in mul.vertices() if oracle_subtree_display(mul, t, v, u, max_mul_leaves)
    }
    return {u for u in displaying if not any(c in displaying for c in mul.children(u))}
