"""Reduction rules: cherry reduction and pyramid placement.

Cherry reduction: a cherry {a, b} of N must be a cherry of T, else N cannot
display T; if it is, a is deleted in both. Pyramid placement collapses the
tip of a pyramid P and the subtree T_v it displays into one fresh label.
"""

from collections import deque
from enum import Enum
from typing import Iterable, List, Optional, Set, Tuple

from loguru import logger
from pydantic import BaseModel, Field

from .decomposition import DecompositionError, Pyramid, ReticulationLeafMap
from .network import MulTree, Network, UnsupportedNetworkError, clean_up


class CherryStatus(str, Enum):
    """Outcome of exhaustive cherry reduction"""

    REDUCED = "reduced"
    REJECTED = "rejected"


class CherryReport(BaseModel):
    """Result of apply_cherry_reductions"""

    status: CherryStatus = CherryStatus.REDUCED
    pairs: List[Tuple[str, str]] = Field(default_factory=list)
    rejected_pair: Optional[Tuple[str, str]] = None

    @property
    def rejected(self) -> bool:
        return self.status == CherryStatus.REJECTED


class PlacementResult(BaseModel):
    """Result of one pyramid placement"""

    label: str
    removed_labels: List[str] = Field(default_factory=list)
    stranded: List[str] = Field(default_factory=list)
    touched: Set[int] = Field(default_factory=set)


class AnchorResult(BaseModel):
    """Anchor leaf c and the maximum v of T above it displayed by P"""

    c: str
    v: int


class LabelFactory:
    """Fresh labels '@1', '@2', ... ('@' is outside the Newick label alphabet)"""

    PREFIX = "@"

    def __init__(self, reserved: Iterable[str] = ()):
        self.reserved = set(reserved)
        self.issued = 0

    def fresh(self) -> str:
        while True:
            self.issued += 1
            label = f"{self.PREFIX}{self.issued}"
            if label not in self.reserved:
                return label


def cherry_at(net: Network, x: int) -> Optional[Tuple[int, int]]:
    """The cherry whose parent is x (or the parent of leaf x), if any"""
    if not net.has_vertex(x):
        return None
    if net.is_leaf(x):
        parent = net.parent(x)
        if parent is None:
            return None
        x = parent
    children = net.children(x)
    if len(children) == 2 and net.is_tree_vertex(x) and all(net.is_leaf(c) for c in children):
        return children[0], children[1]
    return None


def reduce_cherry(net: Network, t: Network, a: int, b: int) -> bool:
    """One cherry reduction on the network cherry {a, b}.

    Returns False (nothing changed) when the labels are not a cherry of t.
    Otherwise deletes a in both structures and suppresses the parents.
    """
    label_a = net.label(a)
    label_b = net.label(b)
    if label_a is None or label_b is None:
        raise ValueError(f"Cherry {a},{b} has an unlabeled leaf")
    ta = t.leaf(label_a)
    tb = t.leaf(label_b)
    t_parent = t.parent(ta)
    if t_parent is None or t_parent != t.parent(tb):
        return False
    net_parent = net.parent(a)
    net.remove_vertex(a)
    clean_up(net, [net_parent])
    t.remove_vertex(ta)
    clean_up(t, [t_parent])
    logger.debug(f"Cherry ({label_a},{label_b}) reduced")
    return True


def apply_cherry_reductions(net: Network, t: Network, seeds: Optional[Iterable[int]] = None) -> CherryReport:
    """Apply cherry reduction until no network cherry is left near the seeds.

    With no seeds every vertex is examined. A network cherry that is not a
    cherry of t rejects the instance.
    """
    report = CherryReport()
    work = deque(net.vertices() if seeds is None else seeds)
    while work:
        cherry = cherry_at(net, work.popleft())
        if cherry is None:
            continue
        a, b = cherry
        pair = (net.label(a), net.label(b))
        if not reduce_cherry(net, t, a, b):
            report.status = CherryStatus.REJECTED
            report.rejected_pair = pair
            logger.debug(f"Cherry {pair} of the network is not a cherry of the tree")
            return report
        report.pairs.append(pair)
        work.append(b)
    return report


def pyramid_to_multree(p: Pyramid, net: Network, rmap: ReticulationLeafMap) -> MulTree:
    """The tip of p with every cross arc x -> r replaced by a leaf under x.

    The new leaf carries the label of the leaf at the end of r's
    reticulation path, so labels may repeat.
    """
    mul = MulTree()
    ids = {}
    for x in p.tip:
        y = mul.add_vertex()
        ids[x] = y
        if x == p.root:
            mul.root = y
        else:
            mul.add_arc(ids[net.parent(x)], y)
        if net.is_leaf(x):
            mul.set_label(y, net.label(x))
    for x, r in p.cross_arcs:
        leaf = rmap.lookup(r)
        if leaf is None:
            raise DecompositionError(f"Base reticulation {r} has no reticulation path to a leaf")
        mul.add_arc(ids[x], mul.add_vertex(net.label(leaf)))
    return mul


def _entry_points(net: Network, leaf: int) -> Tuple[Set[int], List[int]]:
    """Tree vertices entering the reticulation paths that end at leaf, and those reticulations"""
    entries: Set[int] = set()
    chain: List[int] = []
    stack = list(net.parents(leaf))
    while stack:
        w = stack.pop()
        if net.is_reticulation(w):
            chain.append(w)
            stack.extend(net.parents(w))
        else:
            entries.add(w)
    return entries, chain


def find_anchor_leaf(p: Pyramid, net: Network) -> str:
    """Label of a leaf of P on which the root of P is stable.

    Any tip leaf qualifies. A foundation leaf qualifies when every tree
    vertex entering its reticulation paths belongs to the tip.
    """
    if p.tip_leaves:
        return net.label(p.tip_leaves[0])
    tip = set(p.tip)
    for leaf in sorted(p.foundation):
        entries, _ = _entry_points(net, leaf)
        if entries <= tip:
            return net.label(leaf)
    raise UnsupportedNetworkError(
        f"pyramid root {p.root} has a reticulation parent but is not stable on any leaf",
        vertex=p.root,
    )


def select_anchored_maximum(maxima: Iterable[int], t: Network, c: str) -> int:
    """The element of maxima that is an ancestor-or-self of t's leaf c"""
    target = t.leaf(c)
    for m in maxima:
        if m == target or target in t.preorder(m):
            return m
    raise DecompositionError(f"No displayed maximum lies above leaf {c!r}")


def anchor(p: Pyramid, net: Network, t: Network, maxima: Iterable[int]) -> AnchorResult:
    c = find_anchor_leaf(p, net)
    return AnchorResult(c=c, v=select_anchored_maximum(maxima, t, c))


def apply_pyramid_placement(
    net: Network,
    t: Network,
    p: Pyramid,
    v: int,
    labels: LabelFactory,
    rmap: Optional[ReticulationLeafMap] = None,
) -> PlacementResult:
    """Collapse the tip of p and T_v into one fresh label.

    Leaves of N labeled by T_v go away together with every reticulation path
    ending in them; the tip goes except its root, which loses its outgoing
    arcs. T_v shrinks to v. Both get the new label. Leaves that only the tip
    could reach are reported as stranded.
    """
    rho = p.root
    t_subtree = t.preorder(v)
    t_labels = [t.label(w) for w in t_subtree if t.is_leaf(w)]
    seeds: List[int] = []

    for label in t_labels:
        leaf = net.leaf(label)
        entries, chain = _entry_points(net, leaf)
        seeds.extend(entries)
        for w in chain:
            if net.has_vertex(w):
                net.remove_vertex(w)
        net.remove_vertex(leaf)

    stranded: List[str] = []
    for x in p.tip:
        if x == rho or not net.has_vertex(x):
            continue
        if net.is_leaf(x) and net.label(x) is not None:
            stranded.append(net.label(x))
        seeds.extend(c for c in net.children(x) if net.is_reticulation(c))
        net.remove_vertex(x)
    for c in list(net.children(rho)):
        net.remove_arc(rho, c)
        seeds.append(c)

    label = labels.fresh()
    net.set_label(rho, label)
    for w in t_subtree:
        if w != v:
            t.remove_vertex(w)
    t.set_label(v, label)

    cleanup = clean_up(net, seeds)
    stranded.extend(cleanup.stranded)
    if rmap is not None and net.has_vertex(rho):
        rmap.register_leaf(rho)
    logger.debug(
        f"Placed pyramid {p.rho} as {label}: {len(t_labels)} labels removed, "
        f"{cleanup.removed} removed and {cleanup.suppressed} suppressed in cleanup"
    )
    return PlacementResult(
        label=label,
        removed_labels=t_labels,
        stranded=stranded,
        touched=cleanup.touched | {rho},
    )
