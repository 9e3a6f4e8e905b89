"""Display of a tree by a multi-labeled tree.

Bottom-up dynamic program over T: M(v) is the set of minimal MUL-tree
vertices u (under the ancestor order) such that the subtree at u displays
T_v. Leaves get every MUL-leaf with their label; an inner vertex combines
its two children by pairwise LCAs. Only vertices of T whose children are
both marked are ever touched, so the work is bounded by the MUL-tree side.
"""

import random
from collections import deque
from typing import Dict, Iterable, List, Optional, Set

from loguru import logger

from .lca import LcaIndex
from .network import MulTree, Network


class MinsetInvariantError(RuntimeError):
    """A computed minset is larger than the label multiplicity allows"""

    def __init__(self, vertex: int, size: int, k: int):
        self.vertex = vertex
        self.size = size
        self.k = k
        super().__init__(f"|M({vertex})| = {size} exceeds k = {k}")


class MinsetTable:
    """Every M(v) computed for one (MUL-tree, tree) pair.

    `minsets` holds an entry for each processed vertex of T, empty entries
    included; vertices with an unmarked child never get one.
    """

    __slots__ = ("minsets", "maxima", "k", "combines")

    def __init__(self, k: int):
        self.minsets: Dict[int, List[int]] = {}
        self.maxima: Set[int] = set()
        self.k = k
        self.combines = 0

    def marked(self, v: int) -> bool:
        return bool(self.minsets.get(v))

    def __getitem__(self, v: int) -> List[int]:
        return self.minsets.get(v, [])

    def __contains__(self, v: int) -> bool:
        return v in self.minsets


def leaf_minsets(mul: Network, t: Network) -> Dict[int, List[int]]:
    """M(l) for every leaf l of t whose label occurs in mul"""
    result: Dict[int, List[int]] = {}
    if mul.num_vertices <= t.num_vertices:
        for label, holders in mul.label_index.items():
            t_holders = t.label_index.get(label)
            if t_holders:
                result[next(iter(t_holders))] = sorted(holders)
    else:
        for label, t_holders in t.label_index.items():
            holders = mul.label_index.get(label)
            if holders:
                result[next(iter(t_holders))] = sorted(holders)
    return result


def combine(idx: LcaIndex, m1: Iterable[int], m2: Iterable[int]) -> List[int]:
    """Minima of the pairwise LCAs of m1 x m2 that are not in m1 or m2"""
    m1 = list(m1)
    m2 = list(m2)
    excluded = set(m1)
    excluded.update(m2)
    candidates = {idx.lca(u1, u2) for u1 in m1 for u2 in m2}
    candidates -= excluded
    if len(candidates) <= 1:
        return list(candidates)
    # in entry order, a candidate's descendants follow it immediately
    ordered = sorted(candidates, key=idx.entry.__getitem__)
    minima = []
    for x, nxt in zip(ordered, ordered[1:]):
        if idx.entry[nxt] >= idx.exit[x]:
            minima.append(x)
    minima.append(ordered[-1])
    return minima


def compute_minsets(
    mul: MulTree,
    t: Network,
    idx: Optional[LcaIndex] = None,
    rng: Optional[random.Random] = None,
) -> MinsetTable:
    """Run the dynamic program and collect M(v) plus the maxima.

    The ready queue is FIFO; rng shuffles the initial leaf order, which must
    not change the result.
    """
    idx = LcaIndex.build(mul) if idx is None else idx
    k = mul.k if isinstance(mul, MulTree) else max((len(vs) for vs in mul.label_index.values()), default=1)
    table = MinsetTable(k)

    leaves = leaf_minsets(mul, t)
    order = list(leaves)
    if rng is not None:
        rng.shuffle(order)
    queue = deque()
    for leaf in order:
        table.minsets[leaf] = leaves[leaf]
        if len(leaves[leaf]) > k:
            raise MinsetInvariantError(leaf, len(leaves[leaf]), k)
        queue.append(leaf)

    while queue:
        v = queue.popleft()
        p = t.parent(v)
        if p is None or p in table.minsets:
            continue
        c1, c2 = t.children(p)
        if not (table.marked(c1) and table.marked(c2)):
            continue
        m = combine(idx, table.minsets[c1], table.minsets[c2])
        table.combines += 1
        if len(m) > k:
            raise MinsetInvariantError(p, len(m), k)
        table.minsets[p] = m
        if m:
            queue.append(p)

    for v, m in table.minsets.items():
        if not m:
            continue
        p = t.parent(v)
        if p is None or not table.marked(p):
            table.maxima.add(v)
    logger.debug(
        f"Minsets: {len(table.minsets)} vertices processed, {table.combines} combines, "
        f"{len(table.maxima)} maxima (k={k})"
    )
    return table


def maximal_displayed(mul: MulTree, t: Network, rng: Optional[random.Random] = None) -> Set[int]:
    """Maxima of {v in T : mul displays T_v}"""
    return compute_minsets(mul, t, rng=rng).maxima


def displays(mul: MulTree, t: Network) -> bool:
    """Does mul display t?"""
    if t.root is None or mul.root is None:
        return False
    return maximal_displayed(mul, t) == {t.root}
