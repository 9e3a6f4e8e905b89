"""Tree components, the component DAG and pyramid extraction.

Deleting every reticulation splits a network into tree components; a
component is non-trivial when its root has children. The component DAG Q
has one vertex per non-trivial component root and an arc C -> D whenever a
reticulation chain leads from a tree vertex of C to the root of D. A leaf
rho of Q spans a pyramid: the tree vertices reachable from rho without
crossing a reticulation (tip), the reticulations reached from the tip
(base), and the leaves hanging below those (foundation).
"""

import random
from collections import deque
from typing import Container, Dict, List, Optional, Set, Tuple

from loguru import logger
from pydantic import BaseModel, Field

from .network import Network


class DecompositionError(RuntimeError):
    """Internal invariant of the component DAG or a pyramid was violated"""


class ReticulationLeafMap:
    """Reticulation -> the leaf at the end of its reticulation path.

    Filled bottom-up from every leaf at build time and again from each leaf
    created later (register_leaf). Reticulations whose chain reached a
    non-leaf when the map was filled are resolved on demand by walking down.
    Entries are set once; they only disappear with the vertex.
    """

    def __init__(self, net: Network):
        self.net = net
        self._leaf: Dict[int, int] = {}

    @classmethod
    def build(cls, net: Network) -> "ReticulationLeafMap":
        rmap = cls(net)
        for leaf in net.leaves():
            rmap.register_leaf(leaf)
        return rmap

    def register_leaf(self, leaf: int) -> None:
        stack = [p for p in self.net.parents(leaf) if self.net.is_reticulation(p)]
        while stack:
            r = stack.pop()
            if r in self._leaf and self.net.has_vertex(self._leaf[r]):
                continue
            self._leaf[r] = leaf
            stack.extend(p for p in self.net.parents(r) if self.net.is_reticulation(p))

    def lookup(self, r: int) -> Optional[int]:
        """Leaf reached from reticulation r, or None if the chain ends at a tree vertex"""
        leaf = self._leaf.get(r)
        if leaf is not None and self.net.has_vertex(leaf):
            return leaf
        chain, v = reticulation_chain(self.net, r)
        if not self.net.is_leaf(v):
            return None
        for w in chain:
            self._leaf[w] = v
        return v

    def __contains__(self, r: int) -> bool:
        return r in self._leaf

    def __len__(self) -> int:
        return len(self._leaf)


def reticulation_chain(net: Network, r: int, known: Container[int] = ()) -> Tuple[List[int], int]:
    """Reticulations on the path down from r and the vertex the walk stops at.

    The walk stops at the first tree vertex or at the first member of known,
    which is then returned as the end without being part of the path.
    """
    path: List[int] = []
    v = r
    while net.is_reticulation(v) and v not in known:
        path.append(v)
        v = net.children(v)[0]
    return path, v


def component_roots(net: Network) -> List[int]:
    """Roots of the non-trivial tree components, root of N first"""
    roots = []
    if net.root is not None and not net.is_leaf(net.root):
        roots.append(net.root)
    for v in net.vertices():
        if net.is_tree_vertex(v) and not net.is_leaf(v):
            parent = net.parent(v)
            if parent is not None and net.is_reticulation(parent):
                roots.append(v)
    return roots


class ComponentDag:
    """Q with its leaf queue.

    Arcs are the contraction arcs of the bottom-up scan; their transitive
    closure is the ancestor order on component roots. Vertices are the
    component-root ids as they were when Q was built; the network forwards
    suppressed ids (Network.resolve).
    """

    def __init__(self):
        self.down: Dict[int, Set[int]] = {}
        self.up: Dict[int, Set[int]] = {}
        self.retired: Set[int] = set()
        self.queue: deque = deque()
        self._queued: Set[int] = set()

    def add_vertex(self, rho: int) -> None:
        self.down.setdefault(rho, set())
        self.up.setdefault(rho, set())

    def add_arc(self, upper: int, lower: int) -> None:
        if upper == lower:
            raise DecompositionError(f"Component {upper} reaches itself")
        self.down[upper].add(lower)
        self.up[lower].add(upper)

    def seed_queue(self, rng: Optional[random.Random] = None) -> None:
        leaves = [rho for rho, below in self.down.items() if not below]
        if rng is not None:
            rng.shuffle(leaves)
        for rho in leaves:
            self.enqueue(rho)

    def enqueue(self, rho: int) -> None:
        if rho not in self._queued:
            self._queued.add(rho)
            self.queue.append(rho)

    def is_leaf(self, rho: int) -> bool:
        return rho in self.down and rho not in self.retired and not self.down[rho]

    def __len__(self) -> int:
        return len(self.down) - len(self.retired)

    def __bool__(self) -> bool:
        return len(self) > 0

    def arcs(self) -> List[Tuple[int, int]]:
        return sorted((u, w) for u, below in self.down.items() for w in below)


def build_component_dag(net: Network, rng: Optional[random.Random] = None) -> ComponentDag:
    """Build Q by scanning each component and following the reticulation chains out of it"""
    q = ComponentDag()
    roots = component_roots(net)
    for rho in roots:
        q.add_vertex(rho)
        net.track(rho)
    ends: Dict[int, int] = {}

    def end_of(r: int) -> int:
        path, v = reticulation_chain(net, r, ends)
        end = ends.get(v, v)
        for w in path:
            ends[w] = end
        return end

    for rho in roots:
        stack = [rho]
        while stack:
            x = stack.pop()
            for c in net.children(x):
                if net.is_reticulation(c):
                    z = end_of(c)
                    if not net.is_leaf(z):
                        q.add_arc(rho, z)
                else:
                    stack.append(c)
    q.seed_queue(rng)
    logger.debug(f"Component DAG: {len(q)} components, {sum(len(d) for d in q.down.values())} arcs")
    return q


def build_reticulation_leaf_map(net: Network) -> ReticulationLeafMap:
    return ReticulationLeafMap.build(net)


class Pyramid(BaseModel):
    """The subnetwork below a Q-leaf, layered into tip, base and foundation.

    A pyramid whose Q-vertex no longer resolves to a tree vertex with
    children is degenerate: there is nothing left to place.
    """

    rho: int
    resolved: Optional[int] = None
    tip: List[int] = Field(default_factory=list)
    tip_leaves: List[int] = Field(default_factory=list)
    base: Set[int] = Field(default_factory=set)
    foundation: Set[int] = Field(default_factory=set)
    cross_arcs: List[Tuple[int, int]] = Field(default_factory=list)
    base_height: int = 0

    @property
    def degenerate(self) -> bool:
        return self.resolved is None

    @property
    def root(self) -> int:
        if self.resolved is None:
            raise DecompositionError(f"Pyramid at {self.rho} is degenerate")
        return self.resolved

    def layering(self) -> Dict[str, int]:
        return {
            "tip": len(self.tip),
            "base": len(self.base),
            "foundation": len(self.foundation),
            "base_height": self.base_height,
        }


def materialize_pyramid(net: Network, rho: int) -> Pyramid:
    """Layer N_rho; rho is the id held by Q and may have been forwarded"""
    resolved = net.resolve(rho)
    if resolved is None or net.is_leaf(resolved) or net.is_reticulation(resolved):
        return Pyramid(rho=rho)

    tip: List[int] = []
    tip_leaves: List[int] = []
    base: Set[int] = set()
    foundation: Set[int] = set()
    cross_arcs: List[Tuple[int, int]] = []
    height: Dict[int, int] = {}

    stack = [resolved]
    while stack:
        x = stack.pop()
        tip.append(x)
        children = net.children(x)
        if not children:
            tip_leaves.append(x)
            continue
        for c in reversed(children):
            if not net.is_reticulation(c):
                stack.append(c)
                continue
            cross_arcs.append((x, c))
            path, v = reticulation_chain(net, c, base)
            base.update(path)
            if net.is_reticulation(v):
                below = height[v]
            else:
                if not net.is_leaf(v):
                    raise DecompositionError(
                        f"Tree vertex {v} below base reticulation {c} is not a leaf; "
                        f"component {rho} is not a leaf of Q"
                    )
                foundation.add(v)
                below = 0
            for w in reversed(path):
                below += 1
                height[w] = below
    return Pyramid(
        rho=rho,
        resolved=resolved,
        tip=tip,
        tip_leaves=tip_leaves,
        base=base,
        foundation=foundation,
        cross_arcs=cross_arcs,
        base_height=max(height.values(), default=0),
    )


def pop_pyramid(q: ComponentDag, net: Network) -> Pyramid:
    """Take the next Q-leaf and materialize its pyramid"""
    if not q.queue:
        raise DecompositionError(
            "component DAG has no leaf to pop" if not q else f"{len(q)} components left but none is a leaf"
        )
    rho = q.queue.popleft()
    pyramid = materialize_pyramid(net, rho)
    if pyramid.degenerate:
        logger.debug(f"Degenerate pyramid at component {rho}")
    else:
        logger.debug(f"Pyramid at {rho}: {pyramid.layering()}")
    return pyramid


def retire_component(q: ComponentDag, rho: int, net: Optional[Network] = None) -> None:
    """Remove a processed Q-leaf and enqueue the components it unblocks.

    With net given, the forwarding entry kept for rho is released too.
    """
    if not q.is_leaf(rho):
        raise DecompositionError(f"Component {rho} is not a leaf of Q")
    q.retired.add(rho)
    if net is not None:
        net.release(rho)
    for upper in q.up[rho]:
        below = q.down[upper]
        below.discard(rho)
        if not below and upper not in q.retired:
            q.enqueue(upper)
