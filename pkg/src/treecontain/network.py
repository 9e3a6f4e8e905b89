"""Network model: mutable rooted binary DAG with labeled leaves"""

from collections import deque
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Type, TypeVar

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher
from pydantic import BaseModel, Field


class NetworkError(Exception):
    """Base class for network model errors"""


class StaleVertexError(NetworkError, KeyError):
    """Raised when a vertex handle no longer refers to a live vertex"""

    def __init__(self, vertex: int):
        super().__init__(f"Stale or unknown vertex id: {vertex}")
        self.vertex = vertex

    def __str__(self) -> str:
        return self.args[0]


class InvalidNetworkError(NetworkError):
    """Raised when a structure fails validation"""

    def __init__(self, report: "ValidationReport", context: str = "network"):
        super().__init__(f"Invalid {context}: {report.summary()}")
        self.report = report


class LabelMismatchError(NetworkError):
    """Raised when network and tree carry different label sets"""

    def __init__(self, only_network: Set[str], only_tree: Set[str]):
        parts = []
        if only_network:
            parts.append(f"only in network: {', '.join(sorted(only_network)[:5])}")
        if only_tree:
            parts.append(f"only in tree: {', '.join(sorted(only_tree)[:5])}")
        super().__init__("Label sets differ (" + "; ".join(parts) + ")")
        self.only_network = only_network
        self.only_tree = only_tree


class UnsupportedNetworkError(NetworkError):
    """Raised when a network falls outside the class the engine can decide"""

    def __init__(self, message: str, vertex: Optional[int] = None):
        super().__init__(message)
        self.vertex = vertex


class IssueKind(str, Enum):
    """Kinds of structural violations found by validate()"""

    EMPTY = "empty network"
    NO_SOURCE = "no source"
    MULTIPLE_SOURCES = "multiple sources"
    ROOT_MISMATCH = "root mismatch"
    CYCLE = "cycle"
    DISCONNECTED = "disconnected"
    DEGREE = "degree violation"
    UNLABELED_SINK = "unlabeled sink"
    LABELED_INTERNAL = "labeled internal vertex"
    RETICULATION_LEAF = "reticulation leaf"
    DUPLICATE_LABEL = "duplicate label"
    LABEL_INDEX = "label index"
    RETICULATION_IN_TREE = "reticulation in tree"


class ValidationIssue(BaseModel):
    """One violated invariant"""

    kind: IssueKind
    vertex: Optional[int] = None
    message: str = ""


class ValidationReport(BaseModel):
    """Result of validate(); empty means valid"""

    issues: List[ValidationIssue] = Field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.issues

    def has(self, kind: IssueKind) -> bool:
        return any(issue.kind == kind for issue in self.issues)

    def add(self, kind: IssueKind, vertex: Optional[int] = None, message: str = "") -> None:
        self.issues.append(ValidationIssue(kind=kind, vertex=vertex, message=message or kind.value))

    def summary(self) -> str:
        if self.is_valid:
            return "valid"
        return "; ".join(issue.message for issue in self.issues[:8])

    def __str__(self) -> str:
        return self.summary()


N = TypeVar("N", bound="Network")


class Network:
    """Rooted binary phylogenetic network.

    Vertices are integer handles that are never reused. Child and parent
    lists keep insertion order, which fixes serialization order. The
    structure is single-writer; reductions edit it in place.
    """

    def __init__(self):
        self._children: Dict[int, List[int]] = {}
        self._parents: Dict[int, List[int]] = {}
        self._labels: Dict[int, str] = {}
        self.label_index: Dict[str, Set[int]] = {}
        self.root: Optional[int] = None
        self._next_id = 0
        self._forward: Dict[int, int] = {}
        self._tracked: Dict[int, Set[int]] = {}
        self._version = 0
        self._numbering: Optional[Tuple[int, Dict[int, int], Dict[int, int]]] = None

    # ------------------------------------------------------------------
    # construction and editing

    def add_vertex(self, label: Optional[str] = None) -> int:
        vertex = self._next_id
        self._next_id += 1
        self._children[vertex] = []
        self._parents[vertex] = []
        if label is not None:
            self.set_label(vertex, label)
        self._version += 1
        return vertex

    def add_arc(self, u: int, v: int) -> bool:
        """Add arc u->v; returns False if it already exists"""
        self._require(u)
        self._require(v)
        if v in self._children[u]:
            return False
        self._children[u].append(v)
        self._parents[v].append(u)
        self._version += 1
        return True

    def remove_arc(self, u: int, v: int) -> None:
        self._require(u)
        self._require(v)
        try:
            self._children[u].remove(v)
            self._parents[v].remove(u)
        except ValueError as e:
            raise NetworkError(f"No arc {u}->{v}") from e
        self._version += 1

    def remove_vertex(self, v: int) -> None:
        self._require(v)
        for p in self._parents[v]:
            self._children[p].remove(v)
        for c in self._children[v]:
            self._parents[c].remove(v)
        self.clear_label(v)
        for tracked in self._tracked.pop(v, ()):
            self._forward.pop(tracked, None)
        del self._children[v]
        del self._parents[v]
        if self.root == v:
            self.root = None
        self._version += 1

    def set_label(self, v: int, label: str) -> None:
        self._require(v)
        self.clear_label(v)
        self._labels[v] = label
        self.label_index.setdefault(label, set()).add(v)

    def clear_label(self, v: int) -> None:
        label = self._labels.pop(v, None)
        if label is not None:
            holders = self.label_index.get(label)
            if holders is not None:
                holders.discard(v)
                if not holders:
                    del self.label_index[label]

    def splice_out(self, v: int) -> Tuple[Optional[int], int, bool]:
        """Remove a degree-(1,1) vertex (or a root of out-degree 1).

        Returns (parent, child, collapsed) where collapsed tells whether the
        joining arc already existed and was therefore dropped. The child keeps
        v's position in the parent's child list. Ids tracked at v move to the child.
        """
        self._require(v)
        children = self._children[v]
        parents = self._parents[v]
        if len(children) != 1 or len(parents) > 1 or (not parents and v != self.root):
            raise NetworkError(
                f"Vertex {v} is not suppressible (indegree {len(parents)}, outdegree {len(children)})"
            )
        child = children[0]
        moved = self._tracked.pop(v, None)
        if moved:
            for tracked in moved:
                self._forward[tracked] = child
            self._tracked.setdefault(child, set()).update(moved)
        if not parents:
            self.remove_vertex(v)
            self.root = child
            return None, child, False
        parent = parents[0]
        collapsed = child in self._children[parent]
        position = self._children[parent].index(v)
        self.remove_vertex(v)
        if not collapsed:
            self._children[parent].insert(position, child)
            self._parents[child].append(parent)
        return parent, child, collapsed

    # ------------------------------------------------------------------
    # queries

    def _require(self, v: int) -> None:
        if v not in self._children:
            raise StaleVertexError(v)

    def has_vertex(self, v: int) -> bool:
        return v in self._children

    def track(self, v: int) -> None:
        """Keep v resolvable after it is suppressed"""
        self._require(v)
        self._tracked.setdefault(v, set()).add(v)

    def release(self, v: int) -> None:
        """Stop tracking v and drop its forwarding entry"""
        target = self.resolve(v)
        self._forward.pop(v, None)
        if target is not None:
            holders = self._tracked.get(target)
            if holders is not None:
                holders.discard(v)
                if not holders:
                    del self._tracked[target]

    def resolve(self, v: int) -> Optional[int]:
        """The live vertex a tracked id was suppressed into (v itself if live)"""
        if v in self._children:
            return v
        return self._forward.get(v)

    @property
    def forwarded(self) -> int:
        """Number of suppressed ids still held for resolution"""
        return len(self._forward)

    def children(self, v: int) -> List[int]:
        """Child list of v (read-only view)"""
        try:
            return self._children[v]
        except KeyError:
            raise StaleVertexError(v) from None

    def parents(self, v: int) -> List[int]:
        """Parent list of v (read-only view)"""
        try:
            return self._parents[v]
        except KeyError:
            raise StaleVertexError(v) from None

    def parent(self, v: int) -> Optional[int]:
        parents = self.parents(v)
        return parents[0] if parents else None

    def label(self, v: int) -> Optional[str]:
        self._require(v)
        return self._labels.get(v)

    def indegree(self, v: int) -> int:
        return len(self.parents(v))

    def outdegree(self, v: int) -> int:
        return len(self.children(v))

    def is_leaf(self, v: int) -> bool:
        return not self.children(v)

    def is_reticulation(self, v: int) -> bool:
        return len(self.parents(v)) >= 2

    def is_tree_vertex(self, v: int) -> bool:
        return len(self.parents(v)) < 2

    def vertices(self) -> Iterator[int]:
        return iter(list(self._children))

    def leaves(self) -> List[int]:
        return [v for v, cs in self._children.items() if not cs]

    def reticulations(self) -> List[int]:
        return [v for v, ps in self._parents.items() if len(ps) >= 2]

    def arcs(self) -> Iterator[Tuple[int, int]]:
        for u, cs in self._children.items():
            for v in cs:
                yield u, v

    def labels(self) -> Set[str]:
        return set(self.label_index)

    def leaf(self, label: str) -> int:
        """The unique vertex carrying label"""
        holders = self.label_index.get(label)
        if not holders:
            raise NetworkError(f"No vertex labeled {label!r}")
        if len(holders) > 1:
            raise NetworkError(f"Label {label!r} occurs {len(holders)} times")
        return next(iter(holders))

    @property
    def num_vertices(self) -> int:
        return len(self._children)

    @property
    def num_arcs(self) -> int:
        return sum(len(cs) for cs in self._children.values())

    @property
    def num_reticulations(self) -> int:
        return sum(1 for ps in self._parents.values() if len(ps) >= 2)

    def size(self) -> int:
        """|N| = |V| + |A|"""
        return self.num_vertices + self.num_arcs

    def __len__(self) -> int:
        return len(self._children)

    def __contains__(self, v: int) -> bool:
        return v in self._children

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(vertices={self.num_vertices}, "
            f"reticulations={self.num_reticulations}, labels={len(self.label_index)})"
        )

    def find_sources(self) -> List[int]:
        return [v for v, ps in self._parents.items() if not ps]

    def topological_order(self) -> List[int]:
        """Kahn order from the sources; shorter than |V| iff there is a cycle"""
        indeg = {v: len(ps) for v, ps in self._parents.items()}
        queue = deque(v for v, d in indeg.items() if d == 0)
        order: List[int] = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for c in self._children[u]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return order

    def preorder(self, start: Optional[int] = None) -> List[int]:
        """Depth-first preorder in stored child order (each vertex once)"""
        start = self.root if start is None else start
        if start is None:
            return []
        self._require(start)
        order: List[int] = []
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            order.append(u)
            for c in reversed(self._children[u]):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return order

    def descendants(self, v: int) -> Set[int]:
        """All u with u <= v"""
        return set(self.preorder(v))

    def leaf_labels_below(self, v: int) -> Set[str]:
        return {self._labels[u] for u in self.preorder(v) if not self._children[u] and u in self._labels}

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff u <=_N v, i.e. v is an ancestor-or-self of u.

        Only defined on reticulation-free networks; answered by interval
        containment over a cached entry/exit numbering.
        """
        self._require(u)
        self._require(v)
        entry, exit_ = self._traversal_numbers()
        return entry[v] <= entry[u] and exit_[u] <= exit_[v]

    def _traversal_numbers(self) -> Tuple[Dict[int, int], Dict[int, int]]:
        if self._numbering is not None and self._numbering[0] == self._version:
            return self._numbering[1], self._numbering[2]
        if self.num_reticulations:
            raise NetworkError("Ancestor queries by interval containment need a reticulation-free network")
        entry: Dict[int, int] = {}
        exit_: Dict[int, int] = {}
        clock = 0
        if self.root is not None:
            stack: List[Tuple[int, bool]] = [(self.root, False)]
            while stack:
                u, done = stack.pop()
                if done:
                    exit_[u] = clock
                    continue
                entry[u] = clock
                clock += 1
                stack.append((u, True))
                for c in reversed(self._children[u]):
                    stack.append((c, False))
        self._numbering = (self._version, entry, exit_)
        return entry, exit_

    # ------------------------------------------------------------------
    # copies and conversions

    def copy(self, as_type: Optional[Type[N]] = None) -> N:
        """Structural copy keeping vertex ids; optionally retyped"""
        cls = as_type or type(self)
        other = cls.__new__(cls)
        Network.__init__(other)
        other._children = {v: list(cs) for v, cs in self._children.items()}
        other._parents = {v: list(ps) for v, ps in self._parents.items()}
        other._labels = dict(self._labels)
        other.label_index = {label: set(vs) for label, vs in self.label_index.items()}
        other.root = self.root
        other._next_id = self._next_id
        return other

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for v in self._children:
            graph.add_node(v, label=self._labels.get(v))
        graph.add_edges_from(self.arcs())
        return graph

    @classmethod
    def from_arcs(cls: Type[N], arcs: Iterable[Tuple[int, int]], labels: Dict[int, str]) -> N:
        """Build from an arc list over arbitrary hashable keys (test helper)"""
        net = cls()
        ids: Dict[object, int] = {}

        def vid(key: object) -> int:
            if key not in ids:
                ids[key] = net.add_vertex()
            return ids[key]

        for u, v in arcs:
            net.add_arc(vid(u), vid(v))
        for key, label in labels.items():
            net.set_label(vid(key), label)
        sources = net.find_sources()
        net.root = sources[0] if len(sources) == 1 else None
        return net


class Tree(Network):
    """A network with no reticulations and unique leaf labels"""

    @classmethod
    def from_network(cls, net: Network) -> "Tree":
        tree = net.copy(as_type=cls)
        report = validate(tree)
        if not report.is_valid:
            raise InvalidNetworkError(report, context="tree")
        return tree


class MulTree(Network):
    """A tree whose leaf labels may repeat"""

    @property
    def k(self) -> int:
        """Maximum multiplicity of any label"""
        return max((len(vs) for vs in self.label_index.values()), default=1)


def validate(net: Network, multilabeled: Optional[bool] = None) -> ValidationReport:
    """Check every structural invariant of a (binary) network.

    Trees additionally must be reticulation-free. Multi-labeled structures
    (MulTree, or multilabeled=True) skip the duplicate-label check.
    """
    report = ValidationReport()
    if multilabeled is None:
        multilabeled = isinstance(net, MulTree)
    if not len(net):
        report.add(IssueKind.EMPTY)
        return report

    sources = net.find_sources()
    if not sources:
        report.add(IssueKind.NO_SOURCE, message="no source (every vertex has a parent)")
    elif len(sources) > 1:
        report.add(IssueKind.MULTIPLE_SOURCES, sources[1], f"multiple sources: {sorted(sources)[:6]}")
    elif net.root != sources[0]:
        report.add(IssueKind.ROOT_MISMATCH, sources[0], f"root is {net.root} but the source is {sources[0]}")

    order = net.topological_order()
    if len(order) != len(net):
        on_cycle = sorted(set(net._children) - set(order))
        report.add(IssueKind.CYCLE, on_cycle[0], f"cycle through vertices {on_cycle[:6]}")

    start = sources[0] if sources else next(iter(net._children))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in net._children[u] + net._parents[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(net):
        report.add(IssueKind.DISCONNECTED, message=f"disconnected: {len(net) - len(seen)} vertices unreachable")

    for v in net._children:
        indeg = len(net._parents[v])
        outdeg = len(net._children[v])
        labeled = v in net._labels
        if indeg == 0:
            if outdeg not in (0, 2) or (outdeg == 0 and len(net) > 1):
                report.add(IssueKind.DEGREE, v, f"degree violation at root {v} (outdegree {outdeg})")
        elif outdeg == 0:
            if indeg >= 2:
                report.add(IssueKind.RETICULATION_LEAF, v, f"reticulation leaf {v}")
        elif not ((indeg == 1 and outdeg == 2) or (indeg == 2 and outdeg == 1)):
            report.add(IssueKind.DEGREE, v, f"degree violation at {v} (indegree {indeg}, outdegree {outdeg})")
        if outdeg == 0 and not labeled:
            report.add(IssueKind.UNLABELED_SINK, v, f"unlabeled sink {v}")
        if outdeg > 0 and labeled:
            report.add(IssueKind.LABELED_INTERNAL, v, f"labeled internal vertex {v} ({net._labels[v]!r})")
        if isinstance(net, (Tree, MulTree)) and indeg >= 2:
            report.add(IssueKind.RETICULATION_IN_TREE, v, f"reticulation {v} in a tree")

    indexed = {(label, v) for label, vs in net.label_index.items() for v in vs}
    stored = {(label, v) for v, label in net._labels.items()}
    if indexed != stored:
        report.add(IssueKind.LABEL_INDEX, message="label index inconsistent with leaf labels")
    if not multilabeled:
        for label, vs in net.label_index.items():
            if len(vs) > 1:
                report.add(IssueKind.DUPLICATE_LABEL, min(vs), f"duplicate label {label!r}")
    return report


def require_valid(net: Network, context: str = "network") -> None:
    report = validate(net)
    if not report.is_valid:
        raise InvalidNetworkError(report, context=context)


def is_ancestor(net: Network, u: int, v: int) -> bool:
    """u <=_N v on a reticulation-free network"""
    return net.is_ancestor(u, v)


class CleanupResult(BaseModel):
    """Outcome of clean_up()"""

    touched: Set[int] = Field(default_factory=set)
    stranded: List[str] = Field(default_factory=list)
    removed: int = 0
    suppressed: int = 0


def clean_up(net: Network, seeds: Iterable[int]) -> CleanupResult:
    """Restore the binary invariants around edited vertices.

    Repeatedly deletes unlabeled sinks and orphans (non-root vertices without
    parents) and suppresses degree-(1,1) vertices and a root of outdegree 1,
    collapsing parallel arcs. Labeled leaves that lose every parent are
    deleted and reported as stranded.
    """
    result = CleanupResult()
    work = deque(seeds)
    while work:
        v = work.popleft()
        if not net.has_vertex(v):
            continue
        parents = net._parents[v]
        children = net._children[v]
        if not parents and v != net.root:
            label = net._labels.get(v)
            if label is not None:
                result.stranded.append(label)
            work.extend(children)
            net.remove_vertex(v)
            result.removed += 1
        elif not children and v not in net._labels:
            if v == net.root:
                continue
            work.extend(parents)
            net.remove_vertex(v)
            result.removed += 1
        elif len(children) == 1 and len(parents) <= 1:
            parent, child, _ = net.splice_out(v)
            result.suppressed += 1
            if parent is not None:
                work.append(parent)
            work.append(child)
        else:
            result.touched.add(v)
    result.touched = {v for v in result.touched if net.has_vertex(v)}
    return result


def suppress_degree_two(net: Network, v: int) -> CleanupResult:
    """Suppress v (indegree 1, outdegree 1, or a root of outdegree 1) and repair"""
    if not net.has_vertex(v):
        raise StaleVertexError(v)
    if net.outdegree(v) != 1 or net.indegree(v) > 1 or (net.indegree(v) == 0 and v != net.root):
        raise NetworkError(f"Vertex {v} is not a degree-(1,1) vertex")
    return clean_up(net, [v])


def networks_isomorphic(a: Network, b: Network) -> bool:
    """Leaf-label-preserving isomorphism of two networks"""
    if a.num_vertices != b.num_vertices or a.num_arcs != b.num_arcs or a.labels() != b.labels():
        return False
    matcher = DiGraphMatcher(
        a.to_networkx(),
        b.to_networkx(),
        node_match=lambda x, y: x.get("label") == y.get("label"),
    )
    return matcher.is_isomorphic()
