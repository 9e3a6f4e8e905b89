"""Network model unit tests"""

import pytest

from treecontain.network import (
    InvalidNetworkError,
    IssueKind,
    MulTree,
    Network,
    NetworkError,
    StaleVertexError,
    Tree,
    clean_up,
    is_ancestor,
    networks_isomorphic,
    suppress_degree_two,
    validate,
)
from treecontain.newick import parse_network, parse_tree


@pytest.fixture
def one_reticulation():
    return parse_network("((a,(b)#H1),(#H1,c));")


def test_single_labeled_vertex_is_valid():
    """A lone labeled vertex is a valid network"""
    net = Network()
    net.root = net.add_vertex("a")
    assert validate(net).is_valid
    assert net.size() == 1


def test_empty_network_is_invalid():
    """An empty network is invalid"""
    assert validate(Network()).has(IssueKind.EMPTY)


def test_two_sources_reported():
    """Two sources are reported"""
    net = Network.from_arcs([("r1", "x"), ("r2", "x")], {"x": "a"})
    report = validate(net)
    assert report.has(IssueKind.MULTIPLE_SOURCES)
    assert "multiple sources" in report.summary()


def test_indegree_two_outdegree_two_is_degree_violation():
    """Reticulations must have one child"""
    net = Network.from_arcs(
        [("r", "p"), ("r", "q"), ("p", "h"), ("q", "h"), ("h", "a"), ("h", "b"), ("p", "c"), ("q", "d")],
        {"a": "a", "b": "b", "c": "c", "d": "d"},
    )
    assert validate(net).has(IssueKind.DEGREE)


def test_cycle_reported():
    """Cycles are reported"""
    net = Network.from_arcs([("r", "x"), ("x", "y"), ("y", "x"), ("r", "a"), ("y", "b")], {"a": "a", "b": "b"})
    assert validate(net).has(IssueKind.CYCLE)


def test_unlabeled_sink_and_labeled_internal():
    """Labels belong on leaves only"""
    net = Network.from_arcs([("r", "x"), ("r", "y"), ("x", "a"), ("x", "b")], {"a": "a", "x": "x"})
    report = validate(net)
    assert report.has(IssueKind.UNLABELED_SINK)
    assert report.has(IssueKind.LABELED_INTERNAL)


def test_reticulation_leaf_reported():
    """A reticulation cannot be a leaf"""
    net = Network.from_arcs([("r", "x"), ("r", "y"), ("x", "h"), ("y", "h"), ("x", "a"), ("y", "b")],
                            {"h": "h", "a": "a", "b": "b"})
    assert validate(net).has(IssueKind.RETICULATION_LEAF)


def test_duplicate_labels_only_rejected_outside_multrees():
    """MUL-trees allow repeated labels"""
    net = Network.from_arcs([("r", "x"), ("r", "y")], {"x": "a", "y": "a"})
    assert validate(net).has(IssueKind.DUPLICATE_LABEL)
    mul = net.copy(as_type=MulTree)
    assert validate(mul).is_valid
    assert mul.k == 2


def test_tree_from_network_rejects_reticulations(one_reticulation):
    """Trees have no reticulations"""
    with pytest.raises(InvalidNetworkError) as exc_info:
        Tree.from_network(one_reticulation)
    assert exc_info.value.report.has(IssueKind.RETICULATION_IN_TREE)


def test_queries_on_one_reticulation(one_reticulation):
    """Basic queries on a small network"""
    net = one_reticulation
    h = net.parent(net.leaf("b"))
    assert net.is_reticulation(h)
    assert net.reticulations() == [h]
    assert net.num_reticulations == 1
    assert net.labels() == {"a", "b", "c"}
    assert net.num_vertices == 7
    assert net.num_arcs == 7
    assert net.size() == 14
    assert net.leaf_labels_below(h) == {"b"}
    assert len(net.topological_order()) == net.num_vertices


def test_is_ancestor_on_tree():
    """Ancestor checks on a tree"""
    tree = parse_tree("((a,b),c);")
    a, b = tree.leaf("a"), tree.leaf("b")
    root = tree.root
    assert is_ancestor(tree, root, root)
    assert is_ancestor(tree, a, root)
    assert is_ancestor(tree, a, tree.parent(a))
    assert not is_ancestor(tree, a, b)
    assert not is_ancestor(tree, root, a)


def test_is_ancestor_refreshes_after_edit():
    """Ancestor checks see edits"""
    tree = parse_tree("((a,b),c);")
    a = tree.leaf("a")
    assert is_ancestor(tree, a, tree.root)
    p = tree.parent(a)
    tree.remove_vertex(a)
    suppress_degree_two(tree, p)
    b = tree.leaf("b")
    assert tree.parent(b) == tree.root
    assert is_ancestor(tree, b, tree.root)


def test_is_ancestor_needs_a_tree(one_reticulation):
    """Ancestor checks need a tree"""
    with pytest.raises(NetworkError):
        is_ancestor(one_reticulation, one_reticulation.leaf("a"), one_reticulation.root)


def test_stale_vertex_errors():
    """Removed vertices raise on access"""
    tree = parse_tree("(a,b);")
    a = tree.leaf("a")
    tree.remove_vertex(a)
    with pytest.raises(StaleVertexError):
        tree.children(a)
    with pytest.raises(KeyError):
        tree.label(a)


def test_suppress_chain_vertex():
    """Suppressing a unary vertex forwards its tracked id to the child"""
    tree = parse_tree("((a,b),c);")
    a = tree.leaf("a")
    p = tree.parent(a)
    tree.track(p)
    tree.remove_vertex(a)
    result = suppress_degree_two(tree, p)
    assert result.suppressed == 1
    assert tree.resolve(p) == tree.leaf("b")
    assert validate(tree).is_valid
    assert tree.num_vertices == 3


def test_forwarding_follows_repeated_suppression():
    """A tracked id follows each suppression and is dropped on release"""
    tree = parse_tree("(((a,b),c),d);")
    x = tree.parent(tree.leaf("a"))
    y = tree.parent(x)
    tree.track(x)
    tree.remove_vertex(tree.leaf("a"))
    clean_up(tree, [x])
    assert tree.resolve(x) == tree.leaf("b")
    tree.remove_vertex(tree.leaf("c"))
    clean_up(tree, [y])
    assert tree.resolve(x) == tree.leaf("b")
    assert tree.forwarded == 1
    tree.release(x)
    assert tree.forwarded == 0
    assert tree.resolve(x) is None


def test_untracked_ids_are_not_forwarded():
    """Only tracked ids keep a forwarding entry"""
    tree = parse_tree("((a,b),c);")
    p = tree.parent(tree.leaf("a"))
    tree.remove_vertex(tree.leaf("a"))
    clean_up(tree, [p])
    assert tree.resolve(p) is None
    assert tree.forwarded == 0


def test_forwarding_dropped_with_target():
    """Removing the vertex a tracked id points at drops the entry"""
    tree = parse_tree("((a,b),c);")
    p = tree.parent(tree.leaf("a"))
    tree.track(p)
    tree.remove_vertex(tree.leaf("a"))
    clean_up(tree, [p])
    tree.remove_vertex(tree.leaf("b"))
    assert tree.resolve(p) is None
    assert tree.forwarded == 0


def test_suppress_rejects_branching_vertex():
    """Branching vertices are not suppressed"""
    tree = parse_tree("((a,b),c);")
    with pytest.raises(NetworkError):
        suppress_degree_two(tree, tree.parent(tree.leaf("a")))


def test_parallel_arc_collapse_cascades_to_root():
    """Parallel arcs collapse all the way up"""
    net = parse_network("((a,(b)#H1),#H1);")
    assert validate(net).is_valid
    a = net.leaf("a")
    x = net.parent(a)
    net.remove_vertex(a)
    result = clean_up(net, [x])
    assert net.num_vertices == 1
    assert net.label(net.root) == "b"
    assert result.suppressed == 3
    assert validate(net).is_valid


def test_root_with_one_child_is_suppressed():
    """A unary root is replaced by its child"""
    tree = parse_tree("(a,(b,c));")
    a = tree.leaf("a")
    root = tree.root
    tree.remove_vertex(a)
    clean_up(tree, [root])
    assert tree.root == tree.parent(tree.leaf("b"))
    assert validate(tree).is_valid


def test_clean_up_reports_stranded_labels(one_reticulation):
    """Leaves cut off by cleanup are reported"""
    net = one_reticulation
    h = net.parent(net.leaf("b"))
    x, y = net.parents(h)
    net.remove_arc(x, h)
    net.remove_arc(y, h)
    result = clean_up(net, [h, x, y])
    assert result.stranded == ["b"]
    assert net.labels() == {"a", "c"}
    assert validate(net).is_valid


def test_copy_is_independent(one_reticulation):
    """Copies do not share state"""
    clone = one_reticulation.copy()
    clone.remove_vertex(clone.leaf("a"))
    assert "a" in one_reticulation.labels()
    assert one_reticulation.num_vertices == 7


def test_isomorphism_ignores_child_order():
    """Isomorphism ignores child order"""
    assert networks_isomorphic(parse_network("((a,(b)#H1),(#H1,c));"), parse_network("((c,#H2),((b)#H2,a));"))
    assert not networks_isomorphic(parse_tree("((a,b),c);"), parse_tree("((a,c),b);"))


def test_to_networkx_keeps_labels(one_reticulation):
    """networkx export keeps labels"""
    graph = one_reticulation.to_networkx()
    assert graph.number_of_nodes() == 7
    assert graph.number_of_edges() == 7
    assert sorted(d["label"] for _, d in graph.nodes(data=True) if d["label"]) == ["a", "b", "c"]
