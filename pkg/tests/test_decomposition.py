"""Component DAG and pyramid tests"""

import pytest

from treecontain.decomposition import (
    ComponentDag,
    DecompositionError,
    build_component_dag,
    build_reticulation_leaf_map,
    component_roots,
    materialize_pyramid,
    pop_pyramid,
    reticulation_chain,
    retire_component,
)
from treecontain.network import clean_up
from treecontain.newick import parse_network, parse_tree

ONE_RETICULATION = "((a,(b)#H1),(#H1,c));"
TWO_COMPONENTS = "((a,((c,d))#H1),(#H1,b));"
CHAIN = "(((d,((b)#H2)#H1),(e,#H1)),((f,#H2),a));"


def test_tree_is_one_pyramid():
    """A tree is a single component with an empty base"""
    tree = parse_tree("((a,b),c);")
    q = build_component_dag(tree)
    assert list(q.queue) == [tree.root]
    assert q.arcs() == []
    p = pop_pyramid(q, tree)
    assert p.root == tree.root
    assert len(p.tip) == 5
    assert sorted(tree.label(x) for x in p.tip_leaves) == ["a", "b", "c"]
    assert p.base == set() and p.foundation == set()
    assert p.layering() == {"tip": 5, "base": 0, "foundation": 0, "base_height": 0}


def test_one_reticulation_layers():
    """Tip, base and foundation of a one-reticulation network"""
    net = parse_network(ONE_RETICULATION)
    h = net.reticulations()[0]
    b = net.leaf("b")
    x, y = net.children(net.root)
    assert component_roots(net) == [net.root]

    q = build_component_dag(net)
    assert len(q) == 1
    p = pop_pyramid(q, net)
    assert p.tip == [net.root, x, net.leaf("a"), y, net.leaf("c")]
    assert p.base == {h}
    assert p.foundation == {b}
    assert p.cross_arcs == [(x, h), (y, h)]
    assert p.base_height == 1


def test_component_below_reticulation_gets_its_own_vertex():
    """A component hanging below a reticulation becomes a lower vertex of Q"""
    net = parse_network(TWO_COMPONENTS)
    h = net.reticulations()[0]
    z = net.children(h)[0]
    assert reticulation_chain(net, h) == ([h], z)
    assert set(component_roots(net)) == {net.root, z}

    q = build_component_dag(net)
    assert q.arcs() == [(net.root, z)]
    assert list(q.queue) == [z]
    assert not q.is_leaf(net.root)
    with pytest.raises(DecompositionError):
        materialize_pyramid(net, net.root)

    p = pop_pyramid(q, net)
    assert p.root == z
    assert sorted(net.label(x) for x in p.tip_leaves) == ["c", "d"]
    retire_component(q, z)
    assert list(q.queue) == [net.root]
    assert len(q) == 1


def test_retire_requires_a_leaf():
    """Only leaves of Q can be retired"""
    net = parse_network(TWO_COMPONENTS)
    q = build_component_dag(net)
    with pytest.raises(DecompositionError):
        retire_component(q, net.root)


def test_pop_on_empty_queue():
    """Popping with nothing queued is an error"""
    q = ComponentDag()
    with pytest.raises(DecompositionError):
        pop_pyramid(q, parse_tree("(a,b);"))


def test_self_arc_rejected():
    """A component cannot reach itself"""
    q = ComponentDag()
    q.add_vertex(1)
    with pytest.raises(DecompositionError):
        q.add_arc(1, 1)


def test_base_height_of_chain():
    """Reticulation chains set the base height"""
    net = parse_network(CHAIN)
    q = build_component_dag(net)
    p = pop_pyramid(q, net)
    assert len(p.base) == 2
    assert p.base_height == 2
    assert p.foundation == {net.leaf("b")}
    assert len(p.cross_arcs) == 3


def test_reticulation_leaf_map():
    """Each reticulation maps to the leaf at the end of its chain"""
    net = parse_network(CHAIN)
    rmap = build_reticulation_leaf_map(net)
    b = net.leaf("b")
    lower = net.parent(b)
    upper = [p for p in net.parents(lower) if net.is_reticulation(p)][0]
    assert rmap.lookup(lower) == b
    assert rmap.lookup(upper) == b
    assert len(rmap) == 2


def test_reticulation_leaf_map_skips_inner_components():
    """Chains ending in a tree vertex with children have no leaf"""
    net = parse_network(TWO_COMPONENTS)
    rmap = build_reticulation_leaf_map(net)
    h = net.reticulations()[0]
    assert h not in rmap
    assert rmap.lookup(h) is None


def test_reticulation_leaf_map_registers_new_leaf():
    """A placed component root becomes the leaf for its chain"""
    net = parse_network(TWO_COMPONENTS)
    rmap = build_reticulation_leaf_map(net)
    h = net.reticulations()[0]
    z = net.children(h)[0]
    for leaf in list(net.children(z)):
        net.remove_vertex(leaf)
    net.set_label(z, "@1")
    rmap.register_leaf(z)
    assert rmap.lookup(h) == z


def test_suppressed_component_is_degenerate():
    """A component root suppressed by cleanup gives a degenerate pyramid"""
    tree = parse_tree("(a,b);")
    q = build_component_dag(tree)
    rho = tree.root
    tree.remove_vertex(tree.leaf("a"))
    clean_up(tree, [rho])
    p = pop_pyramid(q, tree)
    assert p.degenerate
    with pytest.raises(DecompositionError):
        _ = p.root


def test_retire_releases_forwarding():
    """Retiring a component drops the forwarding kept for its root"""
    net = parse_network(TWO_COMPONENTS)
    q = build_component_dag(net)
    z = net.children(net.reticulations()[0])[0]
    net.remove_vertex(net.leaf("c"))
    clean_up(net, [z])
    assert net.forwarded == 1
    p = pop_pyramid(q, net)
    assert p.degenerate
    retire_component(q, z, net)
    assert net.forwarded == 0
