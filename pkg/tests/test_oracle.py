"""Brute-force oracle tests"""

import random

import pytest

from treecontain.generator import random_tree, taxon_labels
from treecontain.network import MulTree, networks_isomorphic
from treecontain.newick import parse_network, parse_tree
from treecontain.oracle import (
    OracleRefusal,
    canonical_form,
    displayed_trees,
    oracle_displays,
    oracle_minset,
    oracle_subtree_display,
    resolve_network,
)

ONE_RETICULATION = "((a,(b)#H1),(#H1,c));"


def test_canonical_form_orders_children():
    """Canonical forms sort children"""
    assert canonical_form(parse_tree("(c,(b,a));")) == "((a,b),c);"
    assert canonical_form(parse_tree("a;")) == "a;"


def test_canonical_form_restricted():
    """Canonical forms restrict to labels or a subtree"""
    tree = parse_tree("((a,b),(c,d));")
    assert canonical_form(tree, labels={"a", "c"}) == "(a,c);"
    assert canonical_form(tree, root=tree.parent(tree.leaf("c"))) == "(c,d);"


def test_displayed_trees_of_one_reticulation():
    """One reticulation displays two trees"""
    assert displayed_trees(parse_network(ONE_RETICULATION)) == {"((a,b),c);", "(a,(b,c));"}


@pytest.mark.parametrize(
    "tree,expected",
    [
        ("((a,b),c);", True),
        ("(a,(b,c));", True),
        ("((a,c),b);", False),
        ("(a,b);", True),
        ("(a,d);", False),
    ],
)
def test_oracle_displays(tree, expected):
    """Display decisions on a small network"""
    assert oracle_displays(parse_network(ONE_RETICULATION), parse_tree(tree)) is expected


def test_refuses_large_instances():
    """Too many reticulations are refused"""
    with pytest.raises(OracleRefusal):
        oracle_displays(parse_network(ONE_RETICULATION), parse_tree("((a,b),c);"), max_reticulations=0)


def test_resolve_network():
    """A resolution keeps one parent per reticulation"""
    net = parse_network(ONE_RETICULATION)
    h = net.reticulations()[0]
    x = net.children(net.root)[0]
    tree = resolve_network(net, {h: x})
    assert networks_isomorphic(tree, parse_tree("((a,b),c);"))
    assert net.num_reticulations == 1
    with pytest.raises(ValueError):
        resolve_network(net, {h: net.leaf("a")})


def test_subtree_display_and_minset():
    """Subtree display and minimal sets on a small MUL-tree"""
    mul = MulTree.from_arcs(
        [("r", "x"), ("r", "y"), ("x", "a1"), ("x", "b"), ("y", "a2"), ("y", "c")],
        {"a1": "a", "a2": "a", "b": "b", "c": "c"},
    )
    t = parse_tree("((a,c),b);")
    ac = t.parent(t.leaf("a"))
    y = mul.parent(mul.leaf("c"))
    assert oracle_subtree_display(mul, t, t.root)
    assert oracle_subtree_display(mul, t, ac, y)
    assert not oracle_subtree_display(mul, t, t.root, y)
    assert oracle_minset(mul, t, ac) == {y}
    assert oracle_minset(mul, t, t.root) == {mul.root}


def check_monotone(seed: int) -> None:
    rng = random.Random(seed)
    labels = taxon_labels(rng.randint(3, 6))
    copies = labels + rng.choices(labels, k=rng.randint(0, 3))
    mul, _ = random_tree(rng, len(copies), labels=copies)
    t, _ = random_tree(rng, len(labels), labels=labels)
    mul = mul.copy(as_type=MulTree)
    for v in t.vertices():
        if oracle_subtree_display(mul, t, v):
            continue
        w = t.parent(v)
        while w is not None:
            assert not oracle_subtree_display(mul, t, w), (seed, v, w)
            w = t.parent(w)


@pytest.mark.parametrize("seed", range(20))
def test_subtree_display_fails_upwards(seed):
    """A subtree the MUL-tree cannot display makes every enclosing subtree fail too"""
    check_monotone(seed)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(300))
def test_subtree_display_fails_upwards_large(seed):
    """Failure propagates to ancestors on 300 random pairs"""
    check_monotone(1000 + seed)
