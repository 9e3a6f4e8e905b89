"""Extended Newick reader and writer tests"""

import io

import pytest

from treecontain.generator import gen_network
from treecontain.network import MulTree, Tree, networks_isomorphic
from treecontain.newick import (
    NewickParseError,
    parse_network,
    parse_tree,
    read_network,
    read_text,
    serialize_network,
    write_network,
)


def test_parse_cherry():
    """Two leaves under the root"""
    tree = parse_tree("(a,b);")
    assert isinstance(tree, Tree)
    assert tree.num_vertices == 3
    assert tree.labels() == {"a", "b"}
    assert tree.children(tree.root) == [tree.leaf("a"), tree.leaf("b")]


def test_parse_three_leaf_tree():
    """A three-leaf tree"""
    tree = parse_tree("((a,b),c);")
    assert tree.num_vertices == 5
    assert tree.num_arcs == 4
    assert tree.parent(tree.leaf("a")) == tree.parent(tree.leaf("b"))


def test_parse_single_leaf():
    """A single leaf is the root"""
    tree = parse_tree("a;")
    assert tree.num_vertices == 1
    assert tree.label(tree.root) == "a"
    assert serialize_network(tree) == "a;"


def test_parse_one_reticulation():
    """Hybrid tags share one vertex"""
    net = parse_network("((a,(b)#H1),(#H1,c));")
    assert net.num_reticulations == 1
    h = net.reticulations()[0]
    assert net.children(h) == [net.leaf("b")]
    assert len(net.parents(h)) == 2


def test_hybrid_reference_before_definition():
    """A hybrid may be referenced before its subtree"""
    net = parse_network("((#H1,c),(a,(b)#H1));")
    assert networks_isomorphic(net, parse_network("((a,(b)#H1),(#H1,c));"))


def test_branch_lengths_and_whitespace_are_ignored():
    """Branch lengths and whitespace are skipped"""
    tree = parse_tree(" ( (a:1.0, b:2) :0.5 ,c:1e-3 ) ;\n")
    assert serialize_network(tree) == "((a,b),c);"


def test_serialize_keeps_child_order():
    """Serialization keeps child order"""
    text = "((a,(b)#H1),(#H1,c));"
    assert serialize_network(parse_network(text)) == text
    assert serialize_network(parse_tree("(c,(b,a));")) == "(c,(b,a));"


def test_serialize_multree():
    """MUL-trees serialize with repeated labels"""
    mul = MulTree.from_arcs([("r", "x"), ("r", "y")], {"x": "a", "y": "a"})
    assert serialize_network(mul) == "(a,a);"


def test_duplicate_label_rejected():
    """Repeated labels fail validation"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_tree("(a,a);")
    assert "duplicate label" in str(exc_info.value)


def test_unary_vertex_is_degree_violation():
    """Unary vertices fail validation"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_network("((a,(b)#H1),(#H1));")
    assert "degree violation" in str(exc_info.value)


def test_reticulation_without_subtree_or_label():
    """A hybrid tag with no subtree is an error"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_network("((a,#H1),(b,#H1));")
    assert "no subtree and no label" in str(exc_info.value)


def test_labeled_hybrid_leaf_is_reticulation_leaf():
    """A labeled hybrid leaf is a reticulation leaf"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_network("((a,c#H1),(b,#H1));")
    assert "reticulation leaf" in str(exc_info.value)


def test_tree_rejects_reticulations():
    """parse_tree refuses hybrids"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_tree("((a,(b)#H1),(#H1,c));")
    assert "reticulation" in str(exc_info.value)


@pytest.mark.parametrize(
    "text,position",
    [
        ("((a,b),c)", 8),
        ("(a,b)", 4),
        ("", 0),
        ("(a,b;", 4),
        ("(a,b);x", 6),
        ("(a,\u00a0b;", 6),
        ("(a,);", 3),
    ],
)
def test_error_positions_are_byte_offsets(text, position):
    """Parse errors point at a byte inside the input"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_network(text)
    assert exc_info.value.position == position


def test_malformed_hybrid_tag():
    """Hybrid tags must be #H followed by digits"""
    with pytest.raises(NewickParseError) as exc_info:
        parse_network("((a,(b)#X1),(#X1,c));")
    assert "hybrid tag" in str(exc_info.value)


def check_round_trip(seed: int) -> None:
    if seed % 2:
        net = gen_network(seed, 2 + seed % 15, seed % 6, "any")
    else:
        net = gen_network(seed, 4 + seed % 15, seed % 5, "reticulation_visible", strategy="structured")
    text = serialize_network(net)
    again = parse_network(text)
    assert networks_isomorphic(net, again)
    assert serialize_network(again) == text
    assert networks_isomorphic(parse_network(serialize_network(again)), again)


@pytest.mark.parametrize("seed", range(20))
def test_generated_network_survives_text_form(seed):
    """Parse after serialize gives back an isomorphic network and the same text"""
    check_round_trip(seed)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(1000))
def test_generated_network_survives_text_form_large(seed):
    """Text round trips stay isomorphic on 1000 generated networks"""
    check_round_trip(10_000 + seed)


def test_write_and_read_file(tmp_path):
    """Written files read back as the same network"""
    net = parse_network("((a,(b)#H1),(#H1,c));")
    path = write_network(net, tmp_path / "out" / "net.nwk")
    assert path.read_text(encoding="utf-8") == "((a,(b)#H1),(#H1,c));\n"
    assert networks_isomorphic(read_network(path), net)


def test_read_text_from_stdin(monkeypatch):
    """A dash reads stdin"""
    monkeypatch.setattr("sys.stdin", io.StringIO("(a,b);"))
    assert read_text("-") == "(a,b);"


def test_invalid_utf8_is_a_parse_error(tmp_path):
    """Undecodable bytes are reported at their offset"""
    path = tmp_path / "bad.nwk"
    path.write_bytes(b"((a,\xff),c);")
    with pytest.raises(NewickParseError) as exc_info:
        read_text(path)
    assert exc_info.value.position == 4
    assert "invalid UTF-8" in str(exc_info.value)
