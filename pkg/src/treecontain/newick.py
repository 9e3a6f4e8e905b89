"""Newick and extended Newick (#H hybrid tags) reading and writing"""

import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Type, TypeVar, Union

from loguru import logger
from pydantic import BaseModel

from .network import Network, Tree, validate

LABEL_RE = re.compile(r"[A-Za-z0-9_.\-]+")
HYBRID_RE = re.compile(r"#H([A-Za-z0-9_]+)")
LENGTH_RE = re.compile(r"[0-9eE.+\-]*")

N = TypeVar("N", bound=Network)


class ParseDiagnostics(BaseModel):
    """A located parse message"""

    position: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"position {self.position}: {self.message}"


class NewickParseError(ValueError):
    """Raised for syntax errors and structures that fail validation"""

    def __init__(self, diagnostics: List[ParseDiagnostics]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics[:5]))

    @property
    def position(self) -> int:
        return self.diagnostics[0].position


class _Occurrence:
    __slots__ = ("offset", "name", "hybrid", "children")

    def __init__(self, offset: int):
        self.offset = offset
        self.name: Optional[str] = None
        self.hybrid: Optional[str] = None
        self.children: List["_Occurrence"] = []


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.size = len(text.encode("utf-8"))

    def byte_offset(self, index: Optional[int] = None) -> int:
        index = self.i if index is None else index
        index = min(index, len(self.text))
        return len(self.text[:index].encode("utf-8"))

    def fail(self, message: str, index: Optional[int] = None) -> NewickParseError:
        # end-of-input errors point at the last byte
        position = min(self.byte_offset(index), max(self.size - 1, 0))
        return NewickParseError([ParseDiagnostics(position=position, message=message)])

    def skip_ws(self) -> None:
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def parse(self) -> _Occurrence:
        root = self._subtree()
        if self.peek() != ";":
            raise self.fail("expected ';' at end of input")
        self.i += 1
        if self.peek():
            raise self.fail("unexpected text after ';'")
        return root

    def _subtree(self) -> _Occurrence:
        open_stack: List[_Occurrence] = []
        root: Optional[_Occurrence] = None
        while True:
            ch = self.peek()
            occ = _Occurrence(self.byte_offset())
            if open_stack:
                open_stack[-1].children.append(occ)
            else:
                root = occ
            if ch == "(":
                self.i += 1
                open_stack.append(occ)
                continue
            self._name(occ)
            self._lengths()
            while True:
                if not open_stack:
                    return root
                ch = self.peek()
                if ch == ",":
                    self.i += 1
                    break
                if ch == ")":
                    self.i += 1
                    closed = open_stack.pop()
                    self._name(closed)
                    self._lengths()
                    continue
                raise self.fail(f"expected ',' or ')' but found {ch!r}" if ch else "unexpected end of input")

    def _name(self, occ: _Occurrence) -> None:
        self.skip_ws()
        match = LABEL_RE.match(self.text, self.i)
        if match:
            occ.name = match.group()
            self.i = match.end()
        if self.i < len(self.text) and self.text[self.i] == "#":
            hybrid = HYBRID_RE.match(self.text, self.i)
            if not hybrid:
                raise self.fail("malformed hybrid tag (expected '#H<id>')")
            occ.hybrid = hybrid.group(1)
            self.i = hybrid.end()

    def _lengths(self) -> None:
        # eNewick allows ':length:support:probability'; all discarded
        while self.peek() == ":":
            self.i += 1
            self.skip_ws()
            match = LENGTH_RE.match(self.text, self.i)
            field = match.group()
            if field:
                try:
                    float(field)
                except ValueError:
                    raise self.fail(f"malformed branch length {field!r}") from None
            self.i = match.end()


def _assemble(root: _Occurrence, cls: Type[N]) -> Tuple[N, Dict[int, int]]:
    net = cls()
    positions: Dict[int, int] = {}
    hybrid_vertex: Dict[str, int] = {}
    hybrid_bearer: Dict[str, _Occurrence] = {}
    hybrid_name: Dict[str, str] = {}

    def vertex_for(occ: _Occurrence) -> int:
        if occ.hybrid is None:
            v = net.add_vertex()
            positions[v] = occ.offset
            return v
        if occ.hybrid not in hybrid_vertex:
            v = net.add_vertex()
            hybrid_vertex[occ.hybrid] = v
            positions[v] = occ.offset
        if occ.name:
            hybrid_name.setdefault(occ.hybrid, occ.name)
        return hybrid_vertex[occ.hybrid]

    net.root = vertex_for(root)
    stack = [(root, net.root)]
    while stack:
        occ, v = stack.pop()
        if occ.hybrid is not None and occ.children:
            if occ.hybrid in hybrid_bearer:
                raise NewickParseError([ParseDiagnostics(
                    position=occ.offset,
                    message=f"hybrid #H{occ.hybrid} carries a subtree at more than one occurrence",
                )])
            hybrid_bearer[occ.hybrid] = occ
            positions[v] = occ.offset
        if not occ.children and occ.hybrid is None:
            if not occ.name:
                raise NewickParseError([ParseDiagnostics(position=occ.offset, message="leaf without label")])
            net.set_label(v, occ.name)
        for child in occ.children:
            w = vertex_for(child)
            if not net.add_arc(v, w):
                raise NewickParseError([ParseDiagnostics(
                    position=child.offset, message="parallel arcs to the same hybrid")])
            stack.append((child, w))

    for tag, v in hybrid_vertex.items():
        if tag not in hybrid_bearer:
            name = hybrid_name.get(tag)
            if name is None:
                raise NewickParseError([ParseDiagnostics(
                    position=positions[v], message=f"hybrid #H{tag} has no subtree and no label")])
            net.set_label(v, name)
    return net, positions


def _parse(text: str, cls: Type[N]) -> N:
    root = _Parser(text).parse()
    net, positions = _assemble(root, cls)
    report = validate(net)
    if not report.is_valid:
        diagnostics = [
            ParseDiagnostics(
                position=positions.get(issue.vertex, 0) if issue.vertex is not None else 0,
                message=issue.message,
            )
            for issue in report.issues
        ]
        raise NewickParseError(diagnostics)
    logger.debug(f"Parsed {net!r}")
    return net


def parse_network(text: str) -> Network:
    """Parse extended Newick into a validated Network"""
    return _parse(text, Network)


def parse_tree(text: str) -> Tree:
    """Parse rooted Newick into a validated 1-labeled binary Tree"""
    return _parse(text, Tree)


def serialize_network(net: Network) -> str:
    """Extended Newick text in stored child order.

    Hybrid ids follow first-visit order; the first visit of a reticulation
    carries its subtree and later visits are bare '#H<id>' tags.
    """
    if net.root is None:
        raise ValueError("Cannot serialize a network without a root")
    hybrid_ids: Dict[int, int] = {}
    out: List[str] = []
    stack: List[Tuple[bool, Union[int, str]]] = [(False, net.root)]
    while stack:
        is_text, item = stack.pop()
        if is_text:
            out.append(item)
            continue
        v = item
        if v in hybrid_ids:
            out.append(f"#H{hybrid_ids[v]}")
            continue
        suffix = ""
        if net.is_reticulation(v):
            hybrid_ids[v] = len(hybrid_ids) + 1
            suffix = f"#H{hybrid_ids[v]}"
        children = net.children(v)
        if not children:
            out.append((net.label(v) or "") + suffix)
            continue
        stack.append((True, ")" + suffix))
        for i in range(len(children) - 1, -1, -1):
            stack.append((False, children[i]))
            if i > 0:
                stack.append((True, ","))
        stack.append((True, "("))
    return "".join(out) + ";"


def decode_text(data: bytes) -> str:
    """Decode UTF-8 input; undecodable bytes are parse errors at their offset"""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise NewickParseError([ParseDiagnostics(
            position=e.start, message=f"invalid UTF-8 byte 0x{data[e.start]:02x}")]) from None


def read_text(source: Union[str, Path]) -> str:
    """Read a UTF-8 file, or stdin when source is '-'"""
    if str(source) == "-":
        buffer = getattr(sys.stdin, "buffer", None)
        return decode_text(buffer.read()) if buffer is not None else sys.stdin.read()
    return decode_text(Path(source).read_bytes())


def read_network(source: Union[str, Path]) -> Network:
    return parse_network(read_text(source))


def read_tree(source: Union[str, Path]) -> Tree:
    return parse_tree(read_text(source))


def write_network(net: Network, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_network(net) + "\n", encoding="utf-8")
    return path
