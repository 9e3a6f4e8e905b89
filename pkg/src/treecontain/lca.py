"""Constant-time lowest common ancestor queries on a fixed tree.

Euler tour plus a sparse table over tour depths. Preprocessing is
O(n log n) (the sparse table), queries are O(1). Ancestor tests use the
entry/exit numbers of the same traversal.
"""

from typing import Dict, List

import numpy as np

from .network import Network, StaleVertexError


class LcaIndexError(ValueError):
    """Raised when an index cannot be built for the given structure"""


def _ilog2(value: int) -> int:
    return value.bit_length() - 1


class LcaIndex:
    """LCA / ancestor index built against one immutable tree snapshot"""

    __slots__ = ("euler", "depths", "first", "entry", "exit", "_table", "root")

    def __init__(self, euler: List[int], depths: List[int], first: Dict[int, int],
                 entry: Dict[int, int], exit_: Dict[int, int]):
        self.euler = euler
        self.depths = depths
        self.first = first
        self.entry = entry
        self.exit = exit_
        self.root = euler[0]
        self._table = self._sparse_table(np.asarray(depths, dtype=np.int64))

    @classmethod
    def build(cls, tree: Network) -> "LcaIndex":
        if tree.root is None:
            raise LcaIndexError("tree has no root")
        if tree.num_reticulations:
            raise LcaIndexError("cannot index a network with reticulations")
        euler: List[int] = []
        depths: List[int] = []
        first: Dict[int, int] = {}
        entry: Dict[int, int] = {}
        exit_: Dict[int, int] = {}
        clock = 0
        # frames: (vertex, depth, next child position)
        stack = [(tree.root, 0, 0)]
        while stack:
            v, depth, pos = stack.pop()
            if pos == 0:
                first[v] = len(euler)
                entry[v] = clock
                clock += 1
            euler.append(v)
            depths.append(depth)
            children = tree.children(v)
            if pos < len(children):
                stack.append((v, depth, pos + 1))
                stack.append((children[pos], depth + 1, 0))
            else:
                exit_[v] = clock
        return cls(euler, depths, first, entry, exit_)

    @staticmethod
    def _sparse_table(depths: np.ndarray) -> List[List[int]]:
        # level j holds the argmin of depths over [i, i + 2**j)
        m = len(depths)
        levels = [np.arange(m, dtype=np.int64)]
        for j in range(1, _ilog2(m) + 1):
            half = 1 << (j - 1)
            prev = levels[-1]
            left = prev[: m - (1 << j) + 1]
            right = prev[half: half + len(left)]
            levels.append(np.where(depths[left] <= depths[right], left, right))
        return [level.tolist() for level in levels]

    def _position(self, v: int) -> int:
        try:
            return self.first[v]
        except KeyError:
            raise StaleVertexError(v) from None

    def lca(self, u: int, v: int) -> int:
        lo = self._position(u)
        hi = self._position(v)
        if lo > hi:
            lo, hi = hi, lo
        j = _ilog2(hi - lo + 1)
        left = self._table[j][lo]
        right = self._table[j][hi - (1 << j) + 1]
        return self.euler[left] if self.depths[left] <= self.depths[right] else self.euler[right]

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff u <= v (v is an ancestor-or-self of u)"""
        try:
            return self.entry[v] <= self.entry[u] and self.exit[u] <= self.exit[v]
        except KeyError as e:
            raise StaleVertexError(e.args[0]) from None

    def depth(self, v: int) -> int:
        return self.depths[self._position(v)]

    def __len__(self) -> int:
        return len(self.entry)


def build(tree: Network) -> LcaIndex:
    return LcaIndex.build(tree)


def lca(idx: LcaIndex, u: int, v: int) -> int:
    return idx.lca(u, v)


def is_ancestor(idx: LcaIndex, u: int, v: int) -> bool:
    return idx.is_ancestor(u, v)
