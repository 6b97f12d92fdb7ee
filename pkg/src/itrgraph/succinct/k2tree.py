"""k²-ary tree encoding of sparse boolean matrices with cell and line queries."""

from __future__ import annotations

import numpy as np

from . import delta
from .bits import BitReader, BitSequence, BitWriter


class K2Tree:
    """Quadtree-style bitmap of a boolean matrix padded to a k^h square.

    Internal levels live in `tree` (one k*k block per nonzero parent, level
    order); the deepest level lives in `leaves`. All-zero subtrees cost a
    single 0 bit.
    """

    __slots__ = ("k", "rows", "cols", "height", "side", "tree", "leaves")

    def __init__(self, k: int, rows: int, cols: int, tree: BitSequence, leaves: BitSequence):
        self.k = k
        self.rows = rows
        self.cols = cols
        self.height, self.side = self._geometry(k, rows, cols)
        self.tree = tree
        self.leaves = leaves

    @staticmethod
    def _geometry(k: int, rows: int, cols: int) -> tuple[int, int]:
        need = max(rows, cols, 1)
        height, side = 1, k
        while side < need:
            height += 1
            side *= k
        return height, side

    @classmethod
    def build(cls, points, rows: int, cols: int, k: int = 2) -> "K2Tree":
        if k < 2:
            raise ValueError("k must be at least 2")
        height, side = cls._geometry(k, rows, cols)
        kk = k * k
        pts = np.asarray(sorted(set(points)), dtype=np.int64).reshape(-1, 2)
        if len(pts) and (
            pts[:, 0].min() < 0
            or pts[:, 1].min() < 0
            or pts[:, 0].max() >= rows
            or pts[:, 1].max() >= cols
        ):
            raise ValueError("point out of bounds")
        r, c = pts[:, 0], pts[:, 1]
        codes = np.zeros(len(pts), dtype=np.int64)
        div = side // k
        for _ in range(height):
            codes = codes * kk + ((r // div) % k) * k + ((c // div) % k)
            div //= k
        codes = np.unique(codes)

        level_bits: list[np.ndarray] = []
        cur = codes
        for _ in range(height):
            if cur.size == 0:
                parents = np.zeros(1 if len(level_bits) == height - 1 else 0, dtype=np.int64)
                bits = np.zeros(len(parents) * kk, dtype=np.uint8)
            else:
                parents = np.unique(cur // kk)
                bits = np.zeros(len(parents) * kk, dtype=np.uint8)
                idx = np.searchsorted(parents, cur // kk)
                bits[idx * kk + cur % kk] = 1
            level_bits.append(bits)
            cur = parents
        level_bits.reverse()  # built deepest-first; store level 1 first
        if level_bits[0].size == 0:  # empty matrix still gets an explicit root block
            level_bits[0] = np.zeros(kk, dtype=np.uint8)

        tree_arr = (
            np.concatenate(level_bits[:-1]) if height > 1 else np.zeros(0, dtype=np.uint8)
        )
        leaf_arr = level_bits[-1]
        tree = BitSequence(np.packbits(tree_arr).tobytes() if tree_arr.size else b"", len(tree_arr))
        leaves = BitSequence(np.packbits(leaf_arr).tobytes() if leaf_arr.size else b"", len(leaf_arr))
        return cls(k, rows, cols, tree, leaves)

    def _bit(self, pos: int) -> int:
        t = len(self.tree)
        return self.tree[pos] if pos < t else self.leaves[pos - t]

    @property
    def ones(self) -> int:
        return self.leaves.ones

    def cell(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError("cell out of bounds")
        k = self.k
        size = self.side // k
        base = 0
        while True:
            pos = base + (r // size) * k + (c // size)
            if not self._bit(pos):
                return 0
            if size == 1:
                return 1
            base = self.tree.rank1(pos + 1) * k * k
            r %= size
            c %= size
            size //= k

    def row_ones(self, r: int) -> list[int]:
        """Sorted column indices with a 1 in row r."""
        if not 0 <= r < self.rows:
            raise IndexError("row out of bounds")
        return self._line(r, transpose=False)

    def col_ones(self, c: int) -> list[int]:
        """Sorted row indices with a 1 in column c."""
        if not 0 <= c < self.cols:
            raise IndexError("column out of bounds")
        return self._line(c, transpose=True)

    def _line(self, fixed: int, transpose: bool) -> list[int]:
        k = self.k
        kk = k * k
        tree = self.tree
        out: list[int] = []
        # (base, fixed offset, output base, child cell size)
        stack = [(0, fixed, 0, self.side // k)]
        while stack:
            base, off, out0, size = stack.pop()
            block = off // size
            if size == 1:
                for j in range(k):
                    pos = base + (j * k + block if transpose else block * k + j)
                    if self._bit(pos):
                        out.append(out0 + j)
            else:
                for j in range(k - 1, -1, -1):
                    pos = base + (j * k + block if transpose else block * k + j)
                    if pos < len(tree) and tree[pos]:
                        stack.append(
                            (tree.rank1(pos + 1) * kk, off % size, out0 + j * size, size // k)
                        )
        return out

    def write_to(self, w: BitWriter) -> None:
        delta.write_value(w, self.rows)
        delta.write_value(w, self.cols)
        delta.write_value(w, self.k)
        delta.write_value(w, len(self.tree))
        delta.write_value(w, len(self.leaves))
        w.align()
        self.tree.write_to(w)
        w.align()
        self.leaves.write_to(w)

    @classmethod
    def read_from(cls, r: BitReader) -> "K2Tree":
        rows = delta.read_value(r)
        cols = delta.read_value(r)
        k = delta.read_value(r)
        tree_len = delta.read_value(r)
        leaf_len = delta.read_value(r)
        r.align()
        tree = BitSequence.read_from(r, tree_len)
        r.align()
        leaves = BitSequence.read_from(r, leaf_len)
        return cls(k, rows, cols, tree, leaves)
