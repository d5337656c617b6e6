"""Sparse echelon forms over Scalar.

Vectors are dicts column -> Scalar.  Columns are compared through a caller
supplied sort key, and every stored row has its pivot at its smallest column.
"""
from __future__ import annotations

from .scalarfield import ONE, Scalar


def axpy(y: dict, a: Scalar, x: dict) -> None:
    """y += a * x in place, dropping zeros."""
    for c, v in x.items():
        w = y.get(c)
        w = a * v if w is None else w + a * v
        if w.is_zero():
            y.pop(c, None)
        else:
            y[c] = w


def scaled(a: Scalar, x: dict) -> dict:
    return {c: a * v for c, v in x.items()} if not a.is_zero() else {}


class Echelon:
    """Row echelon form with pivots on the smallest column.

    Each row optionally carries a tag vector recording which inserted vectors
    it is built from, so that membership queries can return coefficients.
    """

    def __init__(self, key=None, track: bool = False):
        self.key = key or (lambda c: c)
        self.track = track
        self.rows: dict = {}  # pivot -> (row, tag)

    def __len__(self):
        return len(self.rows)

    def _reduce(self, vec: dict, tag: dict | None):
        vec = dict(vec)
        tag = dict(tag) if tag is not None else None
        while True:
            hits = [c for c in vec if c in self.rows]
            if not hits:
                return vec, tag
            c = min(hits, key=self.key)
            row, rtag = self.rows[c]
            f = -vec[c]
            axpy(vec, f, row)
            if tag is not None:
                axpy(tag, f, rtag)

    def add(self, vec: dict, label=None) -> bool:
        """Insert a vector; returns False when it is already in the span."""
        tag = {label: ONE} if self.track else None
        vec, tag = self._reduce(vec, tag)
        if not vec:
            return False
        p = min(vec, key=self.key)
        inv = vec[p].inverse()
        vec = scaled(inv, vec)
        if tag is not None:
            tag = scaled(inv, tag)
        self.rows[p] = (vec, tag)
        return True

    def reduce(self, vec: dict) -> dict:
        return self._reduce(vec, None)[0]

    def express(self, vec: dict) -> dict:
        """Coefficients c_label with vec = sum c_label * inserted[label]."""
        if not self.track:
            raise ValueError("express needs a tracking echelon")
        vec, tag = self._reduce(vec, {})
        if vec:
            raise ArithmeticError("vector is not in the span")
        return {k: -v for k, v in tag.items()}

    def pivots(self) -> list:
        return sorted(self.rows, key=self.key)

    def pivot_expansion(self) -> dict:
        """For each pivot column p, p expressed through non-pivot columns (modulo the rows)."""
        out: dict = {}
        for p in sorted(self.rows, key=self.key, reverse=True):
            row, _ = self.rows[p]
            vec: dict = {}
            for c, v in row.items():
                if c == p:
                    continue
                if c in out:
                    axpy(vec, -v, out[c])
                else:
                    axpy(vec, -v, {c: ONE})
            out[p] = vec
        return out


def solve_in_basis(columns: dict, target: dict) -> dict:
    """Unique coefficients x with sum x_k columns[k] = target; columns must be independent."""
    ech = Echelon(track=True, key=_safe_key)
    for k, col in columns.items():
        if not ech.add(col, k):
            raise ArithmeticError(f"basis vectors are dependent at {k!r}")
    return ech.express(target)


def _safe_key(c):
    return repr(c)
