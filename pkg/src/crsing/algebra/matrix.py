"""Matrices of polynomials, their minors and generic rank."""

import random
from fractions import Fraction
from itertools import combinations

from ..errors import ContextError, DimensionError
from .gaussrat import GaussRat
from .linalg import rank as exact_rank
from .poly import Poly


class PolyMatrix:
    __slots__ = ("rows", "cols", "entries", "ctx")

    def __init__(self, rows, cols, entries, ctx=None):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries, got {len(entries)}")
        if ctx is None:
            if not entries:
                raise ContextError("empty matrix needs an explicit context")
            ctx = entries[0].ctx
        self.rows, self.cols, self.ctx = rows, cols, ctx
        self.entries = [e if isinstance(e, Poly) else Poly.constant(ctx, e) for e in entries]

    @classmethod
    def from_rows(cls, rows, ctx=None):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, [e for r in rows for e in r], ctx)

    @classmethod
    def identity(cls, ctx, n):
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)], ctx)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def as_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, row_idx, col_idx):
        return PolyMatrix(len(row_idx), len(col_idx),
                          [self[i, j] for i in row_idx for j in col_idx], self.ctx)

    def evaluate(self, point):
        """Exact matrix of GaussRat values at a point of C^n."""
        return [[e.evaluate(point) for e in self.row(i)] for i in range(self.rows)]

    def evaluate_numeric(self, zvals):
        import numpy as np
        out = np.empty((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = complex(self[i, j].lambdify()(zvals))
        return out

    def __str__(self):
        return "\n".join("[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows))

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"


def jacobian(polys, ctx=None):
    """Holomorphic Jacobian [d f_i / d z_j] of a list of polynomials."""
    polys = list(polys)
    if ctx is None:
        ctx = polys[0].ctx
    return PolyMatrix(len(polys), ctx.n, [f.diff(j) for f in polys for j in range(ctx.n)], ctx)


def determinant(m):
    if m.rows != m.cols:
        raise DimensionError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return Poly.constant(m.ctx, 1)
    memo = {}

    # expand along rows in order; key is the frozenset of columns still free
    def det(row, cols):
        if row == n:
            return Poly.constant(m.ctx, 1)
        key = cols
        if key in memo:
            return memo[key]
        total = Poly(m.ctx)
        for pos, c in enumerate(cols):
            e = m[row, c]
            if e.is_zero():
                continue
            sub = det(row + 1, cols[:pos] + cols[pos + 1:])
            term = e * sub
            total = total - term if pos % 2 else total + term
        memo[key] = total
        return total

    return det(0, tuple(range(n)))


def minors(m, s):
    """All s x s minors, row subsets outermost, both in lexicographic order."""
    if not 1 <= s <= min(m.rows, m.cols):
        raise DimensionError(f"minor size {s} out of range for a {m.rows}x{m.cols} matrix")
    out = []
    for rows in combinations(range(m.rows), s):
        for cols in combinations(range(m.cols), s):
            out.append(determinant(m.submatrix(rows, cols)))
    return out


def minor_labels(m, s):
    """(row subset, column subset) pairs in the same order as ``minors``."""
    return [(r, c) for r in combinations(range(m.rows), s) for c in combinations(range(m.cols), s)]


def numeric_rank_at(m, point):
    return exact_rank(m.evaluate(point))


def _random_point(rng, n):
    return [GaussRat(Fraction(rng.randint(-9, 9), rng.randint(1, 7)),
                     Fraction(rng.randint(-9, 9), rng.randint(1, 7))) for _ in range(n)]


def generic_rank(m, seed=0, samples=3):
    """Rank over the field of fractions of the entries.

    Exact ranks at random rational points give a lower bound; the symbolic
    minors of the next sizes confirm that nothing larger is attained.
    """
    top = min(m.rows, m.cols)
    if top == 0:
        return 0
    rng = random.Random(seed)
    r = 0
    for _ in range(samples):
        r = max(r, exact_rank(m.evaluate(_random_point(rng, m.ctx.n))))
        if r == top:
            return r
    s = r + 1
    while s <= top:
        if not any(not d.is_zero() for d in minors(m, s)):
            break
        r = s
        s += 1
    return r
