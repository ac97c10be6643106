"""Generic submanifolds, complex tangent spaces, CR dimension, tangent cones
and real transversality.

Real vectors of C^n are written in coordinates (x_1..x_n, y_1..y_n) with
z_l = x_l + i y_l.
"""

from fractions import Fraction

from .algebra.gaussrat import GaussRat
from .algebra.linalg import nullspace, rank
from .algebra.poly import Poly, VarContext, initial_form, realify
from .errors import (DegeneratePointError, DimensionError, DomainError, NotASubmanifoldError,
                     OffManifoldError, UndefinedInputError)

_Z = GaussRat(0)
_O = GaussRat(1)


def _pt(point, n):
    point = [GaussRat.coerce(c) for c in point]
    if len(point) != n:
        raise DimensionError(f"point has {len(point)} coordinates, expected {n}")
    return point


def holo_gradient(f, p):
    return [f.diff(l).evaluate(p) for l in range(f.n)]


def antiholo_gradient(f, p):
    return [f.diff(l, barred=True).evaluate(p) for l in range(f.n)]


def real_differential_rows(f, p):
    """Two real rows (Re df, Im df) acting on (x, y) coordinates.

    With a = df/dz and b = df/dconj(z) at p, df(v) = a.v + b.conj(v)
    = sum (a_l + b_l) x_l + i (a_l - b_l) y_l.
    """
    a = holo_gradient(f, p)
    b = antiholo_gradient(f, p)
    s = [x + y for x, y in zip(a, b)]
    d = [x - y for x, y in zip(a, b)]
    re_row = [c.re for c in s] + [-c.im for c in d]
    im_row = [c.im for c in s] + [c.re for c in d]
    return re_row, im_row


def real_rows_of_real_function(r, p):
    """For real-valued r only the real row is meaningful."""
    return real_differential_rows(r, p)[0]


def complex_to_real(v):
    return [c.re for c in v] + [c.im for c in v]


class ComplexSubspace:
    """Complex-linear subspace of C^n given by a basis of GaussRat vectors."""

    __slots__ = ("n", "basis")

    def __init__(self, n, basis):
        basis = [[GaussRat.coerce(c) for c in v] for v in basis]
        for v in basis:
            if len(v) != n:
                raise DimensionError("basis vector has the wrong length")
        if basis and rank(basis) != len(basis):
            raise DomainError("basis vectors are linearly dependent")
        self.n = n
        self.basis = basis

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, v):
        v = [GaussRat.coerce(c) for c in v]
        return rank(self.basis + [v]) == self.dim if self.basis else not any(v)

    def real_basis(self):
        out = []
        for v in self.basis:
            out.append(complex_to_real(v))
            out.append(complex_to_real([c * GaussRat(0, 1) for c in v]))
        return out

    def equals(self, other):
        return self.n == other.n and self.dim == other.dim and all(other.contains(v) for v in self.basis)

    def transformed(self, t):
        """Image under the linear map with matrix t (rows of GaussRat)."""
        return ComplexSubspace(self.n, [[sum((row[j] * v[j] for j in range(self.n)), _Z) for row in t]
                                        for v in self.basis])

    def as_strings(self):
        return [[str(c) for c in v] for v in self.basis]

    def __repr__(self):
        return f"ComplexSubspace(dim={self.dim}, basis={self.as_strings()})"


class GenericSubmanifold:
    """N = {r_1 = ... = r_k = 0} in C^n with real polynomials r_j, generic at base_point."""

    def __init__(self, ctx, real_eqs, base_point=None, check=True):
        self.ctx = ctx
        self.real_eqs = list(real_eqs)
        self.base_point = _pt(base_point if base_point is not None else [0] * ctx.n, ctx.n)
        if check:
            for j, r in enumerate(self.real_eqs):
                if not r.is_real():
                    raise DomainError(f"defining function {j + 1} is not real-valued")
            check_on(self.real_eqs, self.base_point)
            if real_rank(self.real_eqs, self.base_point) != self.k:
                raise NotASubmanifoldError("defining differentials are dependent at the base point")
            if not self.is_generic_at(self.base_point):
                raise DegeneratePointError("submanifold is not generic at the base point")

    @classmethod
    def from_equations(cls, ctx, polys, real_flags=None, base_point=None):
        """Complex equations contribute Re and Im; real variables contribute Im v = 0."""
        real_idx = ctx.real_indices()
        real_flags = real_flags or [False] * len(polys)
        eqs = []
        for p, is_real in zip(polys, real_flags):
            p = realify(p, real_idx)
            if is_real:
                eqs.append(p)
            else:
                if p.is_real() and not p.is_zero():
                    raise NotASubmanifoldError(
                        f"equation {p} is real-valued; flag it as a real equation",
                        code="real-equation-unflagged")
                eqs.append((p + p.conj()) * Fraction(1, 2))
                eqs.append((p - p.conj()) * GaussRat(0, Fraction(-1, 2)))
        for v in sorted(real_idx):
            z = Poly.var(ctx, v)
            eqs.append((z - z.conj()) * GaussRat(0, Fraction(-1, 2)))
        return cls(ctx, eqs, base_point)

    @property
    def n(self):
        return self.ctx.n

    @property
    def k(self):
        return len(self.real_eqs)

    @property
    def real_dim(self):
        return 2 * self.n - self.k

    @property
    def cr_dim(self):
        return self.n - self.k

    def contains(self, p):
        p = _pt(p, self.n)
        return all(r.evaluate(p) == 0 for r in self.real_eqs)

    def complex_gradients(self, p):
        return [holo_gradient(r, p) for r in self.real_eqs]

    def is_generic_at(self, p):
        rows = self.complex_gradients(_pt(p, self.n))
        return not rows or rank(rows) == self.k

    def real_tangent_basis(self, p=None):
        p = self.base_point if p is None else _pt(p, self.n)
        rows = [real_rows_of_real_function(r, p) for r in self.real_eqs]
        return nullspace(rows, 2 * self.n, Fraction(0), Fraction(1))

    def transported(self, t, t_inv):
        """The image T(N) for an invertible complex matrix t with inverse t_inv."""
        ctx = self.ctx
        zs = [Poly.var(ctx, i) for i in range(self.n)]
        pre = [sum((zs[j] * t_inv[i][j] for j in range(self.n)), Poly(ctx)) for i in range(self.n)]
        eqs = [r.substitute(ctx, pre) for r in self.real_eqs]
        base = [sum((t[i][j] * self.base_point[j] for j in range(self.n)), _Z) for i in range(self.n)]
        return GenericSubmanifold(ctx, eqs, base)

    def describe(self):
        return {"n": self.n, "codimension": self.k, "cr_dimension": self.cr_dim,
                "equations": [str(r) for r in self.real_eqs],
                "base_point": [str(c) for c in self.base_point]}


def check_on(eqs, p):
    for j, r in enumerate(eqs):
        v = r.evaluate(p)
        if v != 0:
            raise OffManifoldError(f"equation {j + 1} does not vanish at the point (value {v})")


def real_rank(real_eqs, p):
    if not real_eqs:
        return 0
    return rank([real_rows_of_real_function(r, p) for r in real_eqs])


def complex_tangent(N, p=None):
    """H_pN = {v : sum_l dr_j/dz_l(p) v_l = 0 for all j}."""
    p = N.base_point if p is None else _pt(p, N.n)
    check_on(N.real_eqs, p)
    if not N.is_generic_at(p):
        raise DegeneratePointError("genericity fails at the point")
    rows = N.complex_gradients(p)
    return ComplexSubspace(N.n, nullspace(rows, N.n, _Z, _O))


def cr_dimension_at(eqs, p, ctx=None):
    """dim_C T^{0,1}_p M = n - rank_C [d r_j / d conj(z_l)(p)] for real defining functions r_j."""
    eqs = list(eqs)
    if not eqs:
        if ctx is None:
            raise DimensionError("need a context when there are no equations")
        return ctx.n
    n = eqs[0].n
    p = _pt(p, n)
    for r in eqs:
        if not r.is_real():
            raise DomainError("defining functions must be real-valued")
    check_on(eqs, p)
    if real_rank(eqs, p) != len(eqs):
        raise NotASubmanifoldError("defining differentials are dependent at the point")
    rows = [antiholo_gradient(r, p) for r in eqs]
    return n - rank(rows)


def graph_equations(rho, wname="w"):
    """Real defining functions of M = {w = rho(z, conj z)} in C^{n+1}.

    Returns (extended context, [Re(w - rho), Im(w - rho)]).
    """
    names = rho.ctx.names
    while wname in names:
        wname = wname + "0"
    ext = VarContext(names + (wname,))
    zs = [Poly.var(ext, i) for i in range(len(names))]
    lifted = rho.substitute(ext, zs)
    e = Poly.var(ext, wname) - lifted
    return ext, [(e + e.conj()) * Fraction(1, 2), (e - e.conj()) * GaussRat(0, Fraction(-1, 2))]


def graph_point(rho, z):
    z = [GaussRat.coerce(c) for c in z]
    return z + [rho.evaluate(z)]


def tangent_cone_contains(phi, p, V):
    """True iff the initial form of phi at p vanishes identically on V."""
    if phi.is_zero():
        raise UndefinedInputError("tangent cone of the zero function is undefined", code="undefined-cone")
    p = _pt(p, phi.n)
    if phi.evaluate(p) != 0:
        raise DomainError("function does not vanish at the point")
    if V.n != phi.n:
        raise DimensionError("subspace and function live in different dimensions")
    f = initial_form(phi, p)
    if V.dim == 0:
        return True
    params = VarContext([f"s{i + 1}" for i in range(V.dim)])
    s = [Poly.var(params, i) for i in range(V.dim)]
    images = [sum((s[i] * V.basis[i][l] for i in range(V.dim)), Poly(params)) for l in range(phi.n)]
    return f.substitute(params, images).is_zero()


def real_tangent_of_zero_set(Z_eqs, p):
    """Real tangent basis of {Z_eqs = 0}; raises unless the real Jacobian has full rank 2*nu."""
    rows = []
    for f in Z_eqs:
        rows.extend(real_differential_rows(f, p))
    n = Z_eqs[0].n
    if rows and rank(rows) != len(rows):
        raise NotASubmanifoldError(f"Jacobian of the {len(Z_eqs)} functions is rank deficient at the point")
    return nullspace(rows, 2 * n, Fraction(0), Fraction(1))


def real_transverse(Z_eqs, N, p=None):
    """True iff T_pZ + T_pN = T_pC^n as real vector spaces (stacked real rank 2n)."""
    Z_eqs = list(Z_eqs)
    p = N.base_point if p is None else _pt(p, N.n)
    check_on(N.real_eqs, p)
    if not Z_eqs:
        return True
    for j, f in enumerate(Z_eqs):
        if f.evaluate(p) != 0:
            raise OffManifoldError(f"function {j + 1} does not vanish at the point")
    tz = real_tangent_of_zero_set(Z_eqs, p)
    tn = N.real_tangent_basis(p)
    stacked = tz + tn
    return bool(stacked) and rank(stacked) == 2 * N.n


def map_restricted_rank(F_components, N, p=None):
    """Real rank of DF(p) restricted to T_pN (F holomorphic)."""
    p = N.base_point if p is None else _pt(p, N.n)
    n = N.n
    jac = [[f.diff(l).evaluate(p) for l in range(n)] for f in F_components]
    images = []
    for v in N.real_tangent_basis(p):
        cv = [GaussRat(v[l], v[l + n]) for l in range(n)]
        w = [sum((row[l] * cv[l] for l in range(n)), _Z) for row in jac]
        images.append(complex_to_real(w))
    return rank(images) if images else 0
