"""Quadratic invariants of codimension-2 graphs w = rho(z, conj z) and the
removability analysis of their CR singularities."""

from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from fractions import Fraction
from math import isqrt

from .algebra.division import divide_exact, series_divide
from .algebra.gaussrat import GaussRat
from .algebra.linalg import nullspace, rank
from .algebra.poly import Poly, VarContext
from .errors import DimensionError, DomainError, HypothesisError
from .geometry import GenericSubmanifold, map_restricted_rank
from .images import HoloMap

_Z = GaussRat(0)
_O = GaussRat(1)
_HALF = Fraction(1, 2)


def _zeros(n):
    return [[_Z] * n for _ in range(n)]


def conj_transpose(M):
    n = len(M)
    return [[M[j][i].conjugate() for j in range(n)] for i in range(len(M[0]))] if M else []


def transpose(M):
    return [list(r) for r in zip(*M)]


def matmul(X, Y):
    return [[sum((X[i][t] * Y[t][j] for t in range(len(Y))), _Z) for j in range(len(Y[0]))]
            for i in range(len(X))]


def _coerce_matrix(M):
    return [[GaussRat.coerce(c) for c in row] for row in M]


@dataclass
class QuadraticModel:
    """rho = z* A z + conj(z^t B z) + z^t C z + E."""

    n: int
    A: list
    B: list
    C: list
    E: Poly = None

    def quadratic_poly(self, ctx):
        z = [Poly.var(ctx, j) for j in range(self.n)]
        zb = [v.conj() for v in z]
        q = Poly(ctx)
        for j in range(self.n):
            for k in range(self.n):
                q = q + zb[j] * z[k] * self.A[j][k]
                q = q + zb[j] * zb[k] * self.B[j][k].conjugate()
                q = q + z[j] * z[k] * self.C[j][k]
        return q


def _unit_exps(n, pairs):
    e = [0] * (2 * n)
    for idx in pairs:
        e[idx] += 1
    return tuple(e)


def extract_quadratic(rho, n=None):
    """Read A, B, C off the bidegree (1,1), (0,2), (2,0) parts of rho."""
    n = rho.n if n is None else n
    if n != rho.n:
        raise DimensionError(f"rho has {rho.n} variables, expected {n}")
    if rho.constant_term() != 0 or not rho.homogeneous_part(1).is_zero():
        raise HypothesisError("rho has a constant or linear part", code="not-normalized")
    A, B, C = _zeros(n), _zeros(n), _zeros(n)
    for j in range(n):
        for k in range(n):
            A[j][k] = rho.coefficient(_unit_exps(n, [n + j, k]))
        for k in range(j, n):
            cb = rho.coefficient(_unit_exps(n, [n + j, n + k]))
            cc = rho.coefficient(_unit_exps(n, [j, k]))
            if j == k:
                B[j][j] = cb.conjugate()
                C[j][j] = cc
            else:
                B[j][k] = B[k][j] = cb.conjugate() * _HALF
                C[j][k] = C[k][j] = cc * _HALF
    model = QuadraticModel(n, A, B, C)
    model.E = rho - rho.homogeneous_part(2)
    return model


def cr_image_obstruction(A, B):
    """True iff rank [A*; B] <= 1 (the necessary condition for a CR image)."""
    A, B = _coerce_matrix(A), _coerce_matrix(B)
    if len(A) != len(B) or any(len(r) != len(A) for r in A + B):
        raise DimensionError("A and B must be square of the same size")
    return rank(conj_transpose(A) + B) <= 1


@dataclass(frozen=True)
class QuadClass:
    tag: str                    # Type1..Type5 | NotCRImageCandidate
    a2: Fraction = None         # Type3 only: a^2 as an exact rational
    data: tuple = ()

    @property
    def a_exact(self):
        if self.a2 is None:
            return None
        p, q = self.a2.numerator, self.a2.denominator
        rp, rq = isqrt(p), isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
        return None

    def a_decimal(self, digits=30):
        if self.a2 is None:
            return None
        exact = self.a_exact
        if exact is not None:
            return _rat(exact)
        getcontext().prec = digits + 5
        v = (Decimal(self.a2.numerator) / Decimal(self.a2.denominator)).sqrt()
        return format(v.quantize(Decimal(1).scaleb(-digits)), "f")

    def label(self):
        if self.tag == "Type3":
            return f"Type3(a = {self.a_decimal(12)})"
        return self.tag


def _rat(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def classify(A, B):
    """Normal-form class of the quadric from A and B (C is holomorphic and irrelevant).

    With rank [A*; B] = 1 and r a row spanning it, A* = x r^t and B = beta r r^t.
    In the coordinate l = r^t z, rho is conj(l) (conj(x)^t z) + conj(beta) conj(l)^2
    up to holomorphic terms, which sorts the cases.
    """
    A, B = _coerce_matrix(A), _coerce_matrix(B)
    n = len(A)
    As = conj_transpose(A)
    stack = As + B
    rk = rank(stack)
    if rk >= 2:
        return QuadClass("NotCRImageCandidate")
    if rk == 0:
        return QuadClass("Type5")
    r = next(row for row in stack if any(row))
    k0 = next(i for i, v in enumerate(r) if v)
    x = [As[j][k0] / r[k0] for j in range(n)]
    beta = B[k0][k0] / (r[k0] * r[k0])
    for j in range(n):
        for k in range(n):
            assert As[j][k] == x[j] * r[k], "A* is not x r^t"
            assert B[j][k] == beta * r[j] * r[k], "B is not beta r r^t"
    if not any(x):
        return QuadClass("Type4")
    xb = [c.conjugate() for c in x]
    if rank([xb, r]) == 2:
        return QuadClass("Type1" if beta else "Type2")
    mu = xb[k0] / r[k0]
    return QuadClass("Type3", beta.abs2() / mu.abs2())


def corresponds_parabolic(A, B):
    """Exist c != 0 and w with cA = w w* and cB = 1/2 conj(w) conj(w)^t.

    Equivalent to: A = kappa v v* for a vector v, B = gamma conj(v) conj(v)^t,
    and |gamma|^2 = |kappa|^2 / 4.
    """
    A, B = _coerce_matrix(A), _coerce_matrix(B)
    n = len(A)
    if rank(A) != 1:
        return False
    c0 = next(k for k in range(n) if any(A[j][k] for j in range(n)))
    v = [A[j][c0] for j in range(n)]
    if not v[c0]:
        return False
    kappa = _O / v[c0].conjugate()
    for j in range(n):
        for k in range(n):
            if A[j][k] != kappa * v[j] * v[k].conjugate():
                return False
    vb = [c.conjugate() for c in v]
    gamma = B[c0][c0] / (vb[c0] * vb[c0])
    for j in range(n):
        for k in range(n):
            if B[j][k] != gamma * vb[j] * vb[k]:
                return False
    return gamma.abs2() * 4 == kappa.abs2()


def transport(A, B, T, c=1):
    """Coordinates z -> T z and w -> c w: (A, B) -> (c T* A T, conj(c) T^t B T)."""
    A, B, T = _coerce_matrix(A), _coerce_matrix(B), _coerce_matrix(T)
    c = GaussRat.coerce(c)
    A2 = matmul(matmul(conj_transpose(T), A), T)
    B2 = matmul(matmul(transpose(T), B), T)
    return ([[c * v for v in row] for row in A2], [[c.conjugate() * v for v in row] for row in B2])


# ---------------------------------------------------------------------------
# model quadrics and realization

TYPES = ("Type1", "Type2", "Type3", "Type4", "Type5")


def model_quadric(ctx, qtype, a=Fraction(0)):
    """Q for the five normal forms, in the first two variables of ctx."""
    z1 = Poly.var(ctx, 0)
    z2 = Poly.var(ctx, 1)
    if qtype == "Type1":
        return z1.conj() * z2 + z1.conj() ** 2
    if qtype == "Type2":
        return z1.conj() * z2
    if qtype == "Type3":
        return z1 * z1.conj() + z1.conj() ** 2 * GaussRat.coerce(a)
    if qtype == "Type4":
        return z1.conj() ** 2
    if qtype == "Type5":
        return Poly(ctx)
    raise DomainError(f"unknown quadric type {qtype!r}")


@dataclass
class Realization:
    F: HoloMap
    N: GenericSubmanifold
    image_rho: Poly           # image graph w = rho_M(z, conj z), truncated at degree 3
    restricted_rank: int
    local_diffeo: bool
    notes: list = field(default_factory=list)


def _depends_only_on_real_part(p, idx):
    from .algebra.poly import realify
    return realify(p.identify_real(idx), idx) == p


def realize(rho1, rho2, qtype, a=Fraction(0)):
    """Holomorphic F with F(N) a graph whose quadratic part is the requested model.

    N: Im omega_1 = rho1, Im omega_2 = rho2 in coordinates
    (zeta_1..zeta_{n-1}, omega_1, omega_2); rho_j real, of order >= 2, and
    depending on omega only through Re omega.
    """
    ctxN = rho1.ctx
    if rho2.ctx.names != ctxN.names:
        raise DimensionError("rho1 and rho2 must share a context")
    n = ctxN.n - 1
    if n < 2:
        raise DomainError("need n >= 2 (at least one zeta variable)")
    if qtype not in TYPES:
        raise DomainError(f"unknown quadric type {qtype!r}")
    a = Fraction(a)
    if a < 0:
        raise DomainError("Type3 parameter must be nonnegative")
    iw1, iw2 = n - 1, n
    for j, rho in enumerate((rho1, rho2), start=1):
        if not rho.is_real():
            raise HypothesisError(f"rho{j} is not real-valued", code="not-real")
        if not rho.is_zero() and rho.order() < 2:
            raise HypothesisError(f"rho{j} must vanish to order 2", code="not-normalized")
        if not _depends_only_on_real_part(rho, {iw1, iw2}):
            raise HypothesisError(f"rho{j} depends on Im omega", code="bad-shape")
    # N
    half_i = GaussRat(0, -_HALF)
    eqs = []
    for idx, rho in ((iw1, rho1), (iw2, rho2)):
        w = Poly.var(ctxN, idx)
        eqs.append((w - w.conj()) * half_i - rho)
    N = GenericSubmanifold(ctxN, eqs)
    # F
    ctxM = VarContext([f"z{j}" for j in range(1, n + 1)])
    Q = model_quadric(ctxM, qtype, a)
    zeta = [Poly.var(ctxN, j) for j in range(n - 1)]
    w1, w2 = Poly.var(ctxN, iw1), Poly.var(ctxN, iw2)
    I = GaussRat(0, 1)
    z1_img = w1 + w2 * I
    s_img = w1 - w2 * I
    holo_images = [z1_img] + zeta
    if qtype == "Type5":
        last = s_img ** 3
    else:
        # Q has conj(z1) as its only barred variable
        zbar = [s_img] + [Poly(ctxN)] * (n - 1)
        last = Q.substitute(ctxN, holo_images, zbar)
    F = HoloMap(ctxN, holo_images + [last])
    rr = map_restricted_rank(F.components, N)
    image = _image_graph(rho1, rho2, qtype, Q, ctxM, n)
    notes = ["local diffeomorphism checked by the real rank of DF on T_0N; global injectivity of F on N is not checked"]
    return Realization(F, N, image, rr, rr == N.real_dim, notes)


def _image_graph(rho1, rho2, qtype, Q, ctxM, n, degree=3):
    """rho_M with M: w = rho_M(z, conj z), by fixed-point inversion of the
    coordinates of N, truncated at ``degree``."""
    z = [Poly.var(ctxM, j) for j in range(n)]
    zb = [v.conj() for v in z]
    re1 = (z[0] + zb[0]) * _HALF
    im1 = (z[0] - zb[0]) * GaussRat(0, -_HALF)
    a, b = re1, im1

    def rho_at(rho, a, b):
        holo = [z[j] for j in range(1, n)] + [a, b]
        bar = [zb[j] for j in range(1, n)] + [a, b]
        return rho.substitute(ctxM, holo, bar, truncate=degree)

    for _ in range(degree):
        r1, r2 = rho_at(rho1, a, b), rho_at(rho2, a, b)
        a, b = (re1 + r2).truncate(degree), (im1 - r1).truncate(degree)
    r1, r2 = rho_at(rho1, a, b), rho_at(rho2, a, b)
    I = GaussRat(0, 1)
    s = (a - b * I + r2 + r1 * I).truncate(degree)
    if qtype == "Type5":
        return (s ** 3).truncate(degree)
    return Q.substitute(ctxM, z, [s] + zb[1:], truncate=degree)


# ---------------------------------------------------------------------------
# removability


def _two_vars(rho):
    if rho.n != 2:
        raise DimensionError(f"expected a function of exactly two complex variables, got {rho.n}")


def cr_vector_field(rho):
    """Coefficients of L = rho_{conj z2} d/dconj(z1) - rho_{conj z1} d/dconj(z2)."""
    _two_vars(rho)
    return rho.diff(1, barred=True), -rho.diff(0, barred=True)


@dataclass
class RemovabilityVerdict:
    tag: str                  # Removable | RemovableToOrder | NotRemovable | Unknown
    quotient: Poly = None
    direction: str = None     # "d2/d1": rho_{conj z2} = q rho_{conj z1};  "d1/d2": swapped
    order: int = None
    witness: dict = None
    notes: list = field(default_factory=list)

    def verify(self, rho):
        """Re-check the stored quotient identity by exact multiplication."""
        if self.quotient is None:
            return False
        d1, d2 = rho.diff(0, barred=True), rho.diff(1, barred=True)
        if self.direction == "d2/d1":
            return d2 == self.quotient * d1
        return d1 == self.quotient * d2


def removability_test(rho, order=12):
    _two_vars(rho)
    d1, d2 = rho.diff(0, barred=True), rho.diff(1, barred=True)
    origin = [0, 0]
    notes = ["verdict concerns polynomial or truncated-series quotients at the origin"]
    if d1.is_zero() and d2.is_zero():
        return RemovabilityVerdict("Unknown", notes=notes + ["rho is holomorphic: M is a complex manifold"])
    if d1.evaluate(origin) != 0 or d2.evaluate(origin) != 0:
        notes.append("the origin is a CR point; CR points are removable by definition")
        return RemovabilityVerdict("Removable", notes=notes)
    directions = (("d2/d1", d2, d1), ("d1/d2", d1, d2))
    for label, num, den in directions:
        if den.is_zero():
            continue
        q = divide_exact(num, den)
        if q is not None:
            return RemovabilityVerdict("Removable", q, label, notes=notes)
    obstructions = {}
    for label, num, den in directions:
        if den.is_zero():
            continue
        s = series_divide(num, den, order)
        if not s.obstructed:
            notes.append(f"formal quotient exists through degree {order}; convergence is not decided")
            return RemovabilityVerdict("RemovableToOrder", s.quotient, label, order, notes=notes)
        obstructions[label] = s.degree
    if len(obstructions) == 2:
        return RemovabilityVerdict("NotRemovable", witness=obstructions, notes=notes + [
            "neither quotient exists as a formal power series at the origin"])
    return RemovabilityVerdict("Unknown", witness=obstructions, notes=notes)


@dataclass
class BishopVerdict:
    tag: str                   # NotRemovable | Inapplicable | Unknown
    reason: str = ""
    checks: dict = field(default_factory=dict)


def _linear_real_rows(f):
    """Rows (Re, Im) of the linear part of f, acting on (x1, x2, y1, y2)."""
    from .geometry import real_differential_rows
    return list(real_differential_rows(f, [0] * f.n))


def _restrict_to_real_subspace(f, basis):
    """f on the real span of ``basis`` (real vectors in (x, y) coordinates),
    as a polynomial in real parameters t_i."""
    n = f.n
    params = VarContext([f"t{i + 1}" for i in range(len(basis))], real=[f"t{i + 1}" for i in range(len(basis))])
    t = [Poly.var(params, i) for i in range(len(basis))]
    zs, zbs = [], []
    for l in range(n):
        zl = Poly(params)
        zbl = Poly(params)
        for i, v in enumerate(basis):
            c = GaussRat(v[l], v[l + n])
            zl = zl + t[i] * c
            zbl = zbl + t[i] * c.conjugate()
        zs.append(zl)
        zbs.append(zbl)
    return f.substitute(params, zs, zbs)


def _definite_binary(q, part):
    """Is the real (part='re') or imaginary part of the quadratic q(t1, t2) definite?"""
    get = (lambda c: c.re) if part == "re" else (lambda c: c.im)
    al = get(q.coefficient((2, 0, 0, 0)))
    be = get(q.coefficient((1, 1, 0, 0)))
    ga = get(q.coefficient((0, 2, 0, 0)))
    return be * be - 4 * al * ga < 0


def not_bishop_small_sing(rho):
    """Sufficient test for a non-removable CR singularity at the origin of w = rho in C^3."""
    _two_vars(rho)
    model = extract_quadratic(rho)
    checks = {}
    checks["dbar_Q_nonzero"] = any(any(r) for r in model.A) or any(any(r) for r in model.B)
    if not checks["dbar_Q_nonzero"]:
        return BishopVerdict("Inapplicable", "dbar Q vanishes identically", checks)
    checks["parabolic"] = corresponds_parabolic(model.A, model.B)
    if checks["parabolic"]:
        return BishopVerdict("Inapplicable", "Q corresponds to a parabolic Bishop surface", checks)
    d1, d2 = rho.diff(0, barred=True), rho.diff(1, barred=True)
    rows = _linear_real_rows(d1) + _linear_real_rows(d2)
    r = rank(rows)
    checks["linear_real_rank"] = r
    if r >= 3:
        checks["small_singular_set"] = True
        return BishopVerdict("NotRemovable", "all hypotheses hold", checks)
    K = nullspace(rows, 4, Fraction(0), Fraction(1))
    on_K = [_restrict_to_real_subspace(f, K) for f in (d1, d2)]
    if all(g.is_zero() for g in on_K):
        checks["small_singular_set"] = False
        return BishopVerdict("Inapplicable", f"singular set too large (contains a real {len(K)}-plane)",
                             checks)
    if r == 2:
        for f, g in zip((d1, d2), on_K):
            if f.homogeneous_part(1).is_zero() and not f.is_zero():
                q = g.homogeneous_part(2)
                if _definite_binary(q, "re") or _definite_binary(q, "im"):
                    checks["small_singular_set"] = True
                    checks["isolated_by_quadratic_term"] = True
                    return BishopVerdict("NotRemovable", "all hypotheses hold (singularity isolated)", checks)
    checks["small_singular_set"] = None
    return BishopVerdict("Unknown", "dimension of the singular set not decided by the linear/quadratic test",
                         checks)


def ck_example(k):
    """w = conj(z1) z2 + conj(z2)^(k+3); the quotient is C^k but not C^(k+1)."""
    if not isinstance(k, int) or k < 0:
        raise DomainError("k must be a nonnegative integer")
    ctx = VarContext(["z1", "z2"])
    z1, z2 = Poly.var(ctx, 0), Poly.var(ctx, 1)
    rho = z1.conj() * z2 + z2.conj() ** (k + 3)
    return rho, {"quotient_smoothness": f"C^{k}", "fails": f"C^{k + 1}"}
