"""CR images M = F(N): singular locus, equidimensional stability, perturbations
and the sharpness constructions."""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.gaussrat import GaussRat
from .algebra.interval import IntervalBox, certify_no_common_zero, interval_eval
from .algebra.linalg import nullspace, rank
from .algebra.matrix import PolyMatrix, determinant, generic_rank, jacobian, minor_labels, minors
from .algebra.poly import Poly, VarContext, initial_form
from .errors import DegenerateMapError, DimensionError, DomainError, HypothesisError, NotFound
from .geometry import (ComplexSubspace, GenericSubmanifold, complex_tangent, map_restricted_rank,
                       real_transverse, tangent_cone_contains, _pt)

_Z = GaussRat(0)
_O = GaussRat(1)


class HoloMap:
    """Holomorphic polynomial map C^n -> C^m."""

    def __init__(self, ctx, components):
        comps = [c if isinstance(c, Poly) else Poly.constant(ctx, c) for c in components]
        for j, c in enumerate(comps):
            if c.ctx.names != ctx.names:
                raise DimensionError(f"component {j + 1} lives in another variable context")
            if not c.is_holomorphic():
                raise DomainError(f"component {j + 1} contains conjugated variables", code="not-holomorphic")
        self.ctx = ctx
        self.components = comps

    @property
    def n(self):
        return self.ctx.n

    @property
    def m(self):
        return len(self.components)

    def jacobian(self):
        if not self.components:
            return PolyMatrix(0, self.n, [], self.ctx)
        return jacobian(self.components, self.ctx)

    def evaluate(self, p):
        return [c.evaluate(p) for c in self.components]

    def compose_affine(self, A, z0):
        """z -> F(A z + z0)."""
        ctx = self.ctx
        zs = [Poly.var(ctx, i) for i in range(self.n)]
        images = [sum((zs[j] * A[i][j] for j in range(self.n)), Poly.constant(ctx, z0[i]))
                  for i in range(self.n)]
        return HoloMap(ctx, [c.substitute(ctx, images) for c in self.components])

    def __add__(self, other):
        if isinstance(other, HoloMap):
            other = other.components
        return HoloMap(self.ctx, [a + b for a, b in zip(self.components, other)])

    def strings(self):
        return [str(c) for c in self.components]

    def __str__(self):
        return "(" + ", ".join(self.strings()) + ")"

    def __eq__(self, other):
        return isinstance(other, HoloMap) and self.ctx.names == other.ctx.names \
            and self.components == other.components


# ---------------------------------------------------------------------------
# singular locus


@dataclass
class SingularLocus:
    minors: list
    labels: list
    generic_rank: int
    singular_at_base: bool
    base_point: list
    image_cr_dimension: int
    expected_cr_dimension: int
    notes: list = field(default_factory=list)


def _require_generic_rank(N, F):
    if F.m < F.n:
        raise DegenerateMapError(f"target dimension {F.m} is below source dimension {F.n}")
    r = generic_rank(F.jacobian())
    if r != F.n:
        raise DegenerateMapError(f"DF has generic rank {r}, expected {F.n}")
    return r


def image_cr_dimension(N, F, p=None):
    """CR dimension of F(N) at F(p), from the complex span of DF(p) T_pN.

    For a real subspace W of real dimension d whose complex span has
    dimension e, W contains a complex subspace of dimension d - e.
    """
    p = N.base_point if p is None else _pt(p, N.n)
    n = N.n
    jac = [[f.diff(l).evaluate(p) for l in range(n)] for f in F.components]
    vecs = []
    for v in N.real_tangent_basis(p):
        cv = [GaussRat(v[l], v[l + n]) for l in range(n)]
        vecs.append([sum((row[l] * cv[l] for l in range(n)), _Z) for row in jac])
    d = map_restricted_rank(F.components, N, p)
    e = rank(vecs) if vecs else 0
    return d - e


def image_singular_locus(N, F, p=None):
    """n x n minors of DF and the verdict at the base point."""
    _require_generic_rank(N, F)
    p = N.base_point if p is None else _pt(p, N.n)
    jac = F.jacobian()
    ms = minors(jac, F.n)
    labels = minor_labels(jac, F.n)
    singular = all(m.evaluate(p) == 0 for m in ms)
    notes = ["F|N is checked only for local rank at the point; global injectivity is not decided"]
    if map_restricted_rank(F.components, N, p) != N.real_dim:
        notes.append("F|N is not an immersion at the point")
    return SingularLocus(ms, labels, F.n, singular, p, image_cr_dimension(N, F, p), N.cr_dim, notes)


# ---------------------------------------------------------------------------
# equidimensional stability


@dataclass
class StabilityVerdict:
    tag: str                 # StableSingularity | ConditionFails | NotSingularAtPoint
    det: Poly
    det_value: GaussRat
    initial_form: Poly = None
    complex_tangent: ComplexSubspace = None
    cone_contains: bool = None
    notes: list = field(default_factory=list)


def equidim_stability(N, F, p=None):
    if F.m != F.n:
        raise DimensionError(f"equidimensional analysis needs m = n, got m = {F.m}, n = {F.n}",
                             code="wrong-shape")
    p = N.base_point if p is None else _pt(p, N.n)
    det = determinant(F.jacobian())
    value = det.evaluate(p)
    H = complex_tangent(N, p)
    if value != 0:
        return StabilityVerdict("NotSingularAtPoint", det, value, complex_tangent=H)
    if det.is_zero():
        raise DegenerateMapError("det DF vanishes identically")
    contains = tangent_cone_contains(det, p, H)
    tag = "ConditionFails" if contains else "StableSingularity"
    return StabilityVerdict(tag, det, value, initial_form(det, p), H, contains)


# ---------------------------------------------------------------------------
# perturbations


def perturbability(n, k, m):
    """4n - k < 2(m + 1): linear perturbations can remove the singularity."""
    for v in (n, k, m):
        if not isinstance(v, int) or isinstance(v, bool):
            raise DomainError("dimensions must be integers")
    if not (1 <= k <= n <= m):
        raise DomainError(f"need 1 <= k <= n <= m, got (n, k, m) = ({n}, {k}, {m})")
    return 4 * n - k < 2 * (m + 1)


@dataclass
class PerturbationResult:
    tag: str                         # Found | NotFound
    seed: int
    attempts: int
    G: HoloMap = None
    A: list = None
    certified_box: IntervalBox = None
    certificate: object = None
    log: list = field(default_factory=list)

    @property
    def found(self):
        return self.tag == "Found"


def _linear_part(ctx, A, p):
    zs = [Poly.var(ctx, j) - p[j] for j in range(ctx.n)]
    return [sum((zs[j] * A[i][j] for j in range(ctx.n)), Poly(ctx)) for i in range(len(A))]


def _random_rational(rng, scale):
    # entries on the grid scale * {-4/4, ..., 4/4} in both real and imaginary parts
    return GaussRat(scale * Fraction(rng.randint(-4, 4), 4), scale * Fraction(rng.randint(-4, 4), 4))


def _candidate_matrices(m, n, seed, budget):
    yield [[_Z] * n for _ in range(m)]
    rng = random.Random(seed)
    produced = 1
    level = 0
    while produced < budget:
        scale = Fraction(1, 2 ** (level + 2))
        for _ in range(8):
            if produced >= budget:
                return
            yield [[_random_rational(rng, scale) for _ in range(n)] for _ in range(m)]
            produced += 1
        level = (level + 1) % 12


def search_linear_perturbation(N, F, p=None, box=None, budget=10000, seed=0, max_depth=20,
                               max_boxes=20000):
    """Seeded search for G = F + A(z - p) whose n x n minors have no common zero with N on ``box``."""
    if not perturbability(N.n, N.k, F.m):
        raise DomainError(f"4n - k < 2(m + 1) fails for (n, k, m) = ({N.n}, {N.k}, {F.m})",
                          code="inequality-not-satisfied")
    p = N.base_point if p is None else _pt(p, N.n)
    if box is None:
        box = IntervalBox.cube(N.n, 1, N.ctx.real_indices(), center=p)
    log = []
    for attempt, A in enumerate(_candidate_matrices(F.m, F.n, seed, budget), start=1):
        G = F + _linear_part(F.ctx, A, p)
        ms = [d for d in minors(G.jacobian(), F.n) if not d.is_zero()]
        if not ms:
            log.append((attempt, "all minors vanish identically"))
            continue
        result = certify_no_common_zero(ms, N.real_eqs, box, max_depth, max_boxes)
        if result.ok:
            return PerturbationResult("Found", seed, attempt, G, A, box, result, log)
        log.append((attempt, result.reason))
    return PerturbationResult("NotFound", seed, budget, log=log)


@dataclass
class AnchoredResult:
    psi: list
    A: list
    z0: list
    c: list
    sup_bound: float
    rank: int
    transverse: bool
    attempts: int


def _identity(n):
    return [[_O if i == j else _Z for j in range(n)] for i in range(n)]


def anchored_zero_perturbation(phi, N, p=None, delta=Fraction(1, 10), seed=0, box=None, budget=200):
    """psi(z) = phi(A z + z0) + c with psi(p) = 0, D psi(p) of full rank and
    Z_psi transverse to N at p, within sup distance delta of phi on the box."""
    phi = list(phi)
    p = N.base_point if p is None else _pt(p, N.n)
    nu = len(phi)
    n = N.n
    if nu == 0:
        return AnchoredResult([], _identity(n), [_Z] * n, [], 0.0, 0, True, 0)
    if 2 * nu > N.real_dim:
        raise DomainError(f"nu = {nu} exceeds half the real dimension of N ({N.real_dim})")
    for f in phi:
        if not f.is_holomorphic():
            raise DomainError("phi must be holomorphic", code="not-holomorphic")
    ctx = phi[0].ctx
    if generic_rank(jacobian(phi, ctx)) != nu:
        raise DegenerateMapError(f"D phi does not have generic rank {nu}")
    if box is None:
        box = IntervalBox.cube(n, 1, N.ctx.real_indices(), center=p)
    rng = random.Random(seed)
    F = HoloMap(ctx, phi)
    for attempt in range(1, budget + 1):
        if attempt == 1:
            A, z0 = _identity(n), [_Z] * n
        else:
            scale = Fraction(1, 2 ** (2 + attempt % 8))
            A = [[(_O if i == j else _Z) + _random_rational(rng, scale) for j in range(n)] for i in range(n)]
            z0 = [_random_rational(rng, scale) for _ in range(n)]
        moved = F.compose_affine(A, z0)
        c = [-v for v in moved.evaluate(p)]
        psi = [f + cj for f, cj in zip(moved.components, c)]
        jac_p = [[f.diff(l).evaluate(p) for l in range(n)] for f in psi]
        r = rank(jac_p)
        if r != nu:
            continue
        if not real_transverse(psi, N, p):
            continue
        bound = max(interval_eval(a - b, box).magnitude_bound() for a, b in zip(psi, phi))
        if bound >= float(delta):
            continue
        return AnchoredResult(psi, A, z0, c, bound, r, True, attempt)
    raise NotFound("no anchored perturbation within budget", attempts=budget)


# ---------------------------------------------------------------------------
# constructions


@dataclass
class SharpExample:
    N: GenericSubmanifold
    F: HoloMap
    chosen_minors: list
    chosen_labels: list
    ell: int
    k_even: int
    notes: list = field(default_factory=list)


def sharp_context(n):
    return VarContext([f"z{j}" for j in range(1, n + 1)])


def build_sharp_example(n, k, m):
    """The determinantal example showing that 4n - k < 2(m + 1) cannot be weakened."""
    for v in (n, k, m):
        if not isinstance(v, int) or isinstance(v, bool):
            raise DomainError("dimensions must be integers")
    if not (2 <= k <= n <= m):
        raise DomainError(f"need 2 <= k <= n <= m, got (n, k, m) = ({n}, {k}, {m})")
    if 4 * n - k < 2 * (m + 1):
        raise DomainError(f"4n - k >= 2(m + 1) fails for (n, k, m) = ({n}, {k}, {m})",
                          code="inequality-not-satisfied")
    notes = []
    ke = k if k % 2 == 0 else k + 1
    ell = n - ke // 2
    m_max = 2 * n - ke // 2 - 1
    ctx = sharp_context(n)
    z = [None] + [Poly.var(ctx, j) for j in range(n)]       # 1-based
    comps = [z[j] for j in range(1, n)] + [z[n] ** 2] + [z[n] * z[n - i] for i in range(1, ell)]
    assert len(comps) == m_max
    if m < m_max:
        notes.append(f"kept the first {m} of {m_max} components; removing rows cannot raise the rank")
        comps = comps[:m]
    F = HoloMap(ctx, comps)
    half = Fraction(1, 2)
    eqs = []
    pairs = [(j, n - j + 1) for j in range(1, ke // 2 + 1)]
    for idx, (a, b) in enumerate(pairs):
        e = z[a] - z[b].conj()
        re = (e + e.conj()) * half
        im = (e - e.conj()) * GaussRat(0, -half)
        last = idx == len(pairs) - 1
        if k % 2 == 1 and last:
            if a == b:
                eqs.append(im)       # Re(z_a - conj z_a) vanishes identically
                notes.append(f"odd k: kept only Im of z{a} = conj(z{b})")
            else:
                eqs.append(re)
                notes.append(f"odd k: dropped the imaginary part of z{a} = conj(z{b})")
        else:
            eqs.extend([re, im])
    N = GenericSubmanifold(ctx, eqs)
    jac = F.jacobian()
    # minors from rows {1..n} and {1..n-1, n+i}, all columns
    chosen_rows = [tuple(range(n))] + [tuple(range(n - 1)) + (n - 1 + i,) for i in range(1, m - n + 1)]
    cols = tuple(range(n))
    chosen = [determinant(jac.submatrix(r, cols)) for r in chosen_rows]
    return SharpExample(N, F, chosen, [(r, cols) for r in chosen_rows], ell, ke, notes)


def sharp_pillars(ex):
    """The three checks behind the construction, at the origin."""
    n = ex.N.n
    origin = [_Z] * n
    ms = minors(ex.F.jacobian(), n)
    vanish = all(d.evaluate(origin) == 0 for d in ms)
    jac = [[f.diff(l).evaluate(origin) for l in range(n)] for f in ex.chosen_minors]
    full = rank(jac) == len(ex.chosen_minors)
    trans = real_transverse(ex.chosen_minors, ex.N, origin) if full else False
    return {"minors_vanish": vanish, "chosen_full_rank": full, "transverse": trans}


@dataclass
class ExtensionResult:
    G: HoloMap
    designated_rows: tuple
    designated_minor: Poly
    eps: Fraction
    ell: int


def extend_and_perturb(F, ell, eps):
    """G = F + (eps z_{n-ell+1}, ..., eps z_n) appended as new components."""
    n = F.n
    eps = GaussRat.coerce(eps)
    if not isinstance(ell, int) or not 0 <= ell <= n:
        raise DomainError(f"ell must lie in [0, {n}]")
    if ell and not eps:
        raise DomainError("eps must be nonzero")
    ctx = F.ctx
    if ell == 0:
        # nothing to append; F is used as it stands
        rows = tuple(range(min(n, F.m)))
        minor = determinant(F.jacobian().submatrix(rows, tuple(range(n)))) if F.m >= n else Poly(ctx)
        return ExtensionResult(F, rows, minor, eps, 0)
    r = n - ell
    for j in range(r):
        if j >= F.m or F.components[j] != Poly.var(ctx, j):
            raise HypothesisError(f"component {j + 1} is not z{j + 1}; normalize F first",
                                  code="not-normalized")
    extra = [Poly.var(ctx, j) * eps for j in range(r, n)]
    G = HoloMap(ctx, F.components + extra)
    rows = tuple(range(r)) + tuple(range(F.m, F.m + ell))
    minor = determinant(G.jacobian().submatrix(rows, tuple(range(n))))
    return ExtensionResult(G, rows, minor, eps, ell)


@dataclass
class TwoJetResult:
    F: HoloMap
    attempts: int
    chosen_labels: list
    chosen_minors: list
    minors_vanish: bool
    full_rank: bool
    transverse: bool
    perturbation: list


def _annihilator_rows(kernel, n):
    """Rows c with c . v = 0 for every kernel vector v."""
    if not kernel:
        return _identity(n)
    return nullspace(kernel, n, _Z, _O)


def _two_jet_checks(N, G, p):
    n = N.n
    nu = G.m - n + 1
    jac = G.jacobian()
    ms = minors(jac, n)
    labels = minor_labels(jac, n)
    vanish = all(d.evaluate(p) == 0 for d in ms)
    chosen, chosen_labels, grads = [], [], []
    if vanish:
        for d, lab in zip(ms, labels):
            g = [d.diff(l).evaluate(p) for l in range(n)]
            if rank(grads + [g]) > len(grads):
                grads.append(g)
                chosen.append(d)
                chosen_labels.append(lab)
                if len(chosen) == nu:
                    break
    full = vanish and len(chosen) == nu
    trans = full and real_transverse(chosen, N, p)
    return vanish, full, trans, chosen, chosen_labels


def perturb_2jet(N, F, p=None, delta=Fraction(1, 100), seed=0, budget=10000):
    """Random perturbation of the 2-jet of F at p keeping p singular, until the
    chosen minors are a full-rank tuple whose zero set is transverse to N."""
    n, k, m = N.n, N.k, F.m
    if k < 2:
        raise DomainError("needs codimension k >= 2")
    if 4 * n - k < 2 * (m + 1):
        raise DomainError(f"4n - k >= 2(m + 1) fails for (n, k, m) = ({n}, {k}, {m})",
                          code="inequality-not-satisfied")
    p = N.base_point if p is None else _pt(p, n)
    delta = Fraction(delta)
    ctx = F.ctx
    dfp = [[f.diff(l).evaluate(p) for l in range(n)] for f in F.components]
    kernel = nullspace(dfp, n, _Z, _O)
    ann = _annihilator_rows(kernel, n)
    rng = random.Random(seed)
    zs = [Poly.var(ctx, j) - p[j] for j in range(n)]
    quad = [zs[a] * zs[b] for a in range(n) for b in range(a, n)]
    log_budget = budget if delta > 0 else 1
    for attempt in range(1, log_budget + 1):
        if attempt == 1:
            pert = [Poly(ctx) for _ in range(m)]
        else:
            scale = delta / (2 * max(1, len(ann)))
            pert = []
            for _ in range(m):
                R = [_random_rational(rng, scale) for _ in ann]
                lin = [sum((R[i] * ann[i][l] for i in range(len(ann))), _Z) for l in range(n)]
                q = sum((zs[l] * lin[l] for l in range(n)), Poly(ctx))
                for mono in quad:
                    if rng.random() < 0.5:
                        q = q + mono * _random_rational(rng, delta / 2)
                pert.append(q)
            if any(max((max(abs(c.re), abs(c.im)) for c in P.terms.values()), default=0) >= delta
                   for P in pert):
                continue
        G = F + pert
        vanish, full, trans, chosen, labels = _two_jet_checks(N, G, p)
        if vanish and full and trans:
            return TwoJetResult(G, attempt, labels, chosen, vanish, full, trans, pert)
    raise NotFound("no admissible 2-jet perturbation within budget", attempts=log_budget)
