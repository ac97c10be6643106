"""Analytic discs attached to Im w = r(z, conj z, Re w) and zero counting on them.

Everything here is double precision: the outputs are numerical witnesses,
never certificates.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra.poly import Poly, realify
from .errors import BoundaryZero, DivergedError, DomainError, HypothesisError, NotFound
from .geometry import ComplexSubspace, tangent_cone_contains

DEFAULT_GRID = 512
DEFAULT_TOL = 1e-10
BLOWUP = 1e8


@dataclass
class DiscProblem:
    """N: Im w_j = r_j(z, conj z, Re w) in C^(1+k); variables ordered (z, w1..wk)."""

    r: tuple
    phi: Poly = None
    grid_size: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL
    max_iter: int = 500

    def __post_init__(self):
        if isinstance(self.r, Poly):
            self.r = (self.r,)
        self.r = tuple(self.r)
        if not self.r:
            raise DomainError("need at least one defining function")
        ctx = self.r[0].ctx
        if any(rj.ctx.names != ctx.names for rj in self.r):
            raise DomainError("defining functions must share a context")
        if ctx.n != 1 + len(self.r):
            raise DomainError(f"expected {1 + len(self.r)} variables (z, w1..wk), got {ctx.n}")
        g = self.grid_size
        if g < 64 or g & (g - 1):
            raise DomainError("grid_size must be a power of two, at least 64")
        widx = set(range(1, ctx.n))
        for j, rj in enumerate(self.r, start=1):
            if not rj.is_real():
                raise HypothesisError(f"r{j} is not real-valued", code="not-real")
            if rj.constant_term() != 0 or not rj.homogeneous_part(1).is_zero():
                raise HypothesisError(f"r{j} has a constant or linear part", code="not-normalized")
            if realify(rj.identify_real(widx), widx) != rj:
                raise HypothesisError(f"r{j} depends on Im w", code="bad-shape")
        if self.phi is not None:
            if self.phi.ctx.names != ctx.names:
                raise DomainError("phi must use the variables of r")
            if not self.phi.is_holomorphic():
                raise DomainError("phi must be holomorphic", code="not-holomorphic")
        self._r_num = [rj.lambdify() for rj in self.r]

    @property
    def k(self):
        return len(self.r)

    @property
    def ctx(self):
        return self.r[0].ctx

    def nodes(self, grid=None):
        m = grid or self.grid_size
        return np.exp(2j * np.pi * np.arange(m) / m)

    def r_values(self, zb, U):
        """r(z, conj z, U) on boundary samples; U has shape (k, M), real."""
        zv = [zb] + list(U)
        zbv = [np.conj(zb)] + list(U)
        return np.array([f(zv, zbv).real for f in self._r_num])


def conjugate_normalized(f):
    """T_1 f: harmonic conjugate of real boundary data, normalized to vanish at xi = 1."""
    m = f.shape[-1]
    c = np.fft.fft(f, axis=-1)
    freq = np.fft.fftfreq(m, d=1.0 / m)
    mult = -1j * np.sign(freq)
    mult[np.abs(freq) == m // 2] = 0
    tf = np.fft.ifft(c * mult, axis=-1).real
    return tf - tf[..., :1]


@dataclass
class DiscSolution:
    t: float
    g: np.ndarray              # shape (k, M), boundary values of g_t
    iterations: int
    residuals: list
    holomorphy_residual: float
    attachment_residual: float

    @property
    def residual(self):
        return max(self.holomorphy_residual, self.attachment_residual)


def _negative_energy(g):
    m = g.shape[-1]
    c = np.fft.fft(g, axis=-1) / m
    neg = c[..., m // 2 + 1:]
    return float(np.sqrt(np.sum(np.abs(neg) ** 2)))


def solve_bishop(prob, t, grid=None):
    """Picard iteration U <- -T_1 r(t u, t conj u, U); g = U + i r."""
    if not 0 < t <= 1:
        raise DomainError("t must lie in (0, 1]")
    m = grid or prob.grid_size
    u = prob.nodes(m)
    zb = t * u
    U = np.zeros((prob.k, m))
    history = []
    damp = False
    for it in range(1, prob.max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new = -conjugate_normalized(prob.r_values(zb, U))
            if damp:
                new = 0.5 * (U + new)
            step = float(np.max(np.abs(new - U)))
        if not np.isfinite(step) or step > BLOWUP:
            history.append(step)
            raise DivergedError(f"Picard iteration blew up at t={t}", history)
        if history and step > history[-1]:
            damp = True
        history.append(step)
        U = new
        if step < prob.tol:
            break
    else:
        raise DivergedError(f"no convergence within {prob.max_iter} iterations at t={t}", history)
    im = prob.r_values(zb, U)
    g = U + 1j * im
    attach = float(np.max(np.abs(g.imag - prob.r_values(zb, g.real))))
    return DiscSolution(t, g, it, history, _negative_energy(g), attach)


@dataclass
class DiscFamily:
    problem: DiscProblem
    solutions: list
    grid: int

    @property
    def ts(self):
        return [s.t for s in self.solutions]

    def get(self, t):
        for s in self.solutions:
            if s.t == t:
                return s
        raise KeyError(t)


def disc_family(prob, ts, grid=None):
    m = grid or prob.grid_size
    return DiscFamily(prob, [solve_bishop(prob, float(t), m) for t in ts], m)


@dataclass
class SecondOrderReport:
    ts: list
    ratios: list
    median: float
    max_deviation: float
    passed: bool
    label: str = "numerical witness"


def verify_second_order(family):
    ts = family.ts
    if len(set(ts)) < 4 or any(not 0 < t <= 0.5 for t in ts):
        raise DomainError("need at least 4 distinct t values in (0, 1/2]", code="insufficient-samples")
    ratios = [float(np.max(np.abs(s.g))) / s.t ** 2 for s in family.solutions]
    med = float(np.median(ratios))
    dev = max(abs(r - med) for r in ratios)
    if med == 0:
        passed = dev == 0
    else:
        passed = bool(np.isfinite(dev)) and dev < 0.25 * med
    return SecondOrderReport(ts, ratios, med, dev, passed)


def disc_values(phi, t, g):
    """phi(t xi, g_t(xi)) on the grid."""
    m = g.shape[-1]
    xi = np.exp(2j * np.pi * np.arange(m) / m)
    return phi.lambdify()([t * xi] + list(g))


def winding_count(phi, t, g, tol=DEFAULT_TOL):
    """Winding number of xi -> phi(Delta_t(xi)) by summed argument increments."""
    vals = disc_values(phi, t, g)
    mags = np.abs(vals)
    j = int(np.argmin(mags))
    if mags[j] <= tol:
        raise BoundaryZero(j, complex(vals[j]))
    inc = np.angle(np.roll(vals, -1) / vals)
    return int(round(float(np.sum(inc)) / (2 * np.pi)))


@dataclass
class PsiOutcome:
    index: int
    t0: float
    branch: str                  # "zero trapped" | "zero on N"
    rows: list                   # (t, residual, winding, branch) per scanned t
    crossing: dict = None        # for "zero on N": t, node, boundary point, |psi| there


@dataclass
class PersistenceReport:
    outcomes: list
    ts: list
    label: str = "numerical witness"
    notes: list = field(default_factory=list)

    def csv(self):
        lines = ["psi,t,residual,winding,branch"]
        for o in self.outcomes:
            for t, res, w, br in o.rows:
                wtxt = "" if w is None else str(w)
                lines.append(f"{o.index},{t!r},{res:.3e},{wtxt},{br}")
        return "\n".join(lines) + "\n"


def default_ts(t_max=0.5, t_min=1e-3, count=40):
    return [float(v) for v in np.geomspace(t_max, t_min, count)]


def _try_winding(psi, sol, tol):
    try:
        return winding_count(psi, sol.t, sol.g, tol)
    except BoundaryZero:
        return None


def _locate_crossing(prob, psi, t_hi, t_lo, grid, steps=40):
    """Bisect t between a trapped (t_hi) and an escaped (t_lo) disc; return the boundary
    point of the last disc where |psi| is smallest."""
    w_hi = 1
    for _ in range(steps):
        mid = 0.5 * (t_hi + t_lo)
        sol = solve_bishop(prob, mid, grid)
        w = _try_winding(psi, sol, prob.tol)
        if w is None:
            t_hi = t_lo = mid
            break
        if w >= w_hi:
            t_hi = mid
        else:
            t_lo = mid
        if t_hi - t_lo < 1e-13:
            break
    sol = solve_bishop(prob, t_hi, grid)
    vals = disc_values(psi, sol.t, sol.g)
    j = int(np.argmin(np.abs(vals)))
    xi = np.exp(2j * np.pi * j / grid)
    point = [complex(sol.t * xi)] + [complex(v) for v in sol.g[:, j]]
    return {"t": sol.t, "node": j, "point": point, "abs_psi": float(abs(vals[j]))}


def persistence_experiment(prob, perturbations, ts=None):
    """Discs shrinking to the origin must either trap a zero of
    psi or see it cross their boundary, which lies on N."""
    phi = prob.phi
    if phi is None:
        raise DomainError("the problem carries no function phi")
    n = prob.ctx.n
    H = ComplexSubspace(n, [[1] + [0] * (n - 1)])
    if tangent_cone_contains(phi, [0] * n, H):
        raise HypothesisError("the tangent cone of {phi = 0} contains H_0N", code="cone-contains-h")
    ts = sorted(default_ts() if ts is None else [float(t) for t in ts], reverse=True)
    grid = prob.grid_size
    sols = [solve_bishop(prob, t, grid) for t in ts]
    outcomes = []
    for idx, pert in enumerate(perturbations):
        psi = phi + pert
        rows = []
        t0 = None
        branch = None
        crossing = None
        prev = None
        for sol in sols:
            w = _try_winding(psi, sol, prob.tol)
            if t0 is None:
                if w is not None and w >= 1:
                    t0 = sol.t
                rows.append((sol.t, sol.residual, w, "searching" if t0 is None else "trapped"))
                prev = sol
                continue
            if w is None or w < 1:
                branch = "zero on N"
                rows.append((sol.t, sol.residual, w, branch))
                crossing = _locate_crossing(prob, psi, prev.t, sol.t, grid)
                break
            rows.append((sol.t, sol.residual, w, "trapped"))
            prev = sol
        if t0 is None:
            raise NotFound(f"perturbation {idx}: no disc with positive winding", attempts=len(sols))
        if branch is None:
            branch = "zero trapped"
        outcomes.append(PsiOutcome(idx, t0, branch, rows, crossing))
    return PersistenceReport(outcomes, ts, notes=[
        "double-precision experiment; every psi landed in one of the two branches"])
