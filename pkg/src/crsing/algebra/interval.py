"""Outward-rounded interval arithmetic over rational boxes, and a
branch-and-bound certifier for the absence of common zeros."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from ..errors import ContextError
from .gaussrat import GaussRat

_INF = math.inf


def _down(x):
    return math.nextafter(x, -_INF)


def _up(x):
    return math.nextafter(x, _INF)


def _float_below(q):
    f = float(q)
    return f if Fraction(f) <= q else _down(f)


def _float_above(q):
    f = float(q)
    return f if Fraction(f) >= q else _up(f)


class Interval:
    """Closed interval [lo, hi] of doubles, rounded outward after every operation."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo, self.hi = lo, hi

    @classmethod
    def from_rationals(cls, lo, hi=None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        return cls(_float_below(lo), _float_above(hi))

    def __add__(self, o):
        if not isinstance(o, Interval):
            o = Interval.from_rationals(o)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, o):
        if not isinstance(o, Interval):
            o = Interval.from_rationals(o)
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __mul__(self, o):
        if not isinstance(o, Interval):
            o = Interval.from_rationals(o)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a == b == 0 or c == d == 0:
            return Interval(0.0, 0.0)
        prods = (a * c, a * d, b * c, b * d)
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k == 0:
            return Interval(1.0, 1.0)
        if k == 1:
            return self
        a, b = self.lo, self.hi
        if k % 2 == 0:
            lo_abs = 0.0 if a <= 0 <= b else min(abs(a), abs(b))
            hi_abs = max(abs(a), abs(b))
            return Interval(max(0.0, _pow_down(lo_abs, k)), _pow_up(hi_abs, k))
        return Interval(_pow_down_signed(a, k), _pow_up_signed(b, k))

    def contains(self, x):
        return self.lo <= x <= self.hi

    def contains_zero(self):
        return self.lo <= 0.0 <= self.hi

    def magnitude(self):
        return max(abs(self.lo), abs(self.hi))

    @property
    def width(self):
        return self.hi - self.lo

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def _pow_up(x, k):
    # x >= 0; repeated multiplication rounded up
    r = 1.0
    for _ in range(k):
        r = _up(r * x)
    return r


def _pow_down(x, k):
    r = 1.0
    for _ in range(k):
        r = max(0.0, _down(r * x))
    return r


def _pow_down_signed(x, k):
    # odd k: monotone increasing
    return -_pow_up(-x, k) if x < 0 else _pow_down(x, k)


def _pow_up_signed(x, k):
    return -_pow_down(-x, k) if x < 0 else _pow_up(x, k)


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    def excludes_zero(self):
        return not self.re.contains_zero() or not self.im.contains_zero()

    def contains(self, z):
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def magnitude_bound(self):
        return _up(math.hypot(self.re.magnitude(), self.im.magnitude()))


class IntervalBox:
    """Product of closed rational intervals, one per real coordinate.

    For n complex variables the coordinates are interleaved as
    (Re z_1, Im z_1, Re z_2, Im z_2, ...).
    """

    __slots__ = ("bounds",)

    def __init__(self, bounds):
        bounds = tuple((Fraction(lo), Fraction(hi)) for lo, hi in bounds)
        for lo, hi in bounds:
            if lo > hi:
                raise ValueError(f"box coordinate has lower bound {lo} above upper bound {hi}")
        self.bounds = bounds

    @classmethod
    def cube(cls, nvars, radius=1, real=(), center=None):
        """Box of the given radius around ``center``; coordinates listed in
        ``real`` get a degenerate imaginary interval."""
        radius = Fraction(radius)
        center = [GaussRat(0)] * nvars if center is None else [GaussRat.coerce(c) for c in center]
        real = frozenset(real)
        out = []
        for j in range(nvars):
            c = center[j]
            out.append((c.re - radius, c.re + radius))
            out.append((c.im, c.im) if j in real else (c.im - radius, c.im + radius))
        return cls(out)

    @property
    def dim(self):
        return len(self.bounds)

    def widths(self):
        return [hi - lo for lo, hi in self.bounds]

    def widest(self):
        w = self.widths()
        best = max(w)
        return w.index(best)

    def bisect(self, k):
        lo, hi = self.bounds[k]
        mid = (lo + hi) / 2
        left = list(self.bounds)
        right = list(self.bounds)
        left[k] = (lo, mid)
        right[k] = (mid, hi)
        return IntervalBox(left), IntervalBox(right)

    def center(self):
        return [(lo + hi) / 2 for lo, hi in self.bounds]

    def complex_center(self):
        c = self.center()
        return [GaussRat(c[2 * j], c[2 * j + 1]) for j in range(len(c) // 2)]

    def contains_point(self, point):
        """``point`` is a sequence of complex numbers (one per complex variable)."""
        coords = []
        for z in point:
            z = complex(z)
            coords += [z.real, z.imag]
        return all(float(lo) <= x <= float(hi) for x, (lo, hi) in zip(coords, self.bounds))

    def intervals(self):
        return [Interval.from_rationals(lo, hi) for lo, hi in self.bounds]

    def __eq__(self, other):
        return isinstance(other, IntervalBox) and self.bounds == other.bounds

    def __hash__(self):
        return hash(self.bounds)

    def as_strings(self):
        return [[_rat(lo), _rat(hi)] for lo, hi in self.bounds]

    def __repr__(self):
        return "IntervalBox(" + ", ".join(f"[{_rat(lo)}, {_rat(hi)}]" for lo, hi in self.bounds) + ")"


def _rat(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- real-coordinate expansion ---------------------------------------------

_EXPANSIONS = {}


def real_expansion(p):
    """Expand p under z_j = x_j + i y_j, conj(z_j) = x_j - i y_j.

    Returns {exponent tuple over (x_1, y_1, ..., x_n, y_n): GaussRat}.
    """
    cached = _EXPANSIONS.get(p)
    if cached is not None:
        return cached
    n = p.n
    out = {}
    for e, c in p.terms.items():
        # per variable, expand (x + iy)^a (x - iy)^b into sum over powers of y
        per_var = []
        for j in range(n):
            a, b = e[j], e[j + n]
            poly = {}
            for s in range(a + 1):
                ca = comb(a, s) * _ipow(s)
                for t in range(b + 1):
                    cb = comb(b, t) * _ipow(t) * (-1) ** t
                    ydeg = s + t
                    poly[ydeg] = poly.get(ydeg, GaussRat(0)) + ca * cb
            per_var.append([(a + b - yd, yd, v) for yd, v in poly.items() if v])
        terms = [((), c)]
        for choices in per_var:
            nxt = []
            for exps, coef in terms:
                for xd, yd, v in choices:
                    nxt.append((exps + (xd, yd), coef * v))
            terms = nxt
        for exps, coef in terms:
            s = out.get(exps)
            out[exps] = coef if s is None else s + coef
    out = {k: v for k, v in out.items() if v}
    if len(_EXPANSIONS) > 4096:
        _EXPANSIONS.clear()
    _EXPANSIONS[p] = out
    return out


def _ipow(k):
    return (GaussRat(1), GaussRat(0, 1), GaussRat(-1), GaussRat(0, -1))[k % 4]


class _Compiled:
    """A polynomial prepared for repeated interval evaluation."""

    __slots__ = ("terms", "maxexp", "ncoords")

    def __init__(self, p):
        exp = real_expansion(p)
        self.ncoords = 2 * p.n
        self.terms = []
        self.maxexp = [0] * self.ncoords
        for e, c in exp.items():
            cre = Interval.from_rationals(c.re) if c.re else None
            cim = Interval.from_rationals(c.im) if c.im else None
            self.terms.append((e, cre, cim))
            for k, a in enumerate(e):
                self.maxexp[k] = max(self.maxexp[k], a)

    def evaluate(self, ivs):
        powers = [[ivs[k] ** a for a in range(self.maxexp[k] + 1)] for k in range(self.ncoords)]
        re = Interval(0.0)
        im = Interval(0.0)
        for e, cre, cim in self.terms:
            mono = None
            for k, a in enumerate(e):
                if a:
                    mono = powers[k][a] if mono is None else mono * powers[k][a]
            if mono is None:
                mono = Interval(1.0)
            if cre is not None:
                re = re + cre * mono
            if cim is not None:
                im = im + cim * mono
        return ComplexInterval(re, im)


_COMPILED = {}


def _compiled(p):
    c = _COMPILED.get(p)
    if c is None:
        if len(_COMPILED) > 4096:
            _COMPILED.clear()
        c = _COMPILED[p] = _Compiled(p)
    return c


def interval_eval(p, box):
    """Sound enclosure of {p(z) : z in box} as a rectangle in C."""
    if box.dim != 2 * p.n:
        raise ContextError(f"box has {box.dim} coordinates, polynomial needs {2 * p.n}")
    return _compiled(p).evaluate(box.intervals())


# -- branch and bound -----------------------------------------------------------


@dataclass
class CertNode:
    box: IntervalBox
    witness: tuple = None          # ("p", i) or ("eq", j) at a leaf
    split: int = None              # coordinate bisected at an inner node
    children: list = field(default_factory=list)

    def leaves(self):
        if self.split is None:
            yield self
        else:
            for ch in self.children:
                yield from ch.leaves()

    def count(self):
        return 1 + sum(ch.count() for ch in self.children)

    def depth(self):
        if not self.children:
            return 0
        return 1 + max(ch.depth() for ch in self.children)


@dataclass
class Certified:
    """Certificate tree: every leaf carries a function whose enclosure misses 0."""

    ps: list
    constraint_eqs: list
    tree: CertNode

    @property
    def ok(self):
        return True

    @property
    def box(self):
        return self.tree.box

    def leaf_count(self):
        return sum(1 for _ in self.tree.leaves())

    def max_depth(self):
        return self.tree.depth()

    def replay(self):
        """Re-check the whole tree from scratch; True iff it still certifies."""
        return _replay(self.tree, self.ps, self.constraint_eqs)


@dataclass
class Undecided:
    subbox: IntervalBox
    depth: int
    reason: str = "max depth reached"

    @property
    def ok(self):
        return False


def _excluder(ps, eqs, box):
    for i, p in enumerate(ps):
        if interval_eval(p, box).excludes_zero():
            return ("p", i)
    for j, q in enumerate(eqs):
        if interval_eval(q, box).excludes_zero():
            return ("eq", j)
    return None


def _replay(node, ps, eqs):
    if node.split is None:
        if node.witness is None:
            return False
        kind, i = node.witness
        f = ps[i] if kind == "p" else eqs[i]
        return interval_eval(f, node.box).excludes_zero()
    if len(node.children) != 2:
        return False
    left, right = node.box.bisect(node.split)
    if node.children[0].box != left or node.children[1].box != right:
        return False
    return all(_replay(ch, ps, eqs) for ch in node.children)


def certify_no_common_zero(ps, constraint_eqs, box, max_depth=20, max_boxes=500000):
    """Prove that the ps and the constraint equations have no common zero in ``box``.

    Depth-first bisection of the widest coordinate.  A leaf is closed when
    the enclosure of some p_i, or of some constraint equation, excludes 0.
    """
    ps = list(ps)
    constraint_eqs = list(constraint_eqs)
    if not ps:
        raise ValueError("need at least one polynomial")
    for f in ps + constraint_eqs:
        if box.dim != 2 * f.n:
            raise ContextError(f"box has {box.dim} coordinates, polynomial needs {2 * f.n}")
    budget = [max_boxes]

    def go(b, depth):
        budget[0] -= 1
        node = CertNode(b)
        w = _excluder(ps, constraint_eqs, b)
        if w is not None:
            node.witness = w
            return node
        if depth >= max_depth:
            raise _Stop(Undecided(b, depth))
        if budget[0] <= 0:
            raise _Stop(Undecided(b, depth, "box budget exhausted"))
        k = b.widest()
        if b.widths()[k] == 0:
            raise _Stop(Undecided(b, depth, "degenerate box"))
        node.split = k
        node.children = [go(half, depth + 1) for half in b.bisect(k)]
        return node

    try:
        tree = go(box, 0)
    except _Stop as stop:
        return stop.result
    return Certified(ps, constraint_eqs, tree)


class _Stop(Exception):
    def __init__(self, result):
        self.result = result
