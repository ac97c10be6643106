"""Exact polynomials in paired symbols z_j, conj(z_j) over the Gaussian rationals.

A monomial is stored as an exponent tuple of length 2n: the first n entries
belong to z_1..z_n, the last n to their conjugates.  The pair is treated as
two independent formal symbols; ``conj`` realizes the involution that swaps
them and conjugates coefficients.
"""

from fractions import Fraction
from math import comb

import numpy as np

from ..errors import ContextError, UndefinedInputError
from .gaussrat import GaussRat, format_coefficient

_ZERO = GaussRat(0)
_ONE = GaussRat(1)


class VarContext:
    """Ordered complex variable names; each owns a conjugate symbol.

    ``real`` names the variables the parser identifies with their own
    conjugate (coordinates of a totally real factor such as R^2 in C^2).
    """

    __slots__ = ("names", "real", "_index")

    def __init__(self, names, real=()):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ContextError("variable names must be unique")
        real = frozenset(real)
        unknown = real - set(names)
        if unknown:
            raise ContextError(f"real variables not declared: {sorted(unknown)}")
        self.names = names
        self.real = real
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def n(self):
        return len(self.names)

    def index(self, name):
        if isinstance(name, int):
            if not 0 <= name < len(self.names):
                raise ContextError(f"variable index {name} out of range")
            return name
        try:
            return self._index[name]
        except KeyError:
            raise ContextError(f"unknown variable {name!r}") from None

    def real_indices(self):
        return frozenset(self._index[v] for v in self.real)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, VarContext) and self.names == other.names and self.real == other.real

    def __hash__(self):
        return hash((self.names, self.real))

    def __repr__(self):
        extra = f", real={sorted(self.real)}" if self.real else ""
        return f"VarContext({list(self.names)}{extra})"


def _coerce_coeff(c):
    return c if isinstance(c, GaussRat) else GaussRat.coerce(c)


class Poly:
    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        clean = {}
        if terms:
            width = 2 * ctx.n
            for exps, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    if len(exps) != width:
                        raise ContextError("exponent vector does not match context")
                    clean[tuple(exps)] = c
        self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def constant(cls, ctx, c):
        return cls(ctx, {(0,) * (2 * ctx.n): c})

    @classmethod
    def var(cls, ctx, name, barred=False):
        i = ctx.index(name)
        exps = [0] * (2 * ctx.n)
        exps[i + ctx.n if barred else i] = 1
        return cls(ctx, {tuple(exps): _ONE})

    @classmethod
    def variables(cls, ctx):
        """The tuple (z_1, ..., z_n) of coordinate polynomials."""
        return tuple(cls.var(ctx, i) for i in range(ctx.n))

    # basic queries ----------------------------------------------------------

    @property
    def n(self):
        return self.ctx.n

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self):
        return self.terms.get((0,) * (2 * self.n), _ZERO)

    def degree(self):
        """Total degree counting variables and conjugates; -1 for zero."""
        return max((sum(e) for e in self.terms), default=-1)

    def order(self):
        """Lowest total degree of a term; -1 for zero."""
        return min((sum(e) for e in self.terms), default=-1)

    def is_holomorphic(self):
        n = self.n
        return all(not any(e[n:]) for e in self.terms)

    def is_real(self):
        """True when fixed by the conjugation involution."""
        return self.conj() == self

    def uses(self):
        """Indices of variables appearing (either as z or conj(z))."""
        n = self.n
        used = set()
        for e in self.terms:
            for i in range(n):
                if e[i] or e[i + n]:
                    used.add(i)
        return frozenset(used)

    def homogeneous_part(self, d):
        return Poly(self.ctx, {e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate(self, d):
        """Drop every term of total degree above d."""
        return Poly(self.ctx, {e: c for e, c in self.terms.items() if sum(e) <= d})

    def bidegree_part(self, p, q):
        """Terms of degree p in z and degree q in conj(z)."""
        n = self.n
        return Poly(self.ctx, {e: c for e, c in self.terms.items()
                               if sum(e[:n]) == p and sum(e[n:]) == q})

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), _ZERO)

    # arithmetic -------------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ctx.names != self.ctx.names:
                raise ContextError("polynomials live in different variable contexts")
            return other
        return Poly.constant(self.ctx, _coerce_coeff(other))

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = c if s is None else s + c
        return Poly(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Poly(self.ctx)
            return Poly(self.ctx, {e: v * c for e, v in self.terms.items()})
        other = self._lift(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                s = terms.get(e)
                terms[e] = v if s is None else s + v
        return Poly(self.ctx, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return NotImplemented
        c = _coerce_coeff(other)
        return self * (_ONE / c)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result, base = Poly.constant(self.ctx, _ONE), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ctx.names == other.ctx.names and self.terms == other.terms
        try:
            return self == Poly.constant(self.ctx, _coerce_coeff(other))
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # involution and derivatives ----------------------------------------------

    def conj(self):
        n = self.n
        return Poly(self.ctx, {e[n:] + e[:n]: c.conjugate() for e, c in self.terms.items()})

    def diff(self, var, barred=False):
        """Formal (Wirtinger) partial derivative in z_var or conj(z_var)."""
        i = self.ctx.index(var)
        k = i + self.n if barred else i
        terms = {}
        for e, c in self.terms.items():
            a = e[k]
            if a:
                f = list(e)
                f[k] = a - 1
                terms[tuple(f)] = c * a
        return Poly(self.ctx, terms)

    # evaluation and substitution ---------------------------------------------

    def evaluate_pair(self, zvals, zbarvals):
        """Evaluate with independent values for the z and conj(z) symbols."""
        vals = [GaussRat.coerce(v) for v in zvals] + [GaussRat.coerce(v) for v in zbarvals]
        if len(vals) != 2 * self.n:
            raise ContextError("point dimension does not match context")
        total = _ZERO
        for e, c in self.terms.items():
            t = c
            for v, a in zip(vals, e):
                if a:
                    t = t * v ** a
            total = total + t
        return total

    def evaluate(self, point):
        """Exact value at a point of C^n (conj symbols take conjugate values)."""
        point = [GaussRat.coerce(v) for v in point]
        return self.evaluate_pair(point, [v.conjugate() for v in point])

    def substitute(self, ctx, zmap, zbarmap=None, truncate=None):
        """Replace z_j by zmap[j] and conj(z_j) by zbarmap[j] (polys in ``ctx``).

        ``zbarmap`` defaults to the conjugates of ``zmap``.  With ``truncate``
        every intermediate product is cut at that total degree.
        """
        zmap = [Poly._as_poly(ctx, q) for q in zmap]
        if zbarmap is None:
            zbarmap = [q.conj() for q in zmap]
        else:
            zbarmap = [Poly._as_poly(ctx, q) for q in zbarmap]
        images = zmap + zbarmap
        if len(images) != 2 * self.n:
            raise ContextError("substitution has the wrong number of images")
        cache = {}

        def power(k, a):
            key = (k, a)
            if key not in cache:
                if a == 1:
                    cache[key] = images[k]
                else:
                    p = power(k, a - 1) * images[k]
                    cache[key] = p.truncate(truncate) if truncate is not None else p
            return cache[key]

        result = Poly(ctx)
        for e, c in self.terms.items():
            t = Poly.constant(ctx, c)
            for k, a in enumerate(e):
                if a:
                    t = t * power(k, a)
                    if truncate is not None:
                        t = t.truncate(truncate)
            result = result + t
        return result

    @staticmethod
    def _as_poly(ctx, q):
        return q if isinstance(q, Poly) else Poly.constant(ctx, q)

    def translate(self, base):
        """p(z + base): the expansion of p about ``base`` in displacement variables."""
        base = [GaussRat.coerce(b) for b in base]
        if len(base) != self.n:
            raise ContextError("base point dimension does not match context")
        if not any(base):
            return self
        zs = [Poly.var(self.ctx, i) + b for i, b in enumerate(base)]
        zbs = [Poly.var(self.ctx, i, barred=True) + b.conjugate() for i, b in enumerate(base)]
        return self.substitute(self.ctx, zs, zbs)

    def identify_real(self, indices):
        """Substitute conj(z_v) -> z_v for each v in ``indices``."""
        indices = frozenset(indices)
        if not indices:
            return self
        n = self.n
        terms = {}
        for e, c in self.terms.items():
            f = list(e)
            for v in indices:
                f[v] += f[v + n]
                f[v + n] = 0
            f = tuple(f)
            s = terms.get(f)
            terms[f] = c if s is None else s + c
        return Poly(self.ctx, terms)

    def lambdify(self):
        """Vectorized numeric evaluator ``f(zvals, zbarvals)`` over numpy arrays."""
        items = [(complex(c), e) for e, c in self.terms.items()]
        n = self.n

        def f(zvals, zbarvals=None):
            if zbarvals is None:
                zbarvals = [np.conj(v) for v in zvals]
            vals = [np.asarray(v, dtype=complex) for v in zvals] + \
                   [np.asarray(v, dtype=complex) for v in zbarvals]
            shape = np.broadcast(*vals).shape if vals else ()
            out = np.zeros(shape, dtype=complex)
            powers = {}
            for c, e in items:
                t = np.full(shape, c, dtype=complex)
                for k, a in enumerate(e):
                    if a:
                        key = (k, a)
                        if key not in powers:
                            powers[key] = vals[k] ** a
                        t = t * powers[key]
                out += t
            return out

        f.nvars = n
        return f

    # printing -------------------------------------------------------------------

    def sorted_terms(self):
        """Terms in graded-lex order: higher total degree first, then lex descending."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def monomial_str(self, exps):
        n = self.n
        parts = []
        for i, a in enumerate(exps[:n]):
            if a:
                name = self.ctx.names[i]
                parts.append(name if a == 1 else f"{name}^{a}")
        for i, a in enumerate(exps[n:]):
            if a:
                name = f"conj({self.ctx.names[i]})"
                parts.append(name if a == 1 else f"{name}^{a}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
            mag = -c if negative else c
            mono = self.monomial_str(e)
            if not mono:
                text = format_coefficient(mag)
            elif mag == 1:
                text = mono
            else:
                text = f"{format_coefficient(mag)}*{mono}"
            if k == 0:
                out.append(("-" if negative else "") + text)
            else:
                out.append((" - " if negative else " + ") + text)
        return "".join(out)

    def __repr__(self):
        return f"Poly({str(self)!r})"


# ---------------------------------------------------------------------------
# module-level operations


def wirtinger(p, var, barred=False):
    """d p / d z_var, or d p / d conj(z_var) when ``barred``."""
    return p.diff(var, barred)


def conj_involution(p):
    return p.conj()


def realify(p, indices):
    """Replace each listed variable by its real part (z + conj z)/2.

    The result agrees with ``p`` on the locus where those coordinates are
    real, and is fixed by the involution whenever ``p`` is real there.
    """
    indices = frozenset(indices)
    if not indices:
        return p
    ctx = p.ctx
    zs, zbs = [], []
    for i in range(ctx.n):
        z, zb = Poly.var(ctx, i), Poly.var(ctx, i, barred=True)
        if i in indices:
            half = (z + zb) * Fraction(1, 2)
            zs.append(half)
            zbs.append(half)
        else:
            zs.append(z)
            zbs.append(zb)
    return p.substitute(ctx, zs, zbs)


def initial_form(p, base=None):
    """Lowest-degree homogeneous part of p expanded at ``base``.

    The result is expressed in displacement variables (z - base); total
    degree counts z and conj(z) together.
    """
    if p.is_zero():
        raise UndefinedInputError("initial form of the zero polynomial is undefined")
    q = p if base is None else p.translate(base)
    return q.homogeneous_part(q.order())


def real_part(p):
    return (p + p.conj()) * Fraction(1, 2)


def imag_part(p):
    return (p - p.conj()) * GaussRat(0, Fraction(-1, 2))


def monomials_upto(nsym, d):
    """All exponent tuples of length ``nsym`` with total degree <= d (graded)."""
    out = []
    for total in range(d + 1):
        for e in _compositions(total, nsym):
            out.append(e)
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomial_count_bound(nsym, d):
    """Number of monomials of degree <= d in ``nsym`` symbols."""
    return comb(d + nsym, nsym)


def random_poly(ctx, rng, degree, nterms, holomorphic=False, coeff_range=5, denom=4):
    """Random polynomial with small Gaussian-rational coefficients (test helper)."""
    n = ctx.n
    width = n if holomorphic else 2 * n
    terms = {}
    for _ in range(nterms):
        d = rng.randint(0, degree)
        e = [0] * width
        for _ in range(d):
            e[rng.randrange(width)] += 1
        if holomorphic:
            e = e + [0] * n
        re = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, denom))
        im = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, denom)) if rng.random() < 0.5 else 0
        terms[tuple(e)] = GaussRat(re, im)
    return Poly(ctx, terms)


__all__ = [
    "VarContext", "Poly", "wirtinger", "conj_involution", "initial_form", "realify",
    "real_part", "imag_part", "monomials_upto", "monomial_count_bound", "random_poly",
]
