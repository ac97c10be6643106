"""Exact polynomial division and graded formal-series division at the origin."""

from dataclasses import dataclass

from ..errors import UndefinedInputError
from .poly import Poly


def _key(e):
    return (sum(e), e)


def _leading(p):
    e = max(p.terms, key=_key)
    return e, p.terms[e]


def divide_exact(num, den):
    """Return q with num == q * den, or None when no polynomial quotient exists.

    Plain leading-term division under graded-lex order.  For a single divisor
    the remainder vanishes exactly when den divides num, since every step
    must then match the leading term of the current multiple of den.
    """
    if den.is_zero():
        raise UndefinedInputError("division by the zero polynomial")
    ctx = num.ctx
    lead_e, lead_c = _leading(den)
    rest = {e: c for e, c in den.terms.items() if e != lead_e}
    rem = dict(num.terms)
    quot = {}
    while rem:
        e = max(rem, key=_key)
        c = rem[e]
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(s < 0 for s in shift):
            return None
        t = c / lead_c
        quot[shift] = t
        del rem[e]
        for f, d in rest.items():
            g = tuple(a + b for a, b in zip(f, shift))
            v = rem.get(g)
            v = -(t * d) if v is None else v - t * d
            if v:
                rem[g] = v
            else:
                rem.pop(g, None)
    return Poly(ctx, quot)


@dataclass(frozen=True)
class SeriesQuotient:
    """Formal quotient truncated at total degree ``order``."""

    quotient: Poly
    order: int

    @property
    def obstructed(self):
        return False


@dataclass(frozen=True)
class Obstructed:
    """No formal power series quotient: the homogeneous equation of ``degree`` fails."""

    degree: int

    @property
    def obstructed(self):
        return True


def series_divide(num, den, order):
    """Graded division of formal power series at the origin.

    Writing den = D_e + D_{e+1} + ... with D_e != 0, a formal quotient
    q = Q_0 + Q_1 + ... must satisfy, degree by degree,
    N_d = sum_j Q_j D_{d-j}; each Q_{d-e} is forced by one exact homogeneous
    division by D_e.  The first degree where that division fails (or where
    num has a term below degree e) is reported as the obstruction.
    """
    if den.is_zero():
        raise UndefinedInputError("division by the zero polynomial")
    ctx = num.ctx
    e = den.order()
    dparts = {d: den.homogeneous_part(d) for d in range(e, den.degree() + 1)}
    lead = dparts[e]
    for d in range(0, e):
        if not num.homogeneous_part(d).is_zero():
            return Obstructed(d)
    q_parts = {}
    for j in range(0, order + 1):
        d = j + e
        rhs = num.homogeneous_part(d)
        for i, qi in q_parts.items():
            part = dparts.get(d - i)
            if part is not None and not qi.is_zero() and not part.is_zero():
                rhs = rhs - qi * part
        if rhs.is_zero():
            q_parts[j] = Poly(ctx)
            continue
        qj = divide_exact(rhs, lead)
        if qj is None:
            return Obstructed(d)
        q_parts[j] = qj
    total = Poly(ctx)
    for qj in q_parts.values():
        total = total + qj
    return SeriesQuotient(total, order)
