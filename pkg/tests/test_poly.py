import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from crsing.algebra.gaussrat import GaussRat
from crsing.algebra.poly import (Poly, VarContext, conj_involution, imag_part, initial_form,
                                 random_poly, real_part, realify, wirtinger)
from crsing.errors import ContextError, UndefinedInputError
from crsing.parser import parse_expression as P

from oracles import conj_sympy, equal, symbols, to_sympy

CTX = VarContext(["z1", "z2"])
seeds = st.integers(0, 10 ** 6)


def rpoly(seed, degree=3, nterms=5, ctx=CTX, holomorphic=False):
    return random_poly(ctx, random.Random(seed), degree, nterms, holomorphic)


@given(seeds, seeds)
def test_ring_operations_match_sympy(s1, s2):
    p, q = rpoly(s1), rpoly(s2)
    a, b = to_sympy(p), to_sympy(q)
    assert equal(p + q, a + b)
    assert equal(p - q, a - b)
    assert equal(p * q, a * b)
    assert equal(p ** 2, a ** 2)


@given(seeds, seeds)
def test_conjugation_involution_and_automorphism(s1, s2):
    p, q = rpoly(s1), rpoly(s2)
    assert conj_involution(conj_involution(p)) == p
    assert (p * q).conj() == p.conj() * q.conj()
    assert (p + q).conj() == p.conj() + q.conj()
    assert equal(p.conj(), conj_sympy(to_sympy(p), CTX))


@given(seeds, seeds, st.integers(0, 1), st.booleans())
def test_leibniz_rule(s1, s2, var, barred):
    p, q = rpoly(s1), rpoly(s2)
    d = lambda f: wirtinger(f, var, barred)
    assert d(p * q) == d(p) * q + p * d(q)


@given(seeds, st.integers(0, 1), st.booleans())
def test_wirtinger_matches_sympy(seed, var, barred):
    p = rpoly(seed)
    zs, zbs = symbols(CTX)
    sym = (zbs if barred else zs)[var]
    assert equal(wirtinger(p, var, barred), sp.diff(to_sympy(p), sym))


@given(seeds)
def test_conjugate_derivative_identity(seed):
    p = rpoly(seed)
    # conj(dp/dz) = d conj(p) / d conj(z)
    assert p.diff(0).conj() == p.conj().diff(0, barred=True)


@given(seeds, seeds)
def test_initial_form_is_multiplicative(s1, s2):
    p, q = rpoly(s1), rpoly(s2)
    if p.is_zero() or q.is_zero():
        return
    assert initial_form(p * q) == initial_form(p) * initial_form(q)


@given(seeds, seeds)
def test_initial_form_at_a_shifted_base(s1, s2):
    p = rpoly(s1)
    base = [GaussRat(Fraction(s2 % 7 - 3, 2), 1), GaussRat(0, Fraction(s2 % 5, 3))]
    q = p - p.evaluate(base)
    if q.is_zero():
        return
    f = initial_form(q, base)
    assert f.evaluate([0, 0]) == 0
    assert f == f.homogeneous_part(f.degree())


def test_initial_form_of_zero_is_undefined():
    with pytest.raises(UndefinedInputError):
        initial_form(Poly(CTX))


def test_initial_form_examples():
    assert initial_form(P("z2^3 + z1^2*z2 + 5*z1^4", CTX)) == P("z2^3 + z1^2*z2", CTX)
    assert initial_form(P("z1^2 + z1 - 2", CTX), [1, 0]) == P("3*z1", CTX)
    assert initial_form(P("z1^2 + z1 - 1", CTX), [1, 0]) == P("1", CTX)


@given(seeds)
def test_evaluation_matches_sympy(seed):
    p = rpoly(seed)
    pt = [GaussRat(Fraction(1, 3), -2), GaussRat(2, Fraction(1, 5))]
    zs, zbs = symbols(CTX)
    subs = {}
    for s, sb, v in zip(zs, zbs, pt):
        val = sp.Rational(v.re.numerator, v.re.denominator) + sp.I * sp.Rational(v.im.numerator,
                                                                                 v.im.denominator)
        subs[s] = val
        subs[sb] = sp.conjugate(val)
    got = p.evaluate(pt)
    want = sp.nsimplify(sp.expand(to_sympy(p).subs(subs)))
    re, im = want.as_real_imag()
    assert got == GaussRat(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


@given(seeds)
def test_real_and_imaginary_parts(seed):
    p = rpoly(seed)
    re, im = real_part(p), imag_part(p)
    assert re.is_real() and im.is_real()
    assert re + im * GaussRat(0, 1) == p


def test_realify_replaces_real_variable():
    ctx = VarContext(["x", "w"], real=["x"])
    x = Poly.var(ctx, "x")
    assert realify(x * x, [0]) == ((x + x.conj()) * Fraction(1, 2)) ** 2
    assert P("Re(x)", ctx) == x


@given(seeds)
def test_lambdify_agrees_with_exact_evaluation(seed):
    p = rpoly(seed)
    pt = [GaussRat(Fraction(1, 2), Fraction(-1, 3)), GaussRat(Fraction(2, 3), 1)]
    f = p.lambdify()
    assert abs(complex(f([complex(pt[0]), complex(pt[1])])) - complex(p.evaluate(pt))) < 1e-9


@given(seeds)
def test_substitute_identity_and_translate(seed):
    p = rpoly(seed)
    zs = Poly.variables(CTX)
    assert p.substitute(CTX, zs) == p
    base = [GaussRat(1, -1), GaussRat(0, 2)]
    moved = p.translate(base)
    assert moved.evaluate([0, 0]) == p.evaluate(base)


def test_canonical_printing():
    assert str(P("-z1^2", CTX)) == "-z1^2"
    assert str(P("2i*z2^2*conj(z2)", CTX)) == "2i*z2^2*conj(z2)"
    assert str(Poly(CTX)) == "0"
    assert str(P("1 - z1 + conj(z1)*z2", CTX)) == "z2*conj(z1) - z1 + 1"


def test_degree_order_and_predicates():
    p = P("z1^3 + conj(z2)^2*z1 + z2", CTX)
    assert p.degree() == 3 and p.order() == 1
    assert not p.is_holomorphic()
    assert P("z1*conj(z1)", CTX).is_real()
    assert p.bidegree_part(1, 2) == P("conj(z2)^2*z1", CTX)


def test_context_validation():
    with pytest.raises(ContextError):
        VarContext(["z1", "z1"])
    with pytest.raises(ContextError):
        VarContext(["z1"], real=["z2"])
    with pytest.raises(ContextError):
        P("z1", CTX) + P("z1", VarContext(["z1"]))
