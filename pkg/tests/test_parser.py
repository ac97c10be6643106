import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crsing.algebra.gaussrat import GaussRat
from crsing.algebra.poly import Poly, VarContext, random_poly
from crsing.errors import InputError, ParseError, ProblemError
from crsing.parser import (parse_box, parse_constant, parse_expression as P, parse_point,
                           parse_problem)

CTX = VarContext(["z1", "z2", "z3"])

EX53 = """\
# N: z1 = conj(z3) in C^3
[manifold]
variables = z1, z2, z3
eq1 = z1 - conj(z3)
[map]
f1 = z1
f2 = z2
f3 = z3^2
f4 = z2*z3
[task]
kind = stability
point = 0, 0, 0
"""

FUZZ_TOKENS = ["z1", "z2", "z3", "conj(", "Re(", "Im(", "(", ")", "+", "-", "*", "^", "2", "3/4",
               "i", "5i", "0", "z9", "/", "@", " ", "\n", "1/0", "99999999999", "^64", "x", "7/"]


def fuzz_text(rng):
    return "".join(rng.choice(FUZZ_TOKENS) for _ in range(rng.randint(0, 14)))


@given(st.integers(0, 10 ** 6))
def test_parse_print_round_trip(seed):
    p = random_poly(CTX, random.Random(seed), 4, 6)
    assert P(str(p), CTX) == p
    assert str(P(str(p), CTX)) == str(p)


@pytest.mark.parametrize("text, expected", [
    ("z1 - conj(z3)", lambda c: Poly.var(c, "z1") - Poly.var(c, "z3").conj()),
    ("0", lambda c: Poly(c)),
    ("-z1^2", lambda c: -(Poly.var(c, "z1") ** 2)),
    ("3/2i*z2", lambda c: Poly.var(c, "z2") * GaussRat(0, Fraction(3, 2))),
    ("Re(z1)", lambda c: (Poly.var(c, "z1") + Poly.var(c, "z1").conj()) * Fraction(1, 2)),
    ("Im(z1)", lambda c: (Poly.var(c, "z1") - Poly.var(c, "z1").conj()) * GaussRat(0, Fraction(-1, 2))),
    ("(z1 + z2)^2", lambda c: (Poly.var(c, "z1") + Poly.var(c, "z2")) ** 2),
    ("conj(i*z1)", lambda c: Poly.var(c, "z1").conj() * GaussRat(0, -1)),
])
def test_expression_semantics(text, expected):
    assert P(text, CTX) == expected(CTX)


@pytest.mark.parametrize("text, code, col", [
    ("z1 +", "syntax-error", 5),
    ("z9 + 1", "unknown-identifier", 1),
    ("z1^-1", "bad-exponent", 4),
    ("z1^1/2", "bad-exponent", 4),
    ("2 z1", "syntax-error", 3),
    ("z1^2^3", "syntax-error", 5),
    ("z1^100", "too-large", 4),
    ("(z1 + z2 + z3 + 1)^64", "too-large", None),
    ("", "syntax-error", 1),
    ("z1 $ z2", "syntax-error", 4),
])
def test_positioned_errors(text, code, col):
    with pytest.raises(ParseError) as info:
        P(text, CTX)
    assert info.value.code == code
    if col is not None:
        assert info.value.col == col


def test_error_line_numbers():
    with pytest.raises(ParseError) as info:
        P("z1 +\n  * z2", CTX)
    assert (info.value.line, info.value.col) == (2, 3)


def test_real_variables_are_self_conjugate():
    ctx = VarContext(["x", "y", "xi"], real=["x", "y"])
    assert P("conj(x)", ctx) == P("x", ctx)
    assert P("Re(x + i*y)", ctx) == P("x", ctx)
    assert P("conj(xi)", ctx) != P("xi", ctx)


def test_deep_nesting_is_reported_not_crashed():
    with pytest.raises(ParseError) as info:
        P("(" * 5000 + "z1" + ")" * 5000, CTX)
    assert info.value.code == "too-large"
    with pytest.raises(ParseError):
        P("-" * 5000 + "z1", CTX)


def test_constants():
    assert parse_constant("1/2 - 3i") == GaussRat(Fraction(1, 2), -3)
    assert parse_point("0, i, 1/2", 3) == [GaussRat(0), GaussRat(0, 1), GaussRat(Fraction(1, 2))]


def test_fuzz_expressions_never_crash():
    rng = random.Random(7)
    for _ in range(5000):
        text = fuzz_text(rng)
        try:
            P(text, CTX)
        except ParseError:
            pass


# -- problem files ----------------------------------------------------------

def test_example_problem_file():
    prob = parse_problem(EX53)
    assert prob.kind == "stability"
    assert prob.codimension == 2
    assert [str(f) for f in prob.map_components] == ["z1", "z2", "z3^2", "z2*z3"]
    assert prob.equations[0].poly == P("z1 - conj(z3)", prob.ctx)
    N = prob.submanifold()
    assert N.k == 2 and N.cr_dim == 1
    assert prob.params["point"] == "0, 0, 0"


def test_minimal_file_defaults_to_analyze():
    prob = parse_problem("[manifold]\nvariables = z, w\n")
    assert prob.kind == "analyze" and prob.equations == [] and prob.map_components is None


def test_real_flag_and_real_variables():
    prob = parse_problem("[manifold]\nvariables = x, y, xi\nreal = x, y\n"
                         "eq1 = real: Im(xi) - x^2\n")
    assert prob.codimension == 3
    assert len(prob.real_equations()) == 3
    with pytest.raises(ProblemError) as info:
        parse_problem("[manifold]\nvariables = z, w\neq1 = real: w - z\n")
    assert info.value.code == "not-real"


@pytest.mark.parametrize("text, code", [
    ("[map]\nf1 = z1\n", "missing-section"),
    ("[manifold]\nvariables = z1\n[manifold]\n", "duplicate-section"),
    ("[manifold]\nvariables = z1\n[extra]\n", "unknown-section"),
    ("[manifold]\nvariables = z1\ncolour = red\n", "unknown-key"),
    ("[manifold]\nvariables = z1\neq1 = z1\neq1 = z1\n", "duplicate-key"),
    ("[manifold]\nreal = z1\n", "missing-key"),
    ("[manifold]\nvariables = z1, z2\ndimension = 3\n", "dimension-mismatch"),
    ("[manifold]\nvariables = z1, z2\neq1 = z9\n", "unknown-identifier"),
    ("[manifold]\nvariables = z1\n[map]\nf1 = conj(z1)\n", "not-holomorphic"),
    ("[manifold]\nvariables = z1\n[map]\nf1 = z1\nf3 = z1\n", "dimension-mismatch"),
    ("[manifold]\nvariables = z1\n[map]\ntarget = 2\nf1 = z1\n", "dimension-mismatch"),
    ("[manifold]\nvariables = z1\n[task]\nkind = dance\n", "bad-value"),
    ("[manifold]\nvariables = z1\n[task]\npoint = 0, 0\n", "dimension-mismatch"),
    ("[manifold]\nvariables = z1, conj\n", "bad-value"),
    ("variables = z1\n", "syntax-error"),
    ("[manifold\n", "syntax-error"),
])
def test_problem_error_codes(text, code):
    with pytest.raises(ProblemError) as info:
        parse_problem(text)
    assert info.value.code == code


def test_undeclared_variable_reports_line():
    with pytest.raises(ProblemError) as info:
        parse_problem("[manifold]\nvariables = z1, z2\neq1 = z1 + z9\n")
    assert info.value.code == "unknown-identifier" and info.value.line == 3


def test_boxes():
    box = parse_box("1/2", 2, real=[0])
    assert box.bounds == ((Fraction(-1, 2), Fraction(1, 2)), (0, 0),
                          (Fraction(-1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(1, 2)))
    box = parse_box("-1:1, 0:0", 1)
    assert box.bounds == ((-1, 1), (0, 0))
    with pytest.raises(InputError):
        parse_box("-1:1", 1)
    with pytest.raises(InputError):
        parse_box("abc", 1)


def test_fuzz_problem_files_never_crash():
    rng = random.Random(11)
    lines = EX53.splitlines()
    junk = ["[task]", "kind = disc", "eq2 = z1^", "f5 = conj(", "base = 0, 0", "real = z2", "= 3",
            "dimension = x", "[map]", "target = 9", "point = i, i, i"]
    for _ in range(2000):
        mutated = list(lines)
        for _ in range(rng.randint(1, 4)):
            op = rng.random()
            if op < 0.4 and mutated:
                del mutated[rng.randrange(len(mutated))]
            elif op < 0.8:
                mutated.insert(rng.randrange(len(mutated) + 1), rng.choice(junk))
            else:
                k = rng.randrange(len(mutated)) if mutated else 0
                if mutated:
                    s = mutated[k]
                    mutated[k] = s[:rng.randrange(len(s) + 1)]
        try:
            parse_problem("\n".join(mutated))
        except InputError:
            pass
