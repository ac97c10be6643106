import random
from fractions import Fraction

import pytest

from crsing.algebra.gaussrat import GaussRat
from crsing.algebra.interval import IntervalBox, certify_no_common_zero
from crsing.algebra.matrix import minors
from crsing.algebra.poly import Poly, VarContext
from crsing.errors import DegenerateMapError, DimensionError, DomainError, HypothesisError, NotFound
from crsing.geometry import (GenericSubmanifold, cr_dimension_at, graph_equations,
                             map_restricted_rank, real_transverse)
from crsing.images import (HoloMap, anchored_zero_perturbation, build_sharp_example,
                           equidim_stability, extend_and_perturb, image_cr_dimension,
                           image_singular_locus, perturb_2jet, perturbability,
                           search_linear_perturbation, sharp_pillars)
from crsing.parser import parse_expression as P

from fixtures import example_c3, parabolic_c3, plane, sextic_map, sextic_perturbed, stable_c3


def test_singular_locus_of_c3_example():
    N, F = example_c3()
    loc = image_singular_locus(N, F)
    assert [str(m) for m in loc.minors] == ["2*z3", "z2", "-2*z3^2", "0"]
    assert loc.singular_at_base
    assert (loc.image_cr_dimension, loc.expected_cr_dimension) == (2, 1)
    # at a point of N away from the singular set the image is CR of the expected dimension
    p = [GaussRat(1, 1), GaussRat(1), GaussRat(1, -1)]
    assert not image_singular_locus(N, F, p).singular_at_base
    assert image_cr_dimension(N, F, p) == 1


def test_sextic_minors():
    N, F = sextic_map()
    ms = minors(F.jacobian(), 2)
    ctx = F.ctx
    assert ms[0] == P("6*(x^2+y^2)^2*(y - i*x)", ctx)
    assert ms[1] == P("4*(x^2+y^2)*(y - i*x)", ctx)
    assert ms[2] == Poly(ctx)
    assert image_singular_locus(N, F).singular_at_base


def test_sextic_perturbation_minors():
    N, G = sextic_perturbed()
    ctx = G.ctx
    ms = minors(G.jacobian(), 2)
    assert ms[0] == P("6*(x^2+y^2)^2*(y - i*x) - 1/10i", ctx)
    assert ms[1] == P("4*(x^2+y^2)*(y - i*x)", ctx)
    assert ms[2] == P("4/10*y*(x^2+y^2)", ctx)


def test_singular_verdict_agrees_with_graph_cr_dimension():
    # the image of the plane under (x + iy, x^2 + y^2) is the graph w = |z|^2
    ctx, N = plane()
    F = HoloMap(ctx, [P("x + i*y", ctx), P("x^2 + y^2", ctx)])
    zc = VarContext(["z"])
    _, eqs = graph_equations(P("z*conj(z)", zc))
    for x, y in [(0, 0), (1, 0), (Fraction(1, 2), -1)]:
        sing = image_singular_locus(N, F, [x, y]).singular_at_base
        z = GaussRat(x, y)
        assert sing == (cr_dimension_at(eqs, [z, z.abs2()]) == 1)


def test_degenerate_maps():
    ctx = VarContext(["z1", "z2"])
    N = GenericSubmanifold(ctx, [])
    with pytest.raises(DegenerateMapError):
        image_singular_locus(N, HoloMap(ctx, [P("z1", ctx), P("z1^2", ctx), P("2*z1", ctx)]))
    with pytest.raises(DegenerateMapError):
        image_singular_locus(N, HoloMap(ctx, [P("z1", ctx)]))
    with pytest.raises(DomainError):
        HoloMap(ctx, [P("conj(z1)", ctx)])


def test_equidim_examples():
    N, F = parabolic_c3()
    v = equidim_stability(N, F)
    assert v.tag == "ConditionFails" and v.cone_contains
    assert str(v.det) == "2i*x"
    ctx, plane_N = plane()
    elliptic = HoloMap(ctx, [P("x + i*y", ctx), P("x^2 + y^2", ctx)])
    assert equidim_stability(plane_N, elliptic).tag == "ConditionFails"
    parabolic = HoloMap(ctx, [P("x + i*y", ctx), P("x^2", ctx)])
    assert str(equidim_stability(plane_N, parabolic).det) == "-2i*x"
    G = HoloMap(ctx, [P("x + i*y", ctx), P("x^2 + 1/10i*x", ctx)])
    assert equidim_stability(plane_N, G).det == P("-i*(2*x + 1/10i)", ctx)
    assert equidim_stability(plane_N, G).tag == "NotSingularAtPoint"


def test_stable_fixture():
    N, F = stable_c3()
    v = equidim_stability(N, F)
    assert v.tag == "StableSingularity"
    assert v.det == P("xi + y^2", F.ctx) and v.det_value == 0 and not v.cone_contains
    with pytest.raises(DimensionError):
        equidim_stability(*example_c3())


@pytest.mark.parametrize("triple, expected", [((2, 2, 3), True), ((3, 2, 4), False), ((1, 1, 1), True),
                                              ((3, 3, 3), False), ((2, 1, 4), True)])
def test_perturbability(triple, expected):
    assert perturbability(*triple) is expected


@pytest.mark.parametrize("triple", [(0, 1, 1), (2, 3, 4), (3, 2, 2), (2.0, 1, 3)])
def test_perturbability_rejects_bad_triples(triple):
    with pytest.raises(DomainError):
        perturbability(*triple)


def test_linear_perturbation_search_certifies():
    N, F = sextic_map()
    res = search_linear_perturbation(N, F, budget=200, seed=0)
    assert res.found and res.certificate.replay()
    ms = [d for d in minors(res.G.jacobian(), 2) if not d.is_zero()]
    again = certify_no_common_zero(ms, N.real_eqs, res.certified_box)
    assert again.ok


def test_linear_perturbation_is_deterministic():
    N, F = sextic_map()
    a = search_linear_perturbation(N, F, budget=50, seed=3)
    b = search_linear_perturbation(N, F, budget=50, seed=3)
    assert a.attempts == b.attempts and a.A == b.A


def test_forced_zero_blocks_certification():
    N, F = example_c3()
    with pytest.raises(DomainError) as info:
        search_linear_perturbation(N, F)
    assert info.value.code == "inequality-not-satisfied"
    rng = random.Random(0)
    box = IntervalBox.cube(3, Fraction(1, 2))
    for _ in range(4):
        A = [[GaussRat(Fraction(rng.randint(-4, 4), 16), Fraction(rng.randint(-4, 4), 16))
              for _ in range(3)] for _ in range(4)]
        zs = Poly.variables(F.ctx)
        G = F + [sum((zs[j] * A[i][j] for j in range(3)), Poly(F.ctx)) for i in range(4)]
        ms = [d for d in minors(G.jacobian(), 3) if not d.is_zero()]
        assert not certify_no_common_zero(ms, N.real_eqs, box, max_depth=8).ok


def test_anchored_perturbation_examples():
    N, F = example_c3()
    ctx = F.ctx
    res = anchored_zero_perturbation([P("2*z3", ctx), P("z2", ctx)], N)
    assert res.attempts == 1 and res.sup_bound < 1e-300 and res.transverse
    assert all(c == 0 for c in res.c)
    empty = anchored_zero_perturbation([], N)
    assert empty.psi == [] and empty.transverse


def test_anchored_perturbation_random_linear():
    ctx = VarContext(["z", "w"])
    N = GenericSubmanifold.from_equations(ctx, [P("Im(w)", ctx)], [True])
    rng = random.Random(5)
    for seed in range(50):
        a, b = (GaussRat(Fraction(rng.randint(-4, 4), 4), Fraction(rng.randint(-4, 4), 4)) for _ in range(2))
        if not a and not b:
            a = GaussRat(1)
        phi = [Poly.var(ctx, 0) * a + Poly.var(ctx, 1) * b]
        res = anchored_zero_perturbation(phi, N, seed=seed)
        assert real_transverse(res.psi, N)
        assert res.psi[0].evaluate([0, 0]) == 0


def test_anchored_rank_failure():
    N, F = example_c3()
    ctx = F.ctx
    with pytest.raises(DegenerateMapError):
        anchored_zero_perturbation([P("z2", ctx), P("2*z2", ctx)], N)


def test_sharp_example_reproduces_c3_pair():
    ex = build_sharp_example(3, 2, 4)
    N, F = example_c3()
    assert ex.F.strings() == F.strings()
    assert [str(r) for r in ex.N.real_eqs] == [str(r) for r in N.real_eqs]
    assert sharp_pillars(ex) == {"minors_vanish": True, "chosen_full_rank": True, "transverse": True}


@pytest.mark.parametrize("triple", [(2, 2, 2), (3, 2, 3), (3, 3, 3), (4, 2, 6), (4, 3, 5), (4, 4, 5),
                                    (5, 3, 7), (5, 4, 7)])
def test_sharp_pillars_hold(triple):
    ex = build_sharp_example(*triple)
    assert all(sharp_pillars(ex).values())
    assert image_singular_locus(ex.N, ex.F).singular_at_base


def test_sharp_smallest_case():
    ex = build_sharp_example(2, 2, 2)
    assert ex.F.strings() == ["z1", "z2^2"]


def test_sharp_odd_k_full_rank_off_singular_set():
    ex = build_sharp_example(4, 3, 5)
    assert ex.N.k == 3
    rng = random.Random(0)
    hits = 0
    for _ in range(20):
        # points of N: z1 = conj(z4), Re(z2) = Re(z3)
        a, b, c, d = (GaussRat(Fraction(rng.randint(-4, 4), 4), Fraction(rng.randint(-4, 4), 4)) for _ in range(4))
        z3 = GaussRat(b.re, c.im)
        p = [a.conjugate(), b, z3, a]
        if ex.N.contains(p):
            hits += 1
            if any(m.evaluate(p) for m in minors(ex.F.jacobian(), 4)):
                assert map_restricted_rank(ex.F.components, ex.N, p) == ex.N.real_dim
    assert hits == 20


def test_sharp_rejects_perturbable_triples():
    with pytest.raises(DomainError):
        build_sharp_example(2, 2, 3)


def test_extend_and_perturb():
    ctx = VarContext(["z1", "z2"])
    F = HoloMap(ctx, [P("z1", ctx), P("z1*z2", ctx)])
    ext = extend_and_perturb(F, 1, Fraction(1, 100))
    assert ext.G.strings() == ["z1", "z1*z2", "1/100*z2"]
    assert ext.designated_rows == (0, 2)
    assert ext.designated_minor == Poly.constant(ctx, Fraction(1, 100))
    assert extend_and_perturb(F, 0, 1).G == F
    c3 = VarContext(["z1", "z2", "z3"])
    F3 = HoloMap(c3, [P("z1", c3), P("z3*z1", c3), P("z3^2", c3)])
    ext = extend_and_perturb(F3, 2, Fraction(1, 100))
    assert ext.designated_minor in (Poly.constant(c3, Fraction(1, 10000)),
                                    Poly.constant(c3, Fraction(-1, 10000)))
    with pytest.raises(HypothesisError):
        extend_and_perturb(HoloMap(ctx, [P("z2", ctx), P("z1", ctx)]), 1, 1)


def test_two_jet_keeps_good_map():
    N, F = example_c3()
    res = perturb_2jet(N, F)
    assert res.attempts == 1 and res.F == F
    assert res.minors_vanish and res.full_rank and res.transverse


def test_two_jet_repairs_dead_row():
    N, _ = example_c3()
    ctx = N.ctx
    F = HoloMap(ctx, [P(s, ctx) for s in ("z1", "z2", "z3^2", "0")])
    res = perturb_2jet(N, F, seed=0, budget=10000)
    assert res.attempts > 1 and res.transverse and res.full_rank
    ms = minors(res.F.jacobian(), 3)
    assert all(d.evaluate([0, 0, 0]) == 0 for d in ms)
    assert real_transverse(res.chosen_minors, N)


def test_two_jet_zero_delta_tries_only_f():
    N, _ = example_c3()
    ctx = N.ctx
    F = HoloMap(ctx, [P(s, ctx) for s in ("z1", "z2", "z3^2", "0")])
    with pytest.raises(NotFound) as info:
        perturb_2jet(N, F, delta=0)
    assert info.value.attempts == 1
