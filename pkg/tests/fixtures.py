"""Shared geometric fixtures."""

from fractions import Fraction

from crsing.algebra.poly import VarContext
from crsing.geometry import GenericSubmanifold
from crsing.images import HoloMap
from crsing.parser import parse_expression as P


def example_c3():
    """N: z1 = conj(z3) in C^3 with F = (z1, z2, z3^2, z2*z3) into C^4."""
    ctx = VarContext(["z1", "z2", "z3"])
    N = GenericSubmanifold.from_equations(ctx, [P("z1 - conj(z3)", ctx)])
    F = HoloMap(ctx, [P(s, ctx) for s in ("z1", "z2", "z3^2", "z2*z3")])
    return N, F


def plane(names=("x", "y"), extra=()):
    ctx = VarContext(list(names) + list(extra), real=list(names))
    return ctx, GenericSubmanifold.from_equations(ctx, [])


def sextic_map():
    """F(x, y) = (x + iy, (x^2 + y^2)^3, (x^2 + y^2)^2) on the real plane."""
    ctx, N = plane()
    F = HoloMap(ctx, [P(s, ctx) for s in ("x + i*y", "(x^2+y^2)^3", "(x^2+y^2)^2")])
    return N, F


def sextic_perturbed(eps=Fraction(1, 10)):
    ctx, N = plane()
    G = HoloMap(ctx, [P("x + i*y", ctx), P(f"(x^2+y^2)^3 + {eps}*x", ctx), P("(x^2+y^2)^2", ctx)])
    return N, G


def parabolic_c3(eps=None):
    """F(x, y, xi) = (x + iy, xi, x^2) on R^2 x C, optionally with + i eps x in the last slot."""
    ctx, N = plane(extra=("xi",))
    last = "x^2" if eps is None else f"x^2 + {eps}i*x"
    return N, HoloMap(ctx, [P("x + i*y", ctx), P("xi", ctx), P(last, ctx)])


def stable_c3():
    """F(x, y, xi) = (x + iy, xi, -y*xi - y^3/3): det DF = xi + y^2, whose initial form xi
    does not vanish on the complex tangent (the xi-line)."""
    ctx, N = plane(extra=("xi",))
    return N, HoloMap(ctx, [P("x + i*y", ctx), P("xi", ctx), P("-y*xi - 1/3*y^3", ctx)])
