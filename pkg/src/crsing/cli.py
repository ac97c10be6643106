"""Command-line front end.

Exit codes: 0 verdict produced, 1 input error, 2 precondition or hypothesis
error, 3 search or experiment inconclusive.
"""

import argparse
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .algebra.gaussrat import GaussRat
from .algebra.interval import IntervalBox
from .algebra.poly import Poly, VarContext
from .errors import (CRSingError, InconclusiveError, InputError, PreconditionError, ProblemError)
from .geometry import (complex_tangent, cr_dimension_at, graph_equations, graph_point)
from .images import (build_sharp_example, equidim_stability, image_singular_locus,
                     perturbability, search_linear_perturbation, sharp_pillars)
from .parser import parse_box, parse_expression, parse_point, parse_problem
from .quadratic import (TYPES, classify, corresponds_parabolic, cr_image_obstruction, ck_example,
                        cr_vector_field, extract_quadratic, not_bishop_small_sing, realize,
                        removability_test)
from .report import Report

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message, code="usage")


def _matrix_strings(M):
    return [" ".join(str(c) for c in row) for row in M]


def _vec(v):
    return "(" + ", ".join(str(c) for c in v) + ")"


# ---------------------------------------------------------------------------
# shared plumbing


class Context:
    def __init__(self, args, problem, raw):
        self.args = args
        self.problem = problem
        self.raw = raw

    def param(self, name, default=None):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return str(flag)
        if self.problem is not None and name in self.problem.params:
            return self.problem.params[name]
        return default

    def int_param(self, name, default):
        v = self.param(name)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError:
            raise ProblemError(f"{name} must be an integer", code="bad-value") from None

    def point(self):
        prob = self.require()
        text = self.param("point")
        if text is not None:
            return parse_point(text, prob.n)
        return list(prob.base) if prob.base else [GaussRat(0)] * prob.n

    def box(self, center):
        prob = self.require()
        text = self.param("box")
        real = prob.ctx.real_indices()
        if text is None:
            return IntervalBox.cube(prob.n, 1, real, center=center)
        if ":" not in text:
            return IntervalBox.cube(prob.n, Fraction(text), real, center=center)
        return parse_box(text, prob.n, real)

    def require(self, what="a problem file (--input)"):
        if self.problem is None:
            raise InputError(f"this task needs {what}", code="missing-input")
        return self.problem


def _graph(ctx):
    prob = ctx.require()
    if prob.graph is None:
        raise ProblemError("[manifold] needs a 'graph' key (w = rho)", code="missing-key")
    return prob.graph


# ---------------------------------------------------------------------------
# tasks


def task_analyze(c, rep):
    prob = c.require()
    p = c.point()
    rep.add("ambient_dimension", prob.n)
    rep.add("point", [str(v) for v in p])
    if prob.graph is not None and not prob.equations:
        ext, eqs = graph_equations(prob.graph)
        q = graph_point(prob.graph, p)
        d = cr_dimension_at(eqs, q)
        rep.add("graph", str(prob.graph))
        rep.add("cr_dimension", d)
        generic = ext.n - 2
        rep.verdict = "CR point" if d == generic else f"CR singular (CR dimension {d}, generic {generic})"
        return
    N = prob.submanifold(p)
    rep.add("codimension", N.k)
    rep.add("cr_dimension", N.cr_dim)
    rep.add("defining_equations", [str(r) for r in N.real_eqs])
    rep.add("complex_tangent", [_vec(v) for v in complex_tangent(N, p).basis])
    if prob.map_components is None:
        rep.verdict = f"generic submanifold of CR dimension {N.cr_dim}"
        return
    F = prob.holomap()
    loc = image_singular_locus(N, F, p)
    rep.add("map", F.strings())
    rep.add("generic_rank", loc.generic_rank)
    rep.add("minors", [str(m) for m in loc.minors])
    rep.add("minor_rows", [_vec(r + 1 for r in rows) for rows, _ in loc.labels])
    rep.add("image_cr_dimension", loc.image_cr_dimension)
    rep.add("expected_cr_dimension", loc.expected_cr_dimension)
    rep.add("notes", loc.notes)
    rep.verdict = "CR singular at F(p)" if loc.singular_at_base else "CR point at F(p)"


def task_stability(c, rep):
    prob = c.require()
    p = c.point()
    N = prob.submanifold(p)
    F = prob.holomap()
    v = equidim_stability(N, F, p)
    rep.add("map", F.strings())
    rep.add("det", str(v.det))
    rep.add("det_at_point", str(v.det_value))
    rep.add("complex_tangent", [_vec(b) for b in v.complex_tangent.basis])
    if v.initial_form is not None:
        rep.add("initial_form", str(v.initial_form))
        rep.add("tangent_cone_contains_H", v.cone_contains)
    rep.verdict = v.tag


def task_perturb(c, rep):
    prob = c.require()
    p = c.point()
    N = prob.submanifold(p)
    F = prob.holomap()
    n, k, m = N.n, N.k, F.m
    rep.add("dimensions", {"n": n, "k": k, "m": m})
    rep.add("inequality_4n_minus_k_lt_2m_plus_2", perturbability(n, k, m))
    box = c.box(p)
    rep.add("box", box.as_strings())
    res = search_linear_perturbation(N, F, p, box, budget=c.int_param("budget", 200),
                                     seed=c.int_param("seed", 0))
    rep.add("attempts", res.attempts)
    if not res.found:
        raise _NotFoundReport(rep, res)
    rep.add("A", _matrix_strings(res.A))
    rep.add("perturbed_map", res.G.strings())
    rep.add("certificate", {"leaves": res.certificate.leaf_count, "depth": res.certificate.max_depth,
                            "replay": res.certificate.replay()})
    rep.verdict = "Found"


class _NotFoundReport(InconclusiveError):
    code = "not-found"

    def __init__(self, rep, res):
        super().__init__(f"no certified perturbation in {res.attempts} attempts")


def task_classify(c, rep):
    rho = _graph(c)
    model = extract_quadratic(rho)
    rep.add("rho", str(rho))
    rep.add("A", _matrix_strings(model.A))
    rep.add("B", _matrix_strings(model.B))
    rep.add("C", _matrix_strings(model.C))
    rep.add("rank_condition", cr_image_obstruction(model.A, model.B))
    rep.add("corresponds_parabolic", corresponds_parabolic(model.A, model.B))
    q = classify(model.A, model.B)
    if q.tag == "Type3":
        rep.add("a_squared", q.a2)
        rep.add("a", q.a_decimal(12))
    rep.verdict = q.tag


def task_removable(c, rep):
    rho = _graph(c)
    order = c.int_param("order", 12)
    v = removability_test(rho, order)
    L = cr_vector_field(rho)
    rep.add("rho", str(rho))
    rep.add("cr_vector_field", [str(L[0]), str(L[1])])
    if v.quotient is not None:
        rep.add("quotient", str(v.quotient))
        rep.add("direction", v.direction)
        if v.tag == "Removable":
            rep.add("verified", v.verify(rho))
    if v.order is not None:
        rep.add("order", v.order)
    if v.witness:
        rep.add("obstruction_degrees", v.witness)
    try:
        b = not_bishop_small_sing(rho)
        rep.add("bishop_criterion", {"tag": b.tag, "reason": b.reason, **b.checks})
    except PreconditionError as exc:
        rep.add("bishop_criterion", {"tag": "Inapplicable", "reason": exc.code})
    rep.add("notes", v.notes)
    rep.verdict = v.tag


def task_construct(c, rep):
    what = c.args.what
    rep.kind = f"construct {what}"
    if what == "sharp":
        n, k, m = c.args.n, c.args.k, c.args.m
        if None in (n, k, m):
            raise InputError("construct sharp needs --n, --k, --m", code="usage")
        ex = build_sharp_example(n, k, m)
        rep.add("equations", [str(r) for r in ex.N.real_eqs])
        rep.add("map", ex.F.strings())
        rep.add("chosen_minors", [str(d) for d in ex.chosen_minors])
        rep.add("pillars", sharp_pillars(ex))
        rep.add("notes", ex.notes)
        rep.verdict = "constructed"
    elif what == "realize":
        qtype = c.args.type
        if qtype not in TYPES:
            raise InputError(f"--type must be one of {', '.join(TYPES)}", code="usage")
        a = Fraction(c.args.a) if c.args.a else Fraction(0)
        rho1, rho2 = _realize_data(c)
        R = realize(rho1, rho2, qtype, a)
        rep.add("N", [str(r) for r in R.N.real_eqs])
        rep.add("map", R.F.strings())
        rep.add("local_diffeomorphism", R.local_diffeo)
        rep.add("image_graph_degree_3", str(R.image_rho))
        m = extract_quadratic(R.image_rho.truncate(2))
        rep.add("image_class", classify(m.A, m.B).label())
        rep.add("notes", R.notes)
        rep.verdict = "constructed"
    else:
        k = c.args.k if c.args.k is not None else 0
        rho, meta = ck_example(k)
        rep.add("rho", str(rho))
        rep.add("metadata", meta)
        rep.verdict = "constructed"


def _realize_data(c):
    if c.problem is None:
        n = c.args.n if c.args.n is not None else 2
        if n < 2:
            raise InputError("--n must be at least 2", code="usage")
        ctx = VarContext([f"zeta{j}" for j in range(1, n)] + ["omega1", "omega2"])
        return Poly(ctx), Poly(ctx)
    text = c.param("r")
    if text is None:
        raise ProblemError("[task] needs r = rho1 ; rho2", code="missing-key")
    parts = [s.strip() for s in text.split(";")]
    if len(parts) != 2:
        raise ProblemError("r must hold two expressions separated by ';'", code="bad-value")
    return tuple(parse_expression(s, c.problem.ctx) for s in parts)


def task_disc(c, rep):
    import numpy as np

    from .discs import (DiscProblem, disc_family, persistence_experiment, verify_second_order,
                        winding_count)
    from .errors import BoundaryZero
    prob = c.require()
    rtext = c.param("r")
    if rtext is None:
        raise ProblemError("[task] needs r = ... (Im w = r)", code="missing-key")
    rs = tuple(parse_expression(s.strip(), prob.ctx) for s in rtext.split(";"))
    phi = parse_expression(c.param("phi"), prob.ctx) if c.param("phi") else None
    grid = c.int_param("grid", 512)
    tol = float(c.param("tol", "1e-10"))
    dp = DiscProblem(rs, phi, grid, tol, c.int_param("max_iter", 500))
    ts_text = c.param("t")
    ts = [float(Fraction(s.strip())) for s in ts_text.split(",")] if ts_text else [0.05, 0.1, 0.2, 0.3]
    rep.add("label", "numerical witness (double precision), not a certificate")
    rep.add("r", [str(r) for r in rs])
    rep.add("grid", grid)
    count = c.int_param("perturbations", 0)
    if count > 0:
        seed = c.int_param("seed", 0)
        size = float(Fraction(c.param("size", "1/1000")))
        rng = np.random.default_rng(seed)
        perts = []
        for _ in range(count):
            re_, im_ = rng.uniform(-size, size, 2)
            perts.append(Poly.constant(prob.ctx, GaussRat(Fraction(re_).limit_denominator(10 ** 12),
                                                          Fraction(im_).limit_denominator(10 ** 12))))
        out = persistence_experiment(dp, perts, ts if ts_text else None)
        rep.add("outcomes", [{"psi": o.index, "t0": f"{o.t0:.6g}", "branch": o.branch,
                              "crossing_t": "none" if o.crossing is None else f"{o.crossing['t']:.6g}"}
                             for o in out.outcomes])
        if c.args.csv:
            with open(c.args.csv, "w", encoding="utf-8") as fh:
                fh.write(out.csv())
        rep.verdict = "every perturbation landed in a branch"
        return
    fam = disc_family(dp, ts)
    rows = []
    for s in fam.solutions:
        row = {"t": f"{s.t:.6g}", "iterations": s.iterations,
               "holomorphy_residual": f"{s.holomorphy_residual:.3e}",
               "attachment_residual": f"{s.attachment_residual:.3e}",
               "sup_g": f"{float(np.max(np.abs(s.g))):.12g}"}
        if phi is not None:
            try:
                row["winding"] = winding_count(phi, s.t, s.g, tol)
            except BoundaryZero as exc:
                row["winding"] = f"boundary zero at node {exc.node}"
        rows.append(row)
    rep.add("discs", rows)
    if len(set(ts)) >= 4 and all(0 < t <= 0.5 for t in ts):
        so = verify_second_order(fam)
        rep.add("second_order", {"ratios": [f"{r:.9g}" for r in so.ratios],
                                 "median": f"{so.median:.9g}", "passed": so.passed})
    if c.args.csv:
        with open(c.args.csv, "w", encoding="utf-8") as fh:
            fh.write("t,residual,winding,branch\n")
            for s, row in zip(fam.solutions, rows):
                fh.write(f"{s.t!r},{s.residual:.3e},{row.get('winding', '')},\n")
    rep.verdict = "solved"


TASKS = {
    "analyze": task_analyze,
    "stability": task_stability,
    "perturb": task_perturb,
    "classify": task_classify,
    "removable": task_removable,
    "construct": task_construct,
    "disc": task_disc,
}


def build_parser():
    ap = _ArgParser(prog="crsing", description="CR singularities of polynomial submanifolds")
    ap.add_argument("--version", action="version", version=f"crsing {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_ArgParser)
    for name in TASKS:
        sp = sub.add_parser(name)
        if name == "construct":
            sp.add_argument("what", choices=["sharp", "realize", "ck"])
            sp.add_argument("--n", type=int)
            sp.add_argument("--k", type=int)
            sp.add_argument("--m", type=int)
            sp.add_argument("--type", dest="type")
            sp.add_argument("--a")
        sp.add_argument("--input")
        sp.add_argument("--point")
        sp.add_argument("--box")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--order", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--csv")
        sp.add_argument("--json", action="store_true")
    return ap


def _exit_code(exc):
    if isinstance(exc, InputError):
        return EXIT_INPUT
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    if isinstance(exc, InconclusiveError):
        return EXIT_INCONCLUSIVE
    return EXIT_INPUT


def _semantic_args(argv):
    # the input path and output options do not change the result, so they stay out of the hash
    keep, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a in ("--input", "--csv"):
            skip = True
        elif a != "--json" and not a.startswith(("--input=", "--csv=")):
            keep.append(a)
    return keep


def run(argv, out=None):
    """Run the CLI; returns the exit code and writes the report to ``out``."""
    out = out or sys.stdout
    as_json = "--json" in argv
    rep = None
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise InputError("missing subcommand", code="usage")
        raw = b""
        problem = None
        if args.input:
            try:
                with open(args.input, "rb") as fh:
                    raw = fh.read()
            except OSError as exc:
                raise InputError(f"cannot read {args.input}: {exc.strerror}", code="io-error") from None
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise InputError("input is not valid UTF-8", code="encoding") from None
            problem = parse_problem(text)
        c = Context(args, problem, raw)
        rep = Report(args.command, raw + " ".join(_semantic_args(argv)).encode(), c.param("seed"))
        random.seed(0)
        TASKS[args.command](c, rep)
    except CRSingError as exc:
        code = _exit_code(exc)
        line = {"error": exc.code, "exit": code, "message": str(exc)}
        if rep is not None and rep.evidence and isinstance(exc, InconclusiveError):
            rep.verdict = "Inconclusive"
            rep.add("error", exc.code)
            out.write(rep.json() if as_json else rep.text())
        elif as_json:
            out.write(json.dumps(line) + "\n")
        else:
            out.write(f"error {exc.code} (exit {code}): {exc}\n")
        return code
    except (ValueError, ZeroDivisionError) as exc:
        if as_json:
            out.write(json.dumps({"error": "bad-value", "exit": EXIT_INPUT, "message": str(exc)}) + "\n")
        else:
            out.write(f"error bad-value (exit {EXIT_INPUT}): {exc}\n")
        return EXIT_INPUT
    out.write(rep.json() if as_json else rep.text())
    return EXIT_OK


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
