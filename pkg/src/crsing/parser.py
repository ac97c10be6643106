"""Recursive-descent parser for polynomial expressions and problem files.

Expression grammar (no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | base ('^' natural)?
    base   := rational | imaginary | 'i' | ident
            | 'conj(' expr ')' | 'Re(' expr ')' | 'Im(' expr ')' | '(' expr ')'

``rational`` is ``digits ('/' digits)?``; an imaginary literal is a rational
immediately followed by ``i`` (``3/2i`` is (3/2)*i).  Unary minus binds
looser than ``^``, so ``-z1^2`` is -(z1^2).
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.gaussrat import GaussRat
from .algebra.poly import Poly, VarContext, realify
from .errors import ContextError, ParseError, ProblemError

MAX_EXPONENT = 64
MAX_DEGREE = 256
MAX_TERMS = 20000
MAX_NESTING = 200
MAX_LENGTH = 100000

RESERVED = frozenset({"conj", "Re", "Im", "i"})

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<num>\d+(?:/\d+)?)(?P<imag>i(?![A-Za-z0-9]))?
  | (?P<ident>[A-Za-z][A-Za-z0-9]*)
  | (?P<op>[-+*^(),])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str      # num, imag, ident, op, end
    text: str
    line: int
    col: int
    value: object = None


def tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if m.group("nl"):
            line += 1
            line_start = m.end()
        elif m.group("num") is not None:
            num = m.group("num")
            if len(num) > 400:
                raise ParseError("numeric literal too long", line, col, code="too-large")
            if "/" in num:
                a, b = num.split("/")
                if int(b) == 0:
                    raise ParseError("zero denominator", line, col)
                value = Fraction(int(a), int(b))
            else:
                value = Fraction(int(num))
            if m.group("imag"):
                tokens.append(Token("imag", m.group(0), line, col, value))
            else:
                tokens.append(Token("num", num, line, col, value))
        elif kind == "ident":
            tokens.append(Token("ident", m.group(0), line, col))
        elif kind == "op":
            tokens.append(Token("op", m.group(0), line, col))
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, ctx):
        self.ctx = ctx
        self.tokens = tokenize(text)
        self.i = 0
        self.depth = 0
        self.real_idx = ctx.real_indices()

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if t.kind != "op" or t.text != text:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.line, t.col)
        return self.advance()

    def fail(self, t, what):
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected {what}, found {found}", t.line, t.col)

    def check_size(self, p, t):
        if len(p.terms) > MAX_TERMS:
            raise ParseError(f"expression expands to more than {MAX_TERMS} terms", t.line, t.col,
                             code="too-large")
        return p

    def parse(self):
        if self.peek().kind == "end":
            t = self.peek()
            raise ParseError("empty expression", t.line, t.col)
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            self.fail(t, "operator or end of input")
        return p

    def expr(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            t = self.peek()
            raise ParseError("expression nested too deeply", t.line, t.col, code="too-large")
        p = self.term()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in "+-":
                self.advance()
                q = self.term()
                p = p + q if t.text == "+" else p - q
                self.check_size(p, t)
            else:
                break
        self.depth -= 1
        return p

    def term(self):
        p = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text == "*":
                self.advance()
                q = self.factor()
                if len(p.terms) * len(q.terms) > MAX_TERMS * 4 or p.degree() + q.degree() > MAX_DEGREE:
                    raise ParseError("product too large", t.line, t.col, code="too-large")
                p = self.check_size(p * q, t)
            else:
                return p

    def factor(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.advance()
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise ParseError("expression nested too deeply", t.line, t.col, code="too-large")
            p = -self.factor()
            self.depth -= 1
            return p
        p = self.base()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.advance()
            e = self.peek()
            if e.kind != "num" or "/" in e.text:
                raise ParseError("exponent must be a natural number", e.line, e.col, code="bad-exponent")
            self.advance()
            k = int(e.value)
            if k > MAX_EXPONENT:
                raise ParseError(f"exponent exceeds {MAX_EXPONENT}", e.line, e.col, code="too-large")
            if max(p.degree(), 0) * k > MAX_DEGREE:
                raise ParseError(f"degree exceeds {MAX_DEGREE}", e.line, e.col, code="too-large")
            if len(p.terms) > 1 and k > 1:
                # rough bound on the expanded size before doing the work
                est = 1
                for _ in range(k):
                    est *= len(p.terms)
                    if est > MAX_TERMS * 50:
                        break
                if est > MAX_TERMS * 50 and _bound_terms(p, k) > MAX_TERMS:
                    raise ParseError("power expands too far", e.line, e.col, code="too-large")
            p = self.check_size(p ** k, e)
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "^":
                raise ParseError("chained '^' needs parentheses", nxt.line, nxt.col)
        return p

    def base(self):
        t = self.advance()
        ctx = self.ctx
        if t.kind == "num":
            return Poly.constant(ctx, t.value)
        if t.kind == "imag":
            return Poly.constant(ctx, GaussRat(0, t.value))
        if t.kind == "ident":
            name = t.text
            if name == "i":
                return Poly.constant(ctx, GaussRat(0, 1))
            if name in ("conj", "Re", "Im"):
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                c = inner.conj().identify_real(self.real_idx)
                if name == "conj":
                    return c
                if name == "Re":
                    return (inner + c) * Fraction(1, 2)
                return (inner - c) * GaussRat(0, Fraction(-1, 2))
            if name not in ctx:
                raise ParseError(f"unknown identifier {name!r}", t.line, t.col, code="unknown-identifier")
            return Poly.var(ctx, name)
        if t.kind == "op" and t.text == "(":
            p = self.expr()
            self.expect(")")
            return p
        self.fail(t, "a number, variable, or '('")


def _bound_terms(p, k):
    """Upper bound on the number of monomials of p^k (monomials of degree <= k*deg in the used symbols)."""
    from math import comb
    used = sum(1 for j in range(2 * p.n) if any(e[j] for e in p.terms))
    d = p.degree() * k
    return comb(d + used, used)


def parse_expression(text, ctx):
    """Parse ``text`` into a Poly over ``ctx``; raises ParseError with a position."""
    if not isinstance(text, str):
        raise ParseError("expression must be text", 1, 1)
    if len(text) > MAX_LENGTH:
        raise ParseError("expression too long", 1, 1, code="too-large")
    if not text.strip():
        raise ParseError("empty expression", 1, 1)
    return _Parser(text, ctx).parse()


def parse_constant(text):
    """Parse a constant expression (no variables) to a GaussRat."""
    p = parse_expression(text, VarContext([]))
    return p.constant_term()


# ---------------------------------------------------------------------------
# problem files

SECTION_KEYS = {
    "manifold": {"variables", "real", "dimension", "base", "graph"},
    "map": {"target"},
    "task": {"kind", "point", "box", "seed", "budget", "order", "grid", "delta", "eps", "ell",
             "t", "phi", "r", "perturbations", "tol", "max_iter", "size"},
}
TASK_KINDS = ("analyze", "stability", "perturb", "classify", "removable", "disc")

_EQ_KEY = re.compile(r"eq\d+$")
_MAP_KEY = re.compile(r"f\d+$")


@dataclass
class Equation:
    key: str
    poly: Poly
    real: bool
    line: int
    text: str


@dataclass
class ProblemFile:
    ctx: VarContext
    equations: list
    base: list = None
    graph: Poly = None
    map_target: int = None
    map_components: list = None
    kind: str = "analyze"
    params: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.ctx.n

    def real_equations(self):
        """Defining real equations: Re/Im pairs of complex equations, real ones as given,
        and Im v = 0 for every real variable v."""
        out = []
        real_idx = self.ctx.real_indices()
        for eq in self.equations:
            p = realify(eq.poly, real_idx)
            if eq.real:
                out.append(p)
            else:
                out.append((p + p.conj()) * Fraction(1, 2))
                out.append((p - p.conj()) * GaussRat(0, Fraction(-1, 2)))
        for v in sorted(real_idx):
            z = Poly.var(self.ctx, v)
            out.append((z - z.conj()) * GaussRat(0, Fraction(-1, 2)))
        return out

    @property
    def codimension(self):
        return sum(1 if e.real else 2 for e in self.equations) + len(self.ctx.real)

    def submanifold(self, base=None):
        from .geometry import GenericSubmanifold
        base = base if base is not None else (self.base or [GaussRat(0)] * self.n)
        return GenericSubmanifold.from_equations(
            self.ctx, [e.poly for e in self.equations], [e.real for e in self.equations], base)

    def holomap(self):
        from .images import HoloMap
        if self.map_components is None:
            raise ProblemError("problem has no [map] section", code="missing-section")
        return HoloMap(self.ctx, self.map_components)


def _strip_comment(line):
    k = line.find("#")
    return line if k < 0 else line[:k]


def parse_problem(text):
    """Parse a problem file into a validated ProblemFile."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ProblemError("malformed section header", code="syntax-error", line=lineno)
            name = line[1:-1].strip()
            if name not in SECTION_KEYS:
                raise ProblemError(f"unknown section [{name}]", code="unknown-section", line=lineno)
            if name in sections:
                raise ProblemError(f"duplicate section [{name}]", code="duplicate-section", line=lineno)
            sections[name] = {}
            current = name
            continue
        if current is None:
            raise ProblemError("key outside of any section", code="syntax-error", line=lineno)
        if "=" not in line:
            raise ProblemError("expected 'key = value'", code="syntax-error", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ProblemError("empty key", code="syntax-error", line=lineno)
        allowed = SECTION_KEYS[current]
        if key not in allowed and not (current == "manifold" and _EQ_KEY.match(key)) \
                and not (current == "map" and _MAP_KEY.match(key)):
            raise ProblemError(f"unknown key {key!r} in [{current}]", code="unknown-key", line=lineno)
        if key in sections[current]:
            raise ProblemError(f"duplicate key {key!r}", code="duplicate-key", line=lineno)
        sections[current][key] = (value, lineno)

    if "manifold" not in sections:
        raise ProblemError("missing [manifold] section", code="missing-section")
    man = sections["manifold"]
    if "variables" not in man:
        raise ProblemError("[manifold] needs a 'variables' key", code="missing-key")
    names_text, vline = man["variables"]
    names = [s.strip() for s in names_text.split(",") if s.strip()]
    for nm in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", nm) or nm in RESERVED:
            raise ProblemError(f"invalid variable name {nm!r}", code="bad-value", line=vline)
    real = []
    if "real" in man:
        real = [s.strip() for s in man["real"][0].split(",") if s.strip()]
        for nm in real:
            if nm not in names:
                raise ProblemError(f"real variable {nm!r} is not declared", code="unknown-identifier",
                                   line=man["real"][1])
    try:
        ctx = VarContext(names, real)
    except ContextError as exc:
        raise ProblemError(str(exc), code="bad-value", line=vline) from None
    if "dimension" in man:
        dim = _int(man["dimension"], "dimension")
        if dim != len(names):
            raise ProblemError(f"dimension {dim} but {len(names)} variables declared",
                               code="dimension-mismatch", line=man["dimension"][1])

    def expr(value, line):
        try:
            return parse_expression(value, ctx)
        except ParseError as exc:
            raise ProblemError(f"{exc.message} (column {exc.col})", code=exc.code, line=line) from None

    equations = []
    for key in sorted((k for k in man if _EQ_KEY.match(k)), key=lambda k: int(k[2:])):
        value, line = man[key]
        is_real = False
        if value.startswith("real:"):
            is_real = True
            value = value[5:].strip()
        p = expr(value, line)
        if is_real and not realify(p, ctx.real_indices()).is_real():
            raise ProblemError(f"{key} is flagged real but is not real-valued", code="not-real", line=line)
        equations.append(Equation(key, p, is_real, line, value))
    base = None
    if "base" in man:
        base = _point(man["base"], len(names), "base")
    graph = expr(*man["graph"]) if "graph" in man else None

    map_target = map_components = None
    if "map" in sections:
        mp = sections["map"]
        keys = sorted((k for k in mp if _MAP_KEY.match(k)), key=lambda k: int(k[1:]))
        if [int(k[1:]) for k in keys] != list(range(1, len(keys) + 1)):
            raise ProblemError("map components must be numbered f1, f2, ... without gaps",
                               code="dimension-mismatch")
        map_components = []
        for k in keys:
            p = expr(*mp[k])
            if not p.is_holomorphic():
                raise ProblemError(f"{k} is not holomorphic (contains conj)", code="not-holomorphic",
                                   line=mp[k][1])
            map_components.append(p)
        map_target = len(keys)
        if "target" in mp:
            target = _int(mp["target"], "target")
            if target != len(keys):
                raise ProblemError(f"target {target} but {len(keys)} components given",
                                   code="dimension-mismatch", line=mp["target"][1])
        if not keys:
            raise ProblemError("[map] has no components", code="missing-key")

    kind = "analyze"
    params = {}
    if "task" in sections:
        task = sections["task"]
        for key, (value, line) in task.items():
            params[key] = value
        if "kind" in task:
            kind = task["kind"][0]
            if kind not in TASK_KINDS:
                raise ProblemError(f"unknown task kind {kind!r}", code="bad-value", line=task["kind"][1])
        if "point" in task:
            _point(task["point"], len(names), "point")
    lines = {sec: {k: v[1] for k, v in d.items()} for sec, d in sections.items()}
    return ProblemFile(ctx, equations, base, graph, map_target, map_components, kind, params, lines)


def _int(entry, what):
    value, line = entry
    try:
        return int(value)
    except ValueError:
        raise ProblemError(f"{what} must be an integer", code="bad-value", line=line) from None


def _point(entry, n, what):
    value, line = entry
    parts = [s.strip() for s in value.split(",")]
    if len(parts) != n:
        raise ProblemError(f"{what} has {len(parts)} coordinates, expected {n}",
                           code="dimension-mismatch", line=line)
    return [parse_point_coordinate(s, line) for s in parts]


def parse_point_coordinate(text, line=None):
    try:
        p = parse_expression(text, VarContext([]))
    except ParseError as exc:
        raise ProblemError(f"bad coordinate {text!r}: {exc.message}", code="bad-value", line=line) from None
    return p.constant_term()


def parse_point(text, n):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != n:
        raise ProblemError(f"point has {len(parts)} coordinates, expected {n}", code="dimension-mismatch")
    return [parse_point_coordinate(s) for s in parts]


def parse_box(text, nvars, real=()):
    """A single rational radius, or comma-separated ``lo:hi`` pairs per real coordinate."""
    from .algebra.interval import IntervalBox
    text = text.strip()
    try:
        if ":" not in text:
            radius = Fraction(text)
            if radius < 0:
                raise ValueError
            return IntervalBox.cube(nvars, radius, real)
        pairs = [s.strip() for s in text.split(",")]
        if len(pairs) != 2 * nvars:
            raise ProblemError(f"box has {len(pairs)} coordinates, expected {2 * nvars}",
                               code="dimension-mismatch")
        bounds = []
        for s in pairs:
            lo, hi = s.split(":")
            bounds.append((Fraction(lo.strip()), Fraction(hi.strip())))
        return IntervalBox(bounds)
    except (ValueError, ZeroDivisionError):
        raise ProblemError(f"cannot read box {text!r}", code="bad-value") from None
