"""Problem files.

A problem file is a sequence of ``[section]`` headers followed by
``key = value`` lines; ``#`` starts a comment.  Grammar (EBNF)::

    file      = { line } ;
    line      = header | entry | blank ;
    header    = "[" name "]" ;
    entry     = key "=" value ;
    expr      = term { ("+" | "-") term } ;
    term      = unary { ("*" | "/") unary } ;
    unary     = ("+" | "-") unary | power ;
    power     = atom [ "^" ["-"] integer ] ;
    atom      = integer | identifier | "(" expr ")" ;

Sections:

``[parameters]``
    ``name = [positive|nonnegative|real] [value]``; the value is a rational
    (``1/2``, ``0.25``) or a range ``lo..hi`` sampled at five points.
``[axes]``
    ``x = dx`` per spatial axis and ``t = dt`` for time.
``[pde]``
    ``equation = u_t - a^2*u_xx`` (linear in the derivative tokens).
``[approximations]``
    ``u_xx = central2 [axis] [theta=name] [neighbor=axis]``.
``[aliases]``
    ``d = dt/dx^2``; the alias replaces one parameter of its right-hand side.
``[matrix]``
    ``unknowns = u_t, u_x, u`` followed by ``row = p1, p2, p3`` lines with
    operator entries in the shifts ``Tx, Tt, ...``; the last unknown is kept.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..approx import TIME, DerivativeSymbol, RuleSpec, UnknownRule, get_rule, shift_var, validate_assignment
from ..kernel import ParamContext, RationalFunction
from ..poly import RingContext, ShiftPolynomial
from ..scheme import DiscretizationProblem, InvalidAssignment, PDESpec

SECTIONS = ("parameters", "axes", "pde", "approximations", "aliases", "matrix")
ASSUMPTIONS = ("positive", "nonnegative", "real")
MAX_POWER = 64


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line, self.col, self.message = line, col, message


class UndeclaredSymbol(ParseError):
    pass


# -- expressions --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class _Tok:
    kind: str          # "int", "id", "op", "end"
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        col = col0 + m.start(m.lastindex)
        if m.group(1):
            out.append(_Tok("int", m.group(1), col))
        elif m.group(2):
            out.append(_Tok("id", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(line, col, f"unexpected character {ch!r}")
            out.append(_Tok("op", ch, col))
        pos = m.end()
    out.append(_Tok("end", "", col0 + len(text)))
    return out


class _Expr:
    """Recursive-descent evaluator over a domain given by ``atom`` and ``const``."""

    def __init__(self, text: str, line: int, col: int, ident: Callable, const: Callable,
                 divide: Callable):
        self.toks = _tokenize(text, line, col)
        self.k = 0
        self.line = line
        self.ident, self.const, self.divide = ident, const, divide

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.toks[self.k]
        return ParseError(self.line, tok.col, msg)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def take(self, text: str | None = None) -> _Tok:
        t = self.tok
        if text is not None and t.text != text:
            raise self.error(f"expected {text!r}" + (f", found {t.text!r}" if t.text else " before end of line"))
        self.k += 1
        return t

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression")
        v = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take()
            w = self.unary()
            v = v * w if op.text == "*" else self.divide(v, w, op)
        return v

    def unary(self):
        if self.tok.text == "-":
            self.take()
            return -self.unary()
        if self.tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text != "^":
            return base
        op = self.take()
        neg = False
        if self.tok.text == "-":
            self.take()
            neg = True
        t = self.tok
        if t.kind != "int":
            raise self.error("exponent must be an integer literal")
        self.take()
        k = int(t.text)
        if k > MAX_POWER:
            raise ParseError(self.line, t.col, f"exponent {k} exceeds {MAX_POWER}")
        if neg:
            return self.divide(self.const(1), base ** k, op)
        return base ** k

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.take()
            return self.const(int(t.text))
        if t.kind == "id":
            self.take()
            return self.ident(t.text, t)
        if t.text == "(":
            self.take()
            v = self.expr()
            self.take(")")
            return v
        raise self.error("expected a number, a name or '('" if t.text else "unexpected end of expression")


def parse_rational_function(text: str, ctx: ParamContext, line: int = 1, col: int = 1) -> RationalFunction:
    def ident(name, tok):
        if name not in ctx.names:
            raise UndeclaredSymbol(line, tok.col, f"undeclared parameter {name!r}")
        return ctx.param(name)

    def divide(a, b, op):
        if not b:
            raise ParseError(line, op.col, "division by zero")
        return a / b

    return _Expr(text, line, col, ident, ctx.const, divide).parse()


def parse_operator(text: str, ring: RingContext, line: int = 1, col: int = 1) -> ShiftPolynomial:
    """Polynomial in the ring variables with parameter coefficients."""
    def ident(name, tok):
        if name in ring.variables:
            return ring.var(name)
        if name in ring.params.names:
            return ring.param(name)
        raise UndeclaredSymbol(line, tok.col, f"undeclared symbol {name!r}")

    def divide(a, b, op):
        if not b:
            raise ParseError(line, op.col, "division by zero")
        if any(b.lm()):
            raise ParseError(line, op.col, "division by an operator is not allowed")
        return a.scale(b.lc().inverse())

    return _Expr(text, line, col, ident, ring.const, divide).parse()


# -- file structure -----------------------------------------------------------


@dataclass
class Entry:
    key: str
    value: str
    line: int
    col: int          # column of the value


@dataclass
class ProblemFile:
    params: ParamContext
    assumptions: dict[str, str] = field(default_factory=dict)
    values: dict[str, object] = field(default_factory=dict)
    axes: dict[str, str] = field(default_factory=dict)           # axis -> step parameter
    pde: PDESpec | None = None
    assignment: list[tuple[DerivativeSymbol, RuleSpec]] = field(default_factory=list)
    aliases: list[tuple[str, RationalFunction]] = field(default_factory=list)
    unknowns: list[DerivativeSymbol] = field(default_factory=list)
    matrix: list[list[ShiftPolynomial]] | None = None

    @property
    def spatial(self) -> tuple[str, ...]:
        return tuple(a for a in self.axes if a != TIME)

    def ring(self) -> RingContext:
        return RingContext([shift_var(a) for a in self.spatial + (TIME,)], self.params)

    def problem(self) -> DiscretizationProblem | None:
        if self.pde is None:
            return None
        return DiscretizationProblem(self.pde, self.assignment, dict(self.axes))

    def alias_names(self) -> list[str]:
        return [n for n, _ in self.aliases]

    def sign_assumptions(self) -> tuple[list[str], list[str]]:
        pos = [n for n, a in self.assumptions.items() if a == "positive"]
        nonneg = [n for n, a in self.assumptions.items() if a == "nonnegative"]
        return pos, nonneg


def _split(text: str) -> dict[str, list[Entry]]:
    sections: dict[str, list[Entry]] = {}
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        indent = len(body) - len(body.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError(no, indent + len(stripped), "missing ']' in section header")
            name = stripped[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ParseError(no, indent + 2, f"unknown section {name!r}")
            if name in sections:
                raise ParseError(no, indent + 2, f"duplicate section {name!r}")
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ParseError(no, indent + 1, "entry outside of a section")
        if "=" not in body:
            raise ParseError(no, len(body) + 1, "expected 'key = value'")
        key, _, value = body.partition("=")
        if not key.strip():
            raise ParseError(no, indent + 1, "missing key")
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        sections[current].append(Entry(key.strip(), value.strip(), no, vcol))
    return sections


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_RATIONAL = re.compile(r"-?\d+(?:/\d+|\.\d+)?")


def parse_value(text: str, line: int = 1, col: int = 1):
    """A rational literal or a ``lo..hi`` range (five samples)."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        a, b = parse_value(lo, line, col), parse_value(hi, line, col + len(lo) + 2)
        if isinstance(a, tuple) or isinstance(b, tuple) or a > b:
            raise ParseError(line, col, "malformed range")
        return (a, b, 5)
    if not _RATIONAL.fullmatch(text):
        raise ParseError(line, col, f"not a rational number: {text!r}")
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, col, f"not a rational number: {text!r}") from None
    return v


def _derivative(e: Entry, spatial: tuple[str, ...], col: int | None = None) -> DerivativeSymbol:
    try:
        beta = DerivativeSymbol.parse(e.key)
    except ValueError:
        raise ParseError(e.line, 1 if col is None else col, f"not a derivative token: {e.key!r}") from None
    bad = beta.axes() - set(spatial) - {TIME}
    if bad:
        raise UndeclaredSymbol(e.line, 1 if col is None else col, f"undeclared axis {sorted(bad)[0]!r}")
    return beta


def parse_problem(text: str) -> ProblemFile:
    sections = _split(text)
    for need in ("parameters", "axes"):
        if need not in sections:
            raise ParseError(1, 1, f"missing [{need}] section")
    alias_entries = sections.get("aliases", [])
    alias_names = {e.key for e in alias_entries}

    names, assumptions, values = [], {}, {}
    for e in sections["parameters"]:
        if not _NAME.fullmatch(e.key):
            raise ParseError(e.line, 1, f"invalid parameter name {e.key!r}")
        if e.key in names or e.key in assumptions:
            raise ParseError(e.line, 1, f"parameter {e.key!r} declared twice")
        words = e.value.split()
        if words and words[0] in ASSUMPTIONS:
            assumptions[e.key] = words.pop(0)
        else:
            assumptions[e.key] = "real"
        if len(words) > 1:
            raise ParseError(e.line, e.col, "expected at most an assumption and a value")
        if words:
            values[e.key] = parse_value(words[0], e.line, e.col + e.value.find(words[0]))
        if e.key not in alias_names:
            names.append(e.key)
    if not names:
        raise ParseError(1, 1, "no parameters declared")
    ctx = ParamContext(names)
    pf = ProblemFile(ctx, assumptions, values)

    for e in sections["axes"]:
        if not re.fullmatch(r"[a-z]", e.key):
            raise ParseError(e.line, 1, f"axis names are single lowercase letters, got {e.key!r}")
        if e.key in pf.axes:
            raise ParseError(e.line, 1, f"axis {e.key!r} declared twice")
        if e.value not in ctx.names:
            raise UndeclaredSymbol(e.line, e.col, f"undeclared step parameter {e.value!r}")
        pf.axes[e.key] = e.value
    if TIME not in pf.axes:
        raise ParseError(sections["axes"][0].line if sections["axes"] else 1, 1, "the time axis 't' is required")
    # keep time last
    pf.axes = {a: s for a, s in pf.axes.items() if a != TIME} | {TIME: pf.axes[TIME]}

    spatial = pf.spatial
    for e in sections.get("approximations", []):
        beta = _derivative(e, spatial)
        pf.assignment.append((beta, _rule_spec(e, beta, pf.axes, ctx)))

    if "pde" in sections:
        pf.pde = _parse_pde(sections["pde"], pf)
        report = validate_assignment(pf.pde.derivatives(), pf.assignment)
        if not report.ok:
            head = sections.get("approximations") or sections["pde"]
            raise UndeclaredSymbol(head[0].line, 1, "; ".join(report.diagnostics))
        try:
            pf.problem()
        except InvalidAssignment as exc:
            raise ParseError(sections["pde"][0].line, 1, str(exc)) from None

    for e in alias_entries:
        if not _NAME.fullmatch(e.key):
            raise ParseError(e.line, 1, f"invalid alias name {e.key!r}")
        if e.key in ctx.names:
            raise ParseError(e.line, 1, f"alias {e.key!r} clashes with a parameter")
        expr = parse_rational_function(e.value, ctx, e.line, e.col)
        if expr.is_constant():
            raise ParseError(e.line, e.col, "alias expression must involve a parameter")
        pf.aliases.append((e.key, expr))

    if "matrix" in sections:
        _parse_matrix(sections["matrix"], pf)
    if pf.pde is None and pf.matrix is None:
        raise ParseError(1, 1, "need a [pde] or a [matrix] section")
    return pf


def _rule_spec(e: Entry, beta: DerivativeSymbol, axes: dict[str, str], ctx: ParamContext) -> RuleSpec:
    words = e.value.split()
    if not words:
        raise ParseError(e.line, e.col, "missing rule name")
    try:
        rule = get_rule(words[0])
    except UnknownRule as exc:
        raise ParseError(e.line, e.col, str(exc.args[0])) from None
    axis = theta = neighbor = None
    pos = e.col + len(words[0])
    for w in words[1:]:
        wcol = e.col + e.value.find(w, pos - e.col)
        if "=" in w:
            k, _, v = w.partition("=")
            if k == "theta":
                if v not in ctx.names:
                    raise UndeclaredSymbol(e.line, wcol, f"undeclared parameter {v!r}")
                theta = v
            elif k == "neighbor":
                if v not in axes or v == TIME:
                    raise UndeclaredSymbol(e.line, wcol, f"undeclared spatial axis {v!r}")
                neighbor = v
            else:
                raise ParseError(e.line, wcol, f"unknown option {k!r}")
        elif axis is None:
            if w not in axes:
                raise UndeclaredSymbol(e.line, wcol, f"undeclared axis {w!r}")
            axis = w
        else:
            raise ParseError(e.line, wcol, f"unexpected {w!r}")
        pos = wcol + len(w)
    if axis is None:
        if rule.temporal:
            axis = TIME
        elif len(beta.axes()) == 1:
            axis = next(iter(beta.axes()))
        else:
            raise ParseError(e.line, e.col, f"rule for {e.key} needs an axis")
    if rule.name == "theta-time" and theta is None:
        raise ParseError(e.line, e.col, "theta-time needs theta=<parameter>")
    if rule.uses_neighbor and neighbor is None:
        raise ParseError(e.line, e.col, f"{rule.name} needs neighbor=<axis>")
    if beta.order(axis) < rule.drop:
        raise ParseError(e.line, e.col, f"rule {rule.name} along {axis} cannot lower {e.key}")
    return RuleSpec(rule.name, axis, theta, neighbor)


_DERIV_TOKEN = re.compile(r"u(?:_[A-Za-z]+)?")


def _parse_pde(entries: list[Entry], pf: ProblemFile) -> PDESpec:
    eqs = [e for e in entries if e.key == "equation"]
    other = [e for e in entries if e.key != "equation"]
    if other:
        raise ParseError(other[0].line, 1, f"unknown key {other[0].key!r} in [pde]")
    if len(eqs) != 1:
        raise ParseError(entries[0].line if entries else 1, 1, "[pde] needs exactly one 'equation'")
    e = eqs[0]
    # derivative tokens become ring variables of an auxiliary ring
    found = []
    for m in _DERIV_TOKEN.finditer(e.value):
        tok = m.group(0)
        before = e.value[m.start() - 1] if m.start() else " "
        after = e.value[m.end()] if m.end() < len(e.value) else " "
        if before.isalnum() or before == "_" or after.isalnum() or after == "_":
            continue
        _derivative(Entry(tok, "", e.line, e.col), pf.spatial, e.col + m.start())
        if tok not in found:
            found.append(tok)
    if not found:
        raise ParseError(e.line, e.col, "equation involves no derivative token")
    ring = RingContext(found, pf.params)
    poly = parse_operator(e.value, ring, e.line, e.col)
    coeffs: dict[DerivativeSymbol, RationalFunction] = {}
    for exp, c in poly.terms:
        if sum(exp) != 1:
            raise ParseError(e.line, e.col, "equation must be linear and homogeneous in u and its derivatives")
        beta = DerivativeSymbol.parse(found[exp.index(1)])
        coeffs[beta] = coeffs.get(beta, pf.params.zero) + c
    try:
        return PDESpec(pf.spatial, coeffs)
    except InvalidAssignment as exc:
        raise ParseError(e.line, e.col, str(exc)) from None


def _split_row(value: str) -> list[tuple[str, int]]:
    """Split on top-level commas, returning ``(text, offset)`` pairs."""
    out, depth, start = [], 0, 0
    for k, ch in enumerate(value):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append((value[start:k], start))
            start = k + 1
    out.append((value[start:], start))
    return out


def _parse_matrix(entries: list[Entry], pf: ProblemFile) -> None:
    ring = pf.ring()
    heads = [e for e in entries if e.key == "unknowns"]
    if len(heads) != 1:
        raise ParseError(entries[0].line if entries else 1, 1, "[matrix] needs exactly one 'unknowns' line")
    h = heads[0]
    for text, off in _split_row(h.value):
        pf.unknowns.append(_derivative(Entry(text.strip(), "", h.line, h.col), pf.spatial, h.col + off))
    if len(set(pf.unknowns)) != len(pf.unknowns):
        raise ParseError(h.line, h.col, "repeated unknown")
    rows = []
    for e in entries:
        if e.key == "unknowns":
            continue
        if e.key != "row":
            raise ParseError(e.line, 1, f"unknown key {e.key!r} in [matrix]")
        cells = _split_row(e.value)
        if len(cells) != len(pf.unknowns):
            raise ParseError(e.line, e.col, f"row has {len(cells)} entries, expected {len(pf.unknowns)}")
        rows.append([parse_operator(t, ring, e.line, e.col + off + (len(t) - len(t.lstrip())))
                     for t, off in cells])
    if not rows:
        raise ParseError(h.line, 1, "[matrix] has no rows")
    pf.matrix = rows
