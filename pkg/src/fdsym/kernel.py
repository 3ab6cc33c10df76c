"""Exact coefficient field: rational functions in a declared set of parameters.

Numerators and denominators are sparse polynomials over QQ (sympy's
``PolyRing`` backed by gmpy2).  Every :class:`RationalFunction` is kept in a
canonical form so that equal values compare (and print) identically:

* ``gcd(num, den) = 1``;
* ``den`` has integer coefficients, integer content 1 and a positive leading
  coefficient under graded-lex on the parameters in declaration order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing


class DivisionByZero(ZeroDivisionError):
    pass


class EvaluationPole(ArithmeticError):
    """The denominator vanishes at the requested point."""


class MissingParameter(KeyError):
    pass


class ContextMismatch(ValueError):
    pass


def to_fraction(c) -> Fraction:
    """Convert a QQ/ZZ domain element, int or Fraction into a Fraction."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    num = getattr(c, "numerator", None)
    if num is None:
        num = c.numer()
        den = c.denom()
    else:
        den = c.denominator
    return Fraction(int(num), int(den))


@lru_cache(maxsize=None)
def _poly_ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(names, QQ, grlex)


class ParamContext:
    """An ordered, closed set of parameter names.

    Contexts are interned by their name tuple, so two contexts with the same
    parameters are the same object.
    """

    _cache: dict[tuple[str, ...], "ParamContext"] = {}

    def __new__(cls, names: Iterable[str] = ()):
        names = tuple(names)
        ctx = cls._cache.get(names)
        if ctx is not None:
            return ctx
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        ctx = super().__new__(cls)
        ctx.names = names
        ctx.ring = _poly_ring(names)
        ctx._zero = None
        ctx._one = None
        cls._cache[names] = ctx
        return ctx

    def __repr__(self):
        return f"ParamContext({list(self.names)})"

    def __reduce__(self):
        return (ParamContext, (self.names,))

    @property
    def zero(self) -> "RationalFunction":
        if self._zero is None:
            self._zero = RationalFunction._raw(self, self.ring.zero, self.ring.one)
        return self._zero

    @property
    def one(self) -> "RationalFunction":
        if self._one is None:
            self._one = RationalFunction._raw(self, self.ring.one, self.ring.one)
        return self._one

    def const(self, value) -> "RationalFunction":
        value = Fraction(value)
        if value == 0:
            return self.zero
        return RationalFunction._raw(
            self, self.ring.ground_new(QQ(value.numerator, value.denominator)), self.ring.one
        )

    def param(self, name: str) -> "RationalFunction":
        if name not in self.names:
            raise MissingParameter(name)
        g = self.ring.gens[self.names.index(name)]
        return RationalFunction._raw(self, g, self.ring.one)

    def params(self) -> list["RationalFunction"]:
        return [self.param(n) for n in self.names]

    def poly(self, terms: Mapping[tuple[int, ...], object]):
        """Build a numerator-ring polynomial from ``{exponents: rational}``."""
        p = self.ring.zero
        for exp, c in terms.items():
            c = Fraction(c)
            if c:
                p += self.ring({tuple(exp): QQ(c.numerator, c.denominator)})
        return p

    def extend(self, extra: Sequence[str]) -> "ParamContext":
        return ParamContext(self.names + tuple(n for n in extra if n not in self.names))


def _normalize(ctx: ParamContext, num, den) -> "RationalFunction":
    if not den:
        raise DivisionByZero("rational function with zero denominator")
    if not num:
        return ctx.zero
    if not den.is_ground:
        _, num, den = num.cofactors(den)
    # scale den to an integer-primitive polynomial with positive leading term
    _, den_int = den.clear_denoms()
    content, _ = den_int.primitive()
    scale = den_int.LC / content / den.LC
    if den_int.LC < 0:
        scale = -scale
    if scale != 1:
        num = num * scale
        den = den * scale
    return RationalFunction._raw(ctx, num, den)


class RationalFunction:
    """Element of QQ(params) in canonical form.  Immutable."""

    __slots__ = ("ctx", "num", "den", "_hash")

    def __init__(self, ctx: ParamContext, num, den=None):
        norm = _normalize(ctx, num, ctx.ring.one if den is None else den)
        self.ctx = ctx
        self.num = norm.num
        self.den = norm.den
        self._hash = None

    @classmethod
    def _raw(cls, ctx, num, den):
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_one(self) -> bool:
        return self.den == 1 and self.num == 1

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return to_fraction(self.num.LC) if self.num else Fraction(0)

    def involves(self, name: str) -> bool:
        i = self.ctx.names.index(name)
        return any(m[i] for m in self.num.monoms()) or any(m[i] for m in self.den.monoms())

    def free_symbols(self) -> set[str]:
        out = set()
        for poly in (self.num, self.den):
            for m in poly.monoms():
                out.update(n for n, e in zip(self.ctx.names, m) if e)
        return out

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.ctx is not self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.den == 1:
                s = self.num + other.num
                return RationalFunction._raw(self.ctx, s, self.den) if s else self.ctx.zero
            return _normalize(self.ctx, self.num + other.num, self.den)
        return _normalize(self.ctx, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(self.ctx, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.ctx.zero
        if self.den == 1 and other.den == 1:
            return RationalFunction._raw(self.ctx, self.num * other.num, self.den)
        return _normalize(self.ctx, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return _normalize(self.ctx, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise DivisionByZero("division by zero rational function")
        return _normalize(self.ctx, self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.ctx.one
        return RationalFunction._raw(self.ctx, self.num**k, self.den**k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.ctx is other.ctx and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, self.num, self.den))
        return self._hash

    # -- conversions --------------------------------------------------------
    def convert(self, ctx: ParamContext) -> "RationalFunction":
        """Re-express in another context containing all occurring parameters."""
        if ctx is self.ctx:
            return self
        missing = self.free_symbols() - set(ctx.names)
        if missing:
            raise ContextMismatch(f"parameters {sorted(missing)} not in {ctx}")
        idx = [ctx.names.index(n) if n in ctx.names else None for n in self.ctx.names]

        def move(p):
            out = {}
            for m, c in p.terms():
                e = [0] * len(ctx.names)
                for k, j in zip(m, idx):
                    if k:
                        e[j] = k
                out[tuple(e)] = c
            return ctx.ring(out) if out else ctx.ring.zero

        return _normalize(ctx, move(self.num), move(self.den))

    def eval(self, assignment: Mapping[str, object]) -> Fraction:
        """Exact value at a rational point."""
        return rf_eval(self, assignment)

    def subs(self, name: str, value: "RationalFunction") -> "RationalFunction":
        """Substitute a rational function (same context) for one parameter."""
        i = self.ctx.names.index(name)

        def sub_poly(p):
            acc = self.ctx.zero
            for m, c in p.terms():
                rest = list(m)
                k = rest[i]
                rest[i] = 0
                term = RationalFunction._raw(self.ctx, self.ctx.ring({tuple(rest): c}), self.ctx.ring.one)
                acc = acc + (term * value**k if k else term)
            return acc

        return sub_poly(self.num) / sub_poly(self.den)

    def numerator_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Numerator terms, graded-lex descending."""
        return [(m, to_fraction(c)) for m, c in self.num.terms()]

    def __repr__(self):
        return f"RationalFunction({format_rf(self)})"

    def __str__(self):
        return format_rf(self)


# -- free functions mirroring the operation contracts -------------------------


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def pp_gcd(a, b):
    """GCD of two parameter polynomials: integer-primitive, positive leading coefficient.

    ``gcd(0, 0) = 0`` and ``gcd(a, 0)`` is ``a`` normalized.
    """
    ring = a.ring
    if not a and not b:
        return ring.zero
    g = a.gcd(b) if (a and b) else (a or b)
    _, g = g.clear_denoms()
    _, g = g.primitive()
    if g.LC < 0:
        g = -g
    return ring(g)


def rf_eval(f: RationalFunction, assignment: Mapping[str, object]) -> Fraction:
    needed = f.free_symbols()
    missing = needed - set(assignment)
    if missing:
        raise MissingParameter(", ".join(sorted(missing)))
    point = [Fraction(assignment[n]) if n in needed else Fraction(0) for n in f.ctx.names]

    def ev(p):
        total = Fraction(0)
        for m, c in p.terms():
            t = to_fraction(c)
            for v, k in zip(point, m):
                if k:
                    t *= v**k
            total += t
        return total

    den = ev(f.den)
    if den == 0:
        raise EvaluationPole(f"denominator of {f} vanishes at {dict(assignment)}")
    return ev(f.num) / den


# -- formatting ---------------------------------------------------------------


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_param_poly(ctx: ParamContext, p) -> str:
    """Singular-style text: ``a^2*dt*theta-a^2*dt``."""
    if not p:
        return "0"
    out = []
    for m, c in p.terms():
        c = to_fraction(c)
        factors = []
        for name, k in zip(ctx.names, m):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mono = "*".join(factors)
        if not mono:
            s = _format_fraction(c)
        elif c == 1:
            s = mono
        elif c == -1:
            s = "-" + mono
        else:
            s = _format_fraction(c) + "*" + mono
        if out and not s.startswith("-"):
            s = "+" + s
        out.append(s)
    return "".join(out)


def format_rf(f: RationalFunction) -> str:
    num = format_param_poly(f.ctx, f.num)
    if f.den == 1:
        return num
    den = format_param_poly(f.ctx, f.den)
    if len(f.num.terms()) > 1:
        num = f"({num})"
    if len(f.den.terms()) > 1 or not f.den.is_ground and len(f.den.terms()) == 1 and "*" in den:
        den = f"({den})"
    return f"{num}/{den}"
