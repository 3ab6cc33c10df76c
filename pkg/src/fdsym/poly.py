"""Multivariate polynomials over :class:`~fdsym.kernel.RationalFunction`.

A :class:`ShiftPolynomial` lives in a :class:`RingContext` which fixes the
variable names (``Tx``, ``Tt``, ``g``, ``sinx`` ...), the coefficient
parameters and a monomial ordering.  Terms are kept sorted descending in that
ordering, so the leading term is ``terms[0]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd as gcd_int, lcm as lcm_int
from typing import Callable, Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .kernel import ParamContext, RationalFunction, format_rf, to_fraction

Exponent = tuple[int, ...]


class RingMismatch(ValueError):
    pass


class ZeroPolynomial(ValueError):
    pass


def _degrevlex_key(e: Exponent):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrdering:
    """``lex``, ``degrevlex`` or ``block`` (degrevlex on ``e[:split]``, then on ``e[split:]``).

    ``key(e)`` is larger for larger monomials.
    """

    kind: str = "degrevlex"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown ordering {self.kind!r}")

    def key(self, e: Exponent):
        if self.kind == "degrevlex":
            return _degrevlex_key(e)
        if self.kind == "lex":
            return e
        k = self.split
        return (_degrevlex_key(e[:k]), _degrevlex_key(e[k:]))

    def compare(self, a: Exponent, b: Exponent) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


LEX = MonomialOrdering("lex")
DEGREVLEX = MonomialOrdering("degrevlex")


class RingContext:
    """Variables, coefficient parameters and monomial ordering of a polynomial ring."""

    def __init__(self, variables: Sequence[str], params: ParamContext | Sequence[str] = (),
                 ordering: MonomialOrdering = DEGREVLEX):
        if not isinstance(params, ParamContext):
            params = ParamContext(params)
        self.variables = tuple(variables)
        self.params = params
        self.ordering = ordering
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        clash = set(self.variables) & set(params.names)
        if clash:
            raise ValueError(f"names used both as variable and parameter: {sorted(clash)}")
        if ordering.kind == "block" and not 0 <= ordering.split <= len(self.variables):
            raise ValueError("block split out of range")
        self.nvars = len(self.variables)
        self._key = (self.variables, params.names, ordering)

    def __eq__(self, other):
        return isinstance(other, RingContext) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"RingContext({list(self.variables)}, {list(self.params.names)}, {self.ordering.kind})"

    # constructors
    def zero(self) -> "ShiftPolynomial":
        return ShiftPolynomial(self, {})

    def one(self) -> "ShiftPolynomial":
        return self.const(1)

    def const(self, c) -> "ShiftPolynomial":
        if not isinstance(c, RationalFunction):
            c = self.params.const(c)
        return ShiftPolynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "ShiftPolynomial":
        e = [0] * self.nvars
        e[self.variables.index(name)] = 1
        return ShiftPolynomial(self, {tuple(e): self.params.one})

    def param(self, name: str) -> "ShiftPolynomial":
        return self.const(self.params.param(name))

    def monomial(self, exp: Exponent, coeff=1) -> "ShiftPolynomial":
        if not isinstance(coeff, RationalFunction):
            coeff = self.params.const(coeff)
        return ShiftPolynomial(self, {tuple(exp): coeff})

    def gens(self) -> list["ShiftPolynomial"]:
        return [self.var(v) for v in self.variables]

    def with_ordering(self, ordering: MonomialOrdering) -> "RingContext":
        return RingContext(self.variables, self.params, ordering)

    def with_params(self, params: ParamContext | Sequence[str]) -> "RingContext":
        return RingContext(self.variables, params, self.ordering)


class ShiftPolynomial:
    """Immutable polynomial; ``terms`` is a tuple of ``(exponent, coeff)`` descending."""

    __slots__ = ("ring", "_dict", "_terms")

    def __init__(self, ring: RingContext, terms: Mapping[Exponent, RationalFunction] | Iterable = ()):
        self.ring = ring
        if isinstance(terms, Mapping):
            d = {e: c for e, c in terms.items() if c}
        else:
            d = {}
            for e, c in terms:
                d[e] = d[e] + c if e in d else c
            d = {e: c for e, c in d.items() if c}
        self._dict = d
        self._terms = None

    @classmethod
    def _from_dict(cls, ring, d):
        obj = object.__new__(cls)
        obj.ring = ring
        obj._dict = d
        obj._terms = None
        return obj

    @property
    def terms(self) -> tuple[tuple[Exponent, RationalFunction], ...]:
        if self._terms is None:
            key = self.ring.ordering.key
            self._terms = tuple(sorted(self._dict.items(), key=lambda t: key(t[0]), reverse=True))
        return self._terms

    def as_dict(self) -> dict[Exponent, RationalFunction]:
        return dict(self._dict)

    def coeff(self, exp: Exponent) -> RationalFunction:
        return self._dict.get(tuple(exp), self.ring.params.zero)

    def is_zero(self) -> bool:
        return not self._dict

    def __bool__(self):
        return bool(self._dict)

    def __len__(self):
        return len(self._dict)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._dict)

    def leading_monomial(self) -> tuple[Exponent, RationalFunction]:
        return leading_monomial(self)

    def lm(self) -> Exponent:
        return self.terms[0][0]

    def lc(self) -> RationalFunction:
        return self.terms[0][1]

    def degree(self, var: str | None = None) -> int:
        if not self._dict:
            return -1
        if var is None:
            return max(sum(e) for e in self._dict)
        i = self.ring.variables.index(var)
        return max(e[i] for e in self._dict)

    def variables_used(self) -> set[str]:
        out = set()
        for e in self._dict:
            out.update(v for v, k in zip(self.ring.variables, e) if k)
        return out

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ShiftPolynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = dict(self._dict)
        for e, c in other._dict.items():
            if e in d:
                s = d[e] + c
                if s:
                    d[e] = s
                else:
                    del d[e]
            else:
                d[e] = c
        return ShiftPolynomial._from_dict(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        return ShiftPolynomial._from_dict(self.ring, {e: -c for e, c in self._dict.items()})

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
        d: dict[Exponent, RationalFunction] = {}
        for e1, c1 in self._dict.items():
            for e2, c2 in other._dict.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                if e in d:
                    s = d[e] + c
                    if s:
                        d[e] = s
                    else:
                        del d[e]
                else:
                    d[e] = c
        return ShiftPolynomial._from_dict(self.ring, d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: RationalFunction) -> "ShiftPolynomial":
        if not c:
            return self.ring.zero()
        return ShiftPolynomial._from_dict(self.ring, {e: v * c for e, v in self._dict.items()})

    def mul_monomial(self, exp: Exponent, c: RationalFunction | None = None) -> "ShiftPolynomial":
        d = {}
        for e, v in self._dict.items():
            d[tuple(a + b for a, b in zip(e, exp))] = v if c is None else v * c
        return ShiftPolynomial._from_dict(self.ring, d)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = self.ring.const(other)
        if not isinstance(other, ShiftPolynomial):
            return NotImplemented
        return self.ring == other.ring and self._dict == other._dict

    def __hash__(self):
        return hash((self.ring, frozenset(self._dict.items())))

    # -- structure ----------------------------------------------------------
    def map_coefficients(self, fn: Callable[[RationalFunction], RationalFunction],
                         ring: RingContext | None = None) -> "ShiftPolynomial":
        ring = ring or self.ring
        return ShiftPolynomial(ring, {e: fn(c) for e, c in self._dict.items()})

    def to_ring(self, ring: RingContext) -> "ShiftPolynomial":
        """Move into a ring with the same variables (possibly other ordering/params)."""
        if ring.variables == self.ring.variables:
            return ShiftPolynomial(ring, {e: c.convert(ring.params) for e, c in self._dict.items()})
        idx = []
        for v in self.ring.variables:
            if v not in ring.variables:
                if any(e[self.ring.variables.index(v)] for e in self._dict):
                    raise RingMismatch(f"variable {v} not present in {ring}")
                idx.append(None)
            else:
                idx.append(ring.variables.index(v))
        d = {}
        for e, c in self._dict.items():
            ne = [0] * ring.nvars
            for k, j in zip(e, idx):
                if j is not None:
                    ne[j] = k
            d[tuple(ne)] = c.convert(ring.params)
        return ShiftPolynomial(ring, d)

    def primitive(self) -> tuple[RationalFunction, "ShiftPolynomial"]:
        return primitive(self)

    def content_normalized(self) -> "ShiftPolynomial":
        return primitive(self)[1]

    def subs_params(self, name: str, value: RationalFunction) -> "ShiftPolynomial":
        return ShiftPolynomial(self.ring, {e: c.subs(name, value) for e, c in self._dict.items()})

    def evaluate(self, point: Mapping[str, object], params: Mapping[str, object] | None = None):
        """Exact value with all variables (and, if given, parameters) substituted."""
        total = Fraction(0)
        for e, c in self._dict.items():
            v = c.eval(params or {})
            for name, k in zip(self.ring.variables, e):
                if k:
                    v *= Fraction(point[name]) ** k
            total += v
        return total

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"ShiftPolynomial({format_poly(self)})"


# -- operations named in the contracts ---------------------------------------


def sp_arith(a: ShiftPolynomial, b: ShiftPolynomial, op: str) -> ShiftPolynomial:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def leading_monomial(p: ShiftPolynomial) -> tuple[Exponent, RationalFunction]:
    if not p:
        raise ZeroPolynomial("leading monomial of zero")
    return p.terms[0]


def laurent_normalize(ring: RingContext, terms: Iterable[tuple[Sequence[int], object]]) -> ShiftPolynomial:
    """Multiply a Laurent term list by the smallest monomial making all exponents >= 0.

    Afterwards every variable attains exponent 0 in some term.
    """
    terms = [(tuple(e), c if isinstance(c, RationalFunction) else ring.params.const(c)) for e, c in terms]
    terms = [(e, c) for e, c in terms if c]
    if not terms:
        return ring.zero()
    low = [min(e[i] for e, _ in terms) for i in range(ring.nvars)]
    return ShiftPolynomial(ring, [(tuple(k - m for k, m in zip(e, low)), c) for e, c in terms])


def primitive(p: ShiftPolynomial) -> tuple[RationalFunction, ShiftPolynomial]:
    """Split ``p = content * pp`` with ``pp`` integer-primitive over Z[params].

    The leading coefficient of ``pp`` has a positive leading integer.
    """
    ctx = p.ring.params
    if not p:
        return ctx.zero, p
    items = p.terms
    lcm = ctx.ring.one
    for _, c in items:
        lcm = lcm * c.den.exquo(lcm.gcd(c.den))
    nums = [c.num * lcm.exquo(c.den) for _, c in items]
    g = reduce(lambda a, b: a.gcd(b), nums)
    nums = [n.exquo(g) for n in nums]
    # coprime over QQ now; scale to integer coefficients with unit content
    den_lcm, num_gcd = 1, 0
    for n in nums:
        for c in n.coeffs():
            den_lcm = lcm_int(den_lcm, int(c.denominator))
            num_gcd = gcd_int(num_gcd, int(c.numerator))
    factor = QQ(den_lcm, num_gcd)
    if nums[0].LC < 0:
        factor = -factor
    one = ctx.ring.one
    pp = ShiftPolynomial._from_dict(
        p.ring, {e: RationalFunction._raw(ctx, n * factor, one) for (e, _), n in zip(items, nums)}
    )
    content = RationalFunction(ctx, g * ctx.ring(1 / factor), lcm)
    return content, pp


# -- exact division and gcd in K[T] -------------------------------------------


def divide(p: ShiftPolynomial, f: ShiftPolynomial) -> tuple[ShiftPolynomial, ShiftPolynomial]:
    """Multivariate division by a single polynomial: ``p = q*f + r``."""
    if not f:
        raise ZeroDivisionError("division by zero polynomial")
    if p.ring != f.ring:
        raise RingMismatch(f"{p.ring} vs {f.ring}")
    key = p.ring.ordering.key
    fe, fc = f.terms[0]
    rest = dict(p._dict)
    q: dict[Exponent, RationalFunction] = {}
    r: dict[Exponent, RationalFunction] = {}
    f_items = list(f._dict.items())
    while rest:
        e = max(rest, key=key)
        c = rest[e]
        if all(a >= b for a, b in zip(e, fe)):
            shift = tuple(a - b for a, b in zip(e, fe))
            t = c / fc
            q[shift] = q[shift] + t if shift in q else t
            for ge, gc in f_items:
                ne = tuple(a + b for a, b in zip(ge, shift))
                v = rest.get(ne)
                s = (v - t * gc) if v is not None else -(t * gc)
                if s:
                    rest[ne] = s
                else:
                    rest.pop(ne, None)
        else:
            r[e] = c
            del rest[e]
    return ShiftPolynomial(p.ring, q), ShiftPolynomial._from_dict(p.ring, r)


def exact_quotient(p: ShiftPolynomial, f: ShiftPolynomial) -> ShiftPolynomial | None:
    q, r = divide(p, f)
    return None if r else q


def _joint_ring(ring: RingContext) -> PolyRing:
    return PolyRing(ring.params.names + ring.variables, QQ, grlex)


def _to_joint(p: ShiftPolynomial, R: PolyRing):
    npar = len(p.ring.params.names)
    content, pp = primitive(p)
    out = R.zero
    for e, c in pp._dict.items():
        for m, v in c.num.terms():
            out += R({tuple(m) + tuple(e): v})
    return out


def _from_joint(g, ring: RingContext) -> ShiftPolynomial:
    npar = len(ring.params.names)
    ctx = ring.params
    d: dict[Exponent, dict] = {}
    for m, v in g.terms():
        d.setdefault(tuple(m[npar:]), {})[tuple(m[:npar])] = v
    out = {}
    for e, pm in d.items():
        out[e] = RationalFunction(ctx, ctx.ring(pm))
    return ShiftPolynomial(ring, out)


def sp_gcd(a: ShiftPolynomial, b: ShiftPolynomial) -> ShiftPolynomial:
    """GCD in K[T], returned integer-primitive over Z[params] with positive leading content."""
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if not a:
        return primitive(b)[1]
    if not b:
        return primitive(a)[1]
    R = _joint_ring(a.ring)
    g = _to_joint(a, R).gcd(_to_joint(b, R))
    return primitive(_from_joint(g, a.ring))[1]


# -- morphisms ------------------------------------------------------------------


@dataclass
class RingMorphism:
    """K-algebra map given by the images of the source variables."""

    source: RingContext
    target: RingContext
    images: Sequence[ShiftPolynomial]

    def __post_init__(self):
        if len(self.images) != self.source.nvars:
            raise ValueError("one image per source variable required")
        missing = set(self.source.params.names) - set(self.target.params.names)
        if missing:
            raise ValueError(f"target lacks parameters {sorted(missing)}")
        for im in self.images:
            if im.ring != self.target:
                raise RingMismatch("image not in target ring")

    def __call__(self, p: ShiftPolynomial) -> ShiftPolynomial:
        return apply_morphism(self, p)


def apply_morphism(phi: RingMorphism, p: ShiftPolynomial) -> ShiftPolynomial:
    if p.ring != phi.source:
        raise RingMismatch(f"{p.ring} is not the source ring {phi.source}")
    powers: dict[tuple[int, int], ShiftPolynomial] = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = phi.images[i] ** k
        return powers[(i, k)]

    acc: dict[Exponent, RationalFunction] = {}
    tgt = phi.target
    for e, c in p._dict.items():
        term = tgt.const(c.convert(tgt.params))
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for te, tc in term._dict.items():
            s = acc[te] + tc if te in acc else tc
            if s:
                acc[te] = s
            else:
                acc.pop(te, None)
    return ShiftPolynomial._from_dict(tgt, acc)


# -- serialization ------------------------------------------------------------


def format_monomial(ring: RingContext, e: Exponent, sep: str = "*") -> str:
    parts = []
    for v, k in zip(ring.variables, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return sep.join(parts)


def format_poly(p: ShiftPolynomial) -> str:
    """Canonical Singular-style text, e.g. ``(-a^2*dt*theta)*Tx^2*Tt+Tx-1``."""
    if not p:
        return "0"
    out = []
    for e, c in p.terms:
        mono = format_monomial(p.ring, e)
        if c.is_constant():
            v = c.constant_value()
            cs = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
            if not mono:
                s = cs
            elif v == 1:
                s = mono
            elif v == -1:
                s = "-" + mono
            else:
                s = f"{cs}*{mono}"
        else:
            s = f"({format_rf(c)})" + (f"*{mono}" if mono else "")
        if out and not s.startswith("-"):
            s = "+" + s
        out.append(s)
    return "".join(out)
