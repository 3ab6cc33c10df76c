"""Gröbner bases for ideals and submodules of free modules over K[T].

Vectors are stored sparsely as ``{(component, exponent): coefficient}``.  All
arithmetic during Buchberger's algorithm is fraction-free: generators are
kept integer-primitive over Z[params], reduction multiplies through by the
leading coefficient of the reducer, and content is divided out afterwards.
Only :func:`reduce` produces monic generators (with rational-function
coefficients).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce as _fold
from itertools import combinations
from typing import Iterable, Sequence

from .kernel import RationalFunction
from .poly import (
    DEGREVLEX,
    MonomialOrdering,
    RingContext,
    RingMismatch,
    ShiftPolynomial,
)

Exponent = tuple[int, ...]
Key = tuple[int, Exponent]


@dataclass(frozen=True)
class ModuleOrdering:
    """Order on ``(monomial, component)`` pairs.

    ``pot`` compares components first; ``top`` compares monomials first.
    With ``descending`` components, ``e_1 > e_2 > ... > e_r`` (Singular's ``c``).
    """

    base: MonomialOrdering = DEGREVLEX
    mode: str = "pot"
    component_order: str = "descending"

    def __post_init__(self):
        if self.mode not in ("pot", "top"):
            raise ValueError(f"unknown module ordering mode {self.mode!r}")
        if self.component_order not in ("ascending", "descending"):
            raise ValueError(f"unknown component order {self.component_order!r}")

    def key(self, k: Key):
        comp, e = k
        ck = -comp if self.component_order == "descending" else comp
        if self.mode == "pot":
            return (ck, self.base.key(e))
        return (self.base.key(e), ck)


POT = ModuleOrdering()


class ModuleVector:
    """Element of the free module ``K[T]^rank``."""

    __slots__ = ("ring", "rank", "data")

    def __init__(self, ring: RingContext, rank: int, data: dict[Key, RationalFunction] | None = None):
        self.ring = ring
        self.rank = rank
        self.data = {k: c for k, c in (data or {}).items() if c}

    @classmethod
    def from_components(cls, comps: Sequence[ShiftPolynomial]) -> "ModuleVector":
        if not comps:
            raise ValueError("empty vector")
        ring = comps[0].ring
        data = {}
        for i, p in enumerate(comps):
            if p.ring != ring:
                raise RingMismatch("components live in different rings")
            for e, c in p.as_dict().items():
                data[(i, e)] = c
        return cls(ring, len(comps), data)

    @classmethod
    def from_poly(cls, p: ShiftPolynomial) -> "ModuleVector":
        return cls.from_components([p])

    def components(self) -> list[ShiftPolynomial]:
        parts: list[dict] = [{} for _ in range(self.rank)]
        for (i, e), c in self.data.items():
            parts[i][e] = c
        return [ShiftPolynomial(self.ring, d) for d in parts]

    def component(self, i: int) -> ShiftPolynomial:
        return ShiftPolynomial(self.ring, {e: c for (j, e), c in self.data.items() if j == i})

    def support(self) -> set[int]:
        return {i for i, _ in self.data}

    def is_zero(self) -> bool:
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def leading(self, order: ModuleOrdering) -> tuple[Key, RationalFunction]:
        if not self.data:
            raise ValueError("leading term of zero vector")
        k = max(self.data, key=order.key)
        return k, self.data[k]

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        _check(self, other)
        return ModuleVector(self.ring, self.rank, _axpy(dict(self.data), other.data, None, None))

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        _check(self, other)
        minus = self.ring.params.const(-1)
        return ModuleVector(self.ring, self.rank, _axpy(dict(self.data), other.data, minus, None))

    def __neg__(self):
        return ModuleVector(self.ring, self.rank, {k: -c for k, c in self.data.items()})

    def mul_poly(self, p: ShiftPolynomial) -> "ModuleVector":
        out: dict[Key, RationalFunction] = {}
        for e2, c2 in p.as_dict().items():
            _axpy(out, self.data, c2, e2)
        return ModuleVector(self.ring, self.rank, out)

    def scale(self, c: RationalFunction) -> "ModuleVector":
        return ModuleVector(self.ring, self.rank, {k: v * c for k, v in self.data.items()})

    def __eq__(self, other):
        return (isinstance(other, ModuleVector) and self.ring == other.ring
                and self.rank == other.rank and self.data == other.data)

    def __hash__(self):
        return hash((self.rank, frozenset(self.data.items())))

    def __repr__(self):
        return "[" + ", ".join(str(p) for p in self.components()) + "]"


def _check(a: ModuleVector, b: ModuleVector):
    if a.ring != b.ring or a.rank != b.rank:
        raise RingMismatch("vectors from different modules")


def _shift(e: Exponent, m: Exponent | None) -> Exponent:
    return e if m is None else tuple(x + y for x, y in zip(e, m))


def _axpy(acc: dict, src: dict, c: RationalFunction | None, m: Exponent | None) -> dict:
    """``acc += c * T^m * src`` in place; ``c=None`` means 1."""
    for (i, e), v in src.items():
        k = (i, _shift(e, m))
        t = v if c is None else v * c
        old = acc.get(k)
        if old is None:
            acc[k] = t
        else:
            s = old + t
            if s:
                acc[k] = s
            else:
                del acc[k]
    return acc


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _make_primitive(ring: RingContext, data: dict, order: ModuleOrdering) -> dict:
    """Divide out the content over Z[params]; leading coefficient gets a positive leading integer."""
    if not data:
        return data
    ctx = ring.params
    lead_key = max(data, key=order.key)
    # clear denominators first
    lcm = ctx.ring.one
    for c in data.values():
        if c.den != 1:
            lcm = lcm * c.den.exquo(lcm.gcd(c.den))
    nums = {k: c.num * lcm.exquo(c.den) for k, c in data.items()}
    g = _fold(lambda a, b: a.gcd(b), nums.values())
    if nums[lead_key].exquo(g).LC < 0:
        g = -g
    one = ctx.ring.one
    return {k: RationalFunction._raw(ctx, n.exquo(g), one) for k, n in nums.items()}


def _poly_gcd(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    """gcd of two polynomial coefficients (as rational functions with unit denominator)."""
    if a.den != 1 or b.den != 1:
        return a.ctx.one
    return RationalFunction._raw(a.ctx, a.num.gcd(b.num), a.ctx.ring.one) if a.num.gcd(b.num) else a.ctx.one


@dataclass
class _Gen:
    data: dict
    lk: Key
    lc: RationalFunction


def _mkgen(data: dict, order: ModuleOrdering) -> _Gen:
    lk = max(data, key=order.key)
    return _Gen(data, lk, data[lk])


def _find_reducer(k: Key, gens: Sequence[_Gen]) -> _Gen | None:
    comp, e = k
    for g in gens:
        if g.lk[0] == comp and _divides(g.lk[1], e):
            return g
    return None


def _nf_raw(data: dict, gens: Sequence[_Gen], order: ModuleOrdering, ring: RingContext,
            full: bool = True) -> tuple[dict, RationalFunction]:
    """Return ``(r, s)`` with ``s*v - r`` in the module and ``r`` reduced; NF = r/s."""
    ctx = ring.params
    w = dict(data)
    r: dict = {}
    scale = ctx.one
    key = order.key
    while w:
        k = max(w, key=key)
        c = w[k]
        g = _find_reducer(k, gens)
        if g is None:
            if not full:
                r.update(w)
                break
            r[k] = c
            del w[k]
            continue
        h = _poly_gcd(g.lc, c)
        a = g.lc / h if not h.is_one() else g.lc
        b = c / h if not h.is_one() else c
        m = tuple(x - y for x, y in zip(k[1], g.lk[1]))
        if not a.is_one():
            w = {kk: v * a for kk, v in w.items()}
            r = {kk: v * a for kk, v in r.items()}
            scale = scale * a
        _axpy(w, g.data, -b, m)
        w.pop(k, None)
    return r, scale


class GroebnerBasis:
    """A Gröbner basis together with the module ordering it was computed for."""

    def __init__(self, generators: list[ModuleVector], ordering: ModuleOrdering, reduced: bool = False):
        self.generators = generators
        self.ordering = ordering
        self.reduced = reduced

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def leading_keys(self) -> list[Key]:
        return [g.leading(self.ordering)[0] for g in self.generators]

    def __repr__(self):
        return f"GroebnerBasis({self.generators!r}, reduced={self.reduced})"


def _coerce_vectors(vs: Iterable) -> list[ModuleVector]:
    out = []
    for v in vs:
        if isinstance(v, ShiftPolynomial):
            v = ModuleVector.from_poly(v)
        out.append(v)
    if out:
        for v in out[1:]:
            _check(out[0], v)
    return out


def normal_form(v, G: Iterable, ordering: ModuleOrdering = POT):
    """Fully reduced normal form of ``v`` modulo ``G``.

    Accepts ModuleVectors or (for ideals) ShiftPolynomials and returns the same kind.
    """
    as_poly = isinstance(v, ShiftPolynomial)
    (vv,) = _coerce_vectors([v])
    gens = [g for g in _coerce_vectors(G) if g]
    for g in gens:
        _check(vv, g)
    prepared = [_mkgen(_make_primitive(vv.ring, g.data, ordering), ordering) for g in gens]
    r, s = _nf_raw(vv.data, prepared, ordering, vv.ring)
    inv = s.inverse()
    out = ModuleVector(vv.ring, vv.rank, {k: c * inv for k, c in r.items()})
    return out.component(0) if as_poly else out


def s_vector(a: ModuleVector, b: ModuleVector, ordering: ModuleOrdering = POT) -> ModuleVector:
    """Fraction-free S-vector; zero when leading components differ."""
    ka, ca = a.leading(ordering)
    kb, cb = b.leading(ordering)
    if ka[0] != kb[0]:
        return ModuleVector(a.ring, a.rank)
    l = _lcm(ka[1], kb[1])
    ma = tuple(x - y for x, y in zip(l, ka[1]))
    mb = tuple(x - y for x, y in zip(l, kb[1]))
    out = _axpy({}, a.data, cb, ma)
    _axpy(out, b.data, -ca, mb)
    return ModuleVector(a.ring, a.rank, out)


def buchberger(generators: Iterable, ordering: ModuleOrdering = POT) -> GroebnerBasis:
    """Buchberger's algorithm with the normal selection strategy and chain criterion.

    The product criterion is only applied in the ideal case (rank 1).
    """
    vecs = [v for v in _coerce_vectors(generators) if v]
    if not vecs:
        raise ValueError("buchberger needs at least one nonzero generator")
    ring, rank = vecs[0].ring, vecs[0].rank
    key = ordering.key
    base_key = ordering.base.key

    G: list[_Gen] = []
    pairs: set[tuple[int, int]] = set()

    def lcm_of(i, j):
        return _lcm(G[i].lk[1], G[j].lk[1])

    def add(data):
        G.append(_mkgen(data, ordering))
        n = len(G) - 1
        for i in range(n):
            if G[i].lk[0] == G[n].lk[0]:
                pairs.add((i, n))

    for v in vecs:
        # reduce inputs against what we have so far to drop obvious redundancy
        r, _ = _nf_raw(v.data, G, ordering, ring)
        if r:
            add(_make_primitive(ring, r, ordering))

    while pairs:
        i, j = min(pairs, key=lambda p: (base_key(lcm_of(*p)), key(G[p[0]].lk), p))
        pairs.discard((i, j))
        gi, gj = G[i], G[j]
        l = lcm_of(i, j)
        if rank == 1 and all(min(x, y) == 0 for x, y in zip(gi.lk[1], gj.lk[1])):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or G[k].lk[0] != gi.lk[0]:
                continue
            if _divides(G[k].lk[1], l) and (min(i, k), max(i, k)) not in pairs \
                    and (min(j, k), max(j, k)) not in pairs:
                skip = True
                break
        if skip:
            continue
        ma = tuple(x - y for x, y in zip(l, gi.lk[1]))
        mb = tuple(x - y for x, y in zip(l, gj.lk[1]))
        h = _poly_gcd(gi.lc, gj.lc)
        s = _axpy({}, gi.data, gj.lc / h, ma)
        _axpy(s, gj.data, -(gi.lc / h), mb)
        if not s:
            continue
        r, _ = _nf_raw(s, G, ordering, ring)
        if r:
            add(_make_primitive(ring, r, ordering))

    basis = [ModuleVector(ring, rank, g.data) for g in G]
    return GroebnerBasis(basis, ordering, reduced=False)


def reduce(G: GroebnerBasis) -> GroebnerBasis:
    """Normalized reduced Gröbner basis: minimal, interreduced, monic, sorted descending."""
    order = G.ordering
    gens = [g for g in G.generators if g]
    if not gens:
        return GroebnerBasis([], order, reduced=True)
    ring, rank = gens[0].ring, gens[0].rank
    items = [_mkgen(_make_primitive(ring, g.data, order), order) for g in gens]
    # minimalize: drop g whose leading term is divisible by another's
    items.sort(key=lambda g: order.key(g.lk))
    minimal: list[_Gen] = []
    for g in items:
        if not any(h.lk[0] == g.lk[0] and _divides(h.lk[1], g.lk[1]) for h in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        tail = {k: c for k, c in g.data.items() if k != g.lk}
        r, s = _nf_raw(tail, others, order, ring)
        lead = g.lc * s
        data = {k: c / lead for k, c in r.items()}
        data[g.lk] = ring.params.one
        out.append(ModuleVector(ring, rank, data))
    out.sort(key=lambda v: order.key(v.leading(order)[0]), reverse=True)
    return GroebnerBasis(out, order, reduced=True)


def groebner_ideal(polys: Iterable[ShiftPolynomial], base: MonomialOrdering | None = None,
                   reduced: bool = True) -> list[ShiftPolynomial]:
    """Gröbner basis of an ideal, using the ring's own ordering unless ``base`` is given."""
    polys = [p for p in polys if p]
    if not polys:
        return []
    order = ModuleOrdering(base or polys[0].ring.ordering, "pot", "descending")
    G = buchberger(polys, order)
    if reduced:
        G = reduce(G)
    return [g.component(0) for g in G]


def eliminate_components(generators: Iterable, keep: Iterable[int],
                         base: MonomialOrdering = DEGREVLEX) -> list[ModuleVector]:
    """Generators of ``M ∩ F_keep``, where ``F_keep`` is spanned by the kept basis vectors.

    The components to eliminate are renumbered so that they rank highest under a
    descending pot ordering; the result uses the original numbering.
    """
    vecs = [v for v in _coerce_vectors(generators) if v]
    if not vecs:
        return []
    rank = vecs[0].rank
    keep = sorted(set(keep))
    drop = [i for i in range(rank) if i not in keep]
    perm = drop + keep                   # new position -> old index
    inv = {old: new for new, old in enumerate(perm)}
    moved = [ModuleVector(v.ring, rank, {(inv[i], e): c for (i, e), c in v.data.items()}) for v in vecs]
    order = ModuleOrdering(base, "pot", "descending")
    G = reduce(buchberger(moved, order))
    kept_new = set(range(len(drop), rank))
    out = []
    for g in G:
        if g.support() <= kept_new:
            out.append(ModuleVector(g.ring, rank, {(perm[i], e): c for (i, e), c in g.data.items()}))
    return out


def eliminate_variables(polys: Iterable[ShiftPolynomial], drop: Iterable[str]) -> list[ShiftPolynomial]:
    """Gröbner basis of ``I ∩ K[kept variables]`` via a block elimination ordering."""
    polys = [p for p in polys if p]
    if not polys:
        return []
    ring = polys[0].ring
    drop = set(drop)
    unknown = drop - set(ring.variables)
    if unknown:
        raise ValueError(f"unknown variables {sorted(unknown)}")
    dropped = [v for v in ring.variables if v in drop]
    kept = [v for v in ring.variables if v not in drop]
    if not dropped:
        return groebner_ideal(polys, DEGREVLEX)
    elim = RingContext(dropped + kept, ring.params, MonomialOrdering("block", len(dropped)))
    G = groebner_ideal([p.to_ring(elim) for p in polys])
    back = RingContext(kept, ring.params, DEGREVLEX)
    out = []
    for g in G:
        if not (g.variables_used() & drop):
            out.append(g.to_ring(back))
    return out
