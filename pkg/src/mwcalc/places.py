"""Places of a rational function field F(t): valuations, residue fields,
reduction of units and canonical uniformizers."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Optional

from . import poly as P
from .errors import NotAUniformizer, NotIrreducible, ZeroInput
from .factor import factor
from .fields import ExtensionField, FunctionField, is_irreducible


@dataclass(frozen=True)
class Place:
    field: FunctionField
    poly: Optional[tuple] = None  # None is the place at infinity

    def __post_init__(self):
        if self.poly is not None:
            B = self.field.base
            f = P.trim(B, self.poly)
            object.__setattr__(self, "poly", f)
            if len(f) < 2 or f[-1] != B.one:
                raise NotIrreducible("a finite place needs a monic polynomial of degree >= 1")
            if not _irreducible_cached(B, f):
                raise NotIrreducible(f"{f} is not irreducible over {B}")

    @property
    def is_infinite(self):
        return self.poly is None

    @property
    def degree(self):
        return 1 if self.poly is None else len(self.poly) - 1

    def __str__(self):
        from .fields import poly_str

        if self.poly is None:
            return "inf"
        return f"({poly_str(self.field.base, self.poly, 't')})"

    def sort_key(self):
        B = self.field.base
        if self.poly is None:
            return (1, 0, ())
        return (0, len(self.poly), tuple(B.sort_key(c) for c in reversed(self.poly)))


@functools.lru_cache(maxsize=None)
def _irreducible_cached(B, f):
    return is_irreducible(B, f)


def infinite_place(F: FunctionField) -> Place:
    return Place(F, None)


def finite_place(F: FunctionField, f) -> Place:
    return Place(F, tuple(F.base.coerce(c) for c in f))


def _poly_valuation(B, f, g):
    v = 0
    while True:
        q, r = P.divmod_(B, f, g)
        if r:
            return v
        f = q
        v += 1


def valuation(F: FunctionField, r, place: Place) -> int:
    num, den = r
    if not num:
        raise ZeroInput("valuation of zero")
    if place.is_infinite:
        return (len(den) - 1) - (len(num) - 1)
    B = F.base
    return _poly_valuation(B, num, place.poly) - _poly_valuation(B, den, place.poly)


def _strip(B, f, g):
    v = 0
    while True:
        q, r = P.divmod_(B, f, g)
        if r:
            return v, f
        f = q
        v += 1


def leading_term(F: FunctionField, r, place: Place):
    """``(v, c)`` with ``v`` the valuation of ``r`` and ``c`` the residue of
    ``r / pi^v`` for the canonical uniformizer ``pi`` (``1/t`` at infinity).

    ``c`` is multiplicative in ``r``, so residues of units ``s / w^e`` can be
    read off without forming the quotient in ``F``.
    """
    num, den = r
    if not num:
        raise ZeroInput("leading term of zero")
    B = F.base
    if place.is_infinite:
        return (len(den) - len(num)), B.div(num[-1], den[-1])
    a, n1 = _strip(B, num, place.poly)
    b, d1 = _strip(B, den, place.poly)
    if place.degree == 1:
        c = B.neg(place.poly[0])
        return a - b, B.div(P.evaluate(B, n1, c), P.evaluate(B, d1, c))
    k = residue_field(place)
    return a - b, k.div(k.from_poly(n1), k.from_poly(d1))


@functools.lru_cache(maxsize=None)
def residue_field(place: Place):
    B = place.field.base
    if place.is_infinite or place.degree == 1:
        return B
    return ExtensionField(B, place.poly, check=False)


def reduce(place: Place, r):
    """Image in the residue field of an element with nonnegative valuation."""
    F = place.field
    B = F.base
    num, den = r
    if not num:
        return residue_field(place).zero
    v = valuation(F, r, place)
    if v < 0:
        raise ZeroInput("cannot reduce an element with a pole at the place")
    k = residue_field(place)
    if v > 0:
        return k.zero
    if place.is_infinite:
        return B.div(num[-1], den[-1])
    if place.degree == 1:
        c = B.neg(place.poly[0])
        return B.div(P.evaluate(B, num, c), P.evaluate(B, den, c))
    return k.div(k.from_poly(num), k.from_poly(den))


def canonical_uniformizer(place: Place, sign=1):
    """Monic generator at a finite place; ``sign/t`` at infinity."""
    F = place.field
    B = F.base
    if place.is_infinite:
        return F.make((B.from_int(sign),), P.x_poly(B))
    return F.make(place.poly)


def check_uniformizer(F, pi, place):
    if not pi[0] or valuation(F, pi, place) != 1:
        raise NotAUniformizer(f"{F.fmt(pi)} does not have valuation 1 at {place}")


def support(F: FunctionField, r, include_infinity=True):
    """Places where a nonzero rational function has nonzero valuation."""
    B = F.base
    num, den = r
    places = []
    for part in (num, den):
        if len(part) > 1:
            for f, _ in factor(B, part)[1]:
                places.append(Place(F, f))
    if include_infinity and len(num) != len(den):
        places.append(Place(F, None))
    return sorted(set(places), key=Place.sort_key)


def places_up_to_degree(F: FunctionField, max_degree: int):
    """All finite places of degree <= max_degree over a finite base."""
    B = F.base
    out = []
    elements = list(B.elements())
    for d in range(1, max_degree + 1):
        for tail in itertools.product(elements, repeat=d):
            f = tuple(reversed(tail)) + (B.one,)
            if _irreducible_cached(B, f):
                out.append(Place(F, f))
    return out
