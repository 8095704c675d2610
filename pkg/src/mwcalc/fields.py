"""Exact arithmetic in the supported fields.

Four kinds of field are available:

* ``PrimeField(p)`` for odd primes p, raw values are ints in ``range(p)``;
* ``RationalField(real=False)`` for Q, raw values are ``Fraction``; with
  ``real=True`` it models Q with its real embedding, so square classes
  are signs;
* ``ExtensionField(base, modulus)`` for ``base[x]/(modulus)``, raw values
  are coefficient tuples of fixed length ``deg(modulus)``;
* ``FunctionField(base)`` for ``base(t)``, raw values are reduced pairs
  ``(num, den)`` of polynomial tuples with ``den`` monic.

Algorithms work on raw values and receive the field explicitly.
``FieldElem`` is a thin operator-overloading wrapper for user code.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import poly as P
from .errors import (
    FieldMismatch,
    NotIrreducible,
    UnsupportedField,
    ZeroInput,
)

MAX_TOWER_HEIGHT = 2


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """Interface shared by all field kinds."""

    zero = None
    one = None
    is_finite = False
    height = 0

    # arithmetic on raw values -------------------------------------------
    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return result

    def is_zero(self, a):
        return a == self.zero

    # wrappers -------------------------------------------------------------
    def __call__(self, value):
        return FieldElem(self, self.coerce(value))

    def coerce(self, value):
        if isinstance(value, FieldElem):
            if value.field != self:
                return self.embed_from(value.field, value.raw)
            return value.raw
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.div(self.from_int(value.numerator), self.from_int(value.denominator))
        return self.from_raw(value)

    def from_raw(self, value):
        raise TypeError(f"cannot interpret {value!r} in {self}")

    def embed_from(self, other, raw):
        """Image of ``raw`` from a subfield ``other`` (constants only)."""
        if other == self:
            return raw
        raise FieldMismatch(f"no embedding {other} -> {self}")

    def random_nonzero(self, rng):
        while True:
            a = self.random_element(rng)
            if a != self.zero:
                return a

    # square classes ---------------------------------------------------------
    canonical_squares = False

    def square_class(self, a):
        raise UnsupportedField(f"square classes are not available over {self}")

    def nonzero_check(self, a):
        if a == self.zero:
            raise ZeroInput("zero has no square class")


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    def __post_init__(self):
        if self.p % 2 == 0 or not is_prime(self.p):
            raise UnsupportedField(f"characteristic must be an odd prime, got {self.p}")

    zero = 0
    one = 1
    is_finite = True
    canonical_squares = True

    @property
    def characteristic(self):
        return self.p

    @property
    def order(self):
        return self.p

    @property
    def degree(self):
        return 1

    @property
    def prime_field(self):
        return self

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def from_int(self, n):
        return n % self.p

    def from_raw(self, value):
        if isinstance(value, int):
            return value % self.p
        raise TypeError(f"cannot interpret {value!r} in {self}")

    def elements(self):
        return range(self.p)

    def random_element(self, rng):
        return rng.randrange(self.p)

    def sort_key(self, a):
        return a

    def fmt(self, a):
        return str(a)

    def desc(self):
        return f"(fp {self.p})"

    def __str__(self):
        return f"F{self.p}"

    def is_square(self, a):
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    @functools.cached_property
    def nonresidue(self):
        return next(a for a in range(2, self.p) if not self.is_square(a))

    def square_class(self, a):
        self.nonzero_check(a)
        return 1 if self.is_square(a) else self.nonresidue

    def split_composite(self, a):
        # -1 stays atomic so that the eta relations can see it.
        if a in (0, 1, self.p - 1):
            return None
        for d in range(2, int(a ** 0.5) + 1):
            if a % d == 0:
                return d, a // d
        return None


# ---------------------------------------------------------------------------
# Q and Q with its real embedding
# ---------------------------------------------------------------------------


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel of a nonzero integer."""
    from sympy import factorint

    sign = -1 if n < 0 else 1
    out = 1
    for prime, e in factorint(abs(n)).items():
        if e % 2:
            out *= prime
    return sign * out


def _smallest_prime_factor(n: int) -> int:
    from sympy import factorint

    return min(factorint(n))


@dataclass(frozen=True)
class RationalField(Field):
    real: bool = False

    zero = Fraction(0)
    one = Fraction(1)
    canonical_squares = True

    @property
    def characteristic(self):
        return 0

    @property
    def prime_field(self):
        return self

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def from_int(self, n):
        return Fraction(n)

    def from_raw(self, value):
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        raise TypeError(f"cannot interpret {value!r} in {self}")

    def random_element(self, rng, height=20):
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    def sort_key(self, a):
        return (abs(a), a < 0, a)

    def fmt(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"(frac {a.numerator} {a.denominator})"

    def desc(self):
        return "(qreal)" if self.real else "(q)"

    def __str__(self):
        return "Qreal" if self.real else "Q"

    def square_class(self, a):
        self.nonzero_check(a)
        if self.real:
            return Fraction(1 if a > 0 else -1)
        return Fraction(squarefree_part(a.numerator * a.denominator))

    def split_composite(self, a):
        if a in (0, 1, -1):
            return None
        if a < 0:
            return Fraction(-1), -a
        n, d = a.numerator, a.denominator
        if d == 1:
            q = _smallest_prime_factor(n)
            return None if q == n else (Fraction(q), a / q)
        if n == 1:
            q = _smallest_prime_factor(d)
            return None if q == d else (Fraction(1, q), a * q)
        return Fraction(n), Fraction(1, d)


# ---------------------------------------------------------------------------
# Simple extensions base[x]/(m)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionField(Field):
    base: Field
    modulus: tuple  # monic, ascending raw coefficients over base
    check: bool = field(default=True, compare=False, hash=False, repr=False)

    def __post_init__(self):
        B = self.base
        m = P.trim(B, self.modulus)
        object.__setattr__(self, "modulus", m)
        if len(m) < 2 or m[-1] != B.one:
            raise NotIrreducible("modulus must be monic of degree >= 1")
        if self.base.height + 1 > MAX_TOWER_HEIGHT:
            raise UnsupportedField("tower height is capped at 2")
        if self.check and not is_irreducible(B, m):
            raise NotIrreducible(f"{m} is reducible over {B}")
        n = len(m) - 1
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "zero", (B.zero,) * n)
        object.__setattr__(self, "one", (B.one,) + (B.zero,) * (n - 1))
        object.__setattr__(self, "is_finite", B.is_finite)
        object.__setattr__(self, "height", B.height + 1)
        object.__setattr__(self, "canonical_squares", B.is_finite)

    @property
    def characteristic(self):
        return self.base.characteristic

    @property
    def order(self):
        return self.base.order ** self.n

    @property
    def degree(self):
        """Degree over the prime field."""
        return self.base.degree * self.n

    @property
    def prime_field(self):
        return self.base.prime_field

    def _pad(self, coeffs):
        coeffs = tuple(coeffs)
        return coeffs + (self.base.zero,) * (self.n - len(coeffs))

    def add(self, a, b):
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        B = self.base
        return tuple(B.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        B = self.base
        n = self.n
        prod = [B.zero] * (2 * n - 1)
        for i, x in enumerate(a):
            if x == B.zero:
                continue
            for j, y in enumerate(b):
                if y != B.zero:
                    prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        m = self.modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c != B.zero:
                for j in range(n):
                    prod[k - n + j] = B.sub(prod[k - n + j], B.mul(c, m[j]))
        return tuple(prod[:n])

    def inv(self, a):
        B = self.base
        f = P.trim(B, a)
        if not f:
            raise ZeroDivisionError("inverse of zero")
        d, s, _ = P.xgcd(B, f, self.modulus)
        return self._pad(s)

    def from_int(self, n):
        return self.from_base(self.base.from_int(n))

    def from_base(self, c):
        return (c,) + (self.base.zero,) * (self.n - 1)

    def from_poly(self, f):
        return self._pad(P.mod(self.base, f, self.modulus))

    def to_poly(self, a):
        return P.trim(self.base, a)

    def embed_from(self, other, raw):
        if other == self:
            return raw
        return self.from_base(self.base.embed_from(other, raw))

    def from_raw(self, value):
        if isinstance(value, tuple) and len(value) <= self.n:
            return self._pad(self.base.coerce(c) for c in value)
        return self.from_base(self.base.coerce(value))

    @property
    def generator(self):
        return self.from_poly(P.x_poly(self.base))

    def elements(self):
        for digits in itertools.product(list(self.base.elements()), repeat=self.n):
            yield tuple(reversed(digits))

    def random_element(self, rng):
        return tuple(self.base.random_element(rng) for _ in range(self.n))

    def sort_key(self, a):
        return tuple(self.base.sort_key(c) for c in reversed(a))

    def fmt(self, a):
        return "(elt " + " ".join(self.base.fmt(c) for c in a) + ")"

    def desc(self):
        coeffs = " ".join(self.base.fmt(c) for c in self.modulus)
        return f"(ext {self.base.desc()} (poly {coeffs}))"

    def __str__(self):
        return f"{self.base}[x]/({poly_str(self.base, self.modulus)})"

    def trace(self, a):
        """Trace to the base field: trace of multiplication by ``a``."""
        B = self.base
        total = B.zero
        basis_elt = self.one
        x = self.generator
        for i in range(self.n):
            total = B.add(total, self.mul(a, basis_elt)[i])
            basis_elt = self.mul(basis_elt, x)
        return total

    # squares ---------------------------------------------------------------
    def is_square(self, a):
        if not self.is_finite:
            raise UnsupportedField(f"square test over {self}")
        if a == self.zero:
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one

    @functools.cached_property
    def nonresidue(self):
        for a in self.elements():
            if a != self.zero and not self.is_square(a):
                return a
        raise AssertionError("finite field of odd order has nonsquares")

    def square_class(self, a):
        self.nonzero_check(a)
        if not self.is_finite:
            # No canonical representative over number fields: the element
            # itself stands for its class and comparisons may be undecided.
            return a
        return self.one if self.is_square(a) else self.nonresidue

    def split_composite(self, a):
        return None


# ---------------------------------------------------------------------------
# Rational function fields base(t)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionField(Field):
    base: Field

    def __post_init__(self):
        if self.base.height + 1 > MAX_TOWER_HEIGHT:
            raise UnsupportedField("tower height is capped at 2")
        B = self.base
        object.__setattr__(self, "zero", ((), (B.one,)))
        object.__setattr__(self, "one", ((B.one,), (B.one,)))
        object.__setattr__(self, "height", B.height + 1)
        object.__setattr__(self, "canonical_squares", B.is_finite)

    @property
    def characteristic(self):
        return self.base.characteristic

    @property
    def prime_field(self):
        return self.base.prime_field

    def make(self, num, den=None):
        """Reduced raw value of num/den."""
        B = self.base
        num = P.trim(B, num)
        den = (B.one,) if den is None else P.trim(B, den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = P.gcd(B, num, den)
        if len(g) > 1:
            num = P.divmod_(B, num, g)[0]
            den = P.divmod_(B, den, g)[0]
        c = B.inv(den[-1])
        return P.scale(B, c, num), P.scale(B, c, den)

    def add(self, a, b):
        B = self.base
        (n1, d1), (n2, d2) = a, b
        if d1 == d2:
            return self.make(P.add(B, n1, n2), d1)
        return self.make(P.add(B, P.mul(B, n1, d2), P.mul(B, n2, d1)), P.mul(B, d1, d2))

    def neg(self, a):
        return P.neg(self.base, a[0]), a[1]

    def mul(self, a, b):
        B = self.base
        return self.make(P.mul(B, a[0], b[0]), P.mul(B, a[1], b[1]))

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return self.make(a[1], a[0])

    def from_int(self, n):
        return self.constant(self.base.from_int(n))

    def constant(self, c):
        return self.make(P.const(self.base, c))

    def from_poly(self, f):
        return self.make(f)

    def embed_from(self, other, raw):
        if other == self:
            return raw
        if isinstance(other, FunctionField):
            B = self.base
            num = P.map_coeffs(B, lambda c: B.embed_from(other.base, c), raw[0])
            den = P.map_coeffs(B, lambda c: B.embed_from(other.base, c), raw[1])
            return self.make(num, den)
        return self.constant(self.base.embed_from(other, raw))

    def from_raw(self, value):
        if isinstance(value, tuple) and len(value) == 2 and all(isinstance(v, tuple) for v in value):
            return self.make(value[0], value[1])
        return self.constant(self.base.coerce(value))

    @property
    def t(self):
        return self.make(P.x_poly(self.base))

    def is_constant(self, a):
        return len(a[0]) <= 1 and len(a[1]) == 1

    def random_element(self, rng, max_deg=2):
        B = self.base
        num = tuple(B.random_element(rng) for _ in range(rng.randint(0, max_deg) + 1))
        den = tuple(B.random_element(rng) for _ in range(rng.randint(0, max_deg))) + (B.one,)
        return self.make(num, den)

    def sort_key(self, a):
        B = self.base
        num, den = a
        return (len(den), tuple(B.sort_key(c) for c in reversed(den)),
                len(num), tuple(B.sort_key(c) for c in reversed(num)))

    def fmt(self, a):
        B = self.base
        num, den = a
        ntext = "(poly " + " ".join(B.fmt(c) for c in num) + ")" if num else "(poly)"
        if den == (B.one,):
            return ntext
        return f"(rf {ntext} (poly " + " ".join(B.fmt(c) for c in den) + "))"

    def desc(self):
        return f"(fnfield {self.base.desc()})"

    def __str__(self):
        return f"{self.base}(t)"

    # square classes via factorization -------------------------------------
    def square_class(self, a):
        self.nonzero_check(a)
        B = self.base
        num, den = a
        c = num[-1]
        out = (B.one,)
        try:
            for f, e in factor(B, P.monic(B, num))[1] + factor(B, den)[1]:
                if e % 2:
                    out = P.mul(B, out, f)
        except UnsupportedField:
            return a
        if not B.canonical_squares:
            return a
        cls = B.square_class(c)
        return self.make(P.scale(B, cls, out))

    def split_composite(self, a):
        B = self.base
        num, den = a
        if self.is_constant(a):
            parts = B.split_composite(num[0]) if num else None
            if parts is None:
                return None
            return self.constant(parts[0]), self.constant(parts[1])
        c = num[-1]
        if c != B.one:
            return self.constant(c), self.make(P.scale(B, B.inv(c), num), den)
        try:
            nf = factor(B, num)[1]
            df = factor(B, den)[1] if len(den) > 1 else []
        except UnsupportedField:
            return None
        n_count = sum(e for _, e in nf)
        d_count = sum(e for _, e in df)
        if n_count + d_count <= 1:
            return None
        if n_count:
            f = nf[0][0]
            return self.make(f), self.mul(a, self.make((B.one,), f))
        f = df[0][0]
        return self.make((B.one,), f), self.mul(a, self.make(f))


# ---------------------------------------------------------------------------
# Wrapper element type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElem:
    field: Field
    raw: object

    def _other(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.raw
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.raw, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.raw, self._other(other)))

    def __rsub__(self, other):
        return FieldElem(self.field, self.field.sub(self._other(other), self.raw))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.raw, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.field, self.field.div(self.raw, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElem(self.field, self.field.div(self._other(other), self.raw))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.raw))

    def __pow__(self, n):
        return FieldElem(self.field, self.field.pow(self.raw, n))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.raw == other.raw
        try:
            return self.raw == self.field.coerce(other)
        except (TypeError, FieldMismatch):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def __repr__(self):
        return self.field.fmt(self.raw)

    def is_zero(self):
        return self.raw == self.field.zero


def square_class(a: FieldElem) -> FieldElem:
    """Canonical representative of ``a`` modulo nonzero squares."""
    return FieldElem(a.field, a.field.square_class(a.raw))


# ---------------------------------------------------------------------------
# Polynomial helpers that need the field kinds
# ---------------------------------------------------------------------------


def poly_str(F, f, var="x"):
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if c == F.zero:
            continue
        cs = F.fmt(c)
        if i == 0:
            terms.append(cs)
        else:
            mon = var if i == 1 else f"{var}^{i}"
            terms.append(mon if c == F.one else f"{cs}*{mon}")
    return " + ".join(terms)


def is_irreducible(F, f) -> bool:
    f = P.trim(F, f)
    if len(f) < 2:
        return False
    if len(f) == 2:
        return True
    if F.is_finite or isinstance(F, RationalField):
        fac = factor(F, f)[1]
        return len(fac) == 1 and fac[0][1] == 1
    raise UnsupportedField(f"irreducibility test over {F}")


# The factorization routines live in their own module but are re-exported
# here because places and square classes depend on them.
from .factor import factor  # noqa: E402


@functools.lru_cache(maxsize=None)
def finite_field(p: int, n: int = 1) -> Field:
    """Canonical model of the field with p**n elements.

    For n > 1 this is the extension of F_p by the first monic irreducible
    polynomial of degree n in enumeration order.
    """
    Fp = PrimeField(p)
    if n == 1:
        return Fp
    for tail in itertools.product(range(p), repeat=n):
        f = tuple(reversed(tail)) + (1,)
        if f[0] != 0 and is_irreducible(Fp, f):
            return ExtensionField(Fp, f, check=False)
    raise AssertionError("irreducible polynomials exist in every degree")
