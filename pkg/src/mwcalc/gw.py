"""Grothendieck-Witt and Witt classes of diagonal forms.

A ``GWForm`` is a formal integer combination of one-dimensional forms
``<a>`` keyed by canonical square-class tokens.  Negative multiplicities
are allowed, which makes the class group of virtual forms closed under
subtraction.  Over finite fields and over Q with its real embedding the
stored terms are already the canonical representative of the class, so
structural equality coincides with equality in GW.
"""
from __future__ import annotations

import functools
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import UNKNOWN, FieldMismatch, NotAnExtension
from .fields import ExtensionField, Field, FieldElem, RationalField, squarefree_part

QBFS_MAX_RANK = 6
QBFS_MAX_HEIGHT = 10 ** 4
QBFS_COEFF_BOUND = 5
QBFS_MAX_STATES = 20000


def _is_ordered(F):
    return isinstance(F, RationalField)


def _tok_sign(t):
    return 1 if t > 0 else -1


@dataclass(frozen=True)
class GWForm:
    field: Field
    terms: tuple  # sorted ((token, multiplicity), ...) with nonzero multiplicities

    # construction ---------------------------------------------------------
    @classmethod
    def from_counter(cls, F, counter):
        counter = {t: m for t, m in counter.items() if m}
        counter = _normalize(F, counter)
        items = sorted(counter.items(), key=lambda kv: F.sort_key(kv[0]))
        return cls(F, tuple(items))

    @classmethod
    def diagonal(cls, F, entries, offset=0):
        """Form <a_1> + ... + <a_k> - offset*<1>."""
        c = Counter()
        for a in entries:
            raw = F.coerce(a)
            c[F.square_class(raw)] += 1
        if offset:
            c[F.one] -= offset
        return cls.from_counter(F, c)

    @classmethod
    def zero(cls, F):
        return cls(F, ())

    @classmethod
    def one(cls, F):
        return cls.from_counter(F, {F.one: 1})

    @classmethod
    def bracket(cls, F, a):
        return cls.diagonal(F, [a])

    @classmethod
    def hyperbolic(cls, F):
        return cls.diagonal(F, [F.one, F.neg(F.one)])

    @classmethod
    def integer(cls, F, n):
        return cls.from_counter(F, {F.one: n})

    # arithmetic ---------------------------------------------------------
    def counter(self):
        return Counter(dict(self.terms))

    def _check(self, other):
        if not isinstance(other, GWForm):
            raise TypeError(f"expected a GWForm, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        c = self.counter()
        c.update(dict(other.terms))
        return GWForm.from_counter(self.field, c)

    def __neg__(self):
        return GWForm(self.field, tuple((t, -m) for t, m in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GWForm.from_counter(self.field, {t: m * other for t, m in self.terms})
        self._check(other)
        F = self.field
        c = Counter()
        for t1, m1 in self.terms:
            for t2, m2 in other.terms:
                c[F.square_class(F.mul(t1, t2))] += m1 * m2
        return GWForm.from_counter(F, c)

    __rmul__ = __mul__

    # invariants ---------------------------------------------------------
    @property
    def rank(self):
        return sum(m for _, m in self.terms)

    @property
    def disc(self):
        F = self.field
        d = F.one
        for t, m in self.terms:
            if m % 2:
                d = F.mul(d, t)
        return F.square_class(d) if self.terms else F.one

    @property
    def signature(self):
        if not _is_ordered(self.field):
            return None
        return sum(m * _tok_sign(t) for t, m in self.terms)

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return f"GWForm({self.to_expr()} over {self.field})"

    def to_expr(self):
        F = self.field
        parts = []
        offset = 0
        for t, m in self.terms:
            if t == F.one and m < 0:
                offset = -m
                continue
            item = f"(cls {F.fmt(t)})"
            if m < 0:
                item = f"(neg {item})"
            parts.extend([item] * abs(m))
        parts.append(f":offset {offset}")
        return "(gw " + " ".join(parts) + ")"


def _normalize(F, counter):
    """Canonical representative over fields whose invariants are complete."""
    if F.is_finite:
        rank = sum(counter.values())
        disc = F.one
        for t, m in counter.items():
            if m % 2:
                disc = F.mul(disc, t)
        disc = F.square_class(disc)
        if disc == F.one:
            return {F.one: rank} if rank else {}
        out = {disc: 1}
        if rank - 1:
            out[F.one] = rank - 1
        return out
    if isinstance(F, RationalField) and not F.real:
        # <a> + <-a> is the hyperbolic plane; rewrite it on the tokens 1, -1.
        counter = dict(counter)
        for t in sorted(counter, key=F.sort_key):
            if t in (1, -1):
                continue
            a, b = counter.get(t, 0), counter.get(-t, 0)
            if a * b > 0:
                k = min(abs(a), abs(b)) * (1 if a > 0 else -1)
                counter[t] -= k
                counter[-t] -= k
                counter[Fraction(1)] = counter.get(Fraction(1), 0) + k
                counter[Fraction(-1)] = counter.get(Fraction(-1), 0) + k
        return {t: m for t, m in counter.items() if m}
    return counter


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GWInvariants:
    rank: int
    disc: object
    signature: Optional[int] = None
    witt_tag: Optional[tuple] = None


def gw_add(x: GWForm, y: GWForm) -> GWForm:
    return x + y


def gw_mul(x: GWForm, y: GWForm) -> GWForm:
    return x * y


def signed_disc(x: GWForm):
    """Discriminant twisted by (-1)^(r(r-1)/2); an invariant of Witt classes."""
    F = x.field
    r = x.rank
    d = x.disc
    if (r * (r - 1) // 2) % 2:
        d = F.square_class(F.mul(d, F.neg(F.one)))
    return d


def gw_invariants(x: GWForm) -> GWInvariants:
    F = x.field
    tag = (x.rank % 2, signed_disc(x)) if F.is_finite else None
    return GWInvariants(x.rank, x.disc, x.signature, tag)


def gw_eq(x: GWForm, y: GWForm):
    """True, False, or UNKNOWN when the bounded search cannot decide."""
    x._check(y)
    F = x.field
    d = x - y
    if d.is_zero():
        return True
    if d.rank != 0:
        return False
    if F.canonical_squares and d.disc != F.one:
        return False
    if _is_ordered(F) and d.signature != 0:
        return False
    if F.is_finite or (isinstance(F, RationalField) and F.real):
        return True
    if isinstance(F, RationalField):
        pos = tuple(sorted(int(t) for t, m in d.terms if m > 0 for _ in range(m)))
        neg = tuple(sorted(int(t) for t, m in d.terms if m < 0 for _ in range(-m)))
        verdict = _q_isometric(pos, neg)
        if verdict is UNKNOWN:
            verdict = q_witt_class_is_zero(d)
        return verdict
    return UNKNOWN


def q_second_residues(x: GWForm):
    """Second residue homomorphisms W(Q) -> W(F_p) at every prime dividing a
    token, returned as {p: (rank mod 2, signed disc)} with zero entries dropped
    (for p = 2 only the rank parity survives)."""
    from sympy import primefactors

    from .fields import PrimeField

    primes = set()
    for t, _ in x.terms:
        primes.update(primefactors(abs(int(t))))
    out = {}
    for p in sorted(primes):
        if p == 2:
            parity = sum(m for t, m in x.terms if int(t) % 2 == 0) % 2
            if parity:
                out[p] = (1, None)
            continue
        Fp = PrimeField(p)
        c = Counter()
        for t, m in x.terms:
            t = int(t)
            if t % p == 0:
                c[Fp.square_class(Fp.from_int(t // p))] += m
        res = GWForm.from_counter(Fp, c)
        tag = (res.rank % 2, signed_disc(res))
        if tag != (0, Fp.one):
            out[p] = tag
    return out


def q_witt_class_is_zero(x: GWForm) -> bool:
    """Decide x = 0 in GW(Q) for a rank-0 virtual form: zero signature and
    vanishing second residues at all primes (W(Q) = W(Z) + sum of W(F_p))."""
    if x.rank != 0 or x.signature != 0:
        return False
    return not q_second_residues(x)


def witt_eq(x: GWForm, y: GWForm):
    """Equality of the images in W(F) = GW(F)/(h)."""
    x._check(y)
    d = x - y
    if d.rank % 2:
        return False
    return gw_eq(d, GWForm.hyperbolic(x.field) * (d.rank // 2))


def normalize(x: GWForm) -> GWForm:
    return GWForm.from_counter(x.field, x.counter())


# ---------------------------------------------------------------------------
# Bounded chain-equivalence search over Q
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _sqf(n: int) -> int:
    return squarefree_part(n)


def _binary_moves(a, b):
    seen = set()
    if a == -b:
        seen.add((1, -1))
    B = QBFS_COEFF_BOUND
    for u in range(B + 1):
        for v in range(B + 1):
            if u == 0 and v == 0:
                continue
            c = a * u * u + b * v * v
            if c == 0:
                continue
            c = _sqf(c)
            if abs(c) > QBFS_MAX_HEIGHT:
                continue
            e = _sqf(a * b * c)
            if abs(e) > QBFS_MAX_HEIGHT:
                continue
            seen.add(tuple(sorted((c, e))))
    return seen


@functools.lru_cache(maxsize=4096)
def _q_isometric(pos: tuple, neg: tuple):
    # Witt cancellation: drop common diagonal entries first.
    p, n = list(pos), list(neg)
    for t in list(p):
        if t in n:
            p.remove(t)
            n.remove(t)
    if not p:
        return True
    start, goal = tuple(sorted(p)), tuple(sorted(n))
    if len(start) > QBFS_MAX_RANK:
        return UNKNOWN
    seen = {start}
    queue = deque([start])
    while queue and len(seen) < QBFS_MAX_STATES:
        state = queue.popleft()
        for i in range(len(state)):
            for j in range(i + 1, len(state)):
                for pair in _binary_moves(state[i], state[j]):
                    rest = [state[k] for k in range(len(state)) if k not in (i, j)]
                    nxt = tuple(sorted(rest + list(pair)))
                    if nxt == goal:
                        return True
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return UNKNOWN


# ---------------------------------------------------------------------------
# Transfers and base change
# ---------------------------------------------------------------------------


def diagonalize(F: Field, gram):
    """Diagonal entries of a nondegenerate symmetric matrix over F
    (characteristic != 2) after exact congruence reduction."""
    n = len(gram)
    G = [list(row) for row in gram]
    zero = F.zero
    diag = []
    for i in range(n):
        if G[i][i] == zero:
            j = next((j for j in range(i + 1, n) if G[j][j] != zero), None)
            if j is not None:
                G[i], G[j] = G[j], G[i]
                for row in G:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, n) if G[i][j] != zero), None)
                if j is None:
                    raise ValueError("degenerate bilinear form")
                # e_i <- e_i + e_j gives G_ii = 2 G_ij != 0.
                for k in range(n):
                    G[i][k] = F.add(G[i][k], G[j][k])
                for k in range(n):
                    G[k][i] = F.add(G[k][i], G[k][j])
        piv = G[i][i]
        inv = F.inv(piv)
        for j in range(i + 1, n):
            f = F.mul(G[j][i], inv)
            if f == zero:
                continue
            for k in range(i, n):
                G[j][k] = F.sub(G[j][k], F.mul(f, G[i][k]))
            for k in range(i, n):
                G[k][j] = F.sub(G[k][j], F.mul(f, G[k][i]))
        diag.append(piv)
    return diag


def transfer(x: GWForm, E: Optional[ExtensionField] = None) -> GWForm:
    """Trace-form transfer Tr_{E/F} of a class over E = F[x]/(m)."""
    E = x.field if E is None else E
    if x.field != E:
        raise FieldMismatch(f"form lives over {x.field}, not {E}")
    if not isinstance(E, ExtensionField):
        if E.is_finite or isinstance(E, RationalField):
            return x  # the trivial extension E = F
        raise NotAnExtension(f"{E} is not a simple extension")
    F = E.base
    n = E.n
    powers = [E.one]
    for _ in range(2 * n - 2):
        powers.append(E.mul(powers[-1], E.generator))
    c = Counter()
    for token, mult in x.terms:
        traces = [E.trace(E.mul(token, pw)) for pw in powers]
        gram = [[traces[i + j] for j in range(n)] for i in range(n)]
        for d in diagonalize(F, gram):
            c[F.square_class(d)] += mult
    return GWForm.from_counter(F, c)


def transfer_along(x: GWForm, trace, basis, target: Field) -> GWForm:
    """Transfer using an explicit trace map and basis of the source over
    ``target``: entries Tr(a * b_i * b_j)."""
    E = x.field
    c = Counter()
    for token, mult in x.terms:
        gram = [[trace(E.mul(token, E.mul(bi, bj))) for bj in basis] for bi in basis]
        for d in diagonalize(target, gram):
            c[target.square_class(d)] += mult
    return GWForm.from_counter(target, c)


def base_change(x: GWForm, E: Field, embed=None) -> GWForm:
    """Image of a class under F -> E; ``embed`` maps raw values."""
    embed = embed or (lambda a: E.embed_from(x.field, a))
    c = Counter()
    for token, mult in x.terms:
        c[E.square_class(embed(token))] += mult
    return GWForm.from_counter(E, c)
