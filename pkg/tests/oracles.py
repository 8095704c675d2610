"""Brute-force reference computations that share no code with mwcalc."""
from __future__ import annotations

import functools
import itertools
from fractions import Fraction


# ---------------------------------------------------------------------------
# squares and binary forms over F_p
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def squares(p):
    return frozenset(x * x % p for x in range(1, p))


def is_square_mod(p, a):
    return a % p in squares(p)


@functools.lru_cache(maxsize=None)
def _binary_iso_table(p):
    """(a, b) ~ (c, d) as binary forms: same discriminant class and c
    represented by a x^2 + b y^2."""
    units = range(1, p)
    rep = {}
    for a, b in itertools.product(units, repeat=2):
        rep[a, b] = {(a * x * x + b * y * y) % p for x in range(p) for y in range(p)
                     if (x, y) != (0, 0)}
    table = {}
    for a, b in itertools.product(units, repeat=2):
        table[a, b] = [(c, d) for c, d in itertools.product(units, repeat=2)
                       if is_square_mod(p, a * b * c * d) and c in rep[a, b]]
    return table


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@functools.lru_cache(maxsize=None)
def _chain_components(p, n):
    """Connected components of diagonal rank-n forms under binary moves
    (Witt's chain equivalence)."""
    table = _binary_iso_table(p)
    uf = _UnionFind()
    for state in itertools.combinations_with_replacement(range(1, p), n):
        uf.find(state)
        for i, j in itertools.combinations(range(n), 2):
            rest = [state[k] for k in range(n) if k not in (i, j)]
            for c, d in table[state[i], state[j]]:
                uf.union(state, tuple(sorted(rest + [c, d])))
    return uf


def chain_equivalent(p, entries1, offset1, entries2, offset2):
    """Whether sum<a_i> - m<1> equals sum<b_j> - n<1> in GW(F_p), decided by
    searching chains of binary isometries."""
    x = sorted([a % p for a in entries1] + [1] * offset2)
    y = sorted([b % p for b in entries2] + [1] * offset1)
    if len(x) != len(y):
        return False
    if not x:
        return True
    if len(x) == 1:
        # no binary moves in rank one: compare square classes directly
        return is_square_mod(p, x[0] * y[0])
    uf = _chain_components(p, len(x))
    return uf.find(tuple(x)) == uf.find(tuple(y))


# ---------------------------------------------------------------------------
# classical residue on K^M of a rational function field
# ---------------------------------------------------------------------------

def _pdivmod(f, g, inv, mul, sub, zero):
    f = list(f)
    q = [zero] * max(len(f) - len(g) + 1, 1)
    lead = inv(g[-1])
    while len(f) >= len(g) and any(c != zero for c in f):
        while f and f[-1] == zero:
            f.pop()
        if len(f) < len(g):
            break
        c = mul(f[-1], lead)
        k = len(f) - len(g)
        q[k] = c
        for i, gc in enumerate(g):
            f[k + i] = sub(f[k + i], mul(c, gc))
        f.pop()
    while f and f[-1] == zero:
        f.pop()
    return q, f


def split_at(poly, place, ops):
    """poly = place^e * rest with place not dividing rest; returns (e, rest)."""
    inv, mul, sub, zero = ops
    e = 0
    while True:
        q, r = _pdivmod(poly, place, inv, mul, sub, zero)
        if r:
            return e, poly
        while len(q) > 1 and q[-1] == zero:
            q.pop()
        poly, e = q, e + 1


def milnor_residue_q(symbols, c):
    """Classical residue of {f_1,...,f_n} (n = 1 or 2) at t = c over Q.

    Each f is a pair (numerator, denominator) of coefficient lists (ascending)
    over Fraction.  Returns the integer v(f) for n = 1 and the tame value
    (-1)^{ab} wbar^a / ubar^b in Q^* for n = 2."""
    ops = (lambda a: 1 / a, lambda a, b: a * b, lambda a, b: a - b, Fraction(0))
    place = [Fraction(-c), Fraction(1)]

    def ev(poly):
        return sum((Fraction(co) * Fraction(c) ** i for i, co in enumerate(poly)), Fraction(0))

    parts = []
    for num, den in symbols:
        en, rn = split_at([Fraction(x) for x in num], place, ops)
        ed, rd = split_at([Fraction(x) for x in den], place, ops)
        parts.append((en - ed, ev(rn) / ev(rd)))
    return _combine(parts, lambda a, b: a * b, lambda a: 1 / a, lambda a, k: a ** k, Fraction(-1))


def milnor_residue_fp(symbols, p, place_poly):
    """Same over F_p(t) at a monic irreducible place of degree 1 or 2.

    Residue-field elements are returned as tuples (c0, c1) meaning c0 + c1 x
    modulo place_poly (or plain ints in degree 1)."""
    inv = lambda a: pow(a, p - 2, p)
    ops = (inv, lambda a, b: a * b % p, lambda a, b: (a - b) % p, 0)
    deg = len(place_poly) - 1

    def reduce(poly):
        _, r = _pdivmod([c % p for c in poly], place_poly, *ops)
        r = r + [0] * (deg - len(r))
        return tuple(r) if deg > 1 else r[0]

    def kmul(a, b):
        if deg == 1:
            return a * b % p
        # (a0 + a1 x)(b0 + b1 x) with x^2 = -c1 x - c0
        c0, c1 = place_poly[0], place_poly[1]
        s0 = a[0] * b[0]
        s1 = a[0] * b[1] + a[1] * b[0]
        s2 = a[1] * b[1]
        return ((s0 - s2 * c0) % p, (s1 - s2 * c1) % p)

    one = 1 if deg == 1 else (1, 0)

    def kpow(a, k):
        if k < 0:
            a, k = kinv(a), -k
        out = one
        for _ in range(k):
            out = kmul(out, a)
        return out

    def kinv(a):
        q = p ** deg
        return kpow(a, q - 2) if a != one else one

    parts = []
    for num, den in symbols:
        en, rn = split_at([c % p for c in num], list(place_poly), ops)
        ed, rd = split_at([c % p for c in den], list(place_poly), ops)
        parts.append((en - ed, kmul(reduce(rn), kinv(reduce(rd)))))
    minus = p - 1 if deg == 1 else (p - 1, 0)
    return _combine(parts, kmul, kinv, kpow, minus)


def _combine(parts, mul, inv, power, minus):
    if len(parts) == 1:
        return parts[0][0]
    (a, u), (b, w) = parts
    out = mul(power(w, a), power(inv(u), b))
    if (a * b) % 2:
        out = mul(out, minus)
    return out


# ---------------------------------------------------------------------------
# integer chain complexes
# ---------------------------------------------------------------------------

def smith_diagonal(matrix):
    """Invariant factors of a small integer matrix by gcd of k x k minors."""
    from math import gcd
    rows, cols = len(matrix), len(matrix[0]) if matrix else 0

    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))

    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = gcd(g, det([[matrix[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out
