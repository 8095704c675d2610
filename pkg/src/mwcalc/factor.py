"""Polynomial factorization over finite fields and (partially) over Q.

Finite fields use square-free decomposition, distinct-degree splitting and
Cantor-Zassenhaus equal-degree splitting with a fixed-seed RNG, so results
are deterministic.  Over Q the factorization is delegated to sympy.
"""
from __future__ import annotations

import random
from fractions import Fraction

from . import poly as P
from .errors import UnsupportedField, ZeroPolynomial


def factor(F, f):
    """Return ``(lc, [(g, e), ...])`` with monic irreducible, pairwise
    distinct g, sorted by degree then coefficients."""
    f = P.trim(F, f)
    if not f:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    lead = f[-1]
    g = P.monic(F, f)
    if len(g) == 1:
        return lead, []
    if F.is_finite:
        pairs = _factor_finite(F, g)
    elif _is_rational(F):
        pairs = _factor_rational(F, g)
    else:
        raise UnsupportedField(f"factorization over {F} is not supported")
    merged = {}
    for h, e in pairs:
        merged[h] = merged.get(h, 0) + e
    key = lambda item: (len(item[0]), tuple(F.sort_key(c) for c in reversed(item[0])))
    return lead, sorted(merged.items(), key=key)


def _is_rational(F):
    from .fields import RationalField

    return isinstance(F, RationalField)


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------


def _factor_finite(F, f):
    out = []
    for g, e in _squarefree(F, f):
        for h, d in _distinct_degree(F, g):
            for k in _equal_degree(F, h, d):
                out.append((k, e))
    return out


def _pth_root(F, a):
    q = F.order
    return F.pow(a, q // F.characteristic)


def _squarefree(F, f):
    p = F.characteristic
    out = []
    c = P.gcd(F, f, P.deriv(F, f))
    w = P.divmod_(F, f, c)[0]
    i = 1
    while len(w) > 1:
        y = P.gcd(F, w, c)
        fac = P.divmod_(F, w, y)[0]
        if len(fac) > 1:
            out.append((fac, i))
        w = y
        c = P.divmod_(F, c, y)[0]
        i += 1
    if len(c) > 1:
        root = tuple(_pth_root(F, c[k]) for k in range(0, len(c), p))
        for g, e in _squarefree(F, root):
            out.append((g, e * p))
    return out


def _distinct_degree(F, f):
    q = F.order
    x = P.x_poly(F)
    out = []
    h = x
    i = 1
    rest = f
    while len(rest) - 1 >= 2 * i:
        h = P.powmod(F, h, q, rest)
        g = P.gcd(F, P.sub(F, h, x), rest)
        if len(g) > 1:
            out.append((g, i))
            rest = P.divmod_(F, rest, g)[0]
            h = P.mod(F, h, rest)
        i += 1
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(F, f, d):
    n = len(f) - 1
    if n == d:
        return [f]
    rng = random.Random(0x5EED ^ n ^ (d << 8))
    exponent = (F.order ** d - 1) // 2
    pending = [f]
    done = []
    while pending:
        u = pending.pop()
        if len(u) - 1 == d:
            done.append(u)
            continue
        while True:
            a = P.trim(F, [F.random_element(rng) for _ in range(len(u) - 1)])
            if len(a) < 2:
                continue
            b = P.sub(F, P.powmod(F, a, exponent, u), (F.one,))
            g = P.gcd(F, b, u)
            if 1 < len(g) < len(u):
                pending.append(g)
                pending.append(P.divmod_(F, u, g)[0])
                break
    return done


# ---------------------------------------------------------------------------
# Q
# ---------------------------------------------------------------------------


def _factor_rational(F, f):
    from sympy import Poly, QQ, symbols

    x = symbols("x")
    poly = Poly(list(reversed([Fraction(c) for c in f])), x, domain=QQ)
    out = []
    for g, e in poly.factor_list()[1]:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(g.monic().all_coeffs())]
        out.append((tuple(coeffs), e))
    return out
