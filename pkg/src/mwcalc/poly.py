"""Dense univariate polynomial arithmetic over an arbitrary supported field.

Polynomials are tuples of raw field values in ascending degree with no
trailing zeros; the zero polynomial is ``()``.  Every function takes the
coefficient field first.
"""
from __future__ import annotations

from .errors import ZeroPolynomial


def trim(F, coeffs):
    coeffs = list(coeffs)
    zero = F.zero
    while coeffs and coeffs[-1] == zero:
        coeffs.pop()
    return tuple(coeffs)


def deg(f):
    return len(f) - 1


def lc(f):
    return f[-1]


def const(F, c):
    return () if c == F.zero else (c,)


def x_poly(F):
    return (F.zero, F.one)


def add(F, f, g):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = F.add(out[i], c)
    return trim(F, out)


def neg(F, f):
    return tuple(F.neg(c) for c in f)


def sub(F, f, g):
    return add(F, f, neg(F, g))


def scale(F, c, f):
    if c == F.zero:
        return ()
    return trim(F, (F.mul(c, a) for a in f))


def mul(F, f, g):
    if not f or not g:
        return ()
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == F.zero:
            continue
        for j, b in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return trim(F, out)


def shift(F, f, n):
    return (F.zero,) * n + f if f else ()


def divmod_(F, f, g):
    if not g:
        raise ZeroPolynomial("division by the zero polynomial")
    if len(f) < len(g):
        return (), f
    inv_lc = F.inv(g[-1])
    r = list(f)
    q = [F.zero] * (len(f) - len(g) + 1)
    dg = len(g) - 1
    for k in range(len(f) - len(g), -1, -1):
        c = F.mul(r[k + dg], inv_lc)
        q[k] = c
        if c != F.zero:
            for j, b in enumerate(g):
                r[k + j] = F.sub(r[k + j], F.mul(c, b))
    return trim(F, q), trim(F, r[:dg])


def mod(F, f, g):
    return divmod_(F, f, g)[1]


def monic(F, f):
    if not f:
        return f
    inv = F.inv(f[-1])
    return tuple(F.mul(inv, c) for c in f)


def gcd(F, f, g):
    while g:
        f, g = g, mod(F, f, g)
    return monic(F, f)


def xgcd(F, f, g):
    """Return (d, s, t) with s*f + t*g = d and d monic (or zero)."""
    r0, r1 = f, g
    s0, s1 = (F.one,), ()
    t0, t1 = (), (F.one,)
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), s0, t0
    inv = F.inv(r0[-1])
    return scale(F, inv, r0), scale(F, inv, s0), scale(F, inv, t0)


def deriv(F, f):
    return trim(F, (F.mul(F.from_int(i), f[i]) for i in range(1, len(f))))


def evaluate(F, f, x):
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def powmod(F, f, n, m):
    result = (F.one,)
    base = mod(F, f, m)
    while n > 0:
        if n & 1:
            result = mod(F, mul(F, result, base), m)
        n >>= 1
        if n:
            base = mod(F, mul(F, base, base), m)
    return result


def pow_(F, f, n):
    result = (F.one,)
    for _ in range(n):
        result = mul(F, result, f)
    return result


def compose(F, f, g):
    """f(g(x))."""
    acc = ()
    for c in reversed(f):
        acc = add(F, mul(F, acc, g), const(F, c))
    return acc


def map_coeffs(F_target, phi, f):
    return trim(F_target, (phi(c) for c in f))
