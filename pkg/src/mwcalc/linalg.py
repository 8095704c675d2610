"""Small exact linear algebra over Q (lists of Fraction rows)."""
from __future__ import annotations

from fractions import Fraction


def matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a, ncols=None):
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(ncols)]
            for i in range(len(a))]


def matvec(a, v):
    return [sum((a[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(a))]


def det(a):
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [row[:] for row in a]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return d


def rref(a):
    """Reduced row echelon form and pivot columns."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(vectors):
    """Rank of a list of vectors."""
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def solve_columns(cols, v):
    """Coefficients x with sum x_i cols[i] = v, or None if v is not in the span.
    The columns must be linearly independent."""
    n = len(v)
    if not cols:
        return [] if all(x == 0 for x in v) else None
    aug = [[cols[j][i] for j in range(len(cols))] + [v[i]] for i in range(n)]
    m, pivots = rref(aug)
    k = len(cols)
    if k in pivots:
        return None
    x = [Fraction(0)] * k
    for row, c in zip(m, pivots):
        x[c] = row[k]
    return x


def inverse(a):
    n = len(a)
    aug = [a[i][:] + identity(n)[i] for i in range(n)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m[:n]]


def nullspace(a, ncols):
    """Basis of {x : a x = 0}."""
    if not a:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(m, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def random_invertible(n, rng, bound=3):
    while True:
        m = [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)]
        if det(m) != 0:
            return m


def solve_any(a, b, ncols):
    """Some x with a x = b, or None."""
    if not a:
        return [Fraction(0)] * ncols
    aug = [row[:] + [bi] for row, bi in zip(a, b)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(m, pivots):
        x[c] = row[ncols]
    return x
