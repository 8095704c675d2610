"""Smith normal form over Z and homology of finitely presented complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotAComplex


def _copy(a):
    return [list(map(int, row)) for row in a]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a, nrows=None, ncols=None):
    """Return (D, U, V) with U*A*V = D diagonal, U and V unimodular and
    d_1 | d_2 | ... on the diagonal (all nonnegative)."""
    m = len(a) if nrows is None else nrows
    n = (len(a[0]) if a else 0) if ncols is None else ncols
    D = _copy(a) if a else [[0] * n for _ in range(m)]
    U = _eye(m)
    V = _eye(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        if k:
            D[dst] = [x + k * y for x, y in zip(D[dst], D[src])]
            U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        if k:
            for row in D:
                row[dst] += k * row[src]
            for row in V:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if D[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move the smallest entry of row/col t into the pivot
            best = (t, t)
            for i in range(t, m):
                if D[i][t] and abs(D[i][t]) < abs(D[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if D[t][j] and abs(D[t][j]) < abs(D[best[0]][best[1]]):
                    best = (t, j)
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def invariant_factors(a, nrows=None, ncols=None):
    """Nonzero diagonal entries of the Smith form."""
    D, _, _ = smith_normal_form(a, nrows, ncols)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def _matmul(a, b, inner):
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def integer_kernel(a, ncols):
    """Z-basis (list of column vectors) of {x in Z^ncols : a x = 0}."""
    if not a:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    D, _, V = smith_normal_form(a, len(a), ncols)
    r = sum(1 for i in range(min(len(a), ncols)) if D[i][i])
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def _solve_rational(cols, v):
    """Coordinates of v in the (independent) columns, as Fractions."""
    from .linalg import solve_columns

    x = solve_columns([[Fraction(c) for c in col] for col in cols], [Fraction(c) for c in v])
    if x is None:
        raise ValueError("vector not in the span")
    return x


@dataclass(frozen=True)
class AbelianGroup:
    """Z^r (+) Z/d_1 (+) ... with d_i > 1 and d_1 | d_2 | ...; ``free`` is r."""
    free: int
    torsion: tuple = ()

    def factors(self):
        """Invariant factors listed as in ``Z+Z/2``: torsion first, then 0 per Z."""
        return list(self.torsion) + [0] * self.free

    def __str__(self):
        parts = ["Z"] * self.free + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def is_zero(self):
        return self.free == 0 and not self.torsion


def quotient_group(gens, relations, n):
    """Group generated by the lattice spanned by ``gens`` (vectors in Z^n)
    modulo the sublattice spanned by ``relations`` (which must lie inside)."""
    if not gens:
        return AbelianGroup(0)
    # basis of the lattice spanned by gens: nonzero rows of the Hermite-like
    # reduction via SNF on the matrix whose columns are the generators
    mat = [[g[i] for g in gens] for i in range(n)]
    D, U, V = smith_normal_form(mat, n, len(gens))
    r = sum(1 for i in range(min(n, len(gens))) if D[i][i])
    # columns of mat*V, first r of them, form a Z-basis of the span
    MV = _matmul(mat, V, len(gens))
    basis = [[MV[i][j] for i in range(n)] for j in range(r)]
    coords = []
    for rel in relations:
        x = _solve_rational(basis, rel)
        if any(c.denominator != 1 for c in x):
            raise NotAComplex("relation not contained in the generated lattice")
        coords.append([int(c) for c in x])
    if not coords:
        return AbelianGroup(r)
    rel_mat = [[c[i] for c in coords] for i in range(r)]
    inv = invariant_factors(rel_mat, r, len(coords))
    free = r - len(inv)
    return AbelianGroup(free, tuple(d for d in inv if d != 1))


@dataclass
class ChainGroup:
    """Z^n modulo the subgroup generated by ``relations`` (vectors)."""
    n: int
    relations: list = field(default_factory=list)
    names: list = None

    @classmethod
    def cyclic_orders(cls, orders, names=None):
        """Direct sum of Z/o_i (o_i = 0 meaning Z)."""
        rels = []
        for i, o in enumerate(orders):
            if o:
                v = [0] * len(orders)
                v[i] = o
                rels.append(v)
        return cls(len(orders), rels, names)


@dataclass
class FPComplex:
    """Cochain complex C^0 -> C^1 -> ... of finitely presented groups;
    ``diffs[i]`` is the integer matrix of d^i : Z^{n_i} -> Z^{n_{i+1}}
    (rows indexed by the target)."""
    groups: list
    diffs: list

    def check(self):
        for i, d in enumerate(self.diffs):
            src, dst = self.groups[i], self.groups[i + 1]
            if len(d) != dst.n or any(len(row) != src.n for row in d):
                raise NotAComplex(f"d^{i} has the wrong shape")
            # d maps relations into relations
            for rel in src.relations:
                img = [sum(row[k] * rel[k] for k in range(src.n)) for row in d]
                if not _in_lattice(img, dst.relations, dst.n):
                    raise NotAComplex(f"d^{i} does not respect the relations of C^{i}")
        for i in range(len(self.diffs) - 1):
            a, b = self.diffs[i], self.diffs[i + 1]
            comp = _matmul(b, a, self.groups[i + 1].n)
            for j in range(self.groups[i].n):
                col = [row[j] for row in comp]
                if not _in_lattice(col, self.groups[i + 2].relations, self.groups[i + 2].n):
                    raise NotAComplex(f"d^{i + 1} o d^{i} is not zero")
        return True

    def cohomology(self):
        self.check()
        out = []
        for i, C in enumerate(self.groups):
            n = C.n
            # kernel of d^i modulo the relations of C^{i+1}
            if i < len(self.diffs):
                d = self.diffs[i]
                nxt = self.groups[i + 1]
                rels = nxt.relations
                aug = [list(d[r]) + [-rel[r] for rel in rels] for r in range(nxt.n)]
                kern = integer_kernel(aug, n + len(rels)) if nxt.n else \
                    [[int(a == b) for a in range(n)] for b in range(n)]
                cycles = [v[:n] for v in kern]
            else:
                cycles = [[int(a == b) for a in range(n)] for b in range(n)]
            bounds = [list(r) for r in C.relations]
            if i > 0:
                d = self.diffs[i - 1]
                prev = self.groups[i - 1].n
                bounds += [[d[r][j] for r in range(n)] for j in range(prev)]
            bounds = [b for b in bounds if any(b)]
            cycles = [c for c in cycles if any(c)]
            out.append(quotient_group(cycles, bounds, n))
        return out


def _in_lattice(v, gens, n):
    if not any(v):
        return True
    if not gens:
        return False
    mat = [[g[i] for g in gens] + [v[i]] for i in range(n)]
    a = invariant_factors([row[:-1] for row in mat], n, len(gens))
    b = invariant_factors(mat, n, len(gens) + 1)
    return a == b
