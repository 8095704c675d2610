"""Sign-tracked calculus of virtual vector bundles.

Objects are signed lists of bundle symbols (``TwistExpr``); a morphism is a
word in the generators Sigma (from a declared short exact sequence), c
(block swap), a (reassociation), z (unit), cancellation and declared
isomorphisms.  Evaluating a word yields a normal form: the target list,
the provenance of every target entry, and a scalar.

The scalar is the action on determinant lines.  When bundles carry a
concrete realization (a subquotient of Q^n with a chosen basis) every
generator acts by an exact rational number; otherwise Sigma and declared
isomorphisms contribute opaque tokens, and only the signs coming from c
and cancellations are numeric.  Conventions:

* c(x, y) acts by (-1)^(rk x * rk y);
* Sigma: det E2 -> det E1 (x) det E3 sends i(e) ^ s(f) to e (x) f;
* on a negative entry, Sigma sends -E2 to -E3 + -E1 by the inverse scalar;
* E + (-E) -> 0 acts by 1, (-E) + E -> 0 by (-1)^rk E.
"""
from __future__ import annotations

import itertools
import random as _random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg as LA
from .errors import IllTypedWord, SourceTargetMismatch

# ---------------------------------------------------------------------------
# Concrete realizations
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Space:
    """The subquotient S/T of Q^n with a chosen basis of S/T."""
    dim: int
    sub: list  # basis of S (contains T)
    quot: list  # basis of T
    basis: list  # vectors of S, a basis modulo T

    @property
    def rank(self):
        return len(self.basis)

    def coords(self, v):
        x = LA.solve_columns(self.basis + self.quot, v)
        if x is None:
            raise IllTypedWord("vector does not lie in the subquotient")
        return x[: self.rank]

    def contains_zero_class(self, v):
        return LA.solve_columns(self.quot, v) is not None if self.quot else all(c == 0 for c in v)


def subquotient(dim, sub, quot, rng: Optional[_random.Random] = None) -> Space:
    """Realize span(sub)/span(quot) (quot inside sub) with a random basis."""
    sub = [list(map(Fraction, v)) for v in sub]
    quot = [list(map(Fraction, v)) for v in quot]
    q_rank = LA.rank(quot)
    r = LA.rank(sub) - q_rank
    if rng is None:
        # the sub vectors independent of quot, in order
        basis, acc = [], list(quot)
        for v in sub:
            if LA.rank(acc + [v]) > len(acc):
                acc.append(v)
                basis.append(v)
        return Space(dim, sub, quot, basis)
    while True:
        basis = []
        for _ in range(r):
            coeffs = [rng.randint(-2, 2) for _ in sub]
            basis.append([sum((k * v[i] for k, v in zip(coeffs, sub)), Fraction(0)) for i in range(dim)])
        if LA.rank(quot + basis) == q_rank + r:
            quot_basis = _independent(quot)
            return Space(dim, sub, quot_basis, basis)


def _independent(vectors):
    out = []
    for v in vectors:
        if LA.rank(out + [v]) > len(out):
            out.append(v)
    return out


def linear_map(X: Space, Y: Space, ambient=None):
    """Matrix (rank Y x rank X) of the map induced by an ambient linear map."""
    cols = []
    for b in X.basis:
        v = b if ambient is None else LA.matvec(ambient, b)
        cols.append(Y.coords(v))
    for t in X.quot:
        v = t if ambient is None else LA.matvec(ambient, t)
        if any(Y.coords(v)):
            raise IllTypedWord("ambient map is not well defined on the quotient")
    return [[cols[j][i] for j in range(len(cols))] for i in range(Y.rank)]


# ---------------------------------------------------------------------------
# Symbols and expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BundleSym:
    name: str
    rank: int
    det: str = ""
    space: Optional[Space] = field(default=None, compare=False, hash=False, repr=False)

    @property
    def det_token(self):
        return self.det or f"det {self.name}"

    def __str__(self):
        return self.name


ZERO = BundleSym("0", 0)


@dataclass(frozen=True)
class Entry:
    sign: int
    bundle: BundleSym
    origin: frozenset = frozenset()

    def key(self):
        return (self.sign, self.bundle)

    def __str__(self):
        return ("-" if self.sign < 0 else "") + str(self.bundle)


def expr(*items):
    """Build a source list: items are bundles or (sign, bundle) pairs."""
    out = []
    for i, it in enumerate(items):
        sign, b = (1, it) if isinstance(it, BundleSym) else it
        out.append(Entry(sign, b, frozenset([i])))
    return tuple(out)


def rank_parity(entries):
    return sum(e.bundle.rank for e in entries) % 2


def expr_str(entries):
    return " + ".join(str(e) for e in entries) if entries else "0"


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scalar:
    value: Fraction = Fraction(1)
    tokens: tuple = ()  # sorted (token, exponent)

    @staticmethod
    def of(value=1, tokens=None):
        toks = tuple(sorted((k, v) for k, v in (tokens or {}).items() if v))
        return Scalar(Fraction(value), toks)

    def __mul__(self, other):
        c = Counter(dict(self.tokens))
        c.update(dict(other.tokens))
        return Scalar.of(self.value * other.value, c)

    def inverse(self):
        return Scalar.of(1 / self.value, {k: -v for k, v in self.tokens})

    def __truediv__(self, other):
        return self * other.inverse()

    @property
    def is_sign(self):
        return not self.tokens and self.value in (1, -1)

    def __str__(self):
        s = str(self.value)
        for k, v in self.tokens:
            s += f" [{k}]^{v}"
        return s


def _sign(n):
    return Scalar.of(-1 if n % 2 else 1)


# ---------------------------------------------------------------------------
# Exact sequences and generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactSeq:
    """0 -> sub -> total -> quot -> 0, optionally with ambient maps."""
    sub: BundleSym
    total: BundleSym
    quot: BundleSym
    name: str = ""
    i_map: Optional[tuple] = field(default=None, compare=False, hash=False)
    p_map: Optional[tuple] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if self.sub.rank + self.quot.rank != self.total.rank:
            raise IllTypedWord(f"ranks do not add up in {self.label}")

    @property
    def label(self):
        return self.name or f"{self.sub}>{self.total}>>{self.quot}"

    @property
    def concrete(self):
        return all(b.space is not None for b in (self.sub, self.total, self.quot))

    def scalar(self) -> Scalar:
        if not self.concrete:
            return Scalar.of(1, {f"Sigma {self.label}": 1})
        E1, E2, E3 = self.sub.space, self.total.space, self.quot.space
        i = linear_map(E1, E2, _m(self.i_map))
        p = linear_map(E2, E3, _m(self.p_map))
        if E1.rank and E3.rank and any(any(x) for x in LA.matmul(p, i)):
            raise IllTypedWord(f"{self.label} is not a complex")
        lifts = []
        for j in range(E3.rank):
            e = [Fraction(int(k == j)) for k in range(E3.rank)]
            x = LA.solve_any(p, e, E2.rank)
            if x is None:
                raise IllTypedWord(f"{self.label}: quotient map is not onto")
            lifts.append(x)
        cols = [[row[j] for row in i] for j in range(E1.rank)] + lifts
        square = [[c[r] for c in cols] for r in range(E2.rank)]
        d = LA.det(square)
        if d == 0:
            raise IllTypedWord(f"{self.label} is not exact")
        return Scalar.of(1 / d)


def _m(t):
    return None if t is None else [list(map(Fraction, r)) for r in t]


@dataclass(frozen=True)
class DeclaredIso:
    """An isomorphism source -> target between bundles of equal rank."""
    source: BundleSym
    target: BundleSym
    name: str = ""
    ambient: Optional[tuple] = field(default=None, compare=False, hash=False)
    invert: bool = False  # use the inverse of the ambient-induced map target -> source

    def scalar(self) -> Scalar:
        if self.source.space is None or self.target.space is None:
            return Scalar.of(1, {f"iso {self.name or self.source.name + '>' + self.target.name}": 1})
        if self.invert:
            m = linear_map(self.target.space, self.source.space, _m(self.ambient))
            return Scalar.of(1 / LA.det(m))
        m = linear_map(self.source.space, self.target.space, _m(self.ambient))
        return Scalar.of(LA.det(m))


class Generator:
    def apply(self, entries):
        raise NotImplementedError

    def is_swap(self):
        return False


def _expect(entries, pos, sign, bundle, what):
    if pos >= len(entries) or entries[pos].sign != sign or entries[pos].bundle != bundle:
        got = str(entries[pos]) if pos < len(entries) else "end"
        want = ("-" if sign < 0 else "") + str(bundle)
        raise IllTypedWord(f"{what}: expected {want} at position {pos}, found {got}")


@dataclass(frozen=True)
class Sigma(Generator):
    seq: ExactSeq
    pos: int
    negative: bool = False
    inverse: bool = False

    def apply(self, entries):
        s = self.seq
        k = self.pos
        sc = s.scalar()
        if self.negative:
            sc = sc.inverse()
        if not self.inverse:
            if not self.negative:
                _expect(entries, k, 1, s.total, "Sigma")
                o = entries[k].origin
                new = (Entry(1, s.sub, o), Entry(1, s.quot, o))
            else:
                _expect(entries, k, -1, s.total, "Sigma")
                o = entries[k].origin
                new = (Entry(-1, s.quot, o), Entry(-1, s.sub, o))
            return entries[:k] + new + entries[k + 1:], sc
        if not self.negative:
            _expect(entries, k, 1, s.sub, "Sigma^-1")
            _expect(entries, k + 1, 1, s.quot, "Sigma^-1")
            new = (Entry(1, s.total, entries[k].origin | entries[k + 1].origin),)
        else:
            _expect(entries, k, -1, s.quot, "Sigma^-1")
            _expect(entries, k + 1, -1, s.sub, "Sigma^-1")
            new = (Entry(-1, s.total, entries[k].origin | entries[k + 1].origin),)
        return entries[:k] + new + entries[k + 2:], sc.inverse()

    def __str__(self):
        return f"{'Sigma^-1' if self.inverse else 'Sigma'}({self.seq.label}{', neg' if self.negative else ''})@{self.pos}"


@dataclass(frozen=True)
class Swap(Generator):
    """c(x, y) on the blocks entries[pos:pos+n1], entries[pos+n1:pos+n1+n2]."""
    pos: int
    n1: int = 1
    n2: int = 1

    def apply(self, entries):
        k, a, b = self.pos, self.n1, self.n2
        if k + a + b > len(entries):
            raise IllTypedWord("swap runs past the end of the expression")
        x, y = entries[k:k + a], entries[k + a:k + a + b]
        sign = _sign(sum(e.bundle.rank for e in x) * sum(e.bundle.rank for e in y))
        return entries[:k] + y + x + entries[k + a + b:], sign

    def is_swap(self):
        return True

    def __str__(self):
        return f"c({self.n1},{self.n2})@{self.pos}"


@dataclass(frozen=True)
class Assoc(Generator):
    """a(x, y, z): with flat lists this is an identity, kept for bookkeeping."""
    pos: int
    n1: int = 1
    n2: int = 1
    n3: int = 1

    def apply(self, entries):
        if self.pos + self.n1 + self.n2 + self.n3 > len(entries):
            raise IllTypedWord("associator runs past the end of the expression")
        return entries, Scalar.of(1)

    def __str__(self):
        return f"a@{self.pos}"


@dataclass(frozen=True)
class Unit(Generator):
    """z: insert (or remove) the zero object at pos."""
    pos: int
    remove: bool = False

    def apply(self, entries):
        k = self.pos
        if self.remove:
            _expect(entries, k, 1, ZERO, "unit")
            return entries[:k] + entries[k + 1:], Scalar.of(1)
        return entries[:k] + (Entry(1, ZERO, frozenset()),) + entries[k:], Scalar.of(1)

    def __str__(self):
        return f"z{'^-1' if self.remove else ''}@{self.pos}"


@dataclass(frozen=True)
class Cancel(Generator):
    """E + (-E) -> 0 (scalar 1) or (-E) + E -> 0 (scalar (-1)^rk E)."""
    pos: int

    def apply(self, entries):
        k = self.pos
        if k + 1 >= len(entries):
            raise IllTypedWord("cancellation needs two entries")
        a, b = entries[k], entries[k + 1]
        if a.bundle != b.bundle or a.sign != -b.sign:
            raise IllTypedWord(f"cannot cancel {a} against {b}")
        sc = Scalar.of(1) if a.sign > 0 else _sign(a.bundle.rank)
        return entries[:k] + entries[k + 2:], sc

    def __str__(self):
        return f"cancel@{self.pos}"


@dataclass(frozen=True)
class Insert(Generator):
    """0 -> E + (-E) (or (-E) + E when negative_first), inverse of Cancel."""
    pos: int
    bundle: BundleSym
    negative_first: bool = False
    tag: str = ""

    def apply(self, entries):
        k = self.pos
        o = frozenset([f"new:{self.tag or self.bundle.name}"])
        if self.negative_first:
            new = (Entry(-1, self.bundle, o), Entry(1, self.bundle, o))
            sc = _sign(self.bundle.rank)
        else:
            new = (Entry(1, self.bundle, o), Entry(-1, self.bundle, o))
            sc = Scalar.of(1)
        return entries[:k] + new + entries[k:], sc

    def __str__(self):
        return f"insert({self.bundle})@{self.pos}"


@dataclass(frozen=True)
class Iso(Generator):
    """Apply a declared isomorphism to one entry (its inverse-dual on a negative entry)."""
    iso: DeclaredIso
    pos: int
    inverse: bool = False

    def apply(self, entries):
        k = self.pos
        src, dst = (self.iso.target, self.iso.source) if self.inverse else (self.iso.source, self.iso.target)
        if k >= len(entries) or entries[k].bundle != src:
            raise IllTypedWord(f"iso: expected {src} at position {k}")
        e = entries[k]
        sc = self.iso.scalar()
        if self.inverse:
            sc = sc.inverse()
        if e.sign < 0:
            sc = sc.inverse()
        return entries[:k] + (Entry(e.sign, dst, e.origin),) + entries[k + 1:], sc

    def __str__(self):
        return f"{'iso^-1' if self.inverse else 'iso'}({self.iso.source}>{self.iso.target})@{self.pos}"


# ---------------------------------------------------------------------------
# Morphisms, normal forms and diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistMor:
    source: tuple
    word: tuple

    def then(self, *gens):
        return TwistMor(self.source, self.word + tuple(gens))


@dataclass(frozen=True)
class NormalForm:
    target: tuple
    scalar: Scalar

    @property
    def sign(self):
        return int(self.scalar.value) if self.scalar.is_sign else None

    def bijection(self):
        return tuple((str(e), tuple(sorted(map(str, e.origin)))) for e in self.target)


def normalize(m: TwistMor) -> NormalForm:
    entries = tuple(m.source)
    acc = Scalar.of(1)
    for g in m.word:
        entries, sc = g.apply(entries)
        acc = acc * sc
    return NormalForm(entries, acc)


@dataclass(frozen=True)
class Diagram:
    source: tuple
    path1: tuple
    path2: tuple
    name: str = ""


@dataclass(frozen=True)
class CommuteReport:
    commutes: bool
    sign: object  # +-1, or the scalar discrepancy when it is not a sign
    detail: str = ""

    def __str__(self):
        return f"commutes = {str(self.commutes).lower()}, sign = {self.sign:+d}" if isinstance(
            self.sign, int) else f"commutes = {str(self.commutes).lower()}, sign = {self.sign}"


def _match_order(t1, t2):
    """Permutation p with t2[p[i]] matching t1[i] (plain, unsigned reorder)."""
    used = set()
    perm = []
    for e in t1:
        j = next((j for j, f in enumerate(t2) if j not in used and f.key() == e.key() and f.origin == e.origin), None)
        if j is None:
            j = next((j for j, f in enumerate(t2) if j not in used and f.key() == e.key()), None)
        if j is None:
            return None
        used.add(j)
        perm.append(j)
    return perm if len(used) == len(t2) else None


def check_commutes(d: Diagram) -> CommuteReport:
    n1 = normalize(TwistMor(d.source, d.path1))
    n2 = normalize(TwistMor(d.source, d.path2))
    perm = _match_order(n1.target, n2.target)
    if perm is None:
        raise SourceTargetMismatch(
            f"targets differ: {expr_str(n1.target)} vs {expr_str(n2.target)}")
    ratio = n1.scalar / n2.scalar
    ok = ratio.value == 1 and not ratio.tokens
    sign = int(ratio.value) if ratio.is_sign else ratio
    detail = "" if ok else f"discrepancy {ratio}"
    return CommuteReport(ok, sign, detail)


def delete_generator(path, index):
    return path[:index] + path[index + 1:]


def mutation_results(d: Diagram):
    """For each swap generator in either path, the verdict after deleting it."""
    out = []
    for which, path in ((1, d.path1), (2, d.path2)):
        for i, g in enumerate(path):
            if g.is_swap():
                p = delete_generator(path, i)
                mutated = Diagram(d.source, p, d.path2) if which == 1 else Diagram(d.source, d.path1, p)
                out.append((which, i, g, check_commutes(mutated)))
    return out


def contains_switch(m: TwistMor, split_source: int, split_target: int) -> bool:
    """Whether a morphism A + B -> C + D (blocks split at the given indices)
    sends A into D and B into C."""
    nf = normalize(m)
    a_idx = set(range(split_source))
    b_idx = set(range(split_source, len(m.source)))
    c, dd = nf.target[:split_target], nf.target[split_target:]

    def within(entries, allowed):
        return all(o in allowed for e in entries for o in e.origin if isinstance(o, int))

    return within(dd, a_idx) and within(c, b_idx) and not (within(c, a_idx) and within(dd, b_idx))


def swap_sign(r1: int, r2: int) -> int:
    """(-1)^(r1*r2): the action of c on determinant lines."""
    return -1 if (r1 * r2) % 2 else 1


# ---------------------------------------------------------------------------
# Concrete diagram families
# ---------------------------------------------------------------------------


def _span_cols(g, cols):
    return [[g[r][c] for r in range(len(g))] for c in cols]


def _bundle(name, space):
    return BundleSym(name, space.rank, space=space)


def four_diagram(case: int, ranks, rng: _random.Random) -> Diagram:
    """A random concrete instance of the grid with exact rows and columns of
    the given case (1-4); ranks are the three free dimensions."""
    r1, r2, r3 = ranks
    n = r1 + r2 + r3
    g = LA.random_invertible(n, rng) if n else []
    cols = lambda a, b: _span_cols(g, range(a, b))
    sq = lambda name, sub, quot: _bundle(name, subquotient(n, sub, quot, rng))
    if case == 1:
        # K = r1, W1 = r2, C = r3;  K < V1 < V2
        k, w1 = r1, r2
        K, V1, V2 = cols(0, k), cols(0, k + w1), cols(0, n)
        bK, bV1, bV2 = sq("K", K, []), sq("V1", V1, []), sq("V2", V2, [])
        bW1, bW2, bC = sq("W1", V1, K), sq("W2", V2, K), sq("C", V2, V1)
        sV, sK1 = ExactSeq(bV1, bV2, bC), ExactSeq(bK, bV1, bW1)
        sK2, sW = ExactSeq(bK, bV2, bW2), ExactSeq(bW1, bW2, bC)
        src = expr(bV2)
        p1 = (Sigma(sV, 0), Sigma(sK1, 0))
        p2 = (Sigma(sK2, 0), Sigma(sW, 1))
        return Diagram(src, p1, p2, "four-diagrams (1)")
    if case == 2:
        # V1 = r1, C = r2, D = r3;  V1 < V2 < W2 and V1 < W1 < W2
        v1, c = r1, r2
        V1, V2 = cols(0, v1), cols(0, v1 + c)
        W1 = cols(0, v1) + cols(v1 + c, n)
        W2 = cols(0, n)
        bV1, bV2, bW1, bW2 = sq("V1", V1, []), sq("V2", V2, []), sq("W1", W1, []), sq("W2", W2, [])
        sC = subquotient(n, V2, V1, rng)  # C = V2/V1, also W2/W1
        sD = subquotient(n, W1, V1, rng)  # D = W1/V1, also W2/V2
        bC, bD = _bundle("C", sC), _bundle("D", sD)
        # W2 -> C factors through W2/W1 = V2/V1: project along W1.
        projC = _projection(g, n, keep=range(v1, v1 + c), kill=list(range(0, v1)) + list(range(v1 + c, n)))
        projD = _projection(g, n, keep=range(v1 + c, n), kill=range(0, v1 + c))
        s1 = ExactSeq(bV2, bW2, bD, p_map=_t(projD))
        s2 = ExactSeq(bV1, bV2, bC)
        s3 = ExactSeq(bW1, bW2, bC, p_map=_t(projC))
        s4 = ExactSeq(bV1, bW1, bD)
        src = expr(bW2)
        p1 = (Sigma(s1, 0), Sigma(s2, 0), Swap(1, 1, 1))
        p2 = (Sigma(s3, 0), Sigma(s4, 0))
        return Diagram(src, p1, p2, "four-diagrams (2)")
    if case == 3:
        # T = r1, K = r2, W2 = r3;  T, K independent in V1
        t, k = r1, r2
        T, K, V1 = cols(0, t), cols(t, t + k), cols(0, n)
        bT, bK, bV1 = sq("T", T, []), sq("K", K, []), sq("V1", V1, [])
        bV2, bW1, bW2 = sq("V2", V1, T), sq("W1", V1, K), sq("W2", V1, T + K)
        s1 = ExactSeq(bT, bV1, bV2)
        s2 = ExactSeq(bK, bV2, bW2)
        s3 = ExactSeq(bK, bV1, bW1)
        s4 = ExactSeq(bT, bW1, bW2)
        src = expr(bV1)
        p1 = (Sigma(s1, 0), Sigma(s2, 1), Swap(0, 1, 1))
        p2 = (Sigma(s3, 0), Sigma(s4, 1))
        return Diagram(src, p1, p2, "four-diagrams (3)")
    if case == 4:
        # K = r1, V2 = r2, C = r3;  K < V1 < W1
        k, v2 = r1, r2
        K, V1, W1 = cols(0, k), cols(0, k + v2), cols(0, n)
        bK, bV1, bW1 = sq("K", K, []), sq("V1", V1, []), sq("W1", W1, [])
        bV2, bW2, bC = sq("V2", V1, K), sq("W2", W1, K), sq("C", W1, V1)
        s1 = ExactSeq(bK, bW1, bW2)
        s2 = ExactSeq(bV2, bW2, bC)
        s3 = ExactSeq(bV1, bW1, bC)
        s4 = ExactSeq(bK, bV1, bV2)
        src = expr(bW1)
        p1 = (Sigma(s1, 0), Sigma(s2, 1))
        p2 = (Sigma(s3, 0), Sigma(s4, 0))
        return Diagram(src, p1, p2, "four-diagrams (4)")
    raise ValueError(f"unknown case {case}")


def _projection(g, n, keep, kill):
    """Ambient map that is the identity on the columns `keep` of g and zero on `kill`."""
    keep, kill = list(keep), list(kill)
    ginv = LA.inverse(g) if n else []
    diag = [[Fraction(int(i == j and i in keep)) for j in range(n)] for i in range(n)]
    return LA.matmul(LA.matmul(g, diag), ginv) if n else []


def _t(m):
    return tuple(tuple(r) for r in m)


def exact_square(ranks, rng: _random.Random, with_switch=True) -> Diagram:
    """B with complementary subbundles A and D: the row Sigma followed by
    u + v^-1 and c(E, D) equals the column Sigma."""
    a, d = ranks
    n = a + d
    g = LA.random_invertible(n, rng) if n else []
    A, D, B = _span_cols(g, range(a)), _span_cols(g, range(a, n)), _span_cols(g, range(n))
    sq = lambda name, sub, quot: _bundle(name, subquotient(n, sub, quot, rng))
    bA, bD, bB = sq("A", A, []), sq("D", D, []), sq("B", B, [])
    bC, bE = sq("C", B, A), sq("E", B, D)
    row = ExactSeq(bA, bB, bC, "row")
    col = ExactSeq(bD, bB, bE, "column")
    u = DeclaredIso(bA, bE, "u")
    v = DeclaredIso(bD, bC, "v")
    p1 = [Sigma(row, 0), Iso(u, 0), Iso(v, 1, inverse=True)]
    if with_switch:
        p1.append(Swap(0, 1, 1))
    return Diagram(expr(bB), tuple(p1), (Sigma(col, 0),), "exact_square")


def bracket_split(ranks, rng: _random.Random) -> Diagram:
    """[E1 + E2] -> [E1] + [E2] -> (c) [E2] + [E1] equals the flipped splitting."""
    r1, r2 = ranks
    n = r1 + r2
    g = LA.random_invertible(n, rng) if n else []
    sq = lambda name, sub: _bundle(name, subquotient(n, sub, [], rng))
    b1, b2, bs = sq("E1", _span_cols(g, range(r1))), sq("E2", _span_cols(g, range(r1, n))), sq("E1+E2", _span_cols(g, range(n)))
    p1m = _t(_projection(g, n, range(r1), range(r1, n)))
    p2m = _t(_projection(g, n, range(r1, n), range(r1)))
    s12 = ExactSeq(b1, bs, b2, "split", p_map=p2m)
    s21 = ExactSeq(b2, bs, b1, "flipped split", p_map=p1m)
    return Diagram(expr(bs), (Sigma(s12, 0), Swap(0, 1, 1)), (Sigma(s21, 0),), "bracket (4)")


def hexagon(ranks) -> Diagram:
    x, y, z = (BundleSym(n, r) for n, r in zip("xyz", ranks))
    return Diagram(expr(x, y, z), (Swap(0, 1, 2),), (Swap(0, 1, 1), Swap(1, 1, 1)), "hexagon")


def pentagon(ranks) -> Diagram:
    w, x, y, z = (BundleSym(n, r) for n, r in zip("wxyz", ranks))
    p1 = (Assoc(0, 2, 1, 1), Assoc(0, 1, 1, 2))
    p2 = (Assoc(0, 1, 1, 1), Assoc(0, 1, 2, 1), Assoc(1, 1, 1, 1))
    return Diagram(expr(w, x, y, z), p1, p2, "pentagon")


# ---------------------------------------------------------------------------
# The t and t' isomorphisms of composition with graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TIsoCheck:
    case: int
    report: CommuteReport
    long_path: tuple
    short_path: tuple


def _graph_config(b, c, rng, closed):
    """Tangent data at a point of XY inside XYZ (relative to X) for a map
    g: Y -> Z with differential dg (injective if closed, surjective if smooth).
    Ambient: Q^b (Y directions) + Q^c (Z directions)."""
    n = b + c
    while True:
        dg = [[Fraction(rng.randint(-2, 2)) for _ in range(b)] for _ in range(c)]
        r = LA.rank(dg) if dg and b else 0
        if (closed and r == b) or (not closed and r == c):
            break
    e = lambda i: [Fraction(int(j == i)) for j in range(n)]
    Ydir = [e(i) for i in range(b)]
    Zdir = [e(b + i) for i in range(c)]
    graph = [[Fraction(int(j == i)) for j in range(b)] + [dg[k][i] for k in range(c)] for i in range(b)]
    sq = lambda name, sub, quot: _bundle(name, subquotient(n, sub, quot, rng))
    A = sq("T(XY/X)", graph, [])
    TY = sq("T(XYZ/XZ)|XY", Ydir, [])
    TZ = sq("T(XYZ/XY)|XY", Zdir, [])
    N1 = sq("N(XY/XYZ)", Ydir + Zdir, graph)
    TXZ = sq("(id x g)*T(XZ/X)", Zdir, [])
    # ambient maps
    to_z = [[Fraction(int(i == j and i >= b)) for j in range(n)] for i in range(n)]  # (y, z) -> (0, z)
    y_to_graph = [[Fraction(int(i == j)) if i < b else Fraction(0) for j in range(n)] for i in range(b)] + \
                 [[dg[i][j] if j < b else Fraction(0) for j in range(n)] for i in range(c)]  # (y, z) -> (y, dg y)
    return dict(n=n, dg=dg, A=A, TY=TY, TZ=TZ, N1=N1, TXZ=TXZ, graph=graph, Ydir=Ydir, Zdir=Zdir,
                to_z=_t(to_z), y_to_graph=_t(y_to_graph), sq=sq)


def t_iso_check(case: int, dims, rng: _random.Random) -> TIsoCheck:
    """Case 1: g a closed immersion, the composite t' equals the short
    cancellation morphism.  Case 2: g smooth, the composite t equals the
    single merge morphism."""
    b, c = dims
    if case == 1:
        if b > c:
            b, c = c, b
        cfg = _graph_config(b, c, rng, closed=True)
        A, TY, TZ, N1, TXZ = cfg["A"], cfg["TY"], cfg["TZ"], cfg["N1"], cfg["TXZ"]
        dgQ = [[Fraction(0)] * b + [cfg["dg"][k][i] for k in range(c)] for i in range(b)]
        NXZ = cfg["sq"]("N(XY/XZ)", cfg["Zdir"], dgQ)
        s_normal = DeclaredIso(TZ, N1, "N(XY/XYZ) = T(XYZ/XY)|")
        seq_N = ExactSeq(TY, N1, NXZ, "T(XYZ/XZ)| > N(XY/XYZ) >> N(XY/XZ)", p_map=cfg["to_z"])
        ident_Y = DeclaredIso(TY, A, "T(XYZ/XZ)| = T(XY/X)", ambient=cfg["y_to_graph"])
        ident_Z = DeclaredIso(TZ, TXZ, "T(XYZ/XY)| = (id x g)*T(XZ/X)")
        seq_A = ExactSeq(A, TXZ, NXZ, "T(XY/X) > (id x g)*T(XZ/X) >> N(XY/XZ)", i_map=cfg["to_z"])
        src = expr((-1, A))
        long_path = (
            Insert(1, TZ),                     # -A + TZ - TZ
            Iso(s_normal, 1),                  # -A + N1 - TZ
            Sigma(seq_N, 1),                   # -A + TY + NXZ - TZ
            Iso(ident_Y, 1),                   # -A + A + NXZ - TZ
            Cancel(0),                         # NXZ - TZ
            Iso(ident_Z, 1),                   # NXZ - TXZ
        )
        short_path = (
            Insert(0, NXZ),                    # NXZ - NXZ - A
            Sigma(seq_A, 1, negative=True, inverse=True),  # NXZ - TXZ
        )
        return TIsoCheck(1, check_commutes(Diagram(src, long_path, short_path, "t' (closed)")), long_path, short_path)
    if case == 2:
        if b < c:
            b, c = c, b
        cfg = _graph_config(b, c, rng, closed=False)
        A, TY, TZ, N1, TXZ = cfg["A"], cfg["TY"], cfg["TZ"], cfg["N1"], cfg["TXZ"]
        ker = LA.nullspace(cfg["dg"], b) if c else [[Fraction(int(i == j)) for i in range(b)] for j in range(b)]
        TYZ = cfg["sq"]("T(XY/XZ)", [v + [Fraction(0)] * c for v in ker], [])
        s_normal = DeclaredIso(TZ, N1, "N(XY/XYZ) = T(XYZ/XY)|")
        ident_Y = DeclaredIso(TY, A, "T(XYZ/XZ)| = T(XY/X)", ambient=cfg["y_to_graph"])
        seq_N = ExactSeq(TYZ, TY, N1, "T(XY/XZ) > T(XYZ/XZ)| >> N(XY/XYZ)")
        ident_Z = DeclaredIso(TZ, TXZ, "T(XYZ/XY)| = (id x g)*T(XZ/X)")
        seq_A = ExactSeq(TYZ, A, TXZ, "T(XY/XZ) > T(XY/X) >> (id x g)*T(XZ/X)", p_map=cfg["to_z"])
        src = expr((-1, A))
        long_path = (
            Insert(0, TZ, negative_first=True),  # -TZ + TZ - A
            Iso(s_normal, 1),                    # -TZ + N1 - A
            Iso(ident_Y, 2, inverse=True),       # -TZ + N1 - TY
            Sigma(seq_N, 2, negative=True),      # -TZ + N1 - N1 - TYZ
            Cancel(1),                           # -TZ - TYZ
            Iso(ident_Z, 0),                     # -TXZ - TYZ
        )
        short_path = (Sigma(seq_A, 0, negative=True),)  # -TXZ - TYZ
        return TIsoCheck(2, check_commutes(Diagram(src, long_path, short_path, "t (smooth)")), long_path, short_path)
    raise ValueError(f"unknown case {case}")


def simplify_t_isos(rng: Optional[_random.Random] = None, dims=((1, 2), (2, 1))):
    """Verify both simplifications on random concrete tangent data."""
    rng = rng or _random.Random(0)
    return [t_iso_check(1, dims[0], rng), t_iso_check(2, dims[1], rng)]
