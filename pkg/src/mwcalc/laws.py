"""Executable correspondence-theory laws.

Every case draws its data from a generator keyed by (suite, seed, case
index), so any failure replays exactly from the three numbers in the report.
"""
from __future__ import annotations

import hashlib
import random
import traceback
from dataclasses import dataclass, field

from . import corr as C
from . import places as PL
from .errors import UnknownSuite
from .etale import EtaleScheme, Twisted0, first_irreducible, random_atom_map, spec, spec_of_degrees
from .fields import finite_field, is_irreducible
from .gw import GWForm
from .rost_schmid import GENERIC, Scheme, affine_line, gm, proj_line


def case_rng(suite: str, seed: int, index: int) -> random.Random:
    digest = hashlib.sha256(f"{suite}/{seed}/{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass
class Fail:
    text: str


@dataclass
class Note:
    text: str


@dataclass
class LawReport:
    suite: str
    seed: int
    cases: int
    laws: list = field(default_factory=list)  # (law name, cases run, failures)
    failures: list = field(default_factory=list)  # (seed, law, case index, printout)
    notes: list = field(default_factory=list)  # (law, case index, text)

    @property
    def passed(self):
        return not self.failures

    def text(self, max_notes=5):
        lines = [f"suite = {self.suite}", f"seed = {self.seed}", f"cases = {self.cases}"]
        for name, n, bad in self.laws:
            lines.append(f"law {name}: {n} cases, {bad} failures")
        for seed, law, i, printout in self.failures:
            lines.append(f"failure: seed={seed} law={law} case={i} :: {printout}")
        by_law = {}
        for law, i, text in self.notes:
            by_law.setdefault(law, []).append((i, text))
        for law, items in by_law.items():
            lines.append(f"notes {law}: {len(items)}")
            for i, text in items[:max_notes]:
                lines.append(f"note: law={law} case={i} :: {text}")
        lines.append("status = " + ("pass" if self.passed else "fail"))
        return "\n".join(lines)


# ===========================================================================
# Random data
# ===========================================================================

PRIMES = (3, 5, 7)


def rand_prime(rng):
    return finite_field(rng.choice(PRIMES))


def rand_monic_irreducible(rng, F, d):
    while True:
        f = tuple(F.random_element(rng) for _ in range(d)) + (F.one,)
        if is_irreducible(F, f):
            return f


def rand_curve(rng, F, kinds=("affine-line", "gm", "proj-line")):
    return Scheme(rng.choice(kinds), F)


def rand_closed_point(rng, X: Scheme, max_degree=3):
    K = X.function_field
    while True:
        if X.kind == "proj-line" and rng.random() < 0.15:
            return PL.infinite_place(K)
        z = PL.Place(K, rand_monic_irreducible(rng, X.base, rng.randint(1, max_degree)))
        if X.contains(z):
            return z


def rand_points(rng, X, k, avoid=()):
    out = set()
    for _ in range(40):
        if len(out) >= k:
            break
        z = rand_closed_point(rng, X)
        if z not in avoid:
            out.add(z)
    return out


def rand_coeff(rng):
    return rng.choice((-3, -2, -1, 1, 1, 2, 3))


def rand_cycle(rng, X: Scheme, codim, support=None, allow_zero=True):
    if support is None:
        if X.kind == "point":
            support = [l for l in X.labels if rng.random() < 0.7] or [X.labels[0]]
        elif codim == 0:
            support = [GENERIC]
        elif codim == 1:
            support = rand_points(rng, X, rng.randint(1, 3))
        else:
            support = []
    coeffs = {p: (0 if allow_zero and rng.random() < 0.1 else rand_coeff(rng)) for p in support}
    return C.Cycle.make(X, codim, coeffs, support)


def rand_point_scheme(rng, F, k=None, max_degree=3):
    k = k or rng.randint(1, 3)
    return C.point_scheme(F, {f"x{i}": rng.randint(1, max_degree) for i in range(k)})


def rand_codim(rng, X):
    return 0 if X.kind == "point" else rng.choice((0, 1, 1))


def _show(*items):
    out = []
    for it in items:
        if hasattr(it, "to_expr"):
            out.append(it.to_expr())
        else:
            out.append(str(it))
    return " ".join(out)


def _check(lhs, rhs, *context):
    if lhs.same(rhs):
        return None
    return Fail(f"{_show(*context)} lhs={lhs.to_expr()} rhs={rhs.to_expr()}")


def _first_fail(*outcomes):
    for o in outcomes:
        if o is not None:
            return o
    return None


# ---------------------------------------------------------------------------
# Morphism families
# ---------------------------------------------------------------------------


def rand_points_map(rng, X: Scheme, F=None):
    """A random label map out of X into a fresh point scheme."""
    F = F or X.base
    target = {}
    mapping = {}
    for l in X.labels:
        d = C._deg(X, l)
        divs = [e for e in range(1, d + 1) if d % e == 0]
        candidates = [t for t, e in target.items() if d % e == 0]
        if candidates and rng.random() < 0.5:
            mapping[l] = rng.choice(candidates)
        else:
            name = f"y{len(target)}"
            target[name] = rng.choice(divs)
            mapping[l] = name
    Y = C.point_scheme(F, target)
    return C.points_map(X, Y, mapping)


def rand_component_inclusion(rng, Z: Scheme):
    """Z as a union of components of a larger point scheme Y."""
    degs = {l: C._deg(Z, l) for l in Z.labels}
    extra = {f"e{len(degs)}.{i}": rng.randint(1, 3) for i in range(rng.randint(0, 2))}
    degs.update(extra)
    Y = C.point_scheme(Z.base, degs)
    return C.points_map(Z, Y, {l: l for l in Z.labels})


def rand_extension(rng, F):
    return finite_field(F.characteristic, rng.choice((2, 3)))


def rand_smooth_map(rng, F):
    """A random smooth morphism between supported schemes."""
    kind = rng.choice(("points", "structure", "open", "basechange", "affine"))
    if kind == "points":
        return rand_points_map(rng, rand_point_scheme(rng, F))
    if kind == "structure":
        return C.structure(rand_curve(rng, F))
    if kind == "open":
        src, dst = rng.choice((("gm", "affine-line"), ("gm", "proj-line"), ("affine-line", "proj-line")))
        return C.open_immersion(Scheme(src, F), Scheme(dst, F))
    if kind == "basechange":
        return C.base_change_map(rand_curve(rng, F), rand_extension(rng, F))
    a = F.random_nonzero(rng)
    return C.affine_map(affine_line(F), a, F.random_element(rng))


def rand_closed_immersion(rng, F):
    if rng.random() < 0.3:
        return rand_component_inclusion(rng, rand_point_scheme(rng, F))
    X = rand_curve(rng, F)
    Z = C.closed_points_scheme(X, rand_points(rng, X, rng.randint(1, 3)))
    return C.closed_immersion(Z, X)


def rand_any_map(rng, F):
    r = rng.random()
    if r < 0.55:
        return rand_smooth_map(rng, F)
    if r < 0.8:
        return rand_closed_immersion(rng, F)
    g = tuple(F.random_element(rng) for _ in range(rng.randint(2, 3))) + (F.random_nonzero(rng),)
    return C.poly_map(affine_line(F), g)


def rand_pullable_cycle(rng, f: C.CHMap):
    """A cycle on the target whose preimage has the expected codimension."""
    Y = f.target
    codim = rand_codim(rng, Y)
    if f.kind == "closed" and codim == 1:
        pts = rand_points(rng, Y, rng.randint(1, 2), avoid=set(f.source.labels))
        if not pts:
            codim = 0
        else:
            return rand_cycle(rng, Y, 1, pts)
    return rand_cycle(rng, Y, codim)


def rand_pushable_cycle(rng, f: C.CHMap):
    """A cycle on the source whose support is finite over the target."""
    X = f.source
    finite_generic = X.kind == "point" or f.kind in ("basechange", "affine", "closed") or \
        (f.kind == "open" and X.kind == f.target.kind)
    if X.kind != "point" and (not finite_generic or rng.random() < 0.6):
        return rand_cycle(rng, X, 1)
    return rand_cycle(rng, X, 0)


# ===========================================================================
# Chow-cycle axioms
# ===========================================================================


def law_T(rng):
    # twists are parities: pull-back preserves rank mod 2 and negation
    f = rand_any_map(rng, rand_prime(rng))
    ranks = [rng.randint(-4, 6) for _ in range(rng.randint(1, 4))]
    v = sum(ranks) % 2
    pulled = v  # the pull-back of a parity is itself
    if pulled != sum(ranks) % 2 or (-pulled) % 2 != (-v) % 2:
        return Fail(f"twist parity {ranks} along {f.kind}")
    return None


def law_C(rng):
    F = rand_prime(rng)
    X = rand_curve(rng, F) if rng.random() < 0.5 else rand_point_scheme(rng, F)
    codim = rand_codim(rng, X)
    empty = C.Cycle.make(X, codim, {}, set())
    c = rand_cycle(rng, X, codim)
    if empty.coeffs or not (c + empty).same(C.Cycle.make(X, codim, dict(c.coeffs), c.support)):
        return Fail(_show(X, c))
    return None


def law_ES(rng):
    F = rand_prime(rng)
    if rng.random() < 0.5:
        X = rand_point_scheme(rng, F, k=rng.randint(2, 4))
        pool = list(X.labels)
        codim = 0
    else:
        X = rand_curve(rng, F)
        pool = list(rand_points(rng, X, 5))
        codim = 1
    rng.shuffle(pool)
    a, b = sorted(rng.sample(range(len(pool) + 1), 2)) if len(pool) > 1 else (0, len(pool))
    C1, C2, C3 = set(pool[:a]), set(pool[:b]), set(pool)
    c = rand_cycle(rng, X, codim, C1)
    two = C.extend_support(C.extend_support(c, C2), C3)
    one = C.extend_support(c, C3)
    out = _check(two, one, "transitivity", c)
    if out:
        return out
    # direct sum over a disjoint splitting
    A, B = set(pool[:a]), set(pool[a:])
    s = rand_cycle(rng, X, codim, A | B)
    back = C.extend_support(C.restrict_support(s, A), A | B) + C.extend_support(C.restrict_support(s, B), A | B)
    return _check(back, s, "direct sum", s)


def _proper_pair(rng, X, c1_codim=None):
    """Two random cycles on X meeting properly."""
    i = rand_codim(rng, X) if c1_codim is None else c1_codim
    a = rand_cycle(rng, X, i)
    j = rand_codim(rng, X)
    if X.kind != "point" and i == 1 and j == 1:
        pts = rand_points(rng, X, rng.randint(1, 2), avoid=a.support)
        if not pts:
            return a, rand_cycle(rng, X, 0)
        return a, rand_cycle(rng, X, 1, pts)
    return a, rand_cycle(rng, X, j)


def _rand_scheme(rng, F):
    return rand_curve(rng, F) if rng.random() < 0.6 else rand_point_scheme(rng, F)


def law_P(rng):
    F = rand_prime(rng)
    X = _rand_scheme(rng, F)
    a, b = _proper_pair(rng, X)
    # product respects extension of supports of the first factor
    if X.kind == "point":
        bigger = set(X.labels)
    elif a.codim == 0:
        bigger = a.support
    else:
        bigger = a.support | rand_points(rng, X, 2, avoid=b.support)
    ae = C.extend_support(a, bigger)
    lhs = C.ch_product(ae, b)
    rhs = C.extend_support(C.ch_product(a, b), lhs.support)
    return _check(lhs, rhs, a, b)


def law_A(rng):
    F = rand_prime(rng)
    X = _rand_scheme(rng, F)
    a, b = _proper_pair(rng, X)
    if X.kind != "point" and 1 in (a.codim, b.codim):
        c = rand_cycle(rng, X, 0)
    else:
        _, c = _proper_pair(rng, X, 0)
        c = rand_cycle(rng, X, rand_codim(rng, X))
    cycles = [a, b, c]
    rng.shuffle(cycles)
    a, b, c = cycles
    return _check(C.ch_product(C.ch_product(a, b), c), C.ch_product(a, C.ch_product(b, c)), a, b, c)


def law_CC(rng):
    F = rand_prime(rng)
    X = _rand_scheme(rng, F)
    a, b = _proper_pair(rng, X)
    return _check(C.ch_product(a, b), C.ch_product(b, a), a, b)


def law_I(rng):
    F = rand_prime(rng)
    X = _rand_scheme(rng, F)
    x = rand_cycle(rng, X, rand_codim(rng, X))
    one = C.fundamental(X)
    return _first_fail(_check(C.ch_product(one, x), x, x), _check(C.ch_product(x, one), x, x))


def law_PB(rng):
    F = rand_prime(rng)
    f = rand_any_map(rng, F)
    c = rand_pullable_cycle(rng, f)
    Y = f.target
    if Y.kind == "point":
        bigger = set(Y.labels)
    elif c.codim == 0:
        bigger = c.support
    else:
        extra = rand_points(rng, Y, 2, avoid=set(f.source.labels) if f.kind == "closed" else ())
        bigger = c.support | extra
    lhs = f.pull(C.extend_support(c, bigger))
    rhs = C.extend_support(f.pull(c), lhs.support)
    return _check(lhs, rhs, f.kind, c)


def _composable_pair(rng, F):
    """(f, g) with f o g defined, for pull-back functoriality."""
    r = rng.randrange(6)
    if r == 0:
        g = rand_points_map(rng, rand_point_scheme(rng, F))
        return rand_points_map(rng, g.target), g
    if r == 1:
        g = C.open_immersion(gm(F), affine_line(F))
        return C.open_immersion(affine_line(F), proj_line(F)), g
    if r == 2:
        X = rand_curve(rng, F)
        g = C.closed_immersion(C.closed_points_scheme(X, rand_points(rng, X, 2)), X)
        return C.structure(X), g
    if r == 3:
        X = rng.choice((gm(F), affine_line(F)))
        Y = proj_line(F) if X.kind == "affine-line" else rng.choice((affine_line(F), proj_line(F)))
        g = C.closed_immersion(C.closed_points_scheme(X, rand_points(rng, X, 2)), X)
        return C.open_immersion(X, Y), g
    if r == 4:
        A = affine_line(F)
        mk = lambda: (C.poly_map(A, tuple(F.random_element(rng) for _ in range(rng.randint(1, 2))) + (F.random_nonzero(rng),)))
        return mk(), mk()
    X = rand_curve(rng, F)
    g = C.base_change_map(X, rand_extension(rng, F))
    return C.structure(X), g


def law_FPB(rng):
    F = rand_prime(rng)
    f, g = _composable_pair(rng, F)
    fg = C.compose_maps(f, g)
    c = rand_pullable_cycle(rng, f)
    if f.kind == "structure" and g.kind == "closed":
        c = rand_cycle(rng, f.target, 0)
    try:
        lhs = fg.pull(c)
    except C.ImproperIntersection:
        return None
    ident = C.ch_identity(f.target)
    return _first_fail(_check(lhs, g.pull(f.pull(c)), f.kind, g.kind, c), _check(ident.pull(c), c, "identity", c))


def law_CPB(rng):
    F = rand_prime(rng)
    f = rand_any_map(rng, F)
    Y = f.target
    a, b = _proper_pair(rng, Y)
    if f.kind == "closed":
        a = rand_pullable_cycle(rng, f)
        b = rand_cycle(rng, Y, 0) if a.codim == 1 else rand_pullable_cycle(rng, f)
    lhs = f.pull(C.ch_product(a, b))
    rhs = C.ch_product(f.pull(a), f.pull(b))
    one = _check(f.pull(C.fundamental(Y)), C.fundamental(f.source), "unit", f.kind)
    return _first_fail(_check(lhs, rhs, f.kind, a, b), one)


def law_P_FSM(rng):
    F = rand_prime(rng)
    f = rand_smooth_map(rng, F)
    c = rand_pushable_cycle(rng, f)
    X = f.source
    ident = C.ch_identity(X)
    if X.kind == "point":
        bigger = set(X.labels)
    elif c.codim == 0:
        bigger = c.support
    else:
        bigger = c.support | rand_points(rng, X, 2)
    lhs = f.push(C.extend_support(c, bigger))
    rhs = C.extend_support(f.push(c), lhs.support)
    return _first_fail(_check(lhs, rhs, f.kind, c), _check(ident.push(c), c, "identity", c))


def _smooth_chain(rng, F):
    r = rng.randrange(5)
    if r == 0:
        g = rand_points_map(rng, rand_point_scheme(rng, F))
        return rand_points_map(rng, g.target), g
    if r == 1:
        X = rng.choice((gm(F), affine_line(F)))
        return C.structure(proj_line(F)), C.open_immersion(X, proj_line(F))
    if r == 2:
        A = affine_line(F)
        return C.structure(A), C.affine_map(A, F.random_nonzero(rng), F.random_element(rng))
    if r == 3:
        X = rand_curve(rng, F)
        return C.structure(X), C.base_change_map(X, rand_extension(rng, F))
    return C.open_immersion(affine_line(F), proj_line(F)), C.open_immersion(gm(F), affine_line(F))


def law_FPFSM(rng):
    F = rand_prime(rng)
    f, g = _smooth_chain(rng, F)
    fg = C.compose_maps(f, g)
    c = rand_pushable_cycle(rng, g)
    if f.kind in ("structure", "open") and c.codim == 0 and c.scheme.kind != "point":
        c = rand_cycle(rng, g.source, 1)
    return _check(fg.push(c), f.push(g.push(c)), f.kind, g.kind, c)


def law_P_FCI(rng):
    F = rand_prime(rng)
    f = rand_closed_immersion(rng, F)
    X = f.source
    c = rand_cycle(rng, X, 0)
    pushed = f.push(c)
    # f_* is an isomorphism onto cycles supported on f(C): read coefficients back
    back = C.Cycle.make(X, 0, {x: pushed.get(f.image_point(x)) for x in c.support}, c.support)
    bigger = C.extend_support(c, set(X.labels))
    lhs = f.push(bigger)
    rhs = C.extend_support(pushed, lhs.support)
    ident = C.ch_identity(X)
    return _first_fail(_check(back, c, "inverse", c), _check(lhs, rhs, "supports", c),
                       _check(ident.push(c), c, "identity", c))


def law_FPFCI(rng):
    F = rand_prime(rng)
    if rng.random() < 0.5:
        Z = rand_point_scheme(rng, F)
        g = rand_component_inclusion(rng, Z)
        f = rand_component_inclusion(rng, g.target)
    else:
        X = rand_curve(rng, F)
        pts = rand_points(rng, X, rng.randint(1, 4))
        Y = C.closed_points_scheme(X, pts)
        sub = [z for z in Y.labels if rng.random() < 0.6] or [Y.labels[0]]
        Z = C.closed_points_scheme(X, sub)
        g = C.points_map(Z, Y, {z: z for z in Z.labels})
        f = C.closed_immersion(Y, X)
    c = rand_cycle(rng, g.source, 0)
    fg = C.compose_maps(f, g)
    return _check(fg.push(c), f.push(g.push(c)), f.kind, g.kind, c)


def _bcsm_square(rng, F):
    """(f, u, g, v) Cartesian with f smooth: X' -v-> X, X' -g-> Y', Y' -u-> Y."""
    L = rand_extension(rng, F)
    r = rng.randrange(4)
    if r == 0:
        X = rand_curve(rng, F)
        T = C.point_scheme(F, {"pt": 1})
        TL = C.point_scheme(F, {"pt": L.degree})
        f = C.structure(X, T)
        u = C.points_map(TL, T, {"pt": "pt"})
        XL = X.base_change(L)
        return f, u, C.structure(XL, TL), C.base_change_map(X, L)
    if r == 1:
        src, dst = rng.choice((("gm", "affine-line"), ("gm", "proj-line"), ("affine-line", "proj-line")))
        f = C.open_immersion(Scheme(src, F), Scheme(dst, F))
        u = C.base_change_map(Scheme(dst, F), L)
        return f, u, C.open_immersion(Scheme(src, L), Scheme(dst, L)), C.base_change_map(Scheme(src, F), L)
    if r == 2:
        src, dst = rng.choice((("gm", "affine-line"), ("gm", "proj-line"), ("affine-line", "proj-line")))
        f = C.base_change_map(Scheme(dst, F), L)
        u = C.open_immersion(Scheme(src, F), Scheme(dst, F))
        return f, u, C.base_change_map(Scheme(src, F), L), C.open_immersion(Scheme(src, L), Scheme(dst, L))
    Z = rand_point_scheme(rng, F)
    T = C.point_scheme(F, {"pt": 1})
    f = C.structure(Z, T)
    ZL, v, _ = C.point_base_change(Z, L.degree)
    TL = C.point_scheme(F, {"pt": L.degree})
    return f, C.points_map(TL, T, {"pt": "pt"}), C.points_map(ZL, TL, {l: "pt" for l in ZL.labels}), v


def law_BCSM(rng):
    F = rand_prime(rng)
    f, u, g, v = _bcsm_square(rng, F)
    c = rand_pushable_cycle(rng, f)
    if f.kind in ("structure", "open") and c.codim == 0 and c.scheme.kind != "point":
        c = rand_cycle(rng, f.source, 1)
    lhs = u.pull(f.push(c))
    rhs = g.push(_retarget(v.pull(c), g.source))
    return _check(lhs, rhs, f.kind, u.kind, c)


def _retarget(c, X):
    """The same data on an equal scheme presented by another object."""
    return C.Cycle.make(X, c.codim, dict(c.coeffs), c.support)


def _bcci_square(rng, F):
    X = rand_curve(rng, F)
    pts = rand_points(rng, X, rng.randint(1, 3))
    Z = C.closed_points_scheme(X, pts)
    f = C.closed_immersion(Z, X)
    if rng.random() < 0.5:
        L = rand_extension(rng, F)
        Zp, v, g = C.cartesian_over_points(Z, X, L)
        return f, C.base_change_map(X, L), g, v
    if X.kind == "gm":
        U = X
    elif X.kind == "affine-line":
        U = gm(F)
    else:
        U = rng.choice((gm(F), affine_line(F)))
    keep = [z for z in Z.labels if U.contains(z)]
    if not keep:
        return None
    Zp = C.closed_points_scheme(U, keep)
    return f, C.open_immersion(U, X), C.closed_immersion(Zp, U), C.points_map(Zp, Z, {z: z for z in keep})


def law_BCCI(rng):
    F = rand_prime(rng)
    sq = None
    while sq is None:
        sq = _bcci_square(rng, F)
    f, u, g, v = sq
    c = rand_cycle(rng, f.source, 0)
    return _check(u.pull(f.push(c)), g.push(v.pull(c)), f.kind, u.kind, c)


def law_PFSM(rng):
    F = rand_prime(rng)
    f = rand_smooth_map(rng, F)
    c = rand_pushable_cycle(rng, f)
    Y = f.target
    if c.codim == 1:
        j = rand_codim(rng, Y)
        if j == 1:
            images = {f.image_point(p) for p in c.support}
            pts = rand_points(rng, Y, rng.randint(1, 2), avoid=images)
            d = rand_cycle(rng, Y, 1, pts) if pts else rand_cycle(rng, Y, 0)
        else:
            d = rand_cycle(rng, Y, 0)
    else:
        d = rand_cycle(rng, Y, rand_codim(rng, Y))
    left = _check(f.push(C.ch_product(c, f.pull(d))), C.ch_product(f.push(c), d), "right", f.kind, c, d)
    right = _check(f.push(C.ch_product(f.pull(d), c)), C.ch_product(d, f.push(c)), "left", f.kind, c, d)
    return _first_fail(left, right)


def law_PFCI(rng):
    F = rand_prime(rng)
    f = rand_closed_immersion(rng, F)
    c = rand_cycle(rng, f.source, 0)
    d = rand_pullable_cycle(rng, f)
    left = _check(f.push(C.ch_product(c, f.pull(d))), C.ch_product(f.push(c), d), "right", c, d)
    right = _check(f.push(C.ch_product(f.pull(d), c)), C.ch_product(d, f.push(c)), "left", c, d)
    return _first_fail(left, right)


def law_CTPF(rng):
    F = rand_prime(rng)
    r = rng.randrange(3)
    if r == 0:
        # closed immersion then smooth
        if rng.random() < 0.5:
            Z = rand_point_scheme(rng, F)
            f = rand_component_inclusion(rng, Z)
            g = rand_points_map(rng, f.target)
        else:
            X = rand_curve(rng, F)
            Z = C.closed_points_scheme(X, rand_points(rng, X, rng.randint(1, 3)))
            f, g = C.closed_immersion(Z, X), C.structure(X)
        c = rand_cycle(rng, f.source, 0)
        return _check(C.compose_maps(g, f).push(c), g.push(f.push(c)), "(1)", c)
    if r == 1:
        # smooth open immersion after a closed immersion
        X = rng.choice((gm(F), affine_line(F)))
        Y = rng.choice((affine_line(F), proj_line(F))) if X.kind == "gm" else proj_line(F)
        Z = C.closed_points_scheme(X, rand_points(rng, X, rng.randint(1, 3)))
        f, g = C.closed_immersion(Z, X), C.open_immersion(X, Y)
        c = rand_cycle(rng, Z, 0)
        return _check(C.compose_maps(g, f).push(c), g.push(f.push(c)), "(2)", c)
    sq = None
    while sq is None:
        sq = _bcci_square(rng, F)
    f, u, g, v = sq
    c = rand_cycle(rng, g.source, 0)
    return _check(u.push(g.push(c)), f.push(v.push(c)), "(3)", u.kind, c)


def law_EE(rng):
    F = rand_prime(rng)
    r = rng.randrange(3)
    if r == 0:
        src, dst = rng.choice((("gm", "affine-line"), ("gm", "proj-line"), ("affine-line", "proj-line")))
        f = C.open_immersion(Scheme(src, F), Scheme(dst, F))
        c = rand_cycle(rng, f.target, 1, rand_points(rng, f.source, rng.randint(1, 3)))
    elif r == 1:
        A = affine_line(F)
        f = C.affine_map(A, F.random_nonzero(rng), F.random_element(rng))
        c = rand_cycle(rng, A, rand_codim(rng, A))
    else:
        f = rand_component_inclusion(rng, rand_point_scheme(rng, F))
        c = rand_cycle(rng, f.target, 0, f.source.labels)
    pulled = f.pull(c)
    back = f.push(pulled)
    return _first_fail(_check(back, c, f.kind, c), _check(f.pull(f.push(pulled)), pulled, f.kind, c))


CH_LAWS = {
    "T": law_T, "C": law_C, "ES": law_ES, "P": law_P, "A": law_A, "CC": law_CC, "I": law_I,
    "PB": law_PB, "FPB": law_FPB, "CPB": law_CPB, "P-FSM": law_P_FSM, "FPFSM": law_FPFSM,
    "P-FCI": law_P_FCI, "FPFCI": law_FPFCI, "BCSM": law_BCSM, "BCCI": law_BCCI, "PFSM": law_PFSM,
    "PFCI": law_PFCI, "CTPF": law_CTPF, "EE": law_EE,
}


# ===========================================================================
# Milnor-Witt laws on zero-dimensional schemes
# ===========================================================================


def rand_small_field(rng):
    return finite_field(rng.choice((3, 5)), rng.choice((1, 1, 1, 2)))


def rand_etale(rng, F, name="X", max_degree=2):
    degrees = sorted(rng.randint(1, max_degree) for _ in range(rng.randint(1, 2)))
    return spec_of_degrees(F, list(dict.fromkeys(degrees)), name=name)


def rand_form(rng, K):
    entries = [K.random_nonzero(rng) for _ in range(rng.randint(0, 2))]
    return GWForm.diagonal(K, entries, offset=rng.randint(-1, 1))


def rand_corr(rng, X, Y, density=0.7):
    W = X * Y
    return C.corr_from_forms(X, Y, {w: rand_form(rng, W.residue_field(w)) for w in W.points
                                    if rng.random() < density})


def _corr_check(lhs, rhs, *context):
    if C.corr_eq(lhs, rhs):
        return None
    return Fail(f"{_show(*context)} lhs={lhs.to_expr()} rhs={rhs.to_expr()}")


def _triple(rng, F=None):
    F = F or rand_small_field(rng)
    return rand_etale(rng, F, "X"), rand_etale(rng, F, "Y"), rand_etale(rng, F, "Z")


def law_mw_assoc(rng):
    F = rand_small_field(rng)
    X, Y, Z = _triple(rng, F)
    T = rand_etale(rng, F, "T", max_degree=1)
    a, b, c = rand_corr(rng, X, Y), rand_corr(rng, Y, Z), rand_corr(rng, Z, T)
    return _corr_check(C.compose(C.compose(a, b), c), C.compose(a, C.compose(b, c)), a, b, c)


def law_mw_identity(rng):
    F = rand_small_field(rng)
    X, Y = rand_etale(rng, F, "X"), rand_etale(rng, F, "Y")
    a = rand_corr(rng, X, Y)
    return _first_fail(_corr_check(C.compose(C.identity_corr(X), a), a, "left", a),
                       _corr_check(C.compose(a, C.identity_corr(Y)), a, "right", a))


def _single_atom(rng, F, name, max_degree=2):
    degrees = sorted({rng.randint(1, max_degree) for _ in range(rng.randint(1, 3))})
    return spec_of_degrees(F, degrees, name=name)


def law_mw_graph(rng):
    F = finite_field(rng.choice((3, 5, 7)))
    for _ in range(20):
        X, Y, Z = (_single_atom(rng, F, n) for n in "XYZ")
        f, g = random_atom_map(X, Y, rng), random_atom_map(Y, Z, rng)
        if f is not None and g is not None:
            break
    else:
        return None
    return _corr_check(C.graph(g @ f), C.compose(C.graph(f), C.graph(g)), X, Y, Z)


def law_mw_exterior(rng):
    F = finite_field(rng.choice((3, 5)))
    X1, Y1, Z1 = (rand_etale(rng, F, n + "1", max_degree=1 + (rng.random() < 0.3)) for n in "XYZ")
    X2, Y2, Z2 = (rand_etale(rng, F, n + "2", max_degree=1) for n in "XYZ")
    f1, g1 = rand_corr(rng, X1, Y1), rand_corr(rng, Y1, Z1)
    f2, g2 = rand_corr(rng, X2, Y2), rand_corr(rng, Y2, Z2)
    lhs = C.compose(C.exterior(f1, f2), C.exterior(g1, g2))
    rhs = C.exterior(C.compose(f1, g1), C.compose(f2, g2))
    return _corr_check(lhs, rhs, f1, f2, g1, g2)


def law_mw_base_change(rng):
    p = rng.choice((3, 5))
    F = finite_field(p)
    e1 = rng.choice((1, 2))
    E1, E2 = finite_field(p, e1), finite_field(p, 2 * e1)
    X, Y, Z = (rand_etale(rng, F, n, max_degree=2) for n in "XYZ")
    a, b = rand_corr(rng, X, Y), rand_corr(rng, Y, Z)
    chained = C.base_change_corr(C.base_change_corr(a, E1), E2)
    direct = C.base_change_corr(a, E2)
    lhs = C.base_change_corr(C.compose(a, b), E1)
    rhs = C.compose(C.base_change_corr(a, E1), C.base_change_corr(b, E1))
    unit = C.base_change_corr(C.identity_corr(X), E1)
    return _first_fail(_corr_check(chained, direct, "functor", a),
                       _corr_check(lhs, rhs, "composition", a, b),
                       _corr_check(unit, C.identity_corr(unit.source), "unit", X))


def law_mw_cc(rng):
    F = rand_small_field(rng)
    X = rand_etale(rng, F, "X")
    r1, r2 = rng.randint(0, 1), rng.randint(0, 1)
    s1, s2 = {}, {}
    for w in X.points:
        K = X.residue_field(w)
        s1[w] = Twisted0(rand_form(rng, K), (("v1", r1),))
        s2[w] = Twisted0(rand_form(rng, K), (("v2", r2),))
    lhs = C.commutativity(C.point_classes_product(s1, s2), ("v2", "v1"))
    rhs = C.point_classes_product(s2, s1)
    same = all(lhs[w] == rhs[w] for w in lhs)
    if (r1 * r2) % 2 == 0:
        return None if same else Fail(f"parities {r1},{r2} on {X.to_expr()}")
    if same:
        return Note(f"hypothesis violated (parities 1,1); <-1> acts trivially on these classes over {F.desc()}")
    return Note(f"hypothesis violated (parities 1,1); classes differ by <-1> over {F.desc()}")


def law_mw_bilinear(rng):
    F = rand_small_field(rng)
    X, Y, Z = _triple(rng, F)
    a1, a2, b = rand_corr(rng, X, Y), rand_corr(rng, X, Y), rand_corr(rng, Y, Z)
    b2 = rand_corr(rng, Y, Z)
    return _first_fail(
        _corr_check(C.compose(a1 + a2, b), C.compose(a1, b) + C.compose(a2, b), "left", a1, a2, b),
        _corr_check(C.compose(a1, b + b2), C.compose(a1, b) + C.compose(a1, b2), "right", a1, b, b2))


MW_LAWS = {
    "associativity": law_mw_assoc, "identity": law_mw_identity, "graph-functoriality": law_mw_graph,
    "exterior-compatibility": law_mw_exterior, "base-change-functoriality": law_mw_base_change,
    "CC": law_mw_cc, "bilinearity": law_mw_bilinear,
}

SUITES = {"ch-all": ("CH", list(CH_LAWS)), "mw-zero-dim": ("MW", list(MW_LAWS))}
for _name in CH_LAWS:
    SUITES[f"ch-{_name}"] = ("CH", [_name])
for _name in MW_LAWS:
    SUITES[f"mw-{_name}"] = ("MW", [_name])


def suite_names():
    return sorted(SUITES)


def run_laws(suite: str, seed: int = 0, cases: int = 300, instance: str = None) -> LawReport:
    """Run every law of a suite ``cases`` times."""
    if suite not in SUITES:
        if instance is not None and f"{instance.lower()}-{suite}" in SUITES:
            suite = f"{instance.lower()}-{suite}"
        else:
            raise UnknownSuite(f"unknown law suite {suite!r}")
    inst, names = SUITES[suite]
    if instance is not None and instance.upper() != inst:
        raise UnknownSuite(f"suite {suite!r} belongs to the {inst} instance")
    table = CH_LAWS if inst == "CH" else MW_LAWS
    report = LawReport(suite, seed, cases)
    for name in names:
        law = table[name]
        bad = 0
        for i in range(cases):
            rng = case_rng(f"{suite}/{name}", seed, i)
            try:
                out = law(rng)
            except Exception as exc:  # a crashing case is a failure with its trace
                out = Fail(f"{type(exc).__name__}: {exc} @ {traceback.extract_tb(exc.__traceback__)[-1].lineno}")
            if isinstance(out, Fail):
                bad += 1
                report.failures.append((seed, name, i, out.text))
            elif isinstance(out, Note):
                report.notes.append((name, i, out.text))
        report.laws.append((name, cases, bad))
    return report
