"""Finite correspondences.

Two instances:

* the Chow-cycle theory on points and rational curves over F_p, with every
  operation the correspondence axioms ask for (products, pull-backs,
  push-forwards along smooth maps and closed immersions, base change);
* the Milnor-Witt theory on finite etale schemes over a finite field, where
  Cor(X, Y) is the direct sum of GW(k(w)) over the points w of X x Y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import places as PL
from . import poly as P
from .errors import (ImproperIntersection, NotFiniteOverTarget, SchemeMismatch, UnsupportedCompositionCase,
                     UnsupportedExtension, UnsupportedMorphism, UnsupportedSchemes)
from .etale import (EtaleMap, EtaleScheme, EPoint, Twisted0, identity as etale_identity, projection,
                    pull_class, push_class, structure_image, structure_map, _roots)
from .factor import factor
from .fields import Field, PrimeField, finite_field
from .gw import GWForm
from .rost_schmid import GENERIC, Scheme, places_over

# ===========================================================================
# Chow-cycle instance
# ===========================================================================


def point_scheme(F, degrees: dict) -> Scheme:
    """Point scheme with labelled components of the given absolute degrees."""
    labels = tuple(degrees)
    p = F.characteristic
    return Scheme("point", F, tuple(finite_field(p, degrees[l]) for l in labels), labels)


def closed_points_scheme(X: Scheme, pts) -> Scheme:
    pts = tuple(sorted(pts, key=PL.Place.sort_key))
    return Scheme("point", X.base, tuple(PL.residue_field(z) for z in pts), pts)


def _deg(X: Scheme, pt) -> int:
    """Absolute degree of the residue field at a closed point."""
    return X.residue_field_at(pt).degree


def codim_points(X: Scheme, codim):
    if X.kind == "point":
        return None if codim == 0 else ()
    return None


@dataclass(frozen=True)
class Cycle:
    """An element of CH^codim_C(X): integer coefficients on the components of C."""
    scheme: Scheme
    codim: int
    support: frozenset
    coeffs: tuple  # sorted ((point, n), ...), nonzero only

    @classmethod
    def make(cls, X, codim, coeffs: dict, support=None):
        coeffs = {p: n for p, n in coeffs.items() if n}
        supp = frozenset(coeffs) if support is None else frozenset(support)
        if not set(coeffs) <= supp:
            raise ValueError("coefficients outside the support")
        _check_support(X, codim, supp)
        return cls(X, codim, supp, tuple(sorted(coeffs.items(), key=lambda kv: _key(kv[0]))))

    def get(self, pt):
        return dict(self.coeffs).get(pt, 0)

    def __add__(self, other):
        _same_group(self, other)
        d = dict(self.coeffs)
        for p, n in other.coeffs:
            d[p] = d.get(p, 0) + n
        return Cycle.make(self.scheme, self.codim, d, self.support | other.support)

    def __neg__(self):
        return Cycle.make(self.scheme, self.codim, {p: -n for p, n in self.coeffs}, self.support)

    def scale(self, k):
        return Cycle.make(self.scheme, self.codim, {p: k * n for p, n in self.coeffs}, self.support)

    def same(self, other) -> bool:
        """Equality in the same group (supports included)."""
        return (self.scheme, self.codim, self.support, self.coeffs) == \
            (other.scheme, other.codim, other.support, other.coeffs)

    def to_expr(self):
        body = " ".join(f"(at {_pt_str(p)} {n})" for p, n in self.coeffs)
        supp = " ".join(_pt_str(p) for p in sorted(self.support, key=_key))
        return f"(cycle {self.scheme.to_expr()} :codim {self.codim} :support ({supp}) {body})".replace(" )", ")")


def _key(pt):
    if pt == GENERIC:
        return (0,)
    if isinstance(pt, PL.Place):
        return (1,) + pt.sort_key()
    return (2, str(pt))


def _pt_str(pt):
    return str(pt)


def _same_group(a, b):
    if a.scheme != b.scheme or a.codim != b.codim:
        raise SchemeMismatch("cycles live in different groups")


def _check_support(X, codim, supp):
    if X.kind == "point":
        if codim != 0 and supp:
            raise ValueError("point schemes only carry codimension-0 cycles")
        bad = [p for p in supp if p not in X.labels]
        if bad:
            raise ValueError(f"{bad[0]} is not a point of {X}")
        return
    if codim == 0:
        if supp and supp != frozenset({GENERIC}):
            raise ValueError("codimension-0 supports on a curve are the whole curve")
    elif codim == 1:
        for p in supp:
            if not isinstance(p, PL.Place) or not X.contains(p):
                raise ValueError(f"{p} is not a closed point of {X}")
    elif supp:
        raise ValueError("curves have no points of codimension >= 2")


def fundamental(X: Scheme, n=1) -> Cycle:
    if X.kind == "point":
        return Cycle.make(X, 0, {l: n for l in X.labels}, X.labels)
    return Cycle.make(X, 0, {GENERIC: n}, {GENERIC})


def extend_support(c: Cycle, support) -> Cycle:
    support = frozenset(support)
    if not c.support <= support:
        raise ValueError("extension of supports needs C1 inside C2")
    return Cycle.make(c.scheme, c.codim, dict(c.coeffs), support)


def restrict_support(c: Cycle, support) -> Cycle:
    """Component of c on a union of components of its support (direct sum)."""
    support = frozenset(support)
    return Cycle.make(c.scheme, c.codim, {p: n for p, n in c.coeffs if p in support}, support)


def ch_product(a: Cycle, b: Cycle) -> Cycle:
    if a.scheme != b.scheme:
        raise SchemeMismatch("products live on one scheme")
    X = a.scheme
    if X.kind == "point":
        supp = a.support & b.support
        return Cycle.make(X, a.codim + b.codim, {p: a.get(p) * b.get(p) for p in supp}, supp)
    if a.codim == 0 or b.codim == 0:
        full, other = (a, b) if a.codim == 0 else (b, a)
        if not full.support:
            return Cycle.make(X, other.codim + full.codim, {}, set())
        n = full.get(GENERIC)
        return Cycle.make(X, other.codim + full.codim, {p: n * m for p, m in other.coeffs}, other.support)
    if a.support & b.support:
        raise ImproperIntersection("codimension-one supports meet")
    return Cycle.make(X, a.codim + b.codim, {}, set())


# ---------------------------------------------------------------------------
# Morphisms of the Chow instance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CHMap:
    """Supported morphisms: ``points`` (label maps between point schemes),
    ``structure`` (curve -> one-point scheme), ``open`` (G_m, A^1 inside
    A^1, P^1), ``basechange`` (X_L -> X), ``affine`` (t -> a t + b on A^1),
    ``poly`` (t -> g(t) on A^1, pull-back only), ``closed`` (closed points
    of a curve), ``chain`` (a composite without a closed form)."""
    kind: str
    source: Scheme
    target: Scheme
    data: object = None

    # classification ---------------------------------------------------
    @property
    def is_smooth(self):
        if self.kind == "chain":
            return all(m.is_smooth for m in self.data)
        return self.kind in ("points", "structure", "open", "basechange", "affine")

    @property
    def is_closed_immersion(self):
        if self.kind == "closed":
            return True
        if self.kind == "points":
            m = self.data
            return len(set(m.values())) == len(m) and all(
                _deg(self.source, x) == _deg(self.target, y) for x, y in m.items())
        if self.kind == "chain":
            return all(m.is_closed_immersion for m in self.data)
        return False

    @property
    def rel_dim(self):
        return self.source.dim - self.target.dim

    def image_point(self, pt):
        k = self.kind
        if k == "points":
            return self.data[pt]
        if k == "structure":
            return self.target.labels[0]
        if k == "open":
            return pt
        if k == "basechange":
            return GENERIC if pt == GENERIC else place_below_cached(pt, self.target)
        if k == "affine":
            return GENERIC if pt == GENERIC else _affine_image(self, pt)
        if k == "closed":
            return pt
        raise UnsupportedMorphism(f"no point image for {k}")

    # pull-back --------------------------------------------------------
    def pull(self, c: Cycle) -> Cycle:
        if c.scheme != self.target:
            raise SchemeMismatch("pull-back of a cycle on another scheme")
        k, X, Y = self.kind, self.source, self.target
        if k == "chain":
            for m in reversed(self.data):
                c = m.pull(c)
            return c
        if k == "points":
            pre = {x: c.get(y) for x, y in self.data.items()}
            supp = {x for x, y in self.data.items() if y in c.support}
            return Cycle.make(X, c.codim, pre, supp)
        if k == "structure":
            n = c.get(Y.labels[0])
            return fundamental(X, n) if c.support else Cycle.make(X, 0, {}, set())
        if c.codim == 0 and Y.kind != "point":
            if k == "closed":
                n = c.get(GENERIC)
                return Cycle.make(X, 0, {z: n for z in X.labels}, X.labels if c.support else ())
            return Cycle.make(X, 0, dict(c.coeffs), c.support)
        if k == "closed":
            if c.support & set(X.labels):
                raise ImproperIntersection("the closed points meet the support")
            return Cycle.make(X, c.codim, {}, set())
        if k == "open":
            return Cycle.make(X, c.codim, {p: n for p, n in c.coeffs if X.contains(p)},
                              {p for p in c.support if X.contains(p)})
        if k == "basechange":
            out, supp = {}, set()
            for z in c.support:
                for u, _, _ in places_over(z, X.base):
                    supp.add(u)
                    out[u] = c.get(z)
            return Cycle.make(X, c.codim, out, supp)
        if k in ("affine", "poly"):
            K = X.function_field
            B = X.base
            g = self.data if k == "poly" else (self.data[1], self.data[0])
            out, supp = {}, set()
            for z in c.support:
                h = P.compose(B, z.poly, g)
                for q, e in factor(B, h)[1]:
                    u = PL.Place(K, q)
                    supp.add(u)
                    out[u] = out.get(u, 0) + e * c.get(z)
            return Cycle.make(X, c.codim, out, supp)
        raise UnsupportedMorphism(f"pull-back along {k}")

    # push-forward -----------------------------------------------------
    def push(self, c: Cycle) -> Cycle:
        if c.scheme != self.source:
            raise SchemeMismatch("push-forward of a cycle on another scheme")
        k, X, Y = self.kind, self.source, self.target
        if k == "chain":
            for m in self.data:
                c = m.push(c)
            return c
        if not (self.is_smooth or self.is_closed_immersion):
            raise UnsupportedMorphism(f"push-forward along {k} is not defined")
        if k == "points":
            out = {}
            for x, n in c.coeffs:
                y = self.data[x]
                out[y] = out.get(y, 0) + n * (_deg(X, x) // _deg(Y, y))
            return Cycle.make(Y, c.codim, out, {self.data[x] for x in c.support})
        if k == "closed":
            return Cycle.make(Y, c.codim + 1, dict(c.coeffs), c.support)
        if c.codim == 0 and c.support:
            if k == "basechange":
                n = c.get(GENERIC) * (X.base.degree // Y.base.degree)
                return Cycle.make(Y, 0, {GENERIC: n}, {GENERIC})
            if k == "affine" or (k == "open" and X == Y):
                return Cycle.make(Y, 0, dict(c.coeffs), c.support)
            raise NotFiniteOverTarget("the support is not finite over the target")
        if k == "structure":
            base_deg = _deg(Y, Y.labels[0])
            n = sum(m * (_deg(X, z) // base_deg) for z, m in c.coeffs)
            return Cycle.make(Y, c.codim - 1, {Y.labels[0]: n}, {Y.labels[0]} if c.support else ())
        if c.codim == 0:
            return Cycle.make(Y, 0, {}, set())
        out, supp = {}, set()
        for u in c.support:
            z = self.image_point(u)
            supp.add(z)
            out[z] = out.get(z, 0) + c.get(u) * (_deg(X, u) // _deg(Y, z))
        return Cycle.make(Y, c.codim, out, supp)


def place_below_cached(u, Y: Scheme):
    from .rost_schmid import place_below

    return place_below(u, Y.function_field)


def _affine_image(m: CHMap, u):
    """Image of a closed point under t -> a t + b."""
    a, b = m.data
    B = m.source.base
    ainv = B.inv(a)
    # z = P_u((t - b)/a) up to a unit
    h = P.compose(B, u.poly, (B.neg(B.mul(b, ainv)), ainv))
    return PL.Place(m.target.function_field, P.monic(B, h))


def points_map(X: Scheme, Y: Scheme, mapping: dict) -> CHMap:
    for x, y in mapping.items():
        if _deg(X, x) % _deg(Y, y):
            raise UnsupportedMorphism("a residue field does not contain its image's field")
    if set(mapping) != set(X.labels):
        raise UnsupportedMorphism("a point map must be defined on every point")
    return CHMap("points", X, Y, dict(mapping))


def structure(X: Scheme, T: Optional[Scheme] = None) -> CHMap:
    if T is None:
        T = point_scheme(X.base, {"pt": X.base.degree})
    if X.kind == "point":
        return points_map(X, T, {l: T.labels[0] for l in X.labels})
    return CHMap("structure", X, T)


def open_immersion(X: Scheme, Y: Scheme) -> CHMap:
    ok = {("gm", "affine-line"), ("gm", "proj-line"), ("affine-line", "proj-line")}
    if (X.kind, Y.kind) not in ok and X != Y or X.base != Y.base:
        raise UnsupportedMorphism(f"no open immersion {X} -> {Y}")
    return CHMap("open", X, Y)


def base_change_map(X: Scheme, L: Field) -> CHMap:
    if not isinstance(X.base, PrimeField):
        raise UnsupportedExtension("curve base change starts from a prime field")
    return CHMap("basechange", X.base_change(L), X)


def affine_map(X: Scheme, a, b) -> CHMap:
    if X.kind != "affine-line" or a == X.base.zero:
        raise UnsupportedMorphism("affine maps are automorphisms of A^1")
    return CHMap("affine", X, X, (a, b))


def poly_map(X: Scheme, g) -> CHMap:
    if X.kind != "affine-line" or len(P.trim(X.base, g)) < 2:
        raise UnsupportedMorphism("polynomial maps are nonconstant endomorphisms of A^1")
    g = P.trim(X.base, g)
    if len(g) == 2:
        return affine_map(X, g[1], g[0])
    return CHMap("poly", X, X, g)


def closed_immersion(Z: Scheme, X: Scheme) -> CHMap:
    if any(not isinstance(z, PL.Place) or not X.contains(z) for z in Z.labels):
        raise UnsupportedMorphism("the point scheme must consist of closed points of the curve")
    return CHMap("closed", Z, X)


def ch_identity(X: Scheme) -> CHMap:
    if X.kind == "point":
        return points_map(X, X, {l: l for l in X.labels})
    return CHMap("open", X, X)


def compose_maps(f: CHMap, g: CHMap) -> CHMap:
    """f o g, in closed form when one exists."""
    if g.target != f.source:
        raise SchemeMismatch("maps do not compose")
    kf, kg = f.kind, g.kind
    X, Z = g.source, f.target
    if kf == "points" and kg == "points":
        return CHMap("points", X, Z, {x: f.data[y] for x, y in g.data.items()})
    if kf == "points" and kg == "structure":
        return CHMap("structure", X, Z)
    if kf == "structure" and kg in ("open", "affine", "poly", "basechange"):
        return CHMap("structure", X, Z)
    if kf == "structure" and kg == "closed":
        return points_map(X, Z, {z: Z.labels[0] for z in X.labels})
    if kf == "open" and kg == "open":
        return CHMap("open", X, Z)
    if kf == "open" and kg == "closed":
        return CHMap("closed", X, Z)
    if kf == "closed" and kg == "points" and g.is_closed_immersion and all(
            g.data[x] == x for x in X.labels):
        return CHMap("closed", X, Z)
    if kf in ("affine", "poly") and kg in ("affine", "poly"):
        B = X.base
        gf = f.data if kf == "poly" else (f.data[1], f.data[0])
        gg = g.data if kg == "poly" else (g.data[1], g.data[0])
        return poly_map(X, P.compose(B, gf, gg))
    return CHMap("chain", X, Z, (g, f))


def cartesian_over_points(Z: Scheme, X: Scheme, L: Field):
    """Preimage of closed points Z of X in X_L: (Z', v: Z' -> Z, g: Z' -> X_L)."""
    XL = X.base_change(L)
    pts, below = [], {}
    for z in Z.labels:
        for u, _, _ in places_over(z, L):
            pts.append(u)
            below[u] = z
    Zp = closed_points_scheme(XL, pts)
    return Zp, CHMap("points", Zp, Z, {u: below[u] for u in Zp.labels}), closed_immersion(Zp, XL)


def point_base_change(Z: Scheme, n: int):
    """Z_L for L of degree n over the base: (Z_L, Z_L -> Z, L)."""
    F = Z.base
    p = F.characteristic
    L = finite_field(p, F.degree * n)
    degrees, mapping = {}, {}
    for lab, k in zip(Z.labels, Z.factors):
        d = k.degree // F.degree
        for i in range(math.gcd(d, n)):
            new = f"{lab}.{i}"
            degrees[new] = F.degree * math.lcm(d, n)
            mapping[new] = lab
    ZL = Scheme("point", L, tuple(finite_field(p, degrees[l]) for l in degrees), tuple(degrees))
    return ZL, CHMap("points", ZL, Z, mapping), L


# ===========================================================================
# Milnor-Witt instance on finite etale schemes
# ===========================================================================


@dataclass(frozen=True)
class CorrMW:
    source: EtaleScheme
    target: EtaleScheme
    values: tuple  # ((point of source x target, Twisted0), ...)

    @property
    def scheme(self):
        return self.source * self.target

    @classmethod
    def make(cls, X, Y, values: dict):
        W = X * Y
        items = [(w, v) for w, v in values.items() if not v.form.is_zero()]
        items.sort(key=lambda kv: W.point_index(kv[0]))
        return cls(X, Y, tuple(items))

    def get(self, w):
        for p, v in self.values:
            if p == w:
                return v
        return None

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise SchemeMismatch("correspondences between different schemes")
        d = dict(self.values)
        for w, v in other.values:
            d[w] = d[w] + v if w in d else v
        return CorrMW.make(self.source, self.target, d)

    def to_expr(self):
        W = self.scheme
        body = []
        for w, v in self.values:
            K = W.residue_field(w)
            roots = " ".join(K.fmt(r) for r in w.roots)
            body.append(f"(at (pt {' '.join(map(str, w.choice))} :roots ({roots})) {v.form.to_expr()})")
        return f"(corr-mw {self.source.to_expr()} {self.target.to_expr()}" + "".join(" " + b for b in body) + ")"


def corr_eq(a: CorrMW, b: CorrMW) -> bool:
    if (a.source, a.target) != (b.source, b.target):
        return False
    pts = {w for w, _ in a.values} | {w for w, _ in b.values}
    for w in pts:
        x, y = a.get(w), b.get(w)
        fx = x.form if x else None
        fy = y.form if y else None
        if fx is None:
            if not fy.is_zero():
                return False
        elif fy is None:
            if not fx.is_zero():
                return False
        elif fx != fy:
            return False
    return True


@dataclass(frozen=True)
class CorrCH:
    """Cycle correspondences between zero-dimensional schemes: an integer
    at each point of X x Y."""
    source: EtaleScheme
    target: EtaleScheme
    values: tuple  # ((point, n), ...)

    @classmethod
    def make(cls, X, Y, values: dict):
        W = X * Y
        items = sorted(((w, n) for w, n in values.items() if n), key=lambda kv: W.point_index(kv[0]))
        return cls(X, Y, tuple(items))

    def get(self, w):
        return dict(self.values).get(w, 0)

    def degree(self):
        """Total degree over the source when the source is a single point."""
        W = self.source * self.target
        (x,) = self.source.points
        return sum(n * W.residue_field(w).degree // self.source.residue_field(x).degree for w, n in self.values)


def ch_correspondence_degree(X: EtaleScheme, m: int) -> CorrCH:
    """m times the diagonal."""
    return CorrCH.make(X, X, {w: m for w, v in identity_corr(X).values})


def compose_ch(alpha: CorrCH, beta: CorrCH) -> CorrCH:
    if alpha.target != beta.source:
        raise SchemeMismatch("the middle schemes differ")
    X, Y, Z = alpha.source, alpha.target, beta.target
    nx, ny, nz = len(X.atoms), len(Y.atoms), len(Z.atoms)
    W = X * Y * Z
    p12 = projection(W, range(nx + ny), X * Y)
    p23 = projection(W, range(nx, nx + ny + nz), Y * Z)
    p13 = projection(W, list(range(nx)) + list(range(nx + ny, nx + ny + nz)), X * Z)
    out = {}
    for w in W.points:
        a = alpha.get(p12.image(w)[0])
        b = beta.get(p23.image(w)[0]) if a else 0
        if a and b:
            v3, _ = p13.image(w)
            out[v3] = out.get(v3, 0) + a * b * (w.degree // v3.degree)
    return CorrCH.make(X, Z, out)


def _is_zero_dim(*schemes):
    return all(isinstance(s, EtaleScheme) for s in schemes)


def compose(alpha: CorrMW, beta: CorrMW) -> CorrMW:
    """beta o alpha for alpha in Cor(X, Y), beta in Cor(Y, Z)."""
    if not (isinstance(alpha, CorrMW) and isinstance(beta, CorrMW)):
        raise UnsupportedCompositionCase("composition is implemented for finite etale schemes")
    if alpha.target != beta.source:
        raise SchemeMismatch("the middle schemes differ")
    X, Y, Z = alpha.source, alpha.target, beta.target
    nx, ny, nz = len(X.atoms), len(Y.atoms), len(Z.atoms)
    W = X * Y * Z
    p12 = projection(W, range(nx + ny), X * Y)
    p23 = projection(W, range(nx, nx + ny + nz), Y * Z)
    p13 = projection(W, list(range(nx)) + list(range(nx + ny, nx + ny + nz)), X * Z)
    XZ = X * Z
    out = {}
    for w in W.points:
        v1, psi1 = p12.image(w)
        a = alpha.get(v1)
        if a is None:
            continue
        v2, psi2 = p23.image(w)
        b = beta.get(v2)
        if b is None:
            continue
        K = W.residue_field(w)
        c = pull_class(a, K, psi1) * pull_class(b, K, psi2)
        v3, psi3 = p13.image(w)
        pushed = push_class(c, XZ.residue_field(v3), psi3)
        out[v3] = out[v3] + pushed if v3 in out else pushed
    return CorrMW.make(X, Z, out)


def graph(f: EtaleMap) -> CorrMW:
    """gamma(f): the class 1 on the graph of f."""
    X, Y = f.source, f.target
    XY = X * Y
    out = {}
    for x in X.points:
        y, psi = f.image(x)
        K = X.residue_field(x)
        w, _ = XY.locate(x.choice + y.choice, x.roots + tuple(psi(r) for r in y.roots), K,
                         structure_image(X.base, K))
        out[w] = Twisted0(GWForm.one(XY.residue_field(w)))
    return CorrMW.make(X, Y, out)


def identity_corr(X: EtaleScheme) -> CorrMW:
    return graph(etale_identity(X))


def transpose(alpha: CorrMW) -> CorrMW:
    """The same classes read on Y x X (valid for finite etale X and Y)."""
    X, Y = alpha.source, alpha.target
    nx = len(X.atoms)
    swap = projection(Y * X, list(range(len(Y.atoms), len(Y.atoms) + nx)) + list(range(len(Y.atoms))), X * Y)
    out = {}
    for w in (Y * X).points:
        v, psi = swap.image(w)
        a = alpha.get(v)
        if a is not None:
            out[w] = pull_class(a, (Y * X).residue_field(w), psi)
    return CorrMW.make(Y, X, out)


def exterior(f1: CorrMW, f2: CorrMW) -> CorrMW:
    """f1 x f2 in Cor(X1 x X2, Y1 x Y2)."""
    if not _is_zero_dim(f1.source, f1.target, f2.source, f2.target):
        raise UnsupportedSchemes("exterior products need zero-dimensional schemes")
    X1, Y1, X2, Y2 = f1.source, f1.target, f2.source, f2.target
    a, b, c, d = (len(s.atoms) for s in (X1, X2, Y1, Y2))
    S = (X1 * X2) * (Y1 * Y2)
    q1 = projection(S, list(range(a)) + list(range(a + b, a + b + c)), X1 * Y1)
    q2 = projection(S, list(range(a, a + b)) + list(range(a + b + c, a + b + c + d)), X2 * Y2)
    out = {}
    for w in S.points:
        v1, psi1 = q1.image(w)
        v2, psi2 = q2.image(w)
        s1, s2 = f1.get(v1), f2.get(v2)
        if s1 is None or s2 is None:
            continue
        K = S.residue_field(w)
        out[w] = pull_class(s1, K, psi1) * pull_class(s2, K, psi2)
    return CorrMW.make(X1 * X2, Y1 * Y2, out)


def base_change_scheme(X: EtaleScheme, E: Field):
    """X_E together with, for each new atom factor, its parent factor index."""
    F = X.base
    if E.characteristic != F.characteristic or E.degree % F.degree:
        raise UnsupportedExtension(f"{E} is not an extension of {F}")
    iota = structure_map(F, E)
    atoms, parents = [], []
    for atom in X.atoms:
        facs = []
        for i, f in enumerate(atom):
            for h, _ in factor(E, tuple(iota(c) for c in f))[1]:
                facs.append((h, i))
        facs.sort(key=lambda hi: (len(hi[0]), tuple(E.sort_key(c) for c in reversed(hi[0]))))
        atoms.append(tuple(h for h, _ in facs))
        parents.append(tuple(i for _, i in facs))
    return EtaleScheme(E, tuple(atoms), X.names), tuple(parents)


def base_change_corr(alpha: CorrMW, E: Field) -> CorrMW:
    """phi^f along Spec E -> Spec F."""
    X, Y = alpha.source, alpha.target
    F = X.base
    XE, px = base_change_scheme(X, E)
    YE, py = base_change_scheme(Y, E)
    parents = px + py
    W, WE = X * Y, XE * YE
    f_in_e = structure_image(F, E)
    out = {}
    for w in WE.points:
        K = WE.residue_field(w)
        choice = tuple(parents[k][i] for k, i in enumerate(w.choice))
        base_image = None if f_in_e is None else structure_map(E, K)(f_in_e)
        v, psi = W.locate(choice, w.roots, K, base_image)
        a = alpha.get(v)
        if a is not None:
            out[w] = pull_class(a, K, psi)
    return CorrMW.make(XE, YE, out)


def corr_from_forms(X: EtaleScheme, Y: EtaleScheme, forms: dict) -> CorrMW:
    return CorrMW.make(X, Y, {w: Twisted0(g) for w, g in forms.items()})


def point_classes_product(s1: dict, s2: dict) -> dict:
    """Pointwise product of twisted classes on one zero-dimensional scheme."""
    return {w: s1[w] * s2[w] for w in s1 if w in s2}


def commutativity(s: dict, labels) -> dict:
    """c(v1, v2): reorder the twist lines of every value."""
    return {w: v.reorder(labels) for w, v in s.items()}
