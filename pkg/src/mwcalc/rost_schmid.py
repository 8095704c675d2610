"""Twisted Rost-Schmid complexes on points and rational curves.

Conventions
-----------
* A closed point z of a curve is a ``Place`` of F(t).  Its line
  Lambda*_z = (m_z/m_z^2)^dual carries the canonical basis pi^dual, where
  pi is the monic generator at finite places and ``sign/t`` at infinity
  (``sign`` is the infinity convention flag, default +1).
* A twist on a curve is a tuple of ``Line`` objects.  Each line has a
  reference basis at the generic point and a local generator at every
  closed point, expressed as a rational multiple of the reference basis.
  Elements at closed points are always stored in the local generators.
* Elements at a point are ``TwistedMW`` values whose twist lists the lines
  in order; Koszul signs are applied whenever lines are reordered.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import places as PL
from . import poly as P
from .errors import (UNKNOWN, ImproperIntersection, NotFiniteOverTarget, UnsupportedBase,
                     UnsupportedMorphism, UnsupportedSchemes)
from .factor import factor
from .fields import ExtensionField, Field, FunctionField, PrimeField
from .gw import GWForm, signed_disc, transfer_along
from .mwk import (MWElement, TwistedMW, TwistFactor, gw_image, milnor_degree1, mw_eq, mw_reduce,
                  mw_transfer, mw_transfer_along, residue, twisted_eq, twisted_residue, witt_image)
from .snf import ChainGroup, FPComplex

GENERIC = "generic"

# ---------------------------------------------------------------------------
# Schemes
# ---------------------------------------------------------------------------

_CURVES = ("affine-line", "gm", "proj-line")


@dataclass(frozen=True)
class Scheme:
    kind: str  # "point" or one of _CURVES
    base: Field
    factors: tuple = ()  # residue fields of the components of a point scheme
    labels: tuple = ()  # names of those components (indices by default)

    def __post_init__(self):
        if self.kind not in ("point",) + _CURVES:
            raise UnsupportedSchemes(f"unknown scheme kind {self.kind!r}")
        if self.kind == "point" and not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.factors))))

    @property
    def dim(self):
        return 0 if self.kind == "point" else 1

    @property
    def function_field(self):
        if self.dim == 0:
            raise UnsupportedSchemes("a point scheme has no function field")
        return _function_field(self.base)

    def contains(self, place) -> bool:
        if place.is_infinite:
            return self.kind == "proj-line"
        if self.kind == "gm":
            return place.poly != (self.base.zero, self.base.one)
        return True

    def points(self):
        return self.labels

    def residue_field_at(self, pt):
        if self.kind == "point":
            return self.factors[self.labels.index(pt)]
        if pt == GENERIC:
            return self.function_field
        return PL.residue_field(pt)

    def base_change(self, L: Field) -> "Scheme":
        if self.kind == "point":
            raise UnsupportedSchemes("base change of point schemes lives in corr")
        return Scheme(self.kind, L)

    def to_expr(self):
        if self.kind == "point":
            return "(point " + " ".join(k.desc() for k in self.factors) + ")"
        return f"({self.kind} {self.base.desc()})"

    def __str__(self):
        return self.to_expr()


@functools.lru_cache(maxsize=None)
def _function_field(F):
    return FunctionField(F)


def point(F: Field, *fields, labels=()) -> Scheme:
    return Scheme("point", F, tuple(fields) or (F,), tuple(labels))


def affine_line(F):
    return Scheme("affine-line", F)


def gm(F):
    return Scheme("gm", F)


def proj_line(F):
    return Scheme("proj-line", F)


# ---------------------------------------------------------------------------
# Lines and local generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Line:
    """A rank-one twist.

    kind "O": O(n * infinity) with reference section 1;
    kind "omega": the canonical bundle with reference basis dt;
    kind "trivial": a trivial line, local generator = reference everywhere.
    """
    label: str
    kind: str = "trivial"
    n: int = 0
    parity: int = 1

    def local_generator(self, place, sign=1):
        K = place.field
        if not place.is_infinite or self.kind == "trivial":
            return K.one
        pi = PL.canonical_uniformizer(place, sign)
        if self.kind == "O":
            return K.pow(pi, -self.n)
        if self.kind == "omega":
            # d(sign/t) = -sign/t^2 dt
            B = K.base
            return K.make((B.from_int(-sign),), P.pow_(B, P.x_poly(B), 2))
        raise UnsupportedSchemes(f"unknown line kind {self.kind!r}")


def O(n, label=None):
    return Line(label or f"O({n})", "O", n)


def omega(label="omega"):
    return Line(label, "omega")


def _generator_lookup(lines, sign, extra=None):
    by_label = {l.label: l for l in lines}

    def lookup(label, place):
        if extra and label in extra:
            return extra[label](place)
        line = by_label.get(label)
        if line is None:
            return place.field.one
        return line.local_generator(place, sign)

    return lookup


def lambda_label(place):
    return f"Lambda@{place}"


# ---------------------------------------------------------------------------
# Elements of the complex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RSElement:
    scheme: Scheme
    codim: int
    components: tuple  # ((point, TwistedMW), ...)
    lines: tuple = ()  # the global twist v
    sign: int = 1  # infinity convention

    @classmethod
    def make(cls, scheme, codim, comps, lines=(), sign=1):
        items = []
        for pt, val in (comps.items() if isinstance(comps, dict) else comps):
            if pt != GENERIC and not isinstance(pt, PL.Place) and scheme.kind != "point":
                raise TypeError(f"bad point {pt!r}")
            if isinstance(pt, PL.Place) and not scheme.contains(pt):
                raise ValueError(f"{pt} is not a point of {scheme}")
            if _is_zero(val):
                continue
            items.append((pt, val))
        items.sort(key=lambda kv: _point_key(kv[0]))
        return cls(scheme, codim, tuple(items), tuple(lines), sign)

    @classmethod
    def generic(cls, scheme, element: MWElement, lines=(), scales=None, sign=1):
        """Codimension-0 element ``element (x) basis`` with the given line
        bases (``scales`` map label -> rational function; default 1)."""
        K = scheme.function_field
        scales = scales or {}
        factors = tuple(TwistFactor(l.label, l.parity, K.coerce(scales.get(l.label, K.one)))
                        for l in lines)
        return cls.make(scheme, 0, [(GENERIC, TwistedMW(element, factors))], lines, sign)

    def component(self, pt):
        for p, v in self.components:
            if p == pt:
                return v
        return None

    def support(self):
        return [p for p, _ in self.components]

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        if (self.scheme, self.codim) != (other.scheme, other.codim):
            raise ValueError("elements live in different groups")
        comps = dict(self.components)
        for p, v in other.components:
            if p in comps:
                w = v.reorder(comps[p].labels()).normalized()
                a = comps[p].normalized()
                comps[p] = TwistedMW(mw_reduce(a.element + w.element), a.twist)
            else:
                comps[p] = v
        return RSElement.make(self.scheme, self.codim, comps, self.lines, self.sign)

    def to_expr(self):
        body = " ".join(f"(at {_point_str(p)} {v.to_expr()})" for p, v in self.components)
        return f"(rs-element {self.scheme.to_expr()} :codim {self.codim}" + (f" {body})" if body else ")")


def _point_key(pt):
    if pt == GENERIC:
        return (0,)
    if isinstance(pt, PL.Place):
        return (1,) + pt.sort_key()
    return (2, str(pt))


def _point_str(pt):
    return "generic" if pt == GENERIC else str(pt)


def _is_zero(val: TwistedMW):
    return val.element.is_zero() or mw_eq(val.element, MWElement.zero(val.field)) is True


def rs_eq(a: RSElement, b: RSElement):
    """Component-wise equality (True / False / UNKNOWN)."""
    if a.scheme != b.scheme or a.codim != b.codim:
        return False
    pts = set(a.support()) | set(b.support())
    verdict = True
    for p in pts:
        x, y = a.component(p), b.component(p)
        if x is None or y is None:
            v = x if x is not None else y
            ok = mw_eq(v.element, MWElement.zero(v.field))
        else:
            ok = twisted_eq(x, y)
        if ok is False:
            return False
        if ok is UNKNOWN:
            verdict = UNKNOWN
    return verdict


# ---------------------------------------------------------------------------
# Differential
# ---------------------------------------------------------------------------


def candidate_places(X: Scheme, val: TwistedMW):
    """Closed points where a generic-point element may have a residue."""
    K = X.function_field
    found = set()
    for (m, syms), _ in val.element.terms:
        for s in syms:
            found.update(PL.support(K, s))
    for f in val.twist:
        if f.scale != K.one:
            found.update(PL.support(K, f.scale))
    if X.kind == "proj-line":
        found.add(PL.infinite_place(K))
    return sorted((p for p in found if X.contains(p)), key=PL.Place.sort_key)


def residue_at(X: Scheme, val: TwistedMW, place, lines=(), sign=1, extra=None) -> TwistedMW:
    """The twisted residue at ``place`` in the canonical basis of Lambda*."""
    K = X.function_field
    pi = PL.canonical_uniformizer(place, sign)
    out = twisted_residue(val, place, uniformizer=pi,
                          local_generator=_generator_lookup(lines, sign, extra),
                          label=lambda_label(place), normalize=False)
    # the basis token of the new line is pi^dual: declare it canonical
    head = TwistFactor(out.twist[0].label, 1, out.field.one)
    return TwistedMW(out.element, (head,) + out.twist[1:])


def differential(x: RSElement) -> RSElement:
    X = x.scheme
    if X.dim != 1 or x.codim != 0:
        return RSElement.make(X, x.codim + 1, [], x.lines, x.sign)
    comps = {}
    for pt, val in x.components:
        for z in candidate_places(X, val):
            r = residue_at(X, val, z, x.lines, x.sign)
            if not _is_zero(r):
                comps[z] = r
    return RSElement.make(X, 1, comps, x.lines, x.sign)


def d_squared_zero(x: RSElement) -> bool:
    """On curves the composite lands in codimension 2, which is zero; the
    substantive content is finite support plus reciprocity on P^1."""
    if x.codim != 0:
        return True
    differential(x)  # raises if a residue is undefined
    if x.scheme.kind != "proj-line":
        return True
    total = reciprocity_sum(x)
    return mw_eq(total, MWElement.zero(total.field)) is True


# ---------------------------------------------------------------------------
# Push-forwards
# ---------------------------------------------------------------------------


def _derivative_weight(place):
    """P'(theta) in k(z) for a finite place; 1 at infinity."""
    k = PL.residue_field(place)
    if place.is_infinite:
        return k.one
    B = place.field.base
    d = P.deriv(B, place.poly)
    if isinstance(k, ExtensionField):
        return k.from_poly(d)
    return P.evaluate(B, d, B.neg(place.poly[0]))


def _transfer_to_base(x: MWElement, place) -> MWElement:
    k = x.field
    if not (isinstance(k, ExtensionField) and not place.is_infinite and place.degree > 1):
        return x
    out = MWElement.zero(k.base)
    low = [d for d in x.degrees() if d <= 0]
    if low:
        out = mw_transfer(sum((x.part(d) for d in low[1:]), x.part(low[0])), k)
    if 1 in x.degrees():
        if not k.is_finite:
            raise UnsupportedBase("degree-one transfers need a finite residue field")
        # K^MW_1 = K^M_1 = k^* over finite fields, where the transfer is the norm
        a = milnor_degree1(x.part(1))
        norm = k.pow(a, (k.order - 1) // (k.base.order - 1))
        out = out + MWElement.sym(k.base, norm[0])
    # K^MW_n of a finite field vanishes for n >= 2
    return mw_reduce(out)


def pushforward_to_point(y: RSElement, omega_label="omega") -> RSElement:
    """p_* for the structure map of a curve to Spec F (smooth, relative
    dimension one) on codimension-1 elements twisted by omega + v.  The
    Lambda* line is cancelled against omega: at a finite place pi^dual (x) dt
    equals <P'(theta)> times the canonical pairing."""
    X = y.scheme
    if X.dim != 1 or y.codim != 1:
        raise UnsupportedMorphism("push-forward to the point needs a codimension-1 element on a curve")
    F = X.base
    total = None
    rest_labels = None
    for z, val in y.components:
        lam = lambda_label(z)
        labels = val.labels()
        if omega_label not in labels:
            raise UnsupportedMorphism("the twist must contain the canonical bundle")
        others = tuple(l for l in labels if l not in (lam, omega_label))
        v = val.reorder((lam, omega_label) + others).normalized()
        elem = v.element
        if not z.is_infinite:
            w = _derivative_weight(z)
            if w != elem.field.one:
                elem = mw_reduce(elem * MWElement.bracket(elem.field, w))
        piece = _transfer_to_base(elem, z)
        total = piece if total is None else total + piece
        rest_labels = v.twist[2:]
    if total is None:
        return RSElement.make(point(F), 0, [], (), y.sign)
    twist = tuple(TwistFactor(f.label, f.parity, F.one) for f in rest_labels)
    lines = tuple(l for l in y.lines if l.label != omega_label)
    return RSElement.make(point(F), 0, [(0, TwistedMW(mw_reduce(total), twist))], lines, y.sign)


def reciprocity_sum(x: RSElement) -> MWElement:
    """Transfer-weighted sum of all residues of a generic element on P^1,
    viewed in the canonical twist (an omega line with basis dt is added if
    the element has none)."""
    X = x.scheme
    if X.kind != "proj-line":
        raise UnsupportedSchemes("reciprocity is stated on the projective line")
    if x.is_zero():
        return MWElement.zero(X.base)
    if not any(l.kind == "omega" for l in x.lines):
        (pt, val), = x.components
        K = X.function_field
        val = TwistedMW(val.element, (TwistFactor("omega", 1, K.one),) + val.twist)
        x = RSElement.make(X, 0, [(pt, val)], (omega(),) + x.lines, x.sign)
    label = next(l.label for l in x.lines if l.kind == "omega")
    pushed = pushforward_to_point(differential(x), label)
    F = X.base
    if pushed.is_zero():
        return MWElement.zero(F)
    return pushed.components[0][1].element


def pushforward_closed(x: RSElement, X: Scheme, normal_label="N") -> RSElement:
    """i_* for the inclusion of closed points of a curve (an isomorphism):
    the normal line N_{z/X} becomes Lambda*_z with the same basis."""
    if x.scheme.kind != "point" or x.codim != 0:
        raise UnsupportedMorphism("closed push-forward expects classes on a point scheme")
    comps = {}
    for z, val in x.components:
        if not isinstance(z, PL.Place) or not X.contains(z):
            raise UnsupportedMorphism(f"{z} is not a closed point of {X}")
        tw = list(val.twist)
        idx = next((i for i, f in enumerate(tw) if f.label == normal_label), None)
        if idx is None:
            raise UnsupportedMorphism("the class must carry the normal line")
        tw[idx] = TwistFactor(lambda_label(z), tw[idx].parity, tw[idx].scale)
        v = TwistedMW(val.element, tuple(tw))
        order = (lambda_label(z),) + tuple(f.label for f in tw if f.label != lambda_label(z))
        comps[z] = v.reorder(order)
    return RSElement.make(X, 1, comps, x.lines, x.sign)


def closed_point_class(X: Scheme, z, element: MWElement, lines=(), normal_label="N") -> RSElement:
    """A class on the closed point z, twisted by its normal line (canonical basis)."""
    k = PL.residue_field(z)
    tw = (TwistFactor(normal_label, 1, k.one),) + tuple(TwistFactor(l.label, l.parity, k.one) for l in lines)
    pt = Scheme("point", X.base, (k,), (z,))
    return RSElement.make(pt, 0, [(z, TwistedMW(element, tw))], lines)


# ---------------------------------------------------------------------------
# Base change A^1_L -> A^1_F and exterior products with point classes
# ---------------------------------------------------------------------------


def _finite_elements(k):
    if isinstance(k, PrimeField):
        return [k.from_int(i) for i in range(k.p)]
    return list(k.elements())


def field_hom(src: Field, dst: Field, image_of_generator=None):
    """Raw-value map src -> dst for src a subfield (or a simple extension
    whose generator maps to ``image_of_generator``)."""
    if src == dst:
        return lambda a: a
    if isinstance(src, ExtensionField) and image_of_generator is not None:
        base_map = field_hom(src.base, dst)

        def phi(a):
            acc = dst.zero
            for c in reversed(P.trim(src.base, a)):
                acc = dst.add(dst.mul(acc, image_of_generator), base_map(c))
            return acc

        return phi
    return lambda a: dst.embed_from(src, a)


def places_over(z, L: Field):
    """Places of L(t) above a place z of F(t), each with the embedding
    k(z) -> k(u) and the unit w = P/Q reduced at u (P, Q canonical)."""
    KF = z.field
    KL = _function_field(L)
    if z.is_infinite:
        u = PL.infinite_place(KL)
        return [(u, field_hom(KF.base, L), L.one)]
    F = KF.base
    Pl = tuple(L.embed_from(F, c) for c in z.poly)
    out = []
    for q, e in factor(L, Pl)[1]:
        if e != 1:
            raise NotFiniteOverTarget("inseparable splitting")
        u = PL.Place(KL, q)
        ku = PL.residue_field(u)
        theta = ku.from_poly(P.x_poly(L)) if isinstance(ku, ExtensionField) and ku.base == L \
            else L.neg(q[0])
        kz = PL.residue_field(z)
        phi = field_hom(kz, ku, theta if isinstance(kz, ExtensionField) else None)
        w = KL.div(KL.make(Pl), KL.make(q))
        out.append((u, phi, PL.reduce(u, w)))
    return out


def _map_element(x: MWElement, target: Field, phi):
    return x.map_symbols(target, phi)


def base_change_generic(val: TwistedMW, L: Field) -> TwistedMW:
    KF = val.field
    KL = _function_field(L)
    phi = lambda a: KL.embed_from(KF, a)
    elem = _map_element(val.element, KL, phi)
    return TwistedMW(elem, tuple(TwistFactor(f.label, f.parity, phi(f.scale)) for f in val.twist))


def exterior_point(x: RSElement, beta: TwistedMW, beta_lambda=(), side="right") -> RSElement:
    """x (on a curve over F) times a class beta at a point with residue field
    L (with Lambda-lines ``beta_lambda``), as an element on the curve over L.

    Twist order follows the exterior product: Lambda lines of the first
    factor, Lambda lines of the second, then the remaining lines of each.
    """
    X = x.scheme
    L = beta.field
    XL = X.base_change(L)
    KL = XL.function_field
    comps = {}
    for pt, val in x.components:
        if pt == GENERIC:
            targets = [(GENERIC, KL, base_change_generic(val, L))]
        else:
            targets = []
            for u, phi, wbar in places_over(pt, L):
                ku = PL.residue_field(u)
                tw = []
                for f in val.twist:
                    scale = phi(f.scale)
                    if f.label == lambda_label(pt):
                        # P^dual = wbar^{-1} Q^dual
                        tw.append(TwistFactor(lambda_label(u), 1, ku.mul(scale, ku.inv(wbar))))
                    else:
                        tw.append(TwistFactor(f.label, f.parity, scale))
                elem = _map_element(val.element, ku, phi)
                targets.append((u, ku, TwistedMW(elem, tuple(tw)).normalized()))
        for u, k, v in targets:
            psi = field_hom(L, k) if not isinstance(k, FunctionField) else (lambda a, KL=KL: KL.embed_from(L, a))
            b_elem = _map_element(beta.element, k, psi)
            b = TwistedMW(b_elem, tuple(TwistFactor(f.label, f.parity, psi(f.scale)) for f in beta.twist))
            comps[u] = _product(v, b, side, pt, beta_lambda, u)
    lines = tuple(x.lines) + tuple(Line(f.label, "trivial", 0, f.parity)
                                   for f in beta.twist if f.label not in beta_lambda)
    return RSElement.make(XL, x.codim + len(beta_lambda), comps, lines, x.sign)


def _product(a: TwistedMW, b: TwistedMW, side, pt, beta_lambda, u):
    """a x b (side='right') or b x a (side='left') with Lambda lines first."""
    lam_a = tuple(f.label for f in a.twist if f.label.startswith("Lambda@"))
    lam_b = tuple(l for l in beta_lambda)
    rest_a = tuple(f.label for f in a.twist if f.label not in lam_a)
    rest_b = tuple(f.label for f in b.twist if f.label not in lam_b)
    if side == "right":
        raw = TwistedMW(mw_reduce(a.element * b.element), a.twist + b.twist)
        return raw.reorder(lam_a + lam_b + rest_a + rest_b)
    raw = TwistedMW(mw_reduce(b.element * a.element), b.twist + a.twist)
    return raw.reorder(lam_b + lam_a + rest_b + rest_a)


def exterior_points(s1: TwistedMW, lam1, s2: TwistedMW, lam2) -> TwistedMW:
    """Exterior product of two classes over the same field: c(v1, Lambda2)
    applied to s1 (x) s2."""
    raw = TwistedMW(mw_reduce(s1.element * s2.element), s1.twist + s2.twist)
    rest1 = tuple(f.label for f in s1.twist if f.label not in lam1)
    rest2 = tuple(f.label for f in s2.twist if f.label not in lam2)
    return raw.reorder(tuple(lam1) + tuple(lam2) + rest1 + rest2)


def _trace_function_field(KL: FunctionField, KF: FunctionField):
    """Tr_{L(t)/F(t)} on raw values, via Frobenius on coefficients."""
    L, F = KL.base, KF.base
    e = L.degree // F.degree if hasattr(L, "degree") else 1
    q = F.order

    def frob(a, i):
        num, den = a
        n2 = tuple(L.pow(c, q ** i) for c in num)
        d2 = tuple(L.pow(c, q ** i) for c in den)
        return KL.make(n2, d2)

    table = {}

    def down(c):
        if c not in table:
            for b in _finite_elements(F):
                table[L.embed_from(F, b)] = b
        return table[c]

    def trace(a):
        acc = KL.zero
        for i in range(e):
            acc = KL.add(acc, frob(a, i))
        num, den = acc
        return KF.make(tuple(down(c) for c in num), tuple(down(c) for c in den))

    return trace


def _trace_finite(ku: Field, kz: Field, phi):
    """Tr_{k(u)/k(z)} for finite fields with embedding phi, plus a basis."""
    qz = kz.order
    deg = 1
    while qz ** deg < ku.order:
        deg += 1
    inverse = {phi(b): b for b in _finite_elements(kz)}

    def trace(a):
        acc = ku.zero
        x = a
        for _ in range(deg):
            acc = ku.add(acc, x)
            x = ku.pow(x, qz)
        return inverse[acc]

    g, _ = _primitive_data(ku)
    basis = [ku.one]
    for _ in range(deg - 1):
        basis.append(ku.mul(basis[-1], g))
    return trace, basis


def pushforward_base_change(y: RSElement, F: Field) -> RSElement:
    """f_* along the finite etale map X_L -> X_F (degree <= 0 classes)."""
    XL = y.scheme
    L = XL.base
    X = XL.base_change(F)
    KF, KL = X.function_field, XL.function_field
    if not (L.is_finite and F.is_finite):
        raise UnsupportedBase("finite etale push-forward is implemented over finite fields")
    comps = {}
    for pt, val in y.components:
        if pt == GENERIC:
            trace = _trace_function_field(KL, KF)
            g = L.generator if isinstance(L, ExtensionField) and L.base == F else None
            basis = [KL.one]
            if g is not None:
                for _ in range(L.n - 1):
                    basis.append(KL.mul(basis[-1], KL.constant(g)))
            v = val.normalized()
            elem = mw_transfer_along(v.element, trace, basis, KF)
            comps[GENERIC] = _accumulate(comps.get(GENERIC), TwistedMW(
                elem, tuple(TwistFactor(f.label, f.parity, KF.one) for f in v.twist)))
            continue
        z = place_below(pt, KF)
        for u, phi, wbar in places_over(z, L):
            if u != pt:
                continue
            ku = PL.residue_field(u)
            kz = PL.residue_field(z)
            v = val.normalized()
            tw = []
            for f in v.twist:
                if f.label == lambda_label(u):
                    # Q^dual = wbar P^dual
                    tw.append(TwistFactor(lambda_label(z), 1, wbar))
                else:
                    tw.append(TwistFactor(f.label, f.parity, f.scale))
            v = TwistedMW(v.element, tuple(tw)).normalized()
            trace, basis = _trace_finite(ku, kz, phi)
            elem = mw_transfer_along(v.element, trace, basis, kz)
            comps[z] = _accumulate(comps.get(z), TwistedMW(
                elem, tuple(TwistFactor(f.label, f.parity, kz.one) for f in v.twist)))
    return RSElement.make(X, y.codim, comps, y.lines, y.sign)


def _accumulate(a, b):
    if a is None:
        return b
    b = b.reorder(a.labels())
    return TwistedMW(mw_reduce(a.element + b.element), a.twist)


def place_below(u, KF):
    """The place of F(t) under a place u of L(t): the product of X - theta^(q^i)
    over the Frobenius orbit of a root theta."""
    if u.is_infinite:
        return PL.infinite_place(KF)
    F = KF.base
    L = u.field.base
    ku = PL.residue_field(u)
    theta = ku.generator if ku != L else L.neg(u.poly[0])
    orbit = [theta]
    while True:
        nxt = ku.pow(orbit[-1], F.order)
        if nxt == theta:
            break
        orbit.append(nxt)
    f = (ku.one,)
    for r in orbit:
        f = P.mul(ku, f, (ku.neg(r), ku.one))
    down = {ku.embed_from(F, b): b for b in _finite_elements(F)}
    return PL.Place(KF, tuple(down[c] for c in P.trim(ku, f)))


# ---------------------------------------------------------------------------
# Divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    excluded: frozenset  # closed points not in the chart
    equation: object  # raw rational function


@dataclass(frozen=True)
class Divisor:
    scheme: Scheme
    charts: tuple
    smooth: bool = True
    label: str = "L(-D)"

    def __post_init__(self):
        X = self.scheme
        if X.dim != 1:
            raise UnsupportedSchemes("divisors live on curves")
        K = X.function_field
        common = None
        for c in self.charts:
            common = set(c.excluded) if common is None else common & set(c.excluded)
        if common and any(X.contains(p) for p in common):
            raise ValueError("charts do not cover the curve")
        for c in self.charts:
            for p in PL.support(K, c.equation):
                if X.contains(p) and p not in c.excluded and PL.valuation(K, c.equation, p) < 0:
                    raise ValueError("local equations must be regular on their chart")
        for a, b in itertools.combinations(self.charts, 2):
            q = K.div(a.equation, b.equation)
            for p in PL.support(K, q):
                if X.contains(p) and p not in a.excluded and p not in b.excluded:
                    raise ValueError("local equations differ by a non-unit on an overlap")
        if self.smooth:
            for z in self.support():
                if self.multiplicity(z) != 1:
                    raise ValueError("a smooth divisor must be reduced")

    def chart_at(self, z):
        for c in self.charts:
            if z not in c.excluded:
                return c
        raise ValueError(f"{z} is not covered")

    def charts_at(self, z):
        return [c for c in self.charts if z not in c.excluded]

    def multiplicity(self, z):
        return PL.valuation(self.scheme.function_field, self.chart_at(z).equation, z)

    def support(self):
        X = self.scheme
        K = X.function_field
        pts = set()
        for c in self.charts:
            for p in PL.support(K, c.equation):
                if X.contains(p) and p not in c.excluded and PL.valuation(K, c.equation, p) > 0:
                    pts.add(p)
        return sorted(pts, key=PL.Place.sort_key)

    def canonical_generator(self, z, sign=1):
        """pi_can^mult: the canonical local generator of L(-D) at z."""
        K = self.scheme.function_field
        return K.pow(PL.canonical_uniformizer(z, sign), self.multiplicity(z))

    def rescaled(self, units):
        """Replace each local equation f_i by u_i f_i (u_i units on the chart)."""
        charts = tuple(Chart(c.excluded, self.scheme.function_field.mul(c.equation, u))
                       for c, u in zip(self.charts, units))
        return Divisor(self.scheme, charts, self.smooth, self.label)

    def pullback(self, XL: Scheme) -> "Divisor":
        """p^*(D) along X_L -> X."""
        KL = XL.function_field
        K = self.scheme.function_field
        charts = []
        for c in self.charts:
            excl = set()
            for z in c.excluded:
                for u, _, _ in places_over(z, XL.base):
                    excl.add(u)
            charts.append(Chart(frozenset(excl), KL.embed_from(K, c.equation)))
        return Divisor(XL, tuple(charts), self.smooth, self.label)

    def to_expr(self):
        K = self.scheme.function_field
        parts = []
        for c in self.charts:
            ex = " ".join(str(p) for p in sorted(c.excluded, key=PL.Place.sort_key))
            parts.append(f"(chart (minus {ex}) {K.fmt(c.equation)})")
        return f"(divisor {self.scheme.to_expr()} " + " ".join(parts) + ")"


def divisor_of_zeros(X: Scheme, g) -> Divisor:
    """Zero locus of a polynomial in t (as a divisor on A^1, G_m or P^1)."""
    K = X.function_field
    g = K.coerce(g)
    if X.kind == "proj-line":
        zeros = frozenset(PL.support(K, g, include_infinity=False))
        inf = PL.infinite_place(K)
        charts = (Chart(frozenset({inf}), g), Chart(zeros, K.one))
    else:
        charts = (Chart(frozenset(), g),)
    num = g[0]
    smooth = all(e == 1 for _, e in factor(K.base, num)[1]) if len(num) > 1 else True
    return Divisor(X, charts, smooth)


def divisor_at_infinity(X: Scheme, sign=1) -> Divisor:
    K = X.function_field
    if X.kind != "proj-line":
        raise UnsupportedSchemes("infinity is a point of P^1 only")
    inf = PL.infinite_place(K)
    zero = PL.Place(K, (K.base.zero, K.base.one))
    return Divisor(X, (Chart(frozenset({inf}), K.one),
                       Chart(frozenset({zero}), PL.canonical_uniformizer(inf, sign))))


def intersect_divisor(D: Divisor, s: RSElement) -> RSElement:
    """D . s with values in the canonical local generator of L(-D)."""
    X = s.scheme
    if X != D.scheme:
        raise UnsupportedSchemes("divisor and element live on different schemes")
    supp = set(D.support())
    K = X.function_field
    comps = {}
    new_line = Line(D.label, "trivial")
    for pt, val in s.components:
        if pt != GENERIC:
            if pt in supp:
                raise ImproperIntersection(f"{pt} lies on the divisor")
            continue
        for z in supp:
            f = D.chart_at(z).equation
            # [f] s (x) f (x) v at the generic point, then the residue; the
            # local generator of L(-D) at z is the canonical pi^mult
            elem = mw_reduce(MWElement.sym(K, f) * val.element)
            tw = (TwistFactor(D.label, 1, f),) + val.twist
            extra = {D.label: (lambda place, z=z: D.canonical_generator(z, s.sign))}
            r = residue_at(X, TwistedMW(elem, tw), z, s.lines, s.sign, extra)
            if not _is_zero(r):
                comps[z] = r
    return RSElement.make(X, s.codim + 1, comps, (new_line,) + tuple(s.lines), s.sign)


def divisor_scheme(D: Divisor) -> Scheme:
    pts = D.support()
    return Scheme("point", D.scheme.base, tuple(PL.residue_field(z) for z in pts), tuple(pts))


def pullback_divisor(D: Divisor, s: RSElement) -> RSElement:
    """i^*(s) on |D|, computed through the canonical uniformizer: for a
    generic-point class the value at z is d_z([pi] s) with pi canonical."""
    if not D.smooth:
        raise ImproperIntersection("pull-back needs a smooth divisor")
    X = s.scheme
    K = X.function_field
    supp = D.support()
    comps = {}
    for pt, val in s.components:
        if pt != GENERIC:
            if pt in supp:
                raise ImproperIntersection(f"{pt} lies on the divisor")
            continue
        for z in supp:
            pi = PL.canonical_uniformizer(z, s.sign)
            elem = mw_reduce(MWElement.sym(K, pi) * val.element)
            r = residue_at(X, TwistedMW(elem, val.twist), z, s.lines, s.sign)
            rest = r.twist[1:]
            comps[z] = TwistedMW(r.element, rest)
    return RSElement.make(divisor_scheme(D), s.codim, comps, s.lines, s.sign)


def insert_normal_pair(y: RSElement, D: Divisor, normal_label="N") -> RSElement:
    """s(L(D)): v -> N_{D/X} + L(-D) + v with the dual canonical bases."""
    comps = {}
    for z, val in y.components:
        k = val.field
        tw = (TwistFactor(normal_label, 1, k.one), TwistFactor(D.label, 1, k.one)) + val.twist
        comps[z] = TwistedMW(val.element, tw)
    return RSElement.make(y.scheme, y.codim, comps, y.lines, y.sign)


# ---------------------------------------------------------------------------
# Finite models over F_p
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _primitive_data(k):
    elems = [a for a in _finite_elements(k) if a != k.zero]
    q1 = len(elems)
    for g in elems:
        log = {}
        x = k.one
        for i in range(q1):
            log[x] = i
            x = k.mul(x, g)
        if len(log) == q1:
            return g, log
    raise AssertionError("finite fields have primitive elements")


class KMWGroup:
    """K^MW_n of a finite field as Z^a + (+) Z/d with explicit generators."""

    def __init__(self, k: Field, n: int):
        if not k.is_finite:
            raise UnsupportedBase(f"no finite model over {k}")
        self.field = k
        self.n = n
        q = k.order
        one = MWElement.one(k)
        nu = k.nonresidue if hasattr(k, "nonresidue") else None
        if n >= 2:
            self.gens, self.orders = [], []
        elif n == 1:
            g, _ = _primitive_data(k)
            self.gens, self.orders = [MWElement.sym(k, g)], [q - 1]
        elif n == 0:
            self.gens = [one, MWElement.monomial(k, 1, (nu,))]
            self.orders = [0, 2]
        else:
            e = -n
            if q % 4 == 1:
                self.gens = [MWElement.eta(k, e), MWElement.monomial(k, e + 1, (nu,))]
                self.orders = [2, 2]
            else:
                self.gens, self.orders = [MWElement.eta(k, e)], [4]

    def coords(self, x: MWElement):
        k = self.field
        x = x.part(self.n)
        if self.n >= 2:
            return []
        if self.n == 1:
            _, log = _primitive_data(k)
            return [log[milnor_degree1(x)]]
        if self.n == 0:
            g = gw_image(x)
            return [g.rank, 0 if g.disc == k.one else 1]
        w = witt_image(x)
        bit = 0 if signed_disc(w) == k.one else 1
        if k.order % 4 == 1:
            return [w.rank % 2, bit]
        return [(w.rank % 2 + 2 * bit) % 4]

    def __len__(self):
        return len(self.gens)


def _lift_symbol(z, a):
    """Polynomial of degree < deg z representing a residue class."""
    K = z.field
    k = PL.residue_field(z)
    if isinstance(k, ExtensionField):
        return K.make(k.to_poly(a))
    return K.constant(a)


def _lift_element(z, x: MWElement) -> MWElement:
    K = z.field
    return x.map_symbols(K, lambda a: _lift_symbol(z, a))


@dataclass
class RSComplexFG:
    """Finite model of the Rost-Schmid complex of a point or a rational
    curve over F_p, truncated to closed points of degree <= max_degree."""
    scheme: Scheme
    m: int
    lines: tuple
    max_degree: int
    sign: int
    complex: FPComplex
    blocks: list = field(default_factory=list)  # per degree: list of (point, KMWGroup)
    lifts: dict = field(default_factory=dict)

    def cohomology(self):
        return self.complex.cohomology()

    def check(self):
        return self.complex.check()


def rs_complex(X: Scheme, m: int, lines=(), max_degree=1, sign=1) -> RSComplexFG:
    F = X.base
    if not isinstance(F, PrimeField):
        raise UnsupportedBase("finite models exist only over F_p")
    if X.kind == "point":
        groups = [KMWGroup(k, m) for k in X.factors]
        orders = [o for g in groups for o in g.orders]
        C0 = ChainGroup.cyclic_orders(orders)
        return RSComplexFG(X, m, tuple(lines), 0, sign, FPComplex([C0], []),
                           [list(zip(X.labels, groups))])
    K = X.function_field
    places = PL.places_up_to_degree(K, max_degree)
    const = KMWGroup(F, m)
    groups = {z: KMWGroup(PL.residue_field(z), m - 1) for z in places}
    lifts = {}
    for z in places:  # sorted by degree
        lifts[z] = []
        for g in groups[z].gens:
            y = mw_reduce(MWElement.sym(K, PL.canonical_uniformizer(z)) * _lift_element(z, g))
            y = _correct(y, z, lifts, groups, K)
            lifts[z].append(y)
    # C^0 generators: constants then lifts
    gens0 = [c.map_symbols(K, K.constant) for c in const.gens]
    owners0 = [("const", i) for i in range(len(const.gens))]
    for z in places:
        for i, y in enumerate(lifts[z]):
            gens0.append(y)
            owners0.append((z, i))
    n0 = len(gens0)
    rels0 = []
    for i, o in enumerate(const.orders):
        if o:
            v = [0] * n0
            v[i] = o
            rels0.append(v)
    spec = PL.Place(K, (F.zero, F.one))
    pi0 = PL.canonical_uniformizer(spec)
    col = len(const.gens)
    for z in places:
        for i, o in enumerate(groups[z].orders):
            if o:
                y = lifts[z][i] * o
                kappa = residue(mw_reduce(MWElement.sym(K, pi0) * y), spec, pi0)
                v = [0] * n0
                v[col + i] = o
                for j, c in enumerate(const.coords(kappa)):
                    v[j] -= c
                rels0.append(v)
        col += len(groups[z].gens)
    # C^1 blocks
    c1_points = [z for z in places if X.contains(z)]
    if X.kind == "proj-line":
        c1_points.append(PL.infinite_place(K))
    c1_groups = [(z, groups[z] if z in groups else KMWGroup(F, m - 1)) for z in c1_points]
    offsets = {}
    n1 = 0
    orders1 = []
    for z, g in c1_groups:
        offsets[z] = n1
        n1 += len(g)
        orders1 += g.orders
    C1 = ChainGroup.cyclic_orders(orders1)
    C0 = ChainGroup(n0, rels0)
    d = [[0] * n0 for _ in range(n1)]
    twist = tuple(TwistFactor(l.label, l.parity, K.one) for l in lines)
    inf = PL.infinite_place(K) if X.kind == "proj-line" else None
    for j, (owner, y) in enumerate(zip(owners0, gens0)):
        if owner[0] != "const" and owner[0] in offsets:
            d[offsets[owner[0]] + owner[1]][j] = 1
        if inf is not None:
            r = residue_at(X, TwistedMW(y, twist), inf, lines, sign)
            r = r.normalized()
            for i, c in enumerate(c1_groups[-1][1].coords(r.element)):
                d[offsets[inf] + i][j] = c
    complex_ = FPComplex([C0, C1], [d])
    blocks = [[("const", const)] + [(z, groups[z]) for z in places], c1_groups]
    return RSComplexFG(X, m, tuple(lines), max_degree, sign, complex_, blocks, lifts)


def _correct(y, z, lifts, groups, K):
    """Subtract earlier lifts so that y has no residue away from z."""
    seen = set()
    while True:
        bad = None
        for (m, syms), _ in y.terms:
            for s in syms:
                for q in PL.support(K, s, include_infinity=False):
                    if q != z and q not in seen:
                        bad = q
                        break
                if bad:
                    break
            if bad:
                break
        if bad is None:
            return y
        seen.add(bad)
        r = residue(y, bad)
        coords = groups[bad].coords(r) if bad in groups else []
        for h, c in enumerate(coords):
            if c:
                y = mw_reduce(y - lifts[bad][h] * c)
