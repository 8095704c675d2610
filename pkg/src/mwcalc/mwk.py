"""Graded Milnor-Witt K-theory of supported fields.

An ``MWElement`` is an integer combination of monomials
``eta^m [u_1]...[u_k]`` (degree ``k - m``).  Monomials are keyed by
``(m, (u_1, ..., u_k))`` with raw field values.  Since eta is central the
eta power can always be collected in front.

Equality is decided through Morel's fiber product description
K^MW_n = I^n x_{I^n/I^{n+1}} K^M_n: an element vanishes iff its Milnor
image (eta := 0) and its Witt image ([u] -> <u> - 1, eta -> 1) both vanish.
"""
from __future__ import annotations

import random as _random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import places as PL
from .errors import UNKNOWN, FieldMismatch, NotAnExtension, UnsupportedDegree
from .fields import ExtensionField, Field, FunctionField, PrimeField, RationalField
from .gw import GWForm, gw_eq, transfer as gw_transfer, transfer_along, witt_eq


def _mono_key(F, key):
    m, syms = key
    return (len(syms) - m, m, len(syms), tuple(F.sort_key(s) for s in syms))


@dataclass(frozen=True)
class MWElement:
    field: Field
    terms: tuple  # sorted (((m, syms), coeff), ...)

    # construction ---------------------------------------------------------
    @classmethod
    def from_dict(cls, F, d):
        one = F.one
        clean = {}
        for (m, syms), c in d.items():
            if c == 0 or any(s == one for s in syms):
                continue
            key = (m, tuple(syms))
            clean[key] = clean.get(key, 0) + c
        items = sorted(((k, c) for k, c in clean.items() if c), key=lambda kc: _mono_key(F, kc[0]))
        return cls(F, tuple(items))

    @classmethod
    def zero(cls, F):
        return cls(F, ())

    @classmethod
    def integer(cls, F, n):
        return cls.from_dict(F, {(0, ()): n})

    @classmethod
    def one(cls, F):
        return cls.integer(F, 1)

    @classmethod
    def monomial(cls, F, m=0, syms=(), coeff=1):
        return cls.from_dict(F, {(m, tuple(F.coerce(s) for s in syms)): coeff})

    @classmethod
    def sym(cls, F, a):
        return cls.monomial(F, 0, (a,))

    @classmethod
    def eta(cls, F, m=1):
        return cls.monomial(F, m, ())

    @classmethod
    def bracket(cls, F, a):
        """<a> = 1 + eta[a]."""
        a = F.coerce(a)
        return cls.from_dict(F, {(0, ()): 1, (1, (a,)): 1})

    @classmethod
    def epsilon(cls, F):
        """eps = -<-1>."""
        return -cls.bracket(F, F.neg(F.one))

    @classmethod
    def hyperbolic(cls, F):
        return cls.integer(F, 1) + cls.bracket(F, F.neg(F.one))

    @classmethod
    def from_gw(cls, x: GWForm):
        F = x.field
        d = {}
        for t, mult in x.terms:
            d[(0, ())] = d.get((0, ()), 0) + mult
            if t != F.one:
                d[(1, (t,))] = d.get((1, (t,)), 0) + mult
        return cls.from_dict(F, d)

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MWElement):
            raise TypeError(f"expected an MWElement, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def as_dict(self):
        return dict(self.terms)

    def __add__(self, other):
        self._check(other)
        d = self.as_dict()
        for k, c in other.terms:
            d[k] = d.get(k, 0) + c
        return MWElement.from_dict(self.field, d)

    def __neg__(self):
        return MWElement(self.field, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MWElement.from_dict(self.field, {k: c * other for k, c in self.terms})
        self._check(other)
        d = {}
        for (m1, s1), c1 in self.terms:
            for (m2, s2), c2 in other.terms:
                key = (m1 + m2, s1 + s2)
                d[key] = d.get(key, 0) + c1 * c2
        return MWElement.from_dict(self.field, d)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({len(s) - m for (m, s), _ in self.terms})

    def part(self, degree):
        return MWElement(self.field, tuple((k, c) for k, c in self.terms if len(k[1]) - k[0] == degree))

    @property
    def degree(self):
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs[0] if degs else None

    def map_symbols(self, target: Field, phi):
        """Apply a field map to every symbol (used for reduction and base change)."""
        d = {}
        for (m, syms), c in self.terms:
            key = (m, tuple(phi(s) for s in syms))
            d[key] = d.get(key, 0) + c
        return MWElement.from_dict(target, d)

    def __repr__(self):
        return f"MWElement({self.to_expr()} over {self.field})"

    def to_expr(self):
        F = self.field
        parts = []
        degs = self.degrees()
        head = "(mw"
        if len(degs) == 1:
            head += f" :deg {degs[0]}"
        for (m, syms), c in self.terms:
            item = f"(term {c}"
            if m:
                item += f" :eta {m}"
            for s in syms:
                item += f" (sym {F.fmt(s)})"
            parts.append(item + ")")
        return head + ("" if not parts else " " + " ".join(parts)) + ")"


def mw_add(x, y):
    return x + y


def mw_mul(x, y):
    return mw_reduce(x * y)


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------


def _rewrite_candidates(F, m, syms):
    """All single rewrite steps applicable to a monomial, in canonical order.
    Each candidate is a list of (key, multiplier).

    Composite symbols are only split over prime fields, where every integer
    representative has a short factorization; elsewhere the expansion blows
    up and equality is left to the invariant oracle anyway."""
    one = F.one
    minus_one = F.neg(one)
    if any(s == one for s in syms):
        return [[]]
    for i in range(len(syms) - 1):
        a, b = syms[i], syms[i + 1]
        if b == F.sub(one, a) or b == F.neg(a):
            return [[]]
    cands = []
    if m >= 2:
        for i, s in enumerate(syms):
            if s == minus_one:
                # eta^2 [-1] = -2 eta
                cands.append([((m - 1, syms[:i] + syms[i + 1:]), -2)])
    for i, s in enumerate(syms):
        parts = F.split_composite(s) if isinstance(F, PrimeField) else None
        if parts is not None:
            a, b = parts
            pre, post = syms[:i], syms[i + 1:]
            cands.append([
                ((m, pre + (a,) + post), 1),
                ((m, pre + (b,) + post), 1),
                ((m + 1, pre + (a, b) + post), 1),
            ])
    return cands


def mw_reduce(x: MWElement, rng: Optional[_random.Random] = None) -> MWElement:
    """Rewrite to a fixed point of the relation system.

    With ``rng`` the rule choice and processing order are randomized; the
    results of different orders agree under ``mw_eq`` (they need not agree
    structurally).
    """
    F = x.field
    work = x.as_dict()
    while True:
        changed = False
        out = {}
        items = list(work.items())
        if rng is not None:
            rng.shuffle(items)
        for (m, syms), c in items:
            cands = _rewrite_candidates(F, m, syms)
            if not cands:
                out[(m, syms)] = out.get((m, syms), 0) + c
                continue
            changed = True
            step = cands[0] if rng is None else rng.choice(cands)
            for key, k in step:
                out[key] = out.get(key, 0) + c * k
        work = {k: v for k, v in out.items() if v}
        if not changed:
            break
    return MWElement.from_dict(F, work)


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def _pfister_counter(F, syms, coeff, acc):
    """Add coeff * prod (<s> - 1) to the square-class counter acc."""
    terms = {F.one: coeff}
    for s in syms:
        nxt = Counter()
        for t, m in terms.items():
            nxt[F.square_class(F.mul(t, s))] += m
            nxt[t] -= m
        terms = nxt
    for t, m in terms.items():
        acc[t] += m


def witt_image(x: MWElement) -> GWForm:
    """Image under [u] -> <u> - 1, eta -> 1 (a GW representative of a Witt
    class; exact in GW for degree-0 parts)."""
    F = x.field
    acc = Counter()
    for (m, syms), c in x.terms:
        _pfister_counter(F, syms, c, acc)
    return GWForm.from_counter(F, acc)


def gw_image(x: MWElement) -> GWForm:
    """Degree-0 identification K^MW_0 = GW."""
    if any(len(s) != m for (m, s), _ in x.terms):
        raise UnsupportedDegree("gw_image needs a degree-0 element")
    return witt_image(x)


@dataclass(frozen=True)
class MWInvariantVector:
    degree: int
    milnor: object
    witt: GWForm


def milnor_degree1(x: MWElement):
    """Milnor image of a degree-1 element in F^* (eta-free monomials only)."""
    F = x.field
    acc = F.one
    for (m, syms), c in x.terms:
        if m == 0 and len(syms) == 1:
            acc = F.mul(acc, F.pow(syms[0], c))
    return acc


def invariant_vector(x: MWElement, degree: int) -> MWInvariantVector:
    part = x.part(degree)
    milnor = None
    if degree == 0:
        milnor = part and gw_image(part).rank
    elif degree == 1:
        milnor = milnor_degree1(part)
    return MWInvariantVector(degree, milnor, witt_image(part))


def _milnor_zero(F, z: MWElement, d: int):
    """Decide whether the Milnor image of a homogeneous degree-d element vanishes."""
    if d <= 0:
        return True  # covered by the GW / W comparison
    pure = [(syms, c) for (m, syms), c in z.terms if m == 0]
    if d == 1:
        return milnor_degree1(z) == F.one
    if F.is_finite:
        return True  # K^M_n of a finite field vanishes for n >= 2
    if isinstance(F, RationalField) and not F.real:
        return _milnor_zero_q(pure, d)
    if not pure:
        return True
    return UNKNOWN


def _milnor_zero_q(pure, d):
    """K^M_2(Q) = Z/2 + sum_{p odd} F_p^* (tame symbols and the real sign);
    K^M_n(Q) = Z/2 detected by signs for n >= 3."""
    from sympy import primefactors

    sign_part = 0
    for syms, c in pure:
        if all(s < 0 for s in syms):
            sign_part += c
    if sign_part % 2:
        return False
    if d >= 3:
        return True
    primes = set()
    for syms, _ in pure:
        for s in syms:
            primes.update(primefactors(abs(s.numerator)))
            primes.update(primefactors(s.denominator))
    primes.discard(2)
    for p in primes:
        acc = 1
        for (a, b), c in pure:
            val = _tame_symbol_mod_p(a, b, p)
            acc = acc * pow(val, c % (p - 1), p) % p
        if acc != 1:
            return False
    return True


def _vp(x: Fraction, p: int) -> int:
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _tame_symbol_mod_p(a: Fraction, b: Fraction, p: int) -> int:
    """(-1)^{v(a)v(b)} b^{v(a)} / a^{v(b)} reduced mod p."""
    va, vb = _vp(a, p), _vp(b, p)
    val = Fraction(-1) ** (va * vb) * b ** va / a ** vb
    return val.numerator * pow(val.denominator, -1, p) % p


def mw_eq(x: MWElement, y: MWElement):
    """True / False / UNKNOWN."""
    x._check(y)
    F = x.field
    z = x - y
    if z.is_zero():
        return True
    verdicts = []
    for d in z.degrees():
        part = z.part(d)
        if d == 0:
            v = gw_eq(gw_image(part), GWForm.zero(F))
        else:
            v = witt_eq(witt_image(part), GWForm.zero(F))
            if v is True:
                v = _milnor_zero(F, part, d)
            elif v is UNKNOWN:
                m = _milnor_zero(F, part, d)
                v = False if m is False else UNKNOWN
        if v is False:
            return False
        verdicts.append(v)
    if all(v is True for v in verdicts):
        return True
    if mw_reduce(z).is_zero():
        return True
    return UNKNOWN


# ---------------------------------------------------------------------------
# Residues
# ---------------------------------------------------------------------------

_P = object()  # placeholder for the uniformizer symbol inside words


def _n_eps(K, e):
    """e_eps with [a^e] = e_eps [a]."""
    if e == 0:
        return MWElement.zero(K)
    if e < 0:
        return MWElement.epsilon(K) * _n_eps(K, -e)
    minus = K.neg(K.one)
    acc = MWElement.zero(K)
    for i in range(1, e + 1):
        acc = acc + (MWElement.one(K) if i % 2 else MWElement.bracket(K, minus))
    return acc


def residue(x: MWElement, place, uniformizer=None) -> MWElement:
    """Residue map K^MW_n(F(t)) -> K^MW_{n-1}(k(v)) for the given uniformizer.

    Every symbol is split as pi^e * u with u a unit, expanded with
    [pi^e u] = [u] + <u> e_eps [pi], the uniformizer symbols are moved to
    the front with [u][pi] = eps [pi][u] and merged with [pi][pi] = [pi][-1];
    then d([pi] w) = w reduced and d(w) = 0 for words without pi.
    """
    K = x.field
    if uniformizer is None:
        uniformizer = PL.canonical_uniformizer(place)
    PL.check_uniformizer(K, uniformizer, place)
    k = PL.residue_field(place)
    # Coefficients only ever involve units, so they are kept as plain dicts
    # over the residue field from the start.
    minus = k.neg(k.one)
    eps = _dict(MWElement.epsilon(k))
    one = {(0, ()): 1}
    result = {}

    _, lead_pi = PL.leading_term(K, uniformizer, place)
    for (m, syms), c in x.terms:
        words = [(one, ())]
        for s in syms:
            e, ub = PL.leading_term(K, s, place)
            if e:
                ub = k.div(ub, k.pow(lead_pi, e))
            new = []
            for coef, w in words:
                new.append((coef, w + (ub,)))
                if e:
                    factor = _dmul(_dict(MWElement.bracket(k, ub)), _dict(_n_eps(k, e)))
                    new.append((_dmul(coef, factor), w + (_P,)))
            words = new
        for coef, w in words:
            coef, w = _normalize_word(coef, list(w), eps, minus)
            if not w or w[0] is not _P:
                continue
            tail = tuple(w[1:])
            for (cm, csyms), cc in coef.items():
                key = (m + cm, csyms + tail)
                result[key] = result.get(key, 0) + c * cc
    return mw_reduce(MWElement.from_dict(k, result))


def _dict(x: MWElement):
    return dict(x.terms)


def _dmul(a, b):
    out = {}
    for (m1, s1), c1 in a.items():
        for (m2, s2), c2 in b.items():
            key = (m1 + m2, s1 + s2)
            out[key] = out.get(key, 0) + c1 * c2
    return {key: c for key, c in out.items() if c}


def _normalize_word(coef, w, eps, minus):
    while True:
        if len(w) >= 2 and w[0] is _P and w[1] is _P:
            w[1] = minus
            continue
        for i in range(len(w) - 1):
            if w[i] is not _P and w[i + 1] is _P:
                w[i], w[i + 1] = w[i + 1], w[i]
                coef = _dmul(coef, eps)
                break
        else:
            return coef, w


# ---------------------------------------------------------------------------
# Transfers
# ---------------------------------------------------------------------------


def _transfer_generic(x: MWElement, gw_transfer_fn, target: Field) -> MWElement:
    out = MWElement.zero(target)
    for d in x.degrees():
        if d > 0:
            raise UnsupportedDegree("positive-degree transfers are not supported")
        part = x.part(d)
        image = gw_transfer_fn(witt_image(part))
        piece = MWElement.from_gw(image)
        if d < 0:
            piece = piece * MWElement.eta(target, -d)
        out = out + piece
    return mw_reduce(out)


def mw_transfer(x: MWElement, E: Optional[ExtensionField] = None) -> MWElement:
    """Tr_{E/F} in degrees <= 0 via the trace form."""
    E = x.field if E is None else E
    if x.field != E:
        raise FieldMismatch(f"element lives over {x.field}, not {E}")
    if not isinstance(E, ExtensionField):
        if E.is_finite or isinstance(E, RationalField):
            return x  # the trivial extension E = F
        raise NotAnExtension(f"{E} is not a simple extension")
    return _transfer_generic(x, lambda g: gw_transfer(g, E), E.base)


def mw_transfer_along(x: MWElement, trace, basis, target: Field) -> MWElement:
    return _transfer_generic(x, lambda g: transfer_along(g, trace, basis, target), target)


# ---------------------------------------------------------------------------
# Twisted elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistFactor:
    """A line in a twist: ``basis = scale * reference basis``."""
    label: str
    parity: int
    scale: object


@dataclass(frozen=True)
class TwistedMW:
    element: MWElement
    twist: tuple  # of TwistFactor

    @property
    def field(self):
        return self.element.field

    @classmethod
    def plain(cls, element, factors=()):
        F = element.field
        return cls(element, tuple(TwistFactor(l, p % 2, F.one) for l, p in factors))

    def labels(self):
        return tuple(f.label for f in self.twist)

    def rebase(self, index, lam):
        """Change the basis of one line from b to lam*b."""
        F = self.field
        f = self.twist[index]
        factors = list(self.twist)
        factors[index] = TwistFactor(f.label, f.parity, F.mul(f.scale, lam))
        elem = mw_reduce(self.element * MWElement.bracket(F, lam))
        return TwistedMW(elem, tuple(factors))

    def normalized(self):
        """Fold every basis scale into the element."""
        F = self.field
        scale = F.one
        for f in self.twist:
            scale = F.mul(scale, f.scale)
        elem = self.element
        if scale != F.one:
            elem = mw_reduce(elem * MWElement.bracket(F, scale))
        return TwistedMW(elem, tuple(TwistFactor(f.label, f.parity, F.one) for f in self.twist))

    def reorder(self, labels):
        """Permute the lines into the given label order (Koszul sign on odd lines)."""
        F = self.field
        current = list(self.twist)
        index = {f.label: i for i, f in enumerate(current)}
        if sorted(index) != sorted(labels) or len(labels) != len(current):
            raise ValueError(f"cannot reorder {self.labels()} into {labels}")
        perm = [index[l] for l in labels]
        odd = [i for i in perm if current[i].parity]
        inversions = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        elem = self.element
        if inversions % 2:
            elem = mw_reduce(elem * MWElement.bracket(F, F.neg(F.one)))
        return TwistedMW(elem, tuple(current[i] for i in perm))

    def scaled(self, factor: MWElement):
        return TwistedMW(mw_reduce(self.element * factor), self.twist)

    def to_expr(self):
        F = self.field
        tw = " ".join(f"({f.label} {F.fmt(f.scale)})" for f in self.twist)
        return f"{self.element.to_expr()[:-1]} (:twist {tw}))"


def twisted_eq(a: TwistedMW, b: TwistedMW):
    a, b = a.normalized(), b.normalized()
    if a.labels() != b.labels():
        b = b.reorder(a.labels())
    if tuple(f.parity for f in a.twist) != tuple(f.parity for f in b.twist):
        return False
    return mw_eq(a.element, b.element)


def _strip_even_power(K, lam, place):
    """lam with the canonical uniformizer's even power removed (a square)."""
    v = PL.valuation(K, lam, place)
    k = v - (v % 2)
    if k:
        lam = K.div(lam, K.pow(PL.canonical_uniformizer(place), k))
    return lam


def twisted_residue(s: TwistedMW, place, uniformizer=None, local_generator=None,
                    label=None, normalize=True) -> TwistedMW:
    """d^y_z: s (x) a (x) t -> d^e(s) (x) (e ^ a) (x) t.

    ``local_generator(label, place)`` returns the local generator of each
    line at the place relative to that line's reference basis (default 1).
    The result is expressed in the canonical basis pi_can^dual of the
    conormal line, unless ``normalize`` is false, in which case the basis
    token of the new line is the dual of ``uniformizer``.
    """
    K = s.field
    pi_can = PL.canonical_uniformizer(place)
    pi = pi_can if uniformizer is None else uniformizer
    PL.check_uniformizer(K, pi, place)
    k = PL.residue_field(place)
    fold = K.one
    for f in s.twist:
        g = local_generator(f.label, place) if local_generator else K.one
        lam = _strip_even_power(K, K.div(f.scale, g), place)
        fold = K.mul(fold, lam)
    elem = s.element
    fold = _strip_even_power(K, fold, place)
    if fold != K.one:
        elem = elem * MWElement.bracket(K, fold)
    r = residue(elem, place, pi)
    c = PL.reduce(place, K.div(pi, pi_can))
    new_label = label or f"Lambda@{place}"
    rest = tuple(TwistFactor(f.label, f.parity, k.one) for f in s.twist)
    if normalize:
        if c != k.one:
            r = mw_reduce(r * MWElement.bracket(k, c))
        head = TwistFactor(new_label, 1, k.one)
    else:
        head = TwistFactor(new_label, 1, k.inv(c))
    return TwistedMW(r, (head,) + rest)
