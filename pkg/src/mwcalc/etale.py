"""Finite etale schemes over a finite field.

Every residue field is the canonical absolute field ``finite_field(p, n)``.
A scheme is a product of *atoms*; an atom is Spec of a product of fields
F[x]/(f_i), given by its monic irreducible moduli f_i over the base F.  A
point of the product is a Frobenius orbit of tuples (root of the chosen
f_i in K), stored by its smallest representative, so fibre products,
projections and graphs are plain bookkeeping on roots.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable

from . import poly as P
from .errors import FieldMismatch, UnsupportedExtension
from .factor import factor
from .fields import ExtensionField, Field, PrimeField, finite_field, is_irreducible
from .gw import GWForm, base_change as gw_base_change, transfer_along


def absolute_degree(F: Field) -> int:
    return F.degree


@functools.lru_cache(maxsize=None)
def _roots(L: Field, f: tuple):
    """Roots in L of a polynomial with raw coefficients in L."""
    return tuple(sorted((L.neg(g[0]) for g, _ in factor(L, f)[1] if len(g) == 2), key=L.sort_key))


def _eval_in(L: Field, coeffs, x, embed):
    acc = L.zero
    for c in reversed(coeffs):
        acc = L.add(L.mul(acc, x), embed(c))
    return acc


def _prime_embed(L):
    return lambda c: L.embed_from(L.prime_field, c)


@functools.lru_cache(maxsize=None)
def generator_embeddings(K: Field, L: Field):
    """Images of K's generator under all embeddings K -> L."""
    if isinstance(K, PrimeField):
        return (None,)
    if L.degree % K.degree:
        return ()
    Fp = L.prime_field
    f = tuple(L.embed_from(Fp, c) for c in K.modulus)
    return _roots(L, f)


def hom(K: Field, L: Field, image) -> Callable:
    """The embedding K -> L sending K's generator to ``image``."""
    if isinstance(K, PrimeField):
        return _prime_embed(L)
    emb = _prime_embed(L)
    return lambda a: _eval_in(L, K.to_poly(a), image, emb)


@functools.lru_cache(maxsize=None)
def structure_image(F: Field, K: Field):
    """Image of F's generator under the canonical F -> K (smallest root)."""
    if isinstance(F, PrimeField):
        return None
    ims = generator_embeddings(F, K)
    if not ims:
        raise UnsupportedExtension(f"{F} does not embed in {K}")
    return ims[0]


def structure_map(F: Field, K: Field):
    return hom(F, K, structure_image(F, K))


@dataclass(frozen=True)
class EPoint:
    choice: tuple  # index into each atom
    roots: tuple  # raw elements of the residue field
    degree: int  # absolute degree of the residue field


@dataclass(frozen=True)
class EtaleScheme:
    base: Field
    atoms: tuple  # tuple of atoms; an atom is a tuple of moduli (raw tuples over base)
    names: tuple = ()

    def __post_init__(self):
        F = self.base
        if not F.is_finite or isinstance(F, ExtensionField) and not isinstance(F.base, PrimeField):
            raise UnsupportedExtension("etale schemes live over finite fields F_p^a")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"X{i}" for i in range(len(self.atoms))))
        for atom in self.atoms:
            for f in atom:
                if len(f) < 2 or f[-1] != F.one or not is_irreducible(F, f):
                    raise ValueError(f"{f} is not monic irreducible over {F}")

    @property
    def p(self):
        return self.base.characteristic

    def residue_field(self, pt):
        return finite_field(self.p, pt.degree)

    def atom_degree(self, a, i):
        return len(self.atoms[a][i]) - 1

    def __mul__(self, other):
        if other.base != self.base:
            raise FieldMismatch("products need a common base")
        return EtaleScheme(self.base, self.atoms + other.atoms, self.names + other.names)

    @functools.cached_property
    def points(self):
        F = self.base
        a = F.degree
        q = F.order
        out = []
        for choice in itertools.product(*(range(len(atom)) for atom in self.atoms)):
            degs = [self.atom_degree(k, i) for k, i in enumerate(choice)]
            d = functools.reduce(math.lcm, degs, 1)
            K = finite_field(self.p, a * d)
            iota = structure_map(F, K)
            root_lists = [_roots(K, tuple(iota(c) for c in self.atoms[k][i])) for k, i in enumerate(choice)]
            seen = set()
            for tup in itertools.product(*root_lists):
                if tup in seen:
                    continue
                orbit = [tup]
                while True:
                    nxt = tuple(K.pow(x, q) for x in orbit[-1])
                    if nxt == tup:
                        break
                    orbit.append(nxt)
                seen.update(orbit)
                rep = min(orbit, key=lambda t: tuple(K.sort_key(x) for x in t))
                out.append(EPoint(choice, rep, a * d))
        out.sort(key=lambda pt: (pt.choice, pt.degree, tuple(self.residue_field(pt).sort_key(x) for x in pt.roots)))
        return tuple(out)

    def point_index(self, pt):
        return self.points.index(pt)

    def locate(self, choice, images, L: Field, base_image):
        """The point of this scheme whose roots map to ``images`` (in L)
        under an F-linear embedding; returns (point, embedding)."""
        return _locate(self, tuple(choice), tuple(images), L, base_image)

    def to_expr(self):
        F = self.base
        parts = []
        for atom in self.atoms:
            fs = " ".join("(poly " + " ".join(F.fmt(c) for c in f) + ")" for f in atom)
            parts.append(f"(etale {fs})")
        return f"(scheme0 {F.desc()} " + " ".join(parts) + ")"


@functools.lru_cache(maxsize=None)
def _locate(X: EtaleScheme, choice, images, L, base_image):
    F = X.base
    for pt in X.points:
        if pt.choice != choice:
            continue
        K = X.residue_field(pt)
        if L.degree % K.degree:
            continue
        for g in generator_embeddings(K, L):
            psi = hom(K, L, g)
            if base_image is not None and psi(structure_image(F, K)) != base_image:
                continue
            if tuple(psi(r) for r in pt.roots) == images:
                return pt, psi
    raise ValueError("no point matches the given roots")


def spec(F: Field, *moduli, name="X") -> EtaleScheme:
    """Spec of prod F[x]/(f_i); with no moduli, Spec F."""
    if not moduli:
        moduli = ((F.zero, F.one),)
    return EtaleScheme(F, (tuple(tuple(m) for m in moduli),), (name,))


def spec_of_degrees(F: Field, degrees, name="X") -> EtaleScheme:
    """Spec of a product of fields of the given degrees over F (first
    irreducible polynomial of each degree)."""
    return spec(F, *(first_irreducible(F, d) for d in degrees), name=name)


@functools.lru_cache(maxsize=None)
def first_irreducible(F, d):
    if d == 1:
        return (F.zero, F.one)
    for tail in itertools.product(list(F.elements()), repeat=d):
        f = tuple(reversed(tail)) + (F.one,)
        if f[0] != F.zero and is_irreducible(F, f):
            return f
    raise AssertionError("irreducible polynomials exist in every degree")


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EtaleMap:
    """A morphism X -> Y: each point x goes to (y, psi) with psi: k(y) -> k(x)."""
    source: EtaleScheme
    target: EtaleScheme
    images: tuple  # aligned with source.points: (target point, generator image)

    def image(self, x):
        y, g = self.images[self.source.point_index(x)]
        return y, hom(self.target.residue_field(y), self.source.residue_field(x), g)

    def __matmul__(self, other: "EtaleMap") -> "EtaleMap":
        """self o other."""
        if other.target != self.source:
            raise FieldMismatch("maps do not compose")
        out = []
        for x in other.source.points:
            y, psi = other.image(x)
            z, chi = self.image(y)
            Kz = self.target.residue_field(z)
            g = None if isinstance(Kz, PrimeField) else psi(chi(Kz.generator))
            out.append((z, g))
        return EtaleMap(other.source, self.target, tuple(out))


def _pack(K_y, psi):
    return None if isinstance(K_y, PrimeField) else psi(K_y.generator)


def map_from_roots(X: EtaleScheme, Y: EtaleScheme, rule) -> EtaleMap:
    """``rule(x, K_x)`` returns (choice, images) for the target point."""
    out = []
    for x in X.points:
        K = X.residue_field(x)
        choice, images = rule(x, K)
        y, psi = Y.locate(choice, images, K, structure_image(X.base, K))
        out.append((y, _pack(Y.residue_field(y), psi)))
    return EtaleMap(X, Y, tuple(out))


def projection(X: EtaleScheme, indices, Y: EtaleScheme) -> EtaleMap:
    """X = A_0 x ... x A_n -> Y = A_{i_0} x ...  (atoms selected by index)."""
    return map_from_roots(X, Y, lambda x, K: (tuple(x.choice[i] for i in indices),
                                              tuple(x.roots[i] for i in indices)))


def identity(X: EtaleScheme) -> EtaleMap:
    return projection(X, range(len(X.atoms)), X)


def atom_map(X: EtaleScheme, Y: EtaleScheme, assignment) -> EtaleMap:
    """A map between single-atom schemes: ``assignment[i] = (j, r)`` with r
    a polynomial over F such that r(x) is a root of g_j in F[x]/(f_i)."""
    F = X.base
    for i, (j, r) in enumerate(assignment):
        f, g = X.atoms[0][i], Y.atoms[0][j]
        val = P.mod(F, P.compose(F, g, r), f)
        if P.trim(F, val):
            raise ValueError(f"r does not send a root of f_{i} to a root of g_{j}")

    def rule(x, K):
        i = x.choice[0]
        j, r = assignment[i]
        return (j,), (_eval_in(K, r, x.roots[0], structure_map(F, K)),)

    return map_from_roots(X, Y, rule)


def random_atom_map(X, Y, rng):
    """A random morphism between single-atom schemes, or None."""
    F = X.base
    assignment = []
    for f in X.atoms[0]:
        E = ExtensionField(F, f, check=False) if len(f) > 2 else F
        options = []
        for j, g in enumerate(Y.atoms[0]):
            if (len(f) - 1) % (len(g) - 1):
                continue
            gl = tuple(E.embed_from(F, c) if E is not F else c for c in g)
            for rt in _roots(E, gl):
                r = E.to_poly(rt) if E is not F else P.trim(F, (rt,))
                options.append((j, r if r else ()))
        if not options:
            return None
        assignment.append(rng.choice(options))
    return atom_map(X, Y, assignment)


# ---------------------------------------------------------------------------
# Classes on points: GW data with twist lines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Twisted0:
    """A K^MW_0 = GW class at a point twisted by lines (label, parity)."""
    form: GWForm
    lines: tuple = ()

    def reorder(self, labels):
        index = {l: i for i, (l, _) in enumerate(self.lines)}
        perm = [index[l] for l in labels]
        odd = [i for i in perm if self.lines[i][1] % 2]
        inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        F = self.form.field
        form = self.form * GWForm.bracket(F, F.neg(F.one)) if inv % 2 else self.form
        return Twisted0(form, tuple(self.lines[i] for i in perm))

    def __mul__(self, other):
        return Twisted0(self.form * other.form, self.lines + other.lines)

    def __add__(self, other):
        if other.lines != self.lines:
            other = other.reorder(tuple(l for l, _ in self.lines))
        return Twisted0(self.form + other.form, self.lines)


def pull_class(c: Twisted0, K: Field, psi) -> Twisted0:
    return Twisted0(gw_base_change(c.form, K, psi), c.lines)


def push_class(c: Twisted0, K_small: Field, psi) -> Twisted0:
    """Transfer along psi: K_small -> K (finite fields)."""
    K = c.form.field
    if K == K_small:
        return c
    qs = K_small.order
    e = K.degree // K_small.degree
    table = {psi(b): b for b in K_small.elements()}

    def trace(a):
        acc, x = K.zero, a
        for _ in range(e):
            acc = K.add(acc, x)
            x = K.pow(x, qs)
        return table[acc]

    g = K.generator
    basis = [K.one]
    for _ in range(e - 1):
        basis.append(K.mul(basis[-1], g))
    return Twisted0(transfer_along(c.form, trace, basis, K_small), c.lines)
