import random

import pytest
from hypothesis import given, strategies as st

from mwcalc.errors import NotAUniformizer, UnsupportedDegree
from mwcalc.fields import ExtensionField, RationalField, finite_field
from mwcalc.gw import GWForm, gw_eq, transfer as gw_transfer
from mwcalc.mwk import (MWElement, gw_image, invariant_vector, mw_eq, mw_reduce, mw_transfer,
                        residue)
from mwcalc.places import Place
from mwcalc.rost_schmid import _function_field

from oracles import milnor_residue_fp

F5, F7 = finite_field(5), finite_field(7)
QR = RationalField(real=True)


def sym(F, a):
    return MWElement.sym(F, F.coerce(a) if not isinstance(a, tuple) else a)


def brk(F, a):
    return MWElement.bracket(F, F.coerce(a))


def eta(F, m=1):
    return MWElement.eta(F, m)


def test_eta_kills_hyperbolic():
    x = eta(F5) * (MWElement.integer(F5, 2) + eta(F5) * sym(F5, -1))
    assert mw_reduce(x).is_zero


def test_steinberg_example():
    assert mw_reduce(sym(F5, 3) * sym(F5, -2)).is_zero


def test_square_symbol_expansion():
    lhs = sym(F5, 4)
    rhs = sym(F5, 2) + sym(F5, 2) + eta(F5) * sym(F5, 2) * sym(F5, 2)
    assert mw_eq(lhs, rhs) is True
    assert invariant_vector(mw_reduce(lhs), 1) == invariant_vector(mw_reduce(rhs), 1)


@given(st.integers(1, 6), st.integers(1, 6))
def test_brackets_multiply(a, b):
    assert mw_eq(brk(F7, a) * brk(F7, b), brk(F7, a * b)) is True
    assert mw_eq(sym(F7, a) * eta(F7), eta(F7) * sym(F7, a)) is True
    assert (sym(F7, a) * MWElement.zero(F7)).is_zero


@given(st.integers(1, 6))
def test_bracket_matches_gw_embedding(a):
    x = MWElement.one(F7) + eta(F7) * sym(F7, a)
    assert mw_eq(x, MWElement.from_gw(GWForm.bracket(F7, a))) is True
    assert gw_eq(gw_image(x), GWForm.bracket(F7, a)) is True


def test_eta_nonzero_over_ordered_field():
    assert mw_eq(eta(QR), MWElement.zero(QR)) is False
    assert mw_eq(sym(QR, 3), sym(QR, 3)) is True


@given(st.sampled_from([3, 5, 7]), st.integers(2, 6))
def test_steinberg_relation(p, a):
    F = finite_field(p)
    if a % p in (0, 1):
        return
    assert mw_eq(sym(F, a) * sym(F, 1 - a), MWElement.zero(F)) is True


def _homogeneous(F, rng):
    d = rng.randint(-1, 2)
    syms = tuple(F.random_nonzero(rng) for _ in range(max(d, 0)))
    m = max(-d, 0)
    base = MWElement.monomial(F, m, syms, 1)
    if rng.random() < 0.5:
        base = base * brk(F, F.random_nonzero(rng))
    return d, base


@given(st.sampled_from([3, 5, 7]), st.integers(0, 10**6))
def test_graded_eps_commutativity(p, seed):
    F = finite_field(p)
    rng = random.Random(seed)
    (dx, x), (dy, y) = _homogeneous(F, rng), _homogeneous(F, rng)
    rhs = y * x
    if (dx * dy) % 2:
        rhs = MWElement.epsilon(F) * rhs
    assert mw_eq(x * y, rhs) is True


# residues -----------------------------------------------------------------

K5 = _function_field(F5)
T = ((0, 1), (1,))


def test_residue_of_uniformizer():
    z = Place(K5, (0, 1))
    assert mw_eq(residue(sym(K5, T), z), MWElement.one(F5)) is True


def test_residue_of_unit_vanishes():
    z = Place(K5, (0, 1))
    assert residue(sym(K5, ((4, 1), (1,))), z).is_zero


@pytest.mark.parametrize("u", [2, 3, 4])
def test_residue_of_tame_pair(u):
    z = Place(K5, (0, 1))
    x = sym(K5, T) * sym(K5, ((u,), (1,)))
    out = residue(x, z)
    assert mw_eq(out, sym(F5, u)) is True
    assert milnor_residue_fp([((0, 1), (1,)), ((u,), (1,))], 5, (0, 1)) == u


def test_residue_rejects_bad_uniformizer():
    z = Place(K5, (0, 1))
    with pytest.raises(NotAUniformizer):
        residue(sym(K5, T), z, uniformizer=((0, 0, 1), (1,)))


# transfers ----------------------------------------------------------------

F25 = ExtensionField(F5, (2, 0, 1))


def test_transfer_trivial_extension_is_identity():
    x = eta(F7) * brk(F7, 3)
    assert mw_eq(mw_transfer(x, F7), x) is True


@pytest.mark.parametrize("a", [(1, 0), (0, 1), (2, 3)])
def test_transfer_of_eta_multiple(a):
    x = MWElement.bracket(F25, a) * eta(F25)
    expected = MWElement.from_gw(gw_transfer(GWForm.bracket(F25, a))) * eta(F5)
    assert mw_eq(mw_transfer(x), expected) is True


def test_positive_degree_transfer_unsupported():
    with pytest.raises(UnsupportedDegree):
        mw_transfer(MWElement.sym(F25, (0, 1)))


F9 = ExtensionField(finite_field(3), (1, 0, 1))
f9_unit = st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda v: v != (0, 0))


@given(st.integers(1, 2), f9_unit)
def test_transfer_projection_formula(f, a):
    F3 = finite_field(3)
    f_up = F9.from_base(f)
    lhs = mw_transfer(MWElement.epsilon(F9) * MWElement.sym(F9, f_up)
                      * MWElement.bracket(F9, a) * eta(F9))
    rhs = MWElement.sym(F3, f) * mw_transfer(MWElement.bracket(F9, a) * eta(F9))
    assert mw_eq(lhs, rhs) is True
