import random

import pytest
from hypothesis import given, strategies as st

from mwcalc import corr as C
from mwcalc.errors import SchemeMismatch
from mwcalc.etale import Twisted0, atom_map, random_atom_map, spec, spec_of_degrees
from mwcalc.fields import finite_field
from mwcalc.gw import GWForm, gw_eq, gw_mul, transfer
from mwcalc.laws import rand_corr, rand_etale

F5 = finite_field(5)
F25 = finite_field(5, 2)
seeds = st.integers(0, 10**6)


def single_value(alpha):
    [(_, v)] = alpha.values
    return v.form


def point_corr(X, Y, form):
    [w] = (X * Y).points
    return C.corr_from_forms(X, Y, {w: form})


@pytest.mark.parametrize("m,n", [(2, 3), (1, 5), (0, 4), (-2, 3)])
def test_ch_degrees_multiply(m, n):
    X = spec(F5)
    out = C.compose_ch(C.ch_correspondence_degree(X, m), C.ch_correspondence_degree(X, n))
    assert (out.degree() if out.values else 0) == m * n


@given(st.lists(st.integers(1, 4), max_size=2), st.lists(st.integers(1, 4), max_size=2))
def test_mw_composition_at_a_point(gs, hs):
    X = spec(F5)
    g = GWForm.diagonal(F5, gs)
    h = GWForm.diagonal(F5, hs)
    out = C.compose(point_corr(X, X, g), point_corr(X, X, h))
    got = single_value(out) if out.values else GWForm.zero(F5)
    assert gw_eq(got, gw_mul(h, g)) is True


@given(seeds)
def test_identity_is_neutral(seed):
    rng = random.Random(seed)
    F = finite_field(rng.choice((3, 5)))
    X, Y = rand_etale(rng, F, "X"), rand_etale(rng, F, "Y")
    a = rand_corr(rng, X, Y)
    assert C.corr_eq(C.compose(C.identity_corr(X), a), a)
    assert C.corr_eq(C.compose(a, C.identity_corr(Y)), a)


def test_graph_of_identity_is_the_unit():
    X = spec(F5)
    assert gw_eq(single_value(C.identity_corr(X)), GWForm.one(F5)) is True


def test_graph_and_transpose_give_the_trace_form():
    X, Y = spec(F5, (2, 0, 1)), spec(F5)
    gamma = C.graph(atom_map(X, Y, [(0, ())]))
    loop = C.compose(C.transpose(gamma), gamma)
    assert (loop.source, loop.target) == (Y, Y)
    expected = transfer(GWForm.one(F25))
    assert gw_eq(single_value(loop), expected) is True
    assert expected.rank == 2


@given(seeds)
def test_graph_is_functorial(seed):
    rng = random.Random(seed)
    F = finite_field(rng.choice((3, 5, 7)))
    X, Y, Z = (spec_of_degrees(F, sorted({rng.randint(1, 2) for _ in range(2)}), n) for n in "XYZ")
    f, g = random_atom_map(X, Y, rng), random_atom_map(Y, Z, rng)
    if f is None or g is None:
        return
    assert C.corr_eq(C.graph(g @ f), C.compose(C.graph(f), C.graph(g)))


def test_exterior_of_units():
    X, Y = spec(F5, name="X"), spec(F5, name="Y")
    out = C.exterior(C.identity_corr(X), C.identity_corr(Y))
    assert C.corr_eq(out, C.identity_corr(X * Y))


def test_exterior_with_zero():
    X, Y = spec(F5, name="X"), spec_of_degrees(F5, [1, 2], name="Y")
    zero = C.CorrMW.make(Y, Y, {})
    assert C.exterior(C.identity_corr(X), zero).values == ()


@given(seeds)
def test_exterior_respects_composition(seed):
    rng = random.Random(seed)
    F = finite_field(rng.choice((3, 5)))
    X1, Y1, Z1, X2, Y2, Z2 = (rand_etale(rng, F, n, max_degree=1) for n in ("X1", "Y1", "Z1", "X2", "Y2", "Z2"))
    f1, g1, f2, g2 = rand_corr(rng, X1, Y1), rand_corr(rng, Y1, Z1), rand_corr(rng, X2, Y2), rand_corr(rng, Y2, Z2)
    lhs = C.compose(C.exterior(f1, f2), C.exterior(g1, g2))
    rhs = C.exterior(C.compose(f1, g1), C.compose(f2, g2))
    assert C.corr_eq(lhs, rhs)


def test_base_change_of_the_unit():
    X = spec_of_degrees(F5, [1, 2])
    unit = C.base_change_corr(C.identity_corr(X), F25)
    assert C.corr_eq(unit, C.identity_corr(unit.source))


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_base_change_collapses_square_classes(a):
    X = spec(F5)
    out = C.base_change_corr(point_corr(X, X, GWForm.bracket(F5, a)), F25)
    assert gw_eq(single_value(out), GWForm.one(F25)) is True


@given(seeds)
def test_base_change_is_a_functor(seed):
    rng = random.Random(seed)
    X, Y, Z = (rand_etale(rng, F5, n) for n in "XYZ")
    a, b = rand_corr(rng, X, Y), rand_corr(rng, Y, Z)
    lhs = C.base_change_corr(C.compose(a, b), F25)
    rhs = C.compose(C.base_change_corr(a, F25), C.base_change_corr(b, F25))
    assert C.corr_eq(lhs, rhs)


def test_mismatched_middle_scheme():
    X, Y = spec(F5, name="X"), spec_of_degrees(F5, [2], name="Y")
    with pytest.raises(SchemeMismatch):
        C.compose(C.identity_corr(X), C.identity_corr(Y))


def test_twisted_classes_pick_up_minus_one_on_odd_swaps():
    F7 = finite_field(7)  # -1 is not a square here
    c = Twisted0(GWForm.one(F7), (("a", 1), ("b", 1)))
    swapped = c.reorder(("b", "a"))
    assert gw_eq(swapped.form, GWForm.bracket(F7, 6)) is True
    assert gw_eq(swapped.form, GWForm.one(F7)) is False
    even = Twisted0(GWForm.one(F7), (("a", 1), ("b", 0))).reorder(("b", "a"))
    assert gw_eq(even.form, GWForm.one(F7)) is True
