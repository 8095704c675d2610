import random

import pytest
from hypothesis import given, settings, strategies as st

from mwcalc import places as PL
from mwcalc import rost_schmid as RS
from mwcalc.errors import NotAComplex, UnsupportedSchemes
from mwcalc.fields import ExtensionField, finite_field
from mwcalc.gw import GWForm, transfer
from mwcalc.mwk import MWElement, mw_eq
from mwcalc.snf import AbelianGroup, ChainGroup, FPComplex

from oracles import smith_diagonal

F5 = finite_field(5)


def curve(kind):
    return {"A1": RS.affine_line, "P1": RS.proj_line, "Gm": RS.gm}[kind](F5)


def gen(X, *factors):
    K = X.function_field
    x = MWElement.one(K)
    for f in factors:
        x = x * MWElement.sym(K, K.make(f))
    return RS.RSElement.generic(X, x)


def value(elem, z):
    return elem.component(z).normalized().element


def test_differential_of_t_on_affine_line():
    X = curve("A1")
    d = RS.differential(gen(X, (0, 1)))
    z = PL.Place(X.function_field, (0, 1))
    assert d.support() == [z]
    assert mw_eq(value(d, z), MWElement.one(F5)) is True


def test_differential_of_t_on_projective_line():
    X = curve("P1")
    K = X.function_field
    d = RS.differential(gen(X, (0, 1)))
    z, inf = PL.Place(K, (0, 1)), PL.infinite_place(K)
    assert set(d.support()) == {z, inf}
    assert mw_eq(value(d, z), MWElement.one(F5)) is True
    # at infinity the uniformizer is 1/t, so [t] = -[1/t] + eta-correction
    assert mw_eq(value(d, inf), -MWElement.bracket(F5, F5.coerce(-1))) is True


def test_units_at_the_place_contribute_nothing():
    X = curve("A1")
    d = RS.differential(gen(X, (-1, 1), (-2, 1)))
    assert PL.Place(X.function_field, (0, 1)) not in d.support()


def test_constant_symbol_is_a_cycle():
    for kind in ("A1", "P1", "Gm"):
        X = curve(kind)
        assert RS.differential(gen(X, (3,))).is_zero()


def test_square_of_t_satisfies_reciprocity():
    X = curve("P1")
    total = RS.reciprocity_sum(gen(X, (0, 0, 1)))
    assert mw_eq(total, MWElement.zero(F5)) is True


@pytest.mark.parametrize("f", [(2, 0, 1), (3, 0, 1), (1, 1, 1), (2, 1)])
def test_reciprocity_for_irreducible_symbols(f):
    X = curve("P1")
    assert mw_eq(RS.reciprocity_sum(gen(X, f)), MWElement.zero(F5)) is True


def test_reciprocity_needs_projective_line():
    with pytest.raises(UnsupportedSchemes):
        RS.reciprocity_sum(gen(curve("A1"), (0, 1)))


@given(st.integers(2, 4), st.integers(0, 10**6))
@settings(max_examples=25)
def test_rebasing_by_a_square_changes_nothing(c, seed):
    X = curve("A1")
    K = X.function_field
    lam = K.random_nonzero(random.Random(seed))
    line = RS.Line("v", "trivial", 0, 1)
    x = MWElement.sym(K, K.make((0, 1))) * MWElement.sym(K, K.make((c,)))
    base = RS.RSElement.generic(X, x, (line,), {"v": K.one})
    moved = RS.RSElement.generic(X, x, (line,), {"v": K.mul(lam, lam)})
    assert RS.rs_eq(RS.differential(base), RS.differential(moved)) is True


# divisors -----------------------------------------------------------------

def test_intersection_with_the_origin():
    X = curve("A1")
    K = X.function_field
    D = RS.divisor_of_zeros(X, K.make((0, 1)))
    s = RS.RSElement.generic(X, MWElement.one(K))
    out = RS.intersect_divisor(D, s)
    z = PL.Place(K, (0, 1))
    assert out.support() == [z]
    assert mw_eq(value(out, z), MWElement.one(F5)) is True
    # i^*(1) is the unit class of the point
    pulled = RS.pullback_divisor(D, s)
    assert mw_eq(value(pulled, z), MWElement.one(F5)) is True


def test_intersection_off_the_support_vanishes():
    X = curve("A1")
    K = X.function_field
    D = RS.divisor_of_zeros(X, K.make((0, 1)))
    s = gen(X, (-1, 1))  # supported at (t - 1) only after d
    assert RS.intersect_divisor(D, RS.differential(s)).is_zero()


def test_divisor_round_trip():
    X = curve("P1")
    K = X.function_field
    D = RS.divisor_of_zeros(X, K.make((2, 0, 1)))
    s = gen(X, (3,), (1, 1))
    lhs = RS.intersect_divisor(D, s)
    back = RS.pushforward_closed(RS.insert_normal_pair(RS.pullback_divisor(D, s), D), X)
    assert RS.rs_eq(RS.RSElement.make(X, 1, back.components, lhs.lines), lhs) is True


# push-forwards ------------------------------------------------------------

def test_closed_pushforward_keeps_the_class():
    X = curve("A1")
    z = PL.Place(X.function_field, (2, 0, 1))
    k = PL.residue_field(z)
    x = MWElement.bracket(k, (0, 1))
    y = RS.pushforward_closed(RS.closed_point_class(X, z, x), X)
    assert y.support() == [z]
    v = y.component(z)
    assert v.labels()[0] == RS.lambda_label(z)
    assert mw_eq(v.element, x) is True


def _to_point(X, z, x):
    c = RS.closed_point_class(X, z, x, lines=(RS.omega(),))
    return RS.pushforward_to_point(RS.pushforward_closed(c, X)).components[0][1].element


@pytest.mark.parametrize("a", [1, 2, 3])
def test_pushforward_from_rational_point_is_identity(a):
    X = curve("A1")
    z = PL.Place(X.function_field, (0, 1))
    x = MWElement.bracket(F5, a)
    assert mw_eq(_to_point(X, z, x), x) is True


@pytest.mark.parametrize("a", [(1, 0), (0, 1), (3, 2)])
def test_pushforward_from_degree_two_point_is_a_transfer(a):
    X = curve("A1")
    z = PL.Place(X.function_field, (2, 0, 1))
    k = PL.residue_field(z)
    assert isinstance(k, ExtensionField)
    # the dt-pairing contributes <P'(theta)> = <2 theta>
    weight = k.mul(k.from_int(2), k.generator)
    expected = transfer(GWForm.bracket(k, k.mul(weight, a)))
    assert mw_eq(_to_point(X, z, MWElement.bracket(k, a)), MWElement.from_gw(expected)) is True


# cohomology ---------------------------------------------------------------

def test_point_complex_over_f5():
    [H0] = RS.rs_complex(RS.point(F5), 0).cohomology()
    assert H0 == AbelianGroup(1, (2,))


def test_affine_line_is_homotopy_invariant():
    H0, H1 = RS.rs_complex(curve("A1"), 1).cohomology()
    point = RS.rs_complex(RS.point(F5), 1).cohomology()[0]
    assert H0 == point
    assert H1.is_zero


def test_zero_differentials():
    groups = [ChainGroup(2), ChainGroup.cyclic_orders([0, 3])]
    H = FPComplex(groups, [[[0, 0], [0, 0]]]).cohomology()
    assert H == [AbelianGroup(2, ()), AbelianGroup(1, (3,))]


def test_multiplication_by_two():
    H = FPComplex([ChainGroup(1), ChainGroup(1)], [[[2]]]).cohomology()
    assert H == [AbelianGroup(0, ()), AbelianGroup(0, (2,))]


def test_non_complex_rejected():
    with pytest.raises(NotAComplex):
        FPComplex([ChainGroup(1), ChainGroup(1), ChainGroup(1)], [[[1]], [[1]]]).check()


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=2, max_size=3))
def test_cokernel_matches_minor_gcds(rows):
    m = len(rows)
    H = FPComplex([ChainGroup(3), ChainGroup(m)], [rows]).cohomology()
    diag = smith_diagonal(rows)
    torsion = tuple(d for d in map(abs, diag) if d > 1)
    assert H[1] == AbelianGroup(m - len(diag), torsion)
    assert H[0].free == 3 - len(diag)


@pytest.mark.parametrize("p", [3, 7])
@pytest.mark.parametrize("n", [0, 1])
def test_infinity_sign_convention_does_not_change_groups(p, n):
    # -1 is not a square mod 3 or 7, so the two uniformizers at infinity really differ
    X = RS.proj_line(finite_field(p))
    line = RS.Line("v", "O", n)
    for m in (0, 1):
        plus = RS.rs_complex(X, m, (line,), sign=1).cohomology()
        minus = RS.rs_complex(X, m, (line,), sign=-1).cohomology()
        assert plus == minus
