from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mwcalc import poly as P
from mwcalc.errors import ZeroInput
from mwcalc.factor import factor
from mwcalc.fields import ExtensionField, RationalField, finite_field, is_irreducible
from mwcalc.places import (Place, canonical_uniformizer, infinite_place, leading_term, reduce, residue_field,
                           valuation)
from mwcalc.rost_schmid import _function_field

from oracles import is_square_mod


def test_factor_splits_over_f5():
    F5 = finite_field(5)
    lead, pairs = factor(F5, (1, 0, 1))
    assert lead == 1
    assert sorted(pairs) == [((2, 1), 1), ((3, 1), 1)]
    # cross-check by trial division over every linear candidate
    roots = [r for r in range(5) if (r * r + 1) % 5 == 0]
    assert sorted((-r) % 5 for r in roots) == [2, 3]


def test_factor_irreducible_over_f3():
    F3 = finite_field(3)
    assert all((r * r + 1) % 3 for r in range(3))
    assert factor(F3, (1, 0, 1)) == (1, [((1, 0, 1), 1)])


def test_factor_repeated_root():
    assert factor(finite_field(7), (0, 0, 1)) == (1, [((0, 1), 2)])


def test_factor_over_q():
    Q = RationalField()
    lead, pairs = factor(Q, (Fraction(-2), 0, Fraction(2)))  # 2x^2 - 2
    assert lead == 2
    assert sorted(pairs) == [((-1, 1), 1), ((1, 1), 1)]


@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(0, 6), min_size=2, max_size=7))
def test_factor_reassembles(p, coeffs):
    F = finite_field(p)
    f = P.trim(F, tuple(c % p for c in coeffs))
    if P.deg(f) < 1:
        return
    lead, pairs = factor(F, f)
    prod = P.const(F, lead)
    for g, e in pairs:
        assert is_irreducible(F, g)
        assert P.lc(g) == 1
        prod = P.mul(F, prod, P.pow_(F, g, e))
    assert prod == f


def test_valuations():
    K = _function_field(RationalField())
    r = ((0, 0, 1), (-1, 1))  # t^2 / (t - 1)
    at_t = Place(K, (0, 1))
    assert valuation(K, r, at_t) == 2
    assert valuation(K, r, infinite_place(K)) == -1
    assert valuation(K, ((-1, 1), (1,)), at_t) == 0


polys5 = st.lists(st.integers(0, 4), min_size=1, max_size=5).filter(any)


@given(polys5, polys5, st.sampled_from([(0, 1), (3, 1), (2, 0, 1), None]))
def test_leading_term_agrees_with_reducing_the_quotient(num, den, where):
    F5 = finite_field(5)
    K = _function_field(F5)
    r = K.make(tuple(num), tuple(den))
    z = infinite_place(K) if where is None else Place(K, where)
    v, c = leading_term(K, r, z)
    assert v == valuation(K, r, z)
    assert c == reduce(z, K.div(r, K.pow(canonical_uniformizer(z), v)))


def test_residue_fields():
    F5, F7 = finite_field(5), finite_field(7)
    k = residue_field(Place(_function_field(F5), (2, 0, 1)))
    assert isinstance(k, ExtensionField)
    assert k.desc() == "(ext (fp 5) (poly 2 0 1))"
    assert residue_field(Place(_function_field(F7), (-3 % 7, 1))) == F7
    Q = RationalField()
    assert residue_field(infinite_place(_function_field(Q))) == Q


def test_square_classes():
    assert finite_field(7).square_class(2) == 1
    assert RationalField().square_class(Fraction(-8)) == -2
    F5 = finite_field(5)
    assert not is_square_mod(5, 3)
    assert F5.square_class(3) == F5.nonresidue != 1


def test_square_class_of_zero_rejected():
    with pytest.raises(ZeroInput):
        finite_field(5).square_class(0)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 500))
def test_square_class_matches_enumeration(p, a):
    if a % p == 0:
        return
    F = finite_field(p)
    assert (F.square_class(a % p) == 1) == is_square_mod(p, a)


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(1, 1000))
def test_rational_square_class_invariant_under_squares(a, b):
    Q = RationalField()
    assert Q.square_class(Fraction(a) * b * b) == Q.square_class(Fraction(a))
    assert Q.square_class(Fraction(a, b * b)) == Q.square_class(Fraction(a))


elems25 = st.tuples(st.integers(0, 4), st.integers(0, 4))


@given(elems25, elems25, elems25)
def test_f25_field_axioms(a, b, c):
    F = finite_field(5, 2)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    if a != F.zero:
        assert F.mul(a, F.inv(a)) == F.one
        assert F.pow(a, 24) == F.one


def test_f25_square_classes_split_evenly():
    F = finite_field(5, 2)
    nonzero = [a for a in F.elements() if a != F.zero]
    squares = {F.mul(a, a) for a in nonzero}
    assert len(squares) == 12
    assert all((F.square_class(a) == F.one) == (a in squares) for a in nonzero)
