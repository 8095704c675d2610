import random

import pytest
from hypothesis import given, strategies as st

from mwcalc.errors import IllTypedWord, SourceTargetMismatch
from mwcalc.twist import (BundleSym, Cancel, Diagram, Insert, Swap, TwistMor, Unit, exact_square,
                          bracket_split, check_commutes, contains_switch, expr, four_diagram,
                          hexagon, mutation_results, normalize, pentagon, simplify_t_isos,
                          swap_sign, t_iso_check)

x1, y1 = BundleSym("x", 1), BundleSym("y", 1)


def test_swap_of_rank_one_bundles():
    nf = normalize(TwistMor(expr(x1, y1), (Swap(0),)))
    assert nf.sign == -1
    assert [str(e) for e in nf.target] == ["y", "x"]
    # the origin tags record the bijection: y came from slot 1, x from slot 0
    assert nf.bijection() == (("y", ("1",)), ("x", ("0",)))


@given(st.integers(0, 4), st.integers(0, 4))
def test_swap_is_an_involution(r1, r2):
    x, y = BundleSym("x", r1), BundleSym("y", r2)
    nf = normalize(TwistMor(expr(x, y), (Swap(0), Swap(0))))
    assert nf.sign == 1
    assert nf.target == expr(x, y)
    assert normalize(TwistMor(expr(x, y), (Swap(0),))).sign == swap_sign(r1, r2)


def test_unit_insertion_round_trip():
    nf = normalize(TwistMor(expr(x1), (Unit(0), Unit(0, remove=True))))
    assert nf.sign == 1 and nf.target == expr(x1)


@given(st.integers(0, 3))
def test_insert_then_cancel(r):
    e = BundleSym("E", r)
    for neg_first in (False, True):
        nf = normalize(TwistMor(expr(x1), (Insert(1, e, neg_first), Cancel(1))))
        assert nf.target == expr(x1)
        assert nf.sign == 1


def test_ill_typed_words_rejected():
    with pytest.raises(IllTypedWord):
        normalize(TwistMor(expr(x1), (Swap(0),)))
    with pytest.raises(IllTypedWord):
        normalize(TwistMor(expr(x1, y1), (Cancel(0),)))


def test_four_diagram_case_one():
    assert check_commutes(four_diagram(1, (1, 1, 1), random.Random(3))).commutes


@given(st.integers(1, 4), st.tuples(*[st.integers(0, 3)] * 3), st.integers(0, 10**6))
def test_four_diagrams_commute(case, ranks, seed):
    report = check_commutes(four_diagram(case, ranks, random.Random(seed)))
    assert report.commutes and report.sign == 1


@given(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(0, 10**6))
def test_exact_square_commutes_with_switch(ranks, seed):
    d = exact_square(ranks, random.Random(seed))
    assert check_commutes(d).commutes
    assert any(g.is_swap() for g in d.path1)


def test_exact_square_without_switch_fails_by_a_sign():
    report = check_commutes(exact_square((1, 1), random.Random(0), with_switch=False))
    assert not report.commutes and report.sign == -1


def test_deleting_the_switch_flips_the_sign():
    d = exact_square((1, 1), random.Random(0))
    [(which, _, gen, report)] = mutation_results(d)
    assert which == 1 and isinstance(gen, Swap)
    assert not report.commutes and report.sign == -1


@given(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(0, 10**6))
def test_bracket_splitting(ranks, seed):
    assert check_commutes(bracket_split(ranks, random.Random(seed))).commutes


@given(st.tuples(*[st.integers(0, 3)] * 3))
def test_hexagon(ranks):
    assert check_commutes(hexagon(ranks)).commutes


@given(st.tuples(*[st.integers(0, 3)] * 4))
def test_pentagon(ranks):
    assert check_commutes(pentagon(ranks)).commutes


@pytest.mark.parametrize("seed", range(5))
def test_graph_composition_isomorphisms(seed):
    for check in simplify_t_isos(random.Random(seed)):
        assert check.report.commutes, check


def test_degenerate_graph_of_an_isomorphism():
    # Y = Z with g invertible: g is both a closed immersion and smooth
    for case in (1, 2):
        assert t_iso_check(case, (1, 1), random.Random(1)).report.commutes


def test_contains_switch_detects_crossing_blocks():
    crossed = TwistMor(expr(x1, y1), (Swap(0),))
    straight = TwistMor(expr(x1, y1), (Swap(0), Swap(0)))
    assert contains_switch(crossed, 1, 1)
    assert not contains_switch(straight, 1, 1)


def test_mismatched_targets_are_reported():
    d = Diagram(expr(x1), (Insert(1, y1), Cancel(1)), (Insert(1, y1),))
    with pytest.raises(SourceTargetMismatch):
        check_commutes(d)
