from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mwcalc.errors import FieldMismatch
from mwcalc.fields import ExtensionField, RationalField, finite_field
from mwcalc.gw import (GWForm, base_change, gw_add, gw_eq, gw_mul, normalize, transfer, witt_eq)

from oracles import chain_equivalent, is_square_mod

Q = RationalField()
QR = RationalField(real=True)
F5, F7 = finite_field(5), finite_field(7)


def diag(F, *entries, offset=0):
    return GWForm.diagonal(F, [F.coerce(e) for e in entries], offset)


def test_product_of_units():
    assert gw_eq(gw_mul(diag(Q, 2), diag(Q, 3)), diag(Q, 6)) is True


def test_hyperbolic_invariants():
    h = gw_add(diag(Q, 1), diag(Q, -1))
    assert (h.rank, h.disc, h.signature) == (2, -1, 0)
    assert gw_eq(h, GWForm.hyperbolic(Q)) is True


def test_disc_over_f5():
    x = diag(F5, 3, 3)
    assert (x.rank, x.disc) == (2, 1)


def test_real_signature():
    x = diag(QR, 1, 1, -2)
    assert (x.rank, x.signature) == (3, 1)
    # over an ordered field only the sign survives in the discriminant
    assert x.disc == QR.square_class(Fraction(-2))


def test_zero_form():
    z = GWForm.zero(Q)
    assert (z.rank, z.disc, z.signature) == (0, 1, 0)
    assert z.is_zero


def test_square_unit_over_f7():
    x = diag(F7, 2)
    assert (x.rank, x.disc) == (1, 1)
    assert gw_eq(x, diag(F7, 1)) is True


def test_equality_examples():
    assert gw_eq(diag(Q, 1, -1), diag(Q, 2, -2)) is True
    assert gw_eq(diag(QR, 1), diag(QR, -1)) is False


def test_witt_equality_drops_hyperbolic_part():
    assert witt_eq(diag(Q, 3, -3, 5), diag(Q, 5)) is True
    # -1 is a square mod 5 but not mod 7
    assert witt_eq(diag(F5, 1, 1), GWForm.zero(F5)) is True
    assert witt_eq(diag(F7, 1, 1), GWForm.zero(F7)) is False
    assert witt_eq(diag(F7, 1, 1, 1, 1), GWForm.zero(F7)) is True


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatch):
        gw_add(diag(F5, 1), diag(F7, 1))


def _trace_gram(p, c0):
    """Gram matrix of (a, b) -> Tr(ab) on F_p[x]/(x^2 + c0) in basis 1, x."""
    # Tr(1) = 2, Tr(x) = 0, Tr(x^2) = Tr(-c0) = -2 c0
    return [[2 % p, 0], [0, (-2 * c0) % p]]


def test_transfer_f25_over_f5():
    E = ExtensionField(F5, (2, 0, 1))
    t = transfer(GWForm.one(E))
    gram = _trace_gram(5, 2)
    det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
    assert t.rank == 2
    assert (t.disc == 1) == is_square_mod(5, det)
    assert gw_eq(t, diag(F5, gram[0][0], gram[1][1])) is True


def test_transfer_along_trivial_extension():
    x = diag(F7, 3, 5, offset=1)
    assert gw_eq(transfer(x, F7), x) is True


f9 = st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda v: v != (0, 0))


@given(st.lists(f9, max_size=3), st.lists(f9, max_size=3))
def test_transfer_additive_f9(xs, ys):
    E = ExtensionField(finite_field(3), (1, 0, 1))
    x, y = GWForm.diagonal(E, xs), GWForm.diagonal(E, ys)
    lhs = transfer(gw_add(x, y))
    rhs = gw_add(transfer(x), transfer(y))
    assert lhs.rank == 2 * (len(xs) + len(ys))
    assert gw_eq(lhs, rhs) is True


def test_base_change_collapses_square_classes():
    F25 = finite_field(5, 2)
    for a in range(1, 5):
        assert gw_eq(base_change(diag(F5, a), F25), GWForm.one(F25)) is True


units = st.sampled_from([3, 5, 7]).flatmap(
    lambda p: st.tuples(st.just(p),
                        st.lists(st.integers(1, p - 1), max_size=4),
                        st.lists(st.integers(1, p - 1), max_size=4)))


@given(units)
def test_gw_eq_matches_chain_oracle(case):
    p, xs, ys = case
    F = finite_field(p)
    assert gw_eq(diag(F, *xs), diag(F, *ys)) is chain_equivalent(p, xs, 0, ys, 0)


@given(units, st.integers(1, 6))
def test_ring_laws(case, c):
    p, xs, ys = case
    F = finite_field(p)
    x, y, z = diag(F, *xs), diag(F, *ys), diag(F, c % p or 1)
    assert gw_eq(gw_mul(x, gw_add(y, z)), gw_add(gw_mul(x, y), gw_mul(x, z))) is True
    assert gw_eq(gw_mul(x, y), gw_mul(y, x)) is True
    assert gw_eq(normalize(x), x) is True


@given(st.lists(st.integers(-30, 30).filter(bool), max_size=5))
def test_normalize_is_idempotent_over_q(xs):
    x = diag(Q, *xs)
    n = normalize(x)
    assert normalize(n) == n
    assert (n.rank, n.disc, n.signature) == (x.rank, x.disc, x.signature)
