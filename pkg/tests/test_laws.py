import pytest

from mwcalc import corr as C
from mwcalc import laws as L
from mwcalc.errors import UnknownSuite
from mwcalc.laws import run_laws, suite_names


def test_suite_catalogue():
    names = suite_names()
    assert {"ch-all", "mw-zero-dim"} <= set(names)
    assert len([n for n in names if n.startswith("ch-") and n != "ch-all"]) == 20


@pytest.mark.parametrize("suite", ["ch-all", "mw-zero-dim"])
def test_suites_pass_at_small_scale(suite):
    report = run_laws(suite, seed=11, cases=6)
    assert report.passed, report.text()
    assert report.text().endswith("status = pass")


def test_reports_are_deterministic():
    a = run_laws("ch-A", seed=3, cases=10).text()
    b = run_laws("ch-A", seed=3, cases=10).text()
    assert a == b


def test_instance_qualified_lookup():
    assert run_laws("A", seed=0, cases=2, instance="CH").suite == "ch-A"
    with pytest.raises(UnknownSuite):
        run_laws("ch-A", seed=0, cases=1, instance="MW")
    with pytest.raises(UnknownSuite):
        run_laws("no-such-suite")


def test_conditional_commutativity_notes_odd_parities():
    report = run_laws("mw-CC", seed=1, cases=40)
    assert report.passed
    assert report.notes, "odd parity pairs should be recorded as notes"
    assert all("hypothesis violated" in text for _, _, text in report.notes)


def test_corrupted_product_is_caught(monkeypatch):
    honest = C.ch_product
    monkeypatch.setattr(C, "ch_product", lambda a, b: honest(a, b).scale(2))
    report = run_laws("ch-I", seed=0, cases=20)
    assert not report.passed
    assert "failure: seed=0 law=I" in report.text()


def test_asymmetric_product_breaks_commutativity(monkeypatch):
    honest = C.ch_product

    def lopsided(a, b):
        out = honest(a, b)
        return out.scale(-1) if (a.codim, len(a.support)) > (b.codim, len(b.support)) else out

    monkeypatch.setattr(C, "ch_product", lopsided)
    assert not run_laws("ch-CC", seed=0, cases=40).passed


def test_corrupted_identity_is_caught(monkeypatch):
    honest = C.identity_corr
    monkeypatch.setattr(C, "identity_corr", lambda X: honest(X) + honest(X))
    report = run_laws("mw-identity", seed=0, cases=10)
    assert not report.passed
    assert report.failures[0][1] == "identity"


def test_crashing_law_is_a_failure(monkeypatch):
    def boom(rng):
        raise ZeroDivisionError("kaboom")

    monkeypatch.setitem(L.CH_LAWS, "T", boom)
    report = run_laws("ch-T", seed=0, cases=2)
    assert len(report.failures) == 2
    assert "ZeroDivisionError" in report.failures[0][3]
