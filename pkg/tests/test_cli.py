import io

import pytest

from mwcalc import __version__
from mwcalc.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_version():
    assert run("version") == (0, f"mwcalc {__version__}\n", "")


def test_eval_prints_one_line():
    code, out, _ = run("eval", "(rank (gw (q 1) (q -1)))")
    assert (code, out) == (0, "value = 2\n")


def test_eval_error_names_the_kind():
    code, out, err = run("eval", "(rank nope)")
    assert code == 1 and out == ""
    assert err.startswith("error: line 1: UnboundName")


def test_batch_of_three_forms(tmp_path):
    f = tmp_path / "ok.mw"
    f.write_text("(rank (h))\n(let g (gw (q 3)))\n(over (fp 5) (normalize (gw (q 3) (q 3))))\n")
    code, out, err = run("run", str(f))
    assert code == 0 and err == ""
    assert len(out.splitlines()) == 3


def test_batch_syntax_error_on_line_two(tmp_path):
    f = tmp_path / "bad.mw"
    f.write_text("(rank (h))\n(rank (h)\n")
    code, out, err = run("run", str(f))
    assert code == 1
    assert out == ""
    assert err.startswith("error: line 2:")


def test_batch_stops_at_first_evaluation_error(tmp_path):
    f = tmp_path / "stop.mw"
    f.write_text("(rank (h))\n\n(rank missing)\n(rank (h))\n")
    code, out, err = run("run", str(f))
    assert code == 1
    assert out == "value = 2\n"
    assert "line 3" in err and "UnboundName" in err


def test_empty_batch(tmp_path):
    f = tmp_path / "empty.mw"
    f.write_text("")
    assert run("run", str(f)) == (0, "", "")


def test_missing_file(tmp_path):
    code, _, err = run("run", str(tmp_path / "absent.mw"))
    assert code == 1 and "IoError" in err


def test_batch_output_is_deterministic(tmp_path):
    f = tmp_path / "det.mw"
    f.write_text("(check-commutes (four-diagram 2 1 1 1))\n(cohomology (rs-complex (point (fp 5)) :kmw 0))\n")
    assert run("run", str(f)) == run("run", str(f))


def test_laws_exit_codes():
    code, out, _ = run("laws", "ch-I", "--seed", "4", "--cases", "5")
    assert code == 0 and out.rstrip().endswith("status = pass")
    code, _, err = run("laws", "nonsense")
    assert code == 2 and "UnknownSuite" in err


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("MWCALC_SEED", "9")
    _, out, _ = run("laws", "ch-A", "--seed", "1", "--cases", "3")
    assert "seed = 9" in out


@pytest.mark.parametrize("argv", [[], ["bogus"]])
def test_bad_usage(argv):
    with pytest.raises(SystemExit) as info:
        run(*argv)
    assert info.value.code == 2
