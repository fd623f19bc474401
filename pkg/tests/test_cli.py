import csv
import io
import json
import math

import pytest

from katokech.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_katok_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "katok", "--a", "2/5", "--count", "3", "--format", "csv")
    assert code == 0
    rows = rows_csv(out)
    assert list(rows[0]) == ["k", "m1", "m2", "value", "grading"]
    assert [float(r["value"]) for r in rows] == pytest.approx(
        [0, 20 * math.pi / 7, 100 * math.pi / 21], rel=1e-15
    )
    assert [r["grading"] for r in rows] == ["0", "2", "4"]


def test_katok_exact_json(capsys):
    code, out, _ = run(capsys, "spectrum", "katok", "--a", "2/5", "--count", "3", "--exact")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == "1"
    assert [r["value_exact"] for r in doc["rows"]] == ["0", "20π/7", "100π/21"]


def test_ellipsoid(capsys):
    code, out, _ = run(capsys, "spectrum", "ellipsoid", "--x", "1", "--y", "1", "--count", "6")
    assert code == 0
    assert [r["value"] for r in json.loads(out)["rows"]] == [0, 1, 1, 2, 2, 2]


def test_csv_and_json_rows_agree(capsys):
    args = ("spectrum", "katok", "--a", "sqrt2/2", "--count", "25")
    _, js, _ = run(capsys, *args)
    _, cs, _ = run(capsys, *args, "--format", "csv")
    jrows = json.loads(js)["rows"]
    crows = rows_csv(cs)
    assert len(jrows) == len(crows)
    for j, c in zip(jrows, crows):
        assert (j["k"], j["m1"], j["m2"], j["grading"]) == tuple(
            int(c[k]) for k in ("k", "m1", "m2", "grading")
        )
        assert float(c["value"]) == j["value"]


def test_deterministic_output(capsys):
    args = ("spectrum", "katok", "--a", "1/pi", "--count", "50", "--format", "csv")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_a_zero_is_usage_error(capsys):
    code, _, err = run(capsys, "spectrum", "katok", "--a", "0")
    assert code == 1
    assert "a" in err


@pytest.mark.parametrize("argv", [
    ("spectrum", "katok"),
    ("spectrum", "bogus"),
    ("spectrum", "katok", "--a", "sqrt2/2", "--exact"),
    ("generator", "--a", "2/5", "--degree", "3"),
    ("spectrum", "katok", "--a", "2/5", "--count", "0"),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_limit_exact(capsys):
    code, out, _ = run(capsys, "spectrum", "katok", "--a-limit", "0", "--count", "5", "--exact")
    assert code == 0
    assert [r["value_exact"] for r in json.loads(out)["rows"]] == ["0", "4π", "4π", "4π", "8π"]


def test_limit_comparison(capsys):
    code, out, _ = run(capsys, "spectrum", "katok", "--a", "1/10000", "--a-limit", "0", "--count", "3")
    assert code == 0
    dev = json.loads(out)["limit_comparison"]["max_abs_deviation"]
    assert 0 < dev < 2e-3


def test_grading_and_generator(capsys):
    code, out, _ = run(capsys, "grading", "--a", "2/5", "--m1", "1", "--m2", "1")
    assert code == 0 and json.loads(out)["rows"][0]["grading"] == 4
    code, out, _ = run(capsys, "generator", "--a", "2/5", "--degree", "4")
    row = json.loads(out)["rows"][0]
    assert code == 0 and (row["m1"], row["m2"]) == (1, 1)


def test_verify_pass(capsys):
    code, out, err = run(capsys, "verify", "lattice", "--a", "2/5", "--n-max", "10")
    assert code == 0
    assert json.loads(out)["rows"][0]["status"] == "pass"
    assert "lattice: pass" in err


def test_verify_expected_degenerate(capsys):
    code, out, _ = run(capsys, "verify", "bijection", "--a", "1/2", "--n-max", "30")
    assert code == 4
    assert json.loads(out)["rows"][0]["status"] == "expected-degenerate"


def test_verify_irrational_bijection(capsys):
    assert run(capsys, "verify", "bijection", "--a", "sqrt2/2", "--n-max", "30")[0] == 0


def test_verify_failure_exit_code(capsys, monkeypatch):
    from katokech import cli, verify

    monkeypatch.setitem(
        cli.SUITES, "lattice", lambda param, **kw: verify.Report("lattice", False, 1, {"n": 0})
    )
    assert run(capsys, "verify", "lattice", "--a", "2/5")[0] == 2


def test_certification_failure_exit_code(capsys, monkeypatch):
    from katokech import cli
    from katokech.errors import AmbiguousFloor

    def boom(*args, **kw):
        raise AmbiguousFloor("too close", k=7)

    monkeypatch.setattr(cli, "katok_spectrum", boom)
    code, _, err = run(capsys, "spectrum", "katok", "--a", "2/5")
    assert code == 3
    assert "k=7" in err


def test_flow_compare_oracle(capsys):
    code, out, _ = run(capsys, "flow", "compare-oracle", "--a", "2/5", "--seeds", "5", "--t", "2")
    assert code == 0
    assert json.loads(out)["rows"][0]["max_deviation"] <= 1e-8


@pytest.mark.slow
def test_flow_orbits_csv(capsys):
    code, out, _ = run(capsys, "flow", "orbits", "--a", "2/5", "--orbit", "g1", "--format", "csv")
    assert code == 0
    (row,) = rows_csv(out)
    assert float(row["period"]) == pytest.approx(10 * math.pi / 7, rel=1e-6)
