import json

import pytest

from nacalc.cli import ALL_OPS, OP_COVERAGE, main
from nacalc.verify import VerificationReport, verify_suite


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_gamma_prints_fraction(capsys):
    assert run(capsys, "gamma", "--p", "2", "--s", "3", "--b", "-1", "--mode", "closed") == (0, "-4/3", "")


def test_gamma_divergent_series_is_input_error(capsys):
    code, _, err = run(capsys, "gamma", "--p", "2", "--s", "3", "--b", "1", "--mode", "series")
    assert code == 2 and err.startswith("error[E130]")


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and err.startswith("error[E101]")


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = run(capsys, "qgauss", "density", "--spec", str(bad), "--level", "1,1")
    assert code == 2 and err.startswith("error[E102]")


def test_cap_exceeded(capsys, monkeypatch):
    monkeypatch.setenv("NACALC_MAX_GRID", "10")
    code, _, err = run(capsys, "lattice", "--p", "2", "--level", "3,3")
    assert code == 2 and err.startswith("error[E103]")


def test_missing_flag(capsys):
    code, _, err = run(capsys, "gamma", "--p", "2", "--s", "3")
    assert code == 2 and "--b" in err


def test_atomic_density(capsys, tmp_path):
    spec = write(tmp_path, "atomic.json", {"p": 2, "s": 3, "q": "2", "B": [["0"]]})
    code, out, _ = run(capsys, "qgauss", "density", "--spec", spec, "--level", "1,1")
    data = json.loads(out)
    assert code == 0
    assert [v["point"] for v in data["values"]] == [["0/1"]]
    assert data["values"][0]["value"][0]["coeff"]["coeffs"] == ["2/1"]


def test_qgauss_subcommands(capsys, tmp_path):
    s1 = write(tmp_path, "a.json", {"p": 2, "s": 3, "q": "2", "B": [["1"]], "gamma": ["1/2"]})
    s2 = write(tmp_path, "b.json", {"p": 2, "s": 3, "q": "1", "B": [["1"]]})
    assert run(capsys, "qgauss", "compare", "--spec", s1, "--spec2", s2)[1] == "orthogonal"
    assert run(capsys, "qgauss", "compare", "--spec", s1, "--spec2", s1)[1] == "equivalent"
    assert run(capsys, "qgauss", "char", "--spec", s1, "--z", "1/2")[1] == "19683*zeta_4"
    code, out, _ = run(capsys, "qgauss", "convolve", "--spec", s1, "--spec2", s1)
    assert json.loads(out)["B"] == [["2/1"]]
    code, out, _ = run(capsys, "qgauss", "trace", "--spec", s2, "--level", "2,2", "--json")
    assert code == 0 and "ratio" in json.loads(out)
    nu = write(tmp_path, "nu.json", {"atoms": [{"point": ["1/2"], "weight": "1"}]})
    assert run(capsys, "qgauss", "feynman", "--spec", s1, "--nu", nu)[1] == "19683*zeta_4"
    code, out, _ = run(capsys, "qgauss", "probe", "--q", "2", "--g", "1", "--p", "2", "--s", "3")
    assert json.loads(out)["strictly_decreasing"] is True
    two = write(tmp_path, "c.json", {"p": 2, "s": 3, "q": "2", "B": [["1", "0"], ["0", "2"]]})
    code, out, _ = run(capsys, "qgauss", "project", "--spec", two, "--g", "1,1")
    assert json.loads(out)["B"] == [["3/1"]]
    code, out, _ = run(capsys, "qgauss", "moments", "--spec", two, "--indices", "2,2", "--level", "1,1")
    assert code == 0 and out


def test_heat_and_wiener(capsys, tmp_path):
    sym = write(tmp_path, "sym.json", {"n": 1, "coeffs": [{"k": 2, "idx": [1, 1], "b": "1"}]})
    u0 = write(tmp_path, "u0.json", ["1"] * 4 + ["0"] * 12)
    code, out, _ = run(capsys, "heat", "evolve", "--symbol", sym, "--u0", u0, "--t", "1/2",
                       "--level", "2,2", "--p", "2", "--s", "3")
    assert code == 0 and json.loads(out)["level"]["M"] == 2
    assert run(capsys, "heat", "symbol", "--symbol", sym, "--y", "1", "--s", "3")[1] == "L"
    spec = write(tmp_path, "w.json", {"p": 2, "s": 3, "q": "2", "B": [["1"]]})
    phi = write(tmp_path, "phi.json", ["1", "1"])
    code, out, _ = run(capsys, "wiener", "expect", "--spec", spec, "--grid", "0,1/2,1",
                       "--phi", phi, "--level", "2,2")
    assert (code, out) == (0, "-22319/1296")
    code, out, _ = run(capsys, "wiener", "transition", "--spec", spec, "--t", "3/4", "--u", "1/4",
                       "--kind", "local-field", "--prime", "2")
    assert json.loads(out)["zeta"]["re"] == "0/1"


def test_domain_subcommands(capsys, tmp_path):
    assert run(capsys, "padic", "ord", "--p", "2", "--x", "12")[1] == "2"
    assert run(capsys, "padic", "frac", "--p", "2", "--x", "7/4")[1] == "3/4"
    assert run(capsys, "value", "chi", "--p", "2", "--x", "1/4")[1] == "zeta_4"
    assert run(capsys, "value", "spower", "--s", "3", "--alpha", "2")[1] == "9"
    code, out, _ = run(capsys, "lattice", "--p", "2", "--level", "1,1")
    assert code == 0 and out
    f = write(tmp_path, "f.json", ["1", "0", "0", "0"])
    code, out, _ = run(capsys, "fourier", "--input", f, "--level", "1,1", "--p", "2")
    assert code == 2  # the fourier subcommand needs a grid file with its level
    grid = {"level": {"p": 2, "M": 1, "N": 1}, "values": [{"point": ["0"], "value": "1"}]}
    g = write(tmp_path, "g.json", grid)
    code, out, _ = run(capsys, "fourier", "--input", g)
    assert code == 0 and len(json.loads(out)["values"]) == 4
    assert run(capsys, "integrate", "--input", g)[1] == "1/2"
    code, out, _ = run(capsys, "convolve", "--input", g, "--input2", g)
    assert code == 0
    code, out, _ = run(capsys, "kernel", "--u", "-2", "--p", "2", "--s", "3", "--level", "1,1")
    assert code == 0
    ball = write(tmp_path, "ball.json", ["1", "0", "1", "0"])
    assert run(capsys, "pd", "--b", "0", "--input", ball, "--x", "0", "--s", "3", "--p", "2",
               "--level", "1,1")[1] == "-3/5"
    code, out, _ = run(capsys, "pderiv", "--u", "-2", "--input", ball, "--s", "3", "--p", "2",
                       "--level", "1,1")
    assert code == 0


def test_every_operation_is_reachable():
    assert set(ALL_OPS) <= set(OP_COVERAGE)


def test_verify_fourier_passes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "fourier")
    data = json.loads(out)
    assert code == 0 and data["overall"] == "pass"
    assert "runtime_ms" not in data["checks"][0]


def test_verify_pd_reports_failure(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "pd")
    data = json.loads(out)
    assert code == 1 and data["overall"] == "fail"
    failed = [c["id"] for c in data["checks"] if c["status"] != "pass"]
    assert failed == ["pd.composition-decay"]


def test_report_deterministic_and_roundtrips():
    a, b = verify_suite("gamma", 0), verify_suite("gamma", 0)
    assert a.dumps() == b.dumps()
    again = VerificationReport.from_json(json.loads(a.dumps()))
    assert again.dumps() == a.dumps()
    assert again.overall == "pass"


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify_suite("nope")
