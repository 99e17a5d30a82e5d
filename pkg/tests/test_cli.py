import csv

import numpy as np
import pytest

from kfunc import cli
from kfunc import constraint as cons

import oracles


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def broken_constraint():
    """A non-invertible f registered under a config name for the duration of a test."""
    spec = cons.ConstraintSpec("square-all-reals", f=lambda x, r: r * r, f_prime=lambda x, r: 2 * r,
                               f_inv=lambda x, y: np.sqrt(y), f_range=cons.POSITIVE)
    cli.CONSTRAINTS["broken"] = lambda s: spec
    yield
    del cli.CONSTRAINTS["broken"]


def write_config(tmp_path, text):
    path = tmp_path / "scenario.ini"
    path.write_text(text)
    return str(path)


def test_verify_default_passes(capsys):
    assert cli.main(["verify", "--verify-samples", "2"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "identities pass" in out


def test_verify_zero_k_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, "[constraint]\nK = 0\n")
    assert cli.main(["verify", "--config", cfg]) == 2
    assert "ZeroK" in capsys.readouterr().err


def test_verify_broken_constraint_fails(broken_constraint, capsys):
    assert cli.main(["verify", "--constraint-name", "broken", "--verify-samples", "1"]) == 1
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("constraint-invertibility"))
    assert "FAIL" in line


def test_deriv_affine_scenario(tmp_path):
    out = tmp_path / "deriv.csv"
    assert cli.main(["deriv", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["x", "rho", "grad", "k_deriv"]
    x = np.array([float(r["x"]) for r in rows])
    kd = np.array([float(r["k_deriv"]) for r in rows])
    assert np.abs(kd - oracles.constrained_derivative_square_affine(x)).max() <= 1e-4


def test_deriv_b_of_k_is_zero(tmp_path):
    out = tmp_path / "deriv.csv"
    args = ["deriv", "--out", str(out), "--functional-label", "b_of_k", "--functional-b", "sin",
            "--constraint-name", "power", "--field-extend", "true", "--constraint-K", "2.5"]
    assert cli.main(args) == 0
    assert max(abs(float(r["k_deriv"])) for r in read_csv(out)) <= 1e-10


def test_deriv_point_weight(tmp_path):
    out = tmp_path / "deriv.csv"
    assert cli.main(["deriv", "--out", str(out), "--deriv-weight", "point:0"]) == 0
    assert float(read_csv(out)[0]["k_deriv"]) == 0.0


def test_deriv_split_columns(tmp_path):
    out = tmp_path / "deriv.csv"
    assert cli.main(["deriv", "--out", str(out), "--deriv-split", "yes"]) == 0
    rows = read_csv(out)
    assert {"n_part", "shape_part"} <= set(rows[0])
    for r in rows:
        assert float(r["n_part"]) + float(r["shape_part"]) == pytest.approx(float(r["grad"]), abs=1e-12)
    assert float(rows[0]["shape_part"]) == pytest.approx(oracles.SHAPE_PART_AFFINE, abs=1e-4)


def test_deriv_off_constraint_reports_precondition(capsys):
    assert cli.main(["deriv", "--constraint-K", "3"]) == 2
    assert "ConstraintMismatch" in capsys.readouterr().err


def test_deriv_domain_error_names_node(capsys):
    args = ["deriv", "--constraint-name", "power", "--field-profile", "affine", "--field-b", "-0.5"]
    assert cli.main(args) == 2
    assert "node 0" in capsys.readouterr().err


def test_gateaux_sine_scenario(tmp_path):
    out = tmp_path / "g.csv"
    assert cli.main(["gateaux", "--out", str(out)]) == 0
    rows = {r["kind"]: r for r in read_csv(out) if r["kind"] != "estimate"}
    assert float(rows["extrapolated"]["value"]) == pytest.approx(oracles.INNER_KDERIV_SINE, abs=1e-4)
    assert float(rows["residual"]["value"]) <= 1e-4
    assert rows["status"]["value"] == "Converged"


def test_gateaux_zero_direction(tmp_path):
    out = tmp_path / "g.csv"
    assert cli.main(["gateaux", "--out", str(out), "--delta-profile", "constant", "--delta-c", "0"]) == 0
    rows = {r["kind"]: r for r in read_csv(out) if r["kind"] != "estimate"}
    assert float(rows["extrapolated"]["value"]) == 0.0


def test_gateaux_not_converged(tmp_path):
    out = tmp_path / "g.csv"
    args = ["gateaux", "--out", str(out), "--functional-label", "entropy", "--delta-a", "50",
            "--delta-k", "7", "--gateaux-eps", "2e-3,1e-3", "--tol", "1e-12"]
    assert cli.main(args) == 1
    assert read_csv(out)[-1]["value"] == "NotConverged"


def test_flow_scenario(tmp_path):
    out = tmp_path / "flow.csv"
    plot = tmp_path / "flow.svg"
    assert cli.main(["flow", "--out", str(out), "--flow-plot", str(plot)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["iter", "energy", "K", "residual", "eta"]
    energy = np.array([float(r["energy"]) for r in rows])
    k = np.array([float(r["K"]) for r in rows])
    assert np.all(np.diff(energy) <= 0.0)
    assert np.abs(k - 1).max() <= 1e-10
    assert float(rows[-1]["residual"]) <= 1e-7
    assert plot.read_text().lstrip().startswith("<?xml")


def test_flow_at_minimizer(tmp_path):
    out = tmp_path / "flow.csv"
    assert cli.main(["flow", "--out", str(out), "--field-profile", "constant"]) == 0
    assert len(read_csv(out)) <= 2


def test_flow_linear_functional(tmp_path, capsys):
    out = tmp_path / "flow.csv"
    assert cli.main(["flow", "--out", str(out), "--functional-label", "linear", "--flow-max-iter", "500"]) == 0
    err = capsys.readouterr().err
    assert "status=MaxIters" in err or "status=StepUnderflow" in err


@pytest.mark.parametrize("cmd", [["deriv", "--deriv-split", "1"], ["gateaux"], ["flow"],
                                 ["deriv", "--field-profile", "random", "--seed", "7", "--field-extend", "1"]])
def test_csv_is_byte_stable(tmp_path, cmd):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(cmd + ["--out", str(a)]) == cli.main(cmd + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_csv_uses_17_significant_digits(tmp_path):
    out = tmp_path / "d.csv"
    cli.main(["deriv", "--out", str(out), "--grid-n", "3"])
    x = read_csv(out)[0]["x"]
    assert float(x) == 1 / 6 and len(x.replace("0.", "")) == 17


def test_config_file_and_flag_override(tmp_path):
    cfg = write_config(tmp_path, "[grid]\nn = 50\n\n[functional]\nlabel = entropy\n")
    out = tmp_path / "d.csv"
    assert cli.main(["deriv", "--config", cfg, "--out", str(out)]) == 0
    assert len(read_csv(out)) == 50
    assert cli.main(["deriv", "--config", cfg, "--grid-n", "20", "--out", str(out)]) == 0
    assert len(read_csv(out)) == 20


@pytest.mark.parametrize("text,needle", [
    ("[bogus]\nx = 1\n", "unknown config section"),
    ("[grid]\nm = 3\n", "unknown key"),
    ("[grid]\nn = abc\n", "[grid] n"),
    ("[constraint]\nname = nope\n", "unknown constraint"),
    ("[functional]\nlabel = nope\n", "unknown functional"),
    ("[deriv]\nweight = point:999\n", "node index"),
    ("not an ini file", "malformed config"),
])
def test_config_errors(tmp_path, capsys, text, needle):
    cfg = write_config(tmp_path, text)
    assert cli.main(["deriv", "--config", cfg]) == 2
    assert needle in capsys.readouterr().err


def test_missing_config(capsys):
    assert cli.main(["deriv", "--config", "/nonexistent/x.ini"]) == 2


def test_usage_error():
    assert cli.main(["frobnicate"]) == 2
