import numpy as np

from kfunc.grid import Grid
from kfunc.verify_suite import CASES, REQUIRED_IDS, Report, Row, default_context, run_all

# every identity the library documents must have an executable case
EXPECTED = {
    "restricted-ambiguity", "ambiguity-cancellation", "projection-annihilation", "weight-normalization",
    "adjoint-duality", "equal-derivatives", "constraint-functional-annihilation",
    "scale-invariant-unconstrained", "k-homogeneity", "homogeneity-euler", "k-independent-unconstrained",
    "extension-gradient", "extension-idempotence", "extension-exactness", "shape-reconstruction",
    "shape-conserving-average", "rescaled-shape-route", "norm-derivative", "l-shape-normalization",
    "l-shape-reconstruction", "deformed-gateaux", "chain-rule", "chain-rule-mu-insensitivity",
}


def test_coverage_complete():
    assert EXPECTED <= REQUIRED_IDS
    assert len({c.id for c in CASES}) == len(CASES)


def test_run_all_small_grid_passes():
    ctx = default_context(seed=3, grid=Grid(60), samples=2)
    report = run_all(ctx=ctx)
    assert report.passed, report.format()


def test_failures_become_rows():
    def boom(ctx):
        raise RuntimeError("kaput")

    from kfunc.verify_suite import IdentityCase
    cases = (IdentityCase("boom", "always fails", 1.0, "abs", boom),
             IdentityCase("nan", "nan residual", 1.0, "abs", lambda ctx: float("nan")))
    report = run_all(ctx=default_context(grid=Grid(10), samples=1), cases=cases)
    assert not report.passed
    assert all(not r.passed for r in report.rows)
    assert "kaput" in report.rows[0].error
    assert "FAIL" in report.format()


def test_report_format():
    rep = Report([Row("a", "t", 1e-13, 1e-12, "abs"), Row("b", "t", np.inf, 1e-12, "abs", "Err")])
    text = rep.format()
    assert "PASS" in text and "FAIL" in text and "1/2" in text
