"""Benchmark plan runner: determinism, plan files, report layout."""
import json

import numpy as np
import pytest

from l2n2.bench import (
    REPORT_SCHEMA,
    ExperimentPlan,
    MethodConfig,
    ingest_matrix,
    load_plan,
    mpe,
    run_plan,
)
from l2n2.calibration import CalibrationEntry, CalibrationSpec, NoCalibrationError
from l2n2.cloud import write_cloud, PointCloud
from l2n2.constants import KJPair
from l2n2.manifolds import ManifoldSpec


def make_entry(n=2500, k=2, j=1, d_range=(1, 20), alpha=0.93, beta=0.67):
    spec = CalibrationSpec(n=n, pair=KJPair(k, j), d_range=d_range,
                           repetitions=50, seed=0)
    return CalibrationEntry(spec=spec, alpha_fit=alpha, beta_fit=beta,
                            alpha_fit_stderr=0.003, beta_fit_stderr=0.006)


def tiny_plan(**overrides):
    base = dict(
        suite=(ManifoldSpec("cube", n=2, seed=0, intrinsic_d=2),
               ManifoldSpec("M13a_Scurve", n=2, seed=0)),
        methods=(MethodConfig("l2n2", k=2, j=1),
                 MethodConfig("mle", k=5)),
        repetitions=2,
        n_list=(150,),
        seed=7,
    )
    base.update(overrides)
    return ExperimentPlan(**base)


CAL = [make_entry(n=150)]


# ---------------------------------------------------------------------------
# small pieces
# ---------------------------------------------------------------------------

def test_mpe_values():
    assert mpe(10.0, 10) == 0.0
    assert mpe(11.0, 10) == pytest.approx(10.0)
    assert mpe(9.0, 10) == pytest.approx(10.0)
    assert mpe(3.0, 2) == pytest.approx(50.0)


def test_mpe_rejects_bad_truth():
    with pytest.raises(ValueError):
        mpe(5.0, 0)


def test_method_labels():
    assert MethodConfig("l2n2", k=2, j=1).label == "L2N2(2,1)"
    assert MethodConfig("mle", k=10).label == "MLE(10)"
    with pytest.raises(ValueError, match="method"):
        MethodConfig("pca")


def test_plan_validation():
    with pytest.raises(ValueError):
        tiny_plan(repetitions=0)
    with pytest.raises(ValueError, match="suite"):
        run_plan(tiny_plan(suite=()), calibration=CAL)
    with pytest.raises(ValueError, match="methods"):
        run_plan(tiny_plan(methods=()), calibration=CAL)


def test_missing_calibration_fails_before_running():
    # wrong pair on offer -> the plan must refuse up front, naming the method
    with pytest.raises(NoCalibrationError, match=r"L2N2\(2,1\)"):
        run_plan(tiny_plan(), calibration=[make_entry(k=4, j=2)])


# ---------------------------------------------------------------------------
# running plans
# ---------------------------------------------------------------------------

def test_run_plan_cells_and_summary():
    report = run_plan(tiny_plan(), calibration=CAL)
    # 2 manifolds x 1 n x 2 methods
    assert len(report.cells) == 4
    for cell in report.cells:
        assert cell.failures == 0
        assert cell.error is None
        assert cell.repetitions == 2
        assert 0.0 <= cell.rounded_accuracy <= 1.0
        assert cell.mean_d_hat is not None and cell.mean_d_hat > 0
    assert set(report.suite_mean_mpe) == {"L2N2(2,1)|n=150", "MLE(5)|n=150"}
    # both suite manifolds are 2-dimensional and easy at n=150
    for cell in report.cells:
        if cell.method == "L2N2(2,1)":
            assert cell.mean_d_hat == pytest.approx(2.0, abs=0.75)


def test_run_plan_results_deterministic():
    a = run_plan(tiny_plan(), calibration=CAL)
    b = run_plan(tiny_plan(), calibration=CAL)
    dump = lambda r: json.dumps(r.results_dict(), sort_keys=True)  # noqa: E731
    assert dump(a) == dump(b)
    # timing is intentionally outside the deterministic section
    assert a.timing["total_seconds"] >= 0.0


def test_run_plan_seed_changes_results():
    a = run_plan(tiny_plan(), calibration=CAL)
    b = run_plan(tiny_plan(seed=8), calibration=CAL)
    da = [c.mean_d_hat for c in a.cells]
    db = [c.mean_d_hat for c in b.cells]
    assert da != db


def test_methods_score_the_same_cloud():
    # one cloud per (manifold, n, rep): the l2n2 and mle columns must be
    # paired, so adding a method cannot change the other's numbers
    solo = run_plan(tiny_plan(methods=(MethodConfig("l2n2"),)), calibration=CAL)
    both = run_plan(tiny_plan(), calibration=CAL)
    solo_cells = {(c.manifold, c.n): c for c in solo.cells}
    for cell in both.cells:
        if cell.method == "L2N2(2,1)":
            assert cell.mean_d_hat == solo_cells[(cell.manifold, cell.n)].mean_d_hat


def test_cell_failure_recorded_not_fatal():
    # kmax = 10 with n = 8 cannot build a neighbor table; the run must
    # finish with the failure written into the cell
    plan = tiny_plan(methods=(MethodConfig("mle", k=10),), n_list=(8,))
    report = run_plan(plan, calibration=CAL)
    assert len(report.cells) == 2
    for cell in report.cells:
        assert cell.failures == 2
        assert cell.mean_mpe is None
        assert cell.error
    assert report.suite_mean_mpe == {}


def test_report_write(tmp_path):
    report = run_plan(tiny_plan(), calibration=CAL)
    paths = report.write(tmp_path)
    assert sorted(p.rsplit("/", 1)[-1] for p in paths) == ["cells.csv", "report.json"]
    with open(paths[0], encoding="utf-8") as fh:
        loaded = json.load(fh)
    assert loaded["results"]["schema"] == REPORT_SCHEMA
    assert len(loaded["results"]["cells"]) == 4
    assert "generated_at" in loaded["timing"]
    lines = open(paths[1], encoding="utf-8").read().strip().splitlines()
    assert lines[0].startswith("manifold,")
    assert len(lines) == 1 + 4


# ---------------------------------------------------------------------------
# plan files
# ---------------------------------------------------------------------------

PLAN_INI = """\
[plan]
suite = M13a_Scurve, M5b_Helix2d
methods = l2n2:4:2, mle:7
n_list = 100, 200
repetitions = 3
seed = 42
noise_sigma = 0.01
d_range = 1:10
"""


def test_load_plan_roundtrip(tmp_path):
    path = tmp_path / "plan.ini"
    path.write_text(PLAN_INI)
    plan = load_plan(path)
    assert [s.name for s in plan.suite] == ["M13a_Scurve", "M5b_Helix2d"]
    assert all(s.noise_sigma == 0.01 for s in plan.suite)
    assert [m.label for m in plan.methods] == ["L2N2(4,2)", "MLE(7)"]
    assert plan.methods[0].d_range == (1, 10)
    assert plan.n_list == (100, 200)
    assert plan.repetitions == 3
    assert plan.seed == 42
    assert plan.output is None


def test_load_plan_rejects_unknown_keys(tmp_path):
    path = tmp_path / "plan.ini"
    path.write_text("[plan]\nsuite = M7_Roll\nfrobnicate = 1\n")
    with pytest.raises(ValueError, match="frobnicate"):
        load_plan(path)


def test_load_plan_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_plan(tmp_path / "nope.ini")


def test_load_plan_needs_plan_section(tmp_path):
    path = tmp_path / "plan.ini"
    path.write_text("[other]\nsuite = cube\n")
    with pytest.raises(ValueError, match=r"\[plan\]"):
        load_plan(path)


def test_load_plan_needs_suite(tmp_path):
    path = tmp_path / "plan.ini"
    path.write_text("[plan]\nmethods = mle\n")
    with pytest.raises(ValueError, match="suite"):
        load_plan(path)


def test_load_plan_bad_method_token(tmp_path):
    path = tmp_path / "plan.ini"
    path.write_text("[plan]\nsuite = M7_Roll\nmethods = pca:3\n")
    with pytest.raises(ValueError, match="pca"):
        load_plan(path)


# ---------------------------------------------------------------------------
# external matrices
# ---------------------------------------------------------------------------

def test_ingest_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((50, 3))
    path = tmp_path / "data.csv"
    write_cloud(PointCloud(pts), path, fmt="delimited")
    cloud = ingest_matrix(path)
    np.testing.assert_allclose(cloud.points, pts)


def test_ingest_matrix_subsample_deterministic(tmp_path):
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((60, 2))
    path = tmp_path / "data.csv"
    write_cloud(PointCloud(pts), path, fmt="delimited")
    a = ingest_matrix(path, subsample=20, seed=5)
    b = ingest_matrix(path, subsample=20, seed=5)
    c = ingest_matrix(path, subsample=20, seed=6)
    assert a.n == 20
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    # every kept row is a row of the original
    original = {tuple(row) for row in pts}
    assert all(tuple(row) in original for row in a.points)


def test_ingest_matrix_subsample_noop_when_larger(tmp_path):
    pts = np.arange(20.0).reshape(10, 2)
    path = tmp_path / "data.csv"
    write_cloud(PointCloud(pts), path, fmt="delimited")
    cloud = ingest_matrix(path, subsample=50, seed=0)
    assert cloud.n == 10


def test_ingest_matrix_subsample_minimum(tmp_path):
    pts = np.arange(20.0).reshape(10, 2)
    path = tmp_path / "data.csv"
    write_cloud(PointCloud(pts), path, fmt="delimited")
    with pytest.raises(ValueError, match="at least 2"):
        ingest_matrix(path, subsample=1, seed=0)
