from __future__ import annotations

import math

import numpy as np
import pytest

from l2n2 import (CalibrationEntry, CalibrationSpec, EULER_GAMMA, KJPair,
                  PointCloud, build_neighbor_table, estimate_l2n2,
                  estimate_mle, estimate_subsampled, round_dimension,
                  sample_gaussian_cloud)
from l2n2 import estimators as est_mod


@pytest.mark.parametrize("x,expected", [
    (1.1, 1), (9.96, 10), (0.4, 1), (2.5, 3), (1.5, 2), (0.0001, 1), (19.49, 19),
])
def test_round_dimension(x, expected):
    assert round_dimension(x) == expected


def test_round_dimension_rejects_nonpositive():
    with pytest.raises(ValueError):
        round_dimension(0.0)
    with pytest.raises(ValueError):
        round_dimension(-3.0)


def _entry(n=2500, k=2, j=1, d_range=(1, 20), alpha=0.93, beta=0.67):
    spec = CalibrationSpec(n=n, pair=KJPair(k, j), d_range=d_range,
                           repetitions=50, seed=0)
    return CalibrationEntry(spec=spec, alpha_fit=alpha, beta_fit=beta,
                            alpha_fit_stderr=0.003, beta_fit_stderr=0.006)


def test_asymptotic_identity_forced_mean(monkeypatch):
    # With the mean statistic pinned to log 10 + gamma and asymptotic
    # coefficients (1, -gamma), the estimate must come back 10.
    monkeypatch.setattr(est_mod, "l_stat_mean",
                        lambda *a, **kw: (math.log(10.0) + EULER_GAMMA, 0))
    cloud = PointCloud(np.random.default_rng(0).standard_normal((50, 3)))
    report = estimate_l2n2(cloud, KJPair(2, 1), cal=None)
    assert report.d_hat == pytest.approx(10.0, rel=1e-13)
    assert report.d_rounded == 10
    assert report.calibration_key == "asymptotic"


def test_calibrated_formula_is_exp_affine(monkeypatch):
    monkeypatch.setattr(est_mod, "l_stat_mean", lambda *a, **kw: (2.0, 3))
    cloud = PointCloud(np.random.default_rng(1).standard_normal((2500, 3)))
    cal = _entry(alpha=0.9, beta=0.6)
    report = estimate_l2n2(cloud, KJPair(2, 1), cal)
    expected = math.exp(cal.est_alpha * 2.0 + cal.est_beta)
    assert report.d_hat == expected
    assert report.excluded_count == 3
    assert report.mean_L == 2.0
    assert report.calibration_key == cal.key_string()


def test_pair_mismatch_is_an_error():
    cloud = sample_gaussian_cloud(3, 100, seed=0)
    with pytest.raises(ValueError, match=r"\(k,j\)"):
        estimate_l2n2(cloud, KJPair(4, 2), _entry(k=2, j=1, n=100))


def test_sample_size_band_warns_but_estimates():
    cloud = sample_gaussian_cloud(3, 100, seed=0)
    cal = _entry(n=2500)
    with pytest.warns(UserWarning, match="outside"):
        report = estimate_l2n2(cloud, KJPair(2, 1), cal)
    assert report.d_hat > 0
    assert any("outside" in w for w in report.warnings)
    # Inside the band: no warning, no report note.
    near = sample_gaussian_cloud(3, 2300, seed=1)
    report2 = estimate_l2n2(near, KJPair(2, 1), cal)
    assert report2.warnings == ()


def test_reuses_neighbor_table():
    cloud = sample_gaussian_cloud(4, 300, seed=2)
    table = build_neighbor_table(cloud, kmax=10)
    a = estimate_l2n2(cloud, KJPair(2, 1), _entry(n=300), neighbors=table)
    b = estimate_l2n2(cloud, KJPair(2, 1), _entry(n=300))
    assert a.d_hat == b.d_hat
    m = estimate_mle(cloud, k=10, neighbors=table)
    m2 = estimate_mle(cloud, k=10)
    assert m.d_hat == m2.d_hat


def test_mle_k2_displayed_formula_by_hand():
    # Collinear points 0, 1, 3, 7: radii pairs (1,3), (1,2), (2,3), (4,6).
    pts = np.array([[0.0], [1.0], [3.0], [7.0]])
    expected = np.mean([1 / math.log(3), 1 / math.log(2),
                        1 / math.log(1.5), 1 / math.log(1.5)])
    report = estimate_mle(PointCloud(pts), k=2)
    assert report.d_hat == pytest.approx(expected, rel=1e-14)
    assert report.method == "MLE"
    assert report.mle_k == 2
    assert report.pair is None and report.mean_L is None


def test_mle_uniform_square():
    cloud = PointCloud(np.random.default_rng(8).uniform(size=(5000, 2)))
    report = estimate_mle(cloud, k=10)
    assert report.d_hat == pytest.approx(2.0, abs=0.15)


def test_mle_k_validation():
    cloud = sample_gaussian_cloud(2, 50, seed=0)
    with pytest.raises(ValueError):
        estimate_mle(cloud, k=1)


def test_subsample_full_size_is_identity():
    cloud = sample_gaussian_cloud(5, 400, seed=3)
    cal = _entry(n=400)
    full = estimate_l2n2(cloud, KJPair(2, 1), cal)
    sub = estimate_subsampled(cloud, KJPair(2, 1), cal, subset_size=400, seed=9)
    assert sub.d_hat == full.d_hat
    assert sub.n_used == full.n_used


def test_subsample_seeded_and_close_to_full():
    cloud = sample_gaussian_cloud(5, 3000, seed=4)
    cal = _entry(n=3000)
    full = estimate_l2n2(cloud, KJPair(2, 1), cal)
    s1 = estimate_subsampled(cloud, KJPair(2, 1), cal, subset_size=800, seed=1)
    s1_again = estimate_subsampled(cloud, KJPair(2, 1), cal, subset_size=800, seed=1)
    s2 = estimate_subsampled(cloud, KJPair(2, 1), cal, subset_size=800, seed=2)
    assert s1.d_hat == s1_again.d_hat
    assert s1.d_hat != s2.d_hat  # different query draws
    assert s1.d_hat == pytest.approx(full.d_hat, abs=0.5)
    assert s1.n_used == (3000, 800)
    with pytest.raises(ValueError):
        estimate_subsampled(cloud, KJPair(2, 1), cal, subset_size=5000, seed=0)


def test_estimate_scale_and_rigid_motion_invariance():
    rng = np.random.default_rng(6)
    pts = rng.standard_normal((250, 4))
    cal = _entry(n=250)
    base = estimate_l2n2(PointCloud(pts), KJPair(2, 1), cal)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    for scale in (1e-3, 1.0, 1e3):
        moved = PointCloud(scale * (pts @ q.T) + rng.standard_normal(4))
        got = estimate_l2n2(moved, KJPair(2, 1), cal)
        assert got.d_hat == pytest.approx(base.d_hat, rel=1e-9)


def test_asymptotic_consistency_on_uniform_cubes():
    # Large uniform clouds with asymptotic coefficients land within 5%.
    rng = np.random.default_rng(31)
    for d in (2, 3, 5):
        estimates = []
        for _ in range(3):
            cloud = PointCloud(rng.uniform(size=(100_000, d)))
            estimates.append(estimate_l2n2(cloud, KJPair(2, 1), cal=None).d_hat)
        mean = float(np.mean(estimates))
        assert abs(mean - d) / d < 0.05


def test_ladder_monotone_in_dimension():
    from l2n2 import sphere_uniform
    means = []
    for d in (4, 8, 16):
        vals = [estimate_l2n2(sphere_uniform(d, 1500, seed=s), KJPair(2, 1),
                              cal=None).d_hat for s in (0, 1)]
        means.append(np.mean(vals))
    assert means[0] < means[1] < means[2]


def test_report_validates_consistency():
    from l2n2 import EstimateReport
    with pytest.raises(ValueError):
        EstimateReport(d_hat=5.2, d_rounded=6, pair=KJPair(2, 1),
                       n_used=(10, 10), mean_L=1.0, excluded_count=0,
                       calibration_key="x", method="L2N2")
    with pytest.raises(ValueError):
        EstimateReport(d_hat=-1.0, d_rounded=1, pair=KJPair(2, 1),
                       n_used=(10, 10), mean_L=1.0, excluded_count=0,
                       calibration_key="x", method="L2N2")
