"""Intrinsic-dimension estimators.

Two methods share the same exact-neighbor machinery:

* the loglog-ratio estimator (tag ``L2N2``): exponentiates an affine
  correction of the mean statistic Lbar_kj, with coefficients taken
  from a finite-sample calibration entry (or the asymptotic pair
  (1, -C_kj) when no calibration is supplied);
* the Levina-Bickel maximum-likelihood baseline (tag ``MLE``): averages
  per-point inverse mean log-ratios over the first k neighbors.

Both accept a query subset -- statistics averaged over a few thousand
query points against the full cloud lose very little accuracy and cut
the neighbor-search cost proportionally, which is how large clouds are
handled (see :func:`estimate_subsampled`).
"""
from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibrationEntry
from .cloud import as_cloud
from .constants import KJPair, c_kj_limit
from .neighbors import (EmptyStatisticError, LStatConfig, NeighborTable,
                        build_neighbor_table, l_stat_mean)

__all__ = [
    "EstimateReport",
    "estimate_l2n2",
    "estimate_mle",
    "estimate_subsampled",
    "round_dimension",
    "DEFAULT_PAIR",
    "DEFAULT_MLE_K",
]

#: (k, j) = (2, 1) is the consistently best-performing configuration.
DEFAULT_PAIR = KJPair(2, 1)

#: Neighbor count for the MLE baseline.
DEFAULT_MLE_K = 10

#: Relative sample-size band within which a calibration entry is applied
#: silently; outside it the estimate still runs but carries a warning.
CALIBRATION_N_TOLERANCE = 0.2


def round_dimension(d_hat: float) -> int:
    """Round an estimate to the nearest integer dimension.

    Ties (x.5) round half-up; the result is floored at 1 because the
    intrinsic dimension of a nonempty manifold sample is at least 1.
    """
    if not d_hat > 0:
        raise ValueError(f"d_hat must be positive, got {d_hat}")
    return max(1, math.floor(d_hat + 0.5))


@dataclass(frozen=True)
class EstimateReport:
    """One dimension estimate with its configuration and diagnostics.

    ``n_used`` is (cloud size, query count).  ``mean_L`` is the mean
    loglog-ratio statistic (None for the MLE method, which does not use
    it).  ``warnings`` collects non-fatal conditions such as a
    calibration applied outside its sample-size band.
    """

    d_hat: float
    d_rounded: int
    pair: KJPair | None
    n_used: tuple[int, int]
    mean_L: float | None
    excluded_count: int
    calibration_key: str | None
    method: str
    mle_k: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.d_hat > 0:
            raise ValueError("d_hat must be positive")
        if self.d_rounded != round_dimension(self.d_hat):
            raise ValueError("d_rounded inconsistent with d_hat")

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "d_hat": self.d_hat,
            "d_rounded": self.d_rounded,
            "n": self.n_used[0],
            "n_query": self.n_used[1],
            "mean_L": self.mean_L,
            "excluded_count": self.excluded_count,
            "calibration_key": self.calibration_key,
            "warnings": list(self.warnings),
        }
        if self.pair is not None:
            out["k"], out["j"] = self.pair.k, self.pair.j
        if self.mle_k is not None:
            out["k"] = self.mle_k
        return out


def _query_count(cloud_n: int, query_subset) -> int:
    return cloud_n if query_subset is None else len(np.asarray(query_subset))


def estimate_l2n2(cloud, pair: KJPair = DEFAULT_PAIR,
                  cal: CalibrationEntry | None = None,
                  query_subset=None,
                  neighbors: NeighborTable | None = None) -> EstimateReport:
    """Loglog-ratio dimension estimate d_hat = exp(est_alpha*Lbar + est_beta).

    Parameters
    ----------
    cloud : PointCloud or array-like
    pair : KJPair
        Neighbor orders (k, j); must match the calibration entry's pair.
    cal : CalibrationEntry, optional
        Finite-sample coefficients.  None applies the asymptotic
        coefficients (1, -c_kj_limit(pair)), i.e. d_hat = exp(Lbar - C)
        with C the exact limiting mean offset, which is accurate only
        for very large clouds.
    query_subset : array of int, optional
        Average the statistic over these points only (distances still
        against the full cloud).
    neighbors : NeighborTable, optional
        Precomputed table covering the same query set, kmax >= pair.k.

    Notes
    -----
    When the cloud size is outside +-20% of the calibration's n, the
    estimate is still produced but a warning is attached to the report:
    the coefficients drift slowly in n, so a mismatched entry degrades
    gracefully rather than failing.
    """
    cloud = as_cloud(cloud)
    notes: list[str] = []
    if cal is None:
        est_alpha, est_beta = 1.0, -c_kj_limit(pair)
        cal_key = "asymptotic"
    else:
        if cal.spec.pair != pair:
            raise ValueError(
                f"calibration entry is for (k,j)=({cal.spec.pair.k},{cal.spec.pair.j}), "
                f"requested ({pair.k},{pair.j})")
        est_alpha, est_beta = cal.est_alpha, cal.est_beta
        cal_key = cal.key_string()
        band = CALIBRATION_N_TOLERANCE * cal.spec.n
        if abs(cloud.n - cal.spec.n) > band:
            note = (f"cloud size n={cloud.n} is outside +-{int(CALIBRATION_N_TOLERANCE*100)}% "
                    f"of calibration n={cal.spec.n}; coefficients may be biased")
            notes.append(note)
            _warnings.warn(note, stacklevel=2)
    cfg = LStatConfig(k=pair.k, j=pair.j)
    mean_l, excluded = l_stat_mean(cloud, cfg, query_subset=query_subset,
                                   neighbors=neighbors)
    d_hat = math.exp(est_alpha * mean_l + est_beta)
    return EstimateReport(
        d_hat=d_hat, d_rounded=round_dimension(d_hat), pair=pair,
        n_used=(cloud.n, _query_count(cloud.n, query_subset)),
        mean_L=mean_l, excluded_count=excluded, calibration_key=cal_key,
        method="L2N2", warnings=tuple(notes))


def estimate_mle(cloud, k: int = DEFAULT_MLE_K, query_subset=None,
                 neighbors: NeighborTable | None = None) -> EstimateReport:
    """Levina-Bickel maximum-likelihood baseline.

    Per query point the local estimate inverts the mean log ratio over
    neighbors 1..k-1 relative to R_k.  For k >= 3 the numerator uses
    the usual finite-sample correction,

        m(x) = (k - 2) / sum_{i<k} log(R_k/R_i),

    without which the average carries a multiplicative (k-1)/(k-2)
    bias; k = 2 is the uncorrected reciprocal-log form
    (1/n) * sum 1/log(R_2/R_1), where the correction has no analogue.
    d_hat averages m over query points.  Query points with a zero or
    tied radius (the sum degenerates to 0 or infinity) are excluded and
    counted, mirroring the loglog-statistic policy.
    """
    cloud = as_cloud(cloud)
    if k < 2:
        raise ValueError("k must be >= 2")
    if neighbors is not None:
        if neighbors.kmax < k:
            raise ValueError(f"neighbor table kmax = {neighbors.kmax} < k = {k}")
        if neighbors.n_cloud != cloud.n:
            raise ValueError("neighbor table was built for a different cloud size")
        table = neighbors
    else:
        table = build_neighbor_table(cloud, k, query_indices=query_subset)
    radii = table.radii
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratios = np.log(radii[:, k - 1:k] / radii[:, :k - 1])
        sums = log_ratios.sum(axis=1)
    valid = np.isfinite(sums) & (sums > 0)
    n_query = radii.shape[0]
    excluded = int(n_query - valid.sum())
    if excluded == n_query:
        raise EmptyStatisticError(
            f"all {n_query} query points had degenerate neighbor ratios")
    if excluded > 0.01 * n_query:
        _warnings.warn(
            f"{excluded} of {n_query} query points excluded for degenerate "
            f"neighbor ratios (> 1%); duplicate-heavy data?", stacklevel=2)
    numerator = k - 2 if k >= 3 else k - 1
    d_hat = float(np.mean(numerator / sums[valid]))
    return EstimateReport(
        d_hat=d_hat, d_rounded=round_dimension(d_hat), pair=None,
        n_used=(cloud.n, _query_count(cloud.n, query_subset)),
        mean_L=None, excluded_count=excluded, calibration_key=None,
        method="MLE", mle_k=k)


def estimate_subsampled(cloud, pair: KJPair, cal: CalibrationEntry | None,
                        subset_size: int, seed: int) -> EstimateReport:
    """Loglog-ratio estimate over a random query subset of the cloud.

    Draws ``subset_size`` query indices uniformly without replacement
    (deterministic per seed) and delegates to :func:`estimate_l2n2`;
    distances are still measured against the full cloud, so only the
    averaging -- not the geometry -- is subsampled.  ``subset_size = n``
    reproduces the full estimate exactly.
    """
    cloud = as_cloud(cloud)
    if not 1 <= subset_size <= cloud.n:
        raise ValueError(f"subset_size must be in [1, n] = [1, {cloud.n}]")
    if subset_size == cloud.n:
        return estimate_l2n2(cloud, pair, cal)
    rng = np.random.default_rng(seed)
    subset = rng.choice(cloud.n, size=subset_size, replace=False)
    return estimate_l2n2(cloud, pair, cal, query_subset=subset)
