"""Finite-sample calibration of the loglog-ratio dimension estimator.

At finite sample size n the mean statistic over a d-dimensional standard
Gaussian cloud is very nearly affine in log d:

    Lbar_kj  ~=  alpha_fit * log(d) + beta_fit,

with (alpha_fit, beta_fit) -> (1, C_kj) as n grows.  This module fits
those coefficients by ordinary least squares over seeded Gaussian clouds,
persists them in a small versioned text table keyed by
(n, k, j, d_min, d_max), and inverts the fit into the coefficients the
estimator actually applies:

    est_alpha = 1 / alpha_fit,      est_beta = -beta_fit / alpha_fit,
    d_hat     = exp(est_alpha * Lbar + est_beta).

A default table fitted on this package's own pipeline ships with the
package (see ``l2n2.data``) for n in {625, 1250, 2500, 5000}.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .cloud import PointCloud
from .constants import KJPair
from .neighbors import LStatConfig, l_stat_mean
from .seeding import derive_seed

__all__ = [
    "CalibrationSpec",
    "CalibrationEntry",
    "CalibrationFormatError",
    "NoCalibrationError",
    "sample_gaussian_cloud",
    "calibration_cells",
    "calibrate",
    "save_table",
    "load_table",
    "lookup",
    "lookup_nearest",
    "default_table",
    "DEFAULT_QUERY_CAP",
]

TABLE_VERSION = "l2n2-calibration-table v1"

#: Query-subset size used for very large calibration clouds: beyond this
#: n, the mean statistic is taken over this many random query points
#: (distances still against the full cloud).
DEFAULT_QUERY_CAP = 2500

_COLUMNS = [
    "n", "k", "j", "d_min", "d_max", "repetitions", "seed", "query_cap",
    "alpha_fit", "beta_fit", "alpha_fit_stderr", "beta_fit_stderr",
    "est_alpha", "est_beta",
]


class CalibrationFormatError(ValueError):
    """Calibration table file has an unknown schema version or bad row."""


class NoCalibrationError(LookupError):
    """No table entry matches the requested key."""


@dataclass(frozen=True)
class CalibrationSpec:
    """Recipe for one calibration run.

    ``d_range`` is the inclusive integer dimension range of the Gaussian
    ladder; ``query_cap``, when set, caps the number of query points per
    cloud (used for large n, where averaging over a random subset loses
    almost nothing).
    """

    n: int
    pair: KJPair
    d_range: tuple[int, int]
    repetitions: int
    seed: int
    query_cap: int | None = None

    def __post_init__(self) -> None:
        d_min, d_max = self.d_range
        object.__setattr__(self, "d_range", (int(d_min), int(d_max)))
        if d_min < 1:
            raise ValueError("d_range must start at 1 or above")
        if d_max < d_min:
            raise ValueError(f"empty d_range {self.d_range}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.n < self.pair.k + 1:
            raise ValueError(f"n = {self.n} too small for k = {self.pair.k}")
        if self.query_cap is not None and self.query_cap < 1:
            raise ValueError("query_cap must be positive when given")

    def key(self) -> tuple[int, int, int, int, int]:
        return (self.n, self.pair.k, self.pair.j, self.d_range[0], self.d_range[1])


@dataclass(frozen=True)
class CalibrationEntry:
    """Fitted calibration coefficients with their provenance spec.

    ``alpha_fit``/``beta_fit`` are slope and intercept of the Lbar vs
    log d regression; the inverted estimator coefficients are exposed as
    properties so the algebraic identities

        est_alpha * alpha_fit = 1,    est_alpha * beta_fit + est_beta = 0

    hold by construction.
    """

    spec: CalibrationSpec
    alpha_fit: float
    beta_fit: float
    alpha_fit_stderr: float
    beta_fit_stderr: float

    def __post_init__(self) -> None:
        if not self.alpha_fit > 0:
            raise ValueError(f"alpha_fit must be positive, got {self.alpha_fit}")
        cap = 1.0 + 3.0 * self.alpha_fit_stderr
        if self.alpha_fit > cap:
            # Finite-sample theory puts the slope strictly below 1; a fit
            # meaningfully above it signals a miscalibrated run.
            warnings.warn(
                f"alpha_fit = {self.alpha_fit:.6f} exceeds 1 + 3*stderr = {cap:.6f}; "
                f"the finite-sample slope should not exceed 1", stacklevel=2)

    @property
    def est_alpha(self) -> float:
        return 1.0 / self.alpha_fit

    @property
    def est_beta(self) -> float:
        return -(self.est_alpha * self.beta_fit)

    def key(self) -> tuple[int, int, int, int, int]:
        return self.spec.key()

    def key_string(self) -> str:
        n, k, j, lo, hi = self.key()
        return f"n={n},k={k},j={j},d=[{lo},{hi}]"


def sample_gaussian_cloud(d: int, n: int, seed: int) -> PointCloud:
    """n i.i.d. standard-normal points in R^d, deterministic per seed."""
    if d < 1 or n < 2:
        raise ValueError("need d >= 1 and n >= 2")
    rng = np.random.default_rng(seed)
    return PointCloud(rng.standard_normal((n, d)))


def _ols_with_stderr(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Slope/intercept OLS fit of y on x with coefficient standard errors."""
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = len(y) - 2
    if dof <= 0:
        return float(coef[0]), float(coef[1]), float("nan"), float("nan")
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    return float(coef[0]), float(coef[1]), math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])


def calibration_cells(spec: CalibrationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Pooled regression samples: one (log d, Lbar) pair per (d, repetition).

    For every dimension d in ``spec.d_range`` and every repetition,
    draws an n-point standard Gaussian cloud in R^d from a derived
    sub-seed and computes the mean statistic Lbar (over a random query
    subset of ``query_cap`` points when the cloud is larger than the
    cap).  Deterministic per ``spec.seed``.
    """
    d_min, d_max = spec.d_range
    if d_min == d_max:
        raise ValueError(
            f"calibration needs at least two distinct dimensions, got d_range {spec.d_range}")
    cfg = LStatConfig(k=spec.pair.k, j=spec.pair.j)
    log_d = []
    lbar = []
    for d in range(d_min, d_max + 1):
        for rep in range(spec.repetitions):
            cell_seed = derive_seed(spec.seed, "calibration-cloud", spec.n, d, rep)
            cloud = sample_gaussian_cloud(d, spec.n, cell_seed)
            subset = None
            if spec.query_cap is not None and spec.n > spec.query_cap:
                pick = np.random.default_rng(
                    derive_seed(spec.seed, "calibration-query", spec.n, d, rep))
                subset = pick.choice(spec.n, size=spec.query_cap, replace=False)
            mean, _excluded = l_stat_mean(cloud, cfg, query_subset=subset)
            log_d.append(math.log(d))
            lbar.append(mean)
    return np.asarray(log_d), np.asarray(lbar)


def calibrate(spec: CalibrationSpec,
              cells: tuple[np.ndarray, np.ndarray] | None = None) -> CalibrationEntry:
    """Fit (alpha_fit, beta_fit) by pooled OLS of Lbar on log d.

    Regresses the :func:`calibration_cells` samples by ordinary least
    squares -- each (d, repetition) cell is one regression sample.
    Pass ``cells`` to reuse samples already computed for this spec.
    """
    log_d, lbar = calibration_cells(spec) if cells is None else cells
    alpha, beta, alpha_se, beta_se = _ols_with_stderr(log_d, lbar)
    return CalibrationEntry(spec=spec, alpha_fit=alpha, beta_fit=beta,
                            alpha_fit_stderr=alpha_se, beta_fit_stderr=beta_se)


# ---------------------------------------------------------------------------
# table persistence
# ---------------------------------------------------------------------------

def save_table(entries: list[CalibrationEntry], path: str | os.PathLike) -> None:
    """Write entries as a versioned tab-separated text table."""
    lines = [TABLE_VERSION, "\t".join(_COLUMNS)]
    for e in sorted(entries, key=lambda e: e.key()):
        s = e.spec
        row = [
            str(s.n), str(s.pair.k), str(s.pair.j),
            str(s.d_range[0]), str(s.d_range[1]),
            str(s.repetitions), str(s.seed),
            "-" if s.query_cap is None else str(s.query_cap),
            repr(e.alpha_fit), repr(e.beta_fit),
            repr(e.alpha_fit_stderr), repr(e.beta_fit_stderr),
            repr(e.est_alpha), repr(e.est_beta),
        ]
        lines.append("\t".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_table(text: str, origin: str) -> list[CalibrationEntry]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != TABLE_VERSION:
        head = lines[0].strip() if lines else "<empty>"
        raise CalibrationFormatError(
            f"{origin}: expected header {TABLE_VERSION!r}, found {head!r}")
    if len(lines) < 2 or lines[1].split("\t") != _COLUMNS:
        raise CalibrationFormatError(f"{origin}: column header does not match schema")
    entries = []
    for ln in lines[2:]:
        f = ln.split("\t")
        if len(f) != len(_COLUMNS):
            raise CalibrationFormatError(
                f"{origin}: row has {len(f)} fields, expected {len(_COLUMNS)}: {ln!r}")
        spec = CalibrationSpec(
            n=int(f[0]), pair=KJPair(int(f[1]), int(f[2])),
            d_range=(int(f[3]), int(f[4])), repetitions=int(f[5]),
            seed=int(f[6]), query_cap=None if f[7] == "-" else int(f[7]))
        # est_alpha / est_beta columns are informational; the properties
        # recompute them exactly from the stored fit.
        entries.append(CalibrationEntry(
            spec=spec, alpha_fit=float(f[8]), beta_fit=float(f[9]),
            alpha_fit_stderr=float(f[10]), beta_fit_stderr=float(f[11])))
    return entries


def load_table(path: str | os.PathLike) -> list[CalibrationEntry]:
    """Load a calibration table written by :func:`save_table`."""
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_table(fh.read(), origin=str(path))


def default_table() -> list[CalibrationEntry]:
    """The calibration table shipped with the package."""
    text = (resources.files("l2n2") / "data" / "default_calibration.tsv").read_text("utf-8")
    return _parse_table(text, origin="l2n2/data/default_calibration.tsv")


def lookup(entries: list[CalibrationEntry], n: int, pair: KJPair,
           d_range: tuple[int, int]) -> CalibrationEntry:
    """Exact-key lookup by (n, k, j, d_min, d_max).

    Raises :class:`NoCalibrationError` naming the nearest available n
    values for the same (k, j, d_range) when the sample size is missing.
    """
    key = (n, pair.k, pair.j, int(d_range[0]), int(d_range[1]))
    for e in entries:
        if e.key() == key:
            return e
    same_pair = sorted({e.spec.n for e in entries
                        if e.key()[1:] == key[1:]})
    if same_pair:
        nearest = sorted(same_pair, key=lambda m: (abs(m - n), m))[:2]
        raise NoCalibrationError(
            f"no calibration entry for n={n}, (k,j)=({pair.k},{pair.j}), "
            f"d in [{key[3]},{key[4]}]; nearest available n: "
            + ", ".join(str(m) for m in sorted(nearest)))
    available = ", ".join(e.key_string() for e in entries) or "<empty table>"
    raise NoCalibrationError(
        f"no calibration entry for n={n}, (k,j)=({pair.k},{pair.j}), "
        f"d in [{key[3]},{key[4]}]; table holds: {available}")


def lookup_nearest(entries: list[CalibrationEntry], n: int, pair: KJPair,
                   d_range: tuple[int, int]) -> tuple[CalibrationEntry, str | None]:
    """Lookup that falls back to the nearest-n entry with a warning text.

    The fitted coefficients drift slowly and smoothly in n, so the
    nearest table entry is a serviceable stand-in; the returned warning
    string (None on an exact hit) says which entry was substituted.
    """
    try:
        return lookup(entries, n, pair, d_range), None
    except NoCalibrationError:
        candidates = [e for e in entries
                      if e.key()[1:] == (pair.k, pair.j, int(d_range[0]), int(d_range[1]))]
        if not candidates:
            raise
        best = min(candidates, key=lambda e: (abs(e.spec.n - n), e.spec.n))
        note = (f"no calibration for n={n}; using nearest entry "
                f"{best.key_string()} (coefficients drift slowly in n)")
        return best, note
