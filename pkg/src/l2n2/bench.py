"""Experiment harness: benchmark suites, sweeps, and reproducible reports.

A :class:`BenchReport` separates a deterministic ``results`` section
(identical plan + seed always reproduce it byte for byte) from a
``timing`` section holding wall-clock medians and timestamps, which
naturally vary run to run.  Sub-seeds for every cell are derived by
hashing the master seed with the cell identity (manifold identity,
sample size, repetition index), so any single cell can be reproduced in
isolation; the generated cloud is shared by all methods in a cell so
that method comparisons are paired.
"""
from __future__ import annotations

import csv
import json
import os
import statistics
import time
import warnings as _warnings
from dataclasses import dataclass, replace, asdict
from datetime import datetime, timezone

import numpy as np

from .calibration import (CalibrationEntry, NoCalibrationError, calibrate,
                          CalibrationSpec, default_table, lookup_nearest,
                          DEFAULT_QUERY_CAP)
from .cloud import PointCloud, read_cloud
from .constants import KJPair
from .estimators import (DEFAULT_MLE_K, DEFAULT_PAIR, estimate_l2n2,
                         estimate_mle)
from .manifolds import ManifoldSpec, generate
from .neighbors import build_neighbor_table
from .seeding import derive_seed

__all__ = [
    "MethodConfig",
    "ExperimentPlan",
    "BenchReport",
    "mpe",
    "run_plan",
    "ingest_matrix",
    "load_plan",
    "noise_sweep",
    "sphere_ladder",
    "calib_study",
]

REPORT_SCHEMA = "l2n2-bench-report v1"


def mpe(d_hat: float, d_true: int) -> float:
    """Mean percentage error of one estimate: 100 * |d_hat - d| / d."""
    if d_true < 1:
        raise ValueError("d_true must be a positive integer")
    return 100.0 * abs(d_hat - d_true) / d_true


@dataclass(frozen=True)
class MethodConfig:
    """One estimator configuration inside a plan.

    ``d_range`` selects the calibration entry for the loglog-ratio
    method and is ignored by the MLE baseline.
    """

    method: str = "l2n2"
    k: int = 2
    j: int = 1
    d_range: tuple[int, int] = (1, 20)

    def __post_init__(self) -> None:
        if self.method not in ("l2n2", "mle"):
            raise ValueError(f"method must be 'l2n2' or 'mle', got {self.method!r}")
        object.__setattr__(self, "d_range", (int(self.d_range[0]), int(self.d_range[1])))

    @property
    def label(self) -> str:
        if self.method == "l2n2":
            return f"L2N2({self.k},{self.j})"
        return f"MLE({self.k})"

    @property
    def kmax(self) -> int:
        return self.k


@dataclass(frozen=True)
class ExperimentPlan:
    suite: tuple[ManifoldSpec, ...]
    methods: tuple[MethodConfig, ...]
    repetitions: int
    n_list: tuple[int, ...]
    seed: int
    output: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "suite", tuple(self.suite))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class CellResult:
    manifold: str
    d_true: int
    ambient_D: int
    noise_sigma: float
    method: str
    n: int
    repetitions: int
    failures: int
    mean_mpe: float | None
    std_mpe: float | None
    mean_d_hat: float | None
    std_d_hat: float | None
    rounded_accuracy: float | None
    notes: tuple[str, ...] = ()
    error: str | None = None


@dataclass
class BenchReport:
    """Aggregated plan results plus a separate timing section."""

    plan_summary: dict
    cells: list[CellResult]
    suite_mean_mpe: dict[str, float]
    timing: dict

    def results_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "plan": self.plan_summary,
            "cells": [asdict(c) for c in self.cells],
            "suite_mean_mpe": self.suite_mean_mpe,
        }

    def to_json(self) -> str:
        return json.dumps({"results": self.results_dict(), "timing": self.timing},
                          sort_keys=True, indent=2)

    def write(self, outdir: str | os.PathLike) -> list[str]:
        """Write report.json and cells.csv into ``outdir``; returns paths."""
        os.makedirs(outdir, exist_ok=True)
        jpath = os.path.join(outdir, "report.json")
        with open(jpath, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")
        cpath = os.path.join(outdir, "cells.csv")
        cols = ["manifold", "d_true", "ambient_D", "noise_sigma", "method", "n",
                "repetitions", "failures", "mean_mpe", "std_mpe", "mean_d_hat",
                "std_d_hat", "rounded_accuracy", "error"]
        with open(cpath, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for c in self.cells:
                row = asdict(c)
                w.writerow([row[col] for col in cols])
        return [jpath, cpath]


def _cell_sort_key(c: CellResult):
    return (c.manifold, c.d_true, round(c.noise_sigma, 12), c.method, c.n)


def _resolve_calibrations(plan: ExperimentPlan, entries: list[CalibrationEntry]):
    """Pick a calibration entry per (l2n2 method, n); fail early if none fits."""
    resolved: dict[tuple[str, int], tuple[CalibrationEntry, str | None]] = {}
    for m in plan.methods:
        if m.method != "l2n2":
            continue
        pair = KJPair(m.k, m.j)
        for n in plan.n_list:
            try:
                resolved[(m.label, n)] = lookup_nearest(entries, n, pair, m.d_range)
            except NoCalibrationError as exc:
                raise NoCalibrationError(
                    f"plan method {m.label} with d_range {m.d_range} "
                    f"has no usable calibration: {exc}") from exc
    return resolved


def run_plan(plan: ExperimentPlan,
             calibration: list[CalibrationEntry] | None = None) -> BenchReport:
    """Run every (manifold, n, repetition, method) cell of a plan.

    Per-cell failures are caught and recorded on the cell rather than
    aborting the run.  Deterministic per master seed: cell sub-seeds are
    derived from (manifold identity, n, repetition), and all methods
    score the same generated cloud.
    """
    if not plan.suite:
        raise ValueError("empty plan: no manifolds in suite")
    if not plan.methods:
        raise ValueError("empty plan: no methods")
    entries = default_table() if calibration is None else calibration
    resolved = _resolve_calibrations(plan, entries)
    kmax = max(m.kmax for m in plan.methods)
    started = time.perf_counter()

    cells: list[CellResult] = []
    cell_times: dict[str, float] = {}
    for template in plan.suite:
        for n in plan.n_list:
            per_method: dict[str, dict] = {
                m.label: {"d_hat": [], "mpe": [], "rounded_ok": [], "failures": 0,
                          "errors": [], "times": []}
                for m in plan.methods}
            setup_times = []
            for rep in range(plan.repetitions):
                cell_seed = derive_seed(plan.seed, template.name, template.intrinsic_d,
                                        template.ambient_D, template.noise_sigma, n, rep)
                try:
                    t0 = time.perf_counter()
                    cloud = generate(replace(template, n=n, seed=cell_seed))
                    table = build_neighbor_table(cloud, kmax)
                    setup_times.append(time.perf_counter() - t0)
                except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                    for m in plan.methods:
                        per_method[m.label]["failures"] += 1
                        per_method[m.label]["errors"].append(f"rep {rep}: {exc!r}")
                    continue
                for m in plan.methods:
                    acc = per_method[m.label]
                    try:
                        t0 = time.perf_counter()
                        with _warnings.catch_warnings():
                            _warnings.simplefilter("ignore")
                            if m.method == "l2n2":
                                entry, _note = resolved[(m.label, n)]
                                rep_report = estimate_l2n2(
                                    cloud, KJPair(m.k, m.j), entry, neighbors=table)
                            else:
                                rep_report = estimate_mle(cloud, m.k, neighbors=table)
                        acc["times"].append(time.perf_counter() - t0)
                        acc["d_hat"].append(rep_report.d_hat)
                        acc["mpe"].append(mpe(rep_report.d_hat, template.intrinsic_d))
                        acc["rounded_ok"].append(
                            rep_report.d_rounded == template.intrinsic_d)
                    except Exception as exc:  # noqa: BLE001
                        acc["failures"] += 1
                        acc["errors"].append(f"rep {rep}: {exc!r}")
            for m in plan.methods:
                acc = per_method[m.label]
                notes = []
                if m.method == "l2n2":
                    note = resolved[(m.label, n)][1]
                    if note:
                        notes.append(note)
                ok = len(acc["d_hat"])
                if ok == 0:
                    cells.append(CellResult(
                        manifold=template.name, d_true=template.intrinsic_d,
                        ambient_D=template.ambient_D, noise_sigma=template.noise_sigma,
                        method=m.label, n=n, repetitions=plan.repetitions,
                        failures=acc["failures"], mean_mpe=None, std_mpe=None,
                        mean_d_hat=None, std_d_hat=None, rounded_accuracy=None,
                        notes=tuple(notes), error="; ".join(acc["errors"][:3])))
                    continue
                std_mpe = statistics.stdev(acc["mpe"]) if ok > 1 else 0.0
                std_dh = statistics.stdev(acc["d_hat"]) if ok > 1 else 0.0
                cells.append(CellResult(
                    manifold=template.name, d_true=template.intrinsic_d,
                    ambient_D=template.ambient_D, noise_sigma=template.noise_sigma,
                    method=m.label, n=n, repetitions=plan.repetitions,
                    failures=acc["failures"],
                    mean_mpe=float(np.mean(acc["mpe"])), std_mpe=float(std_mpe),
                    mean_d_hat=float(np.mean(acc["d_hat"])), std_d_hat=float(std_dh),
                    rounded_accuracy=float(np.mean(acc["rounded_ok"])),
                    notes=tuple(notes),
                    error=None))
                key = f"{template.name}|d={template.intrinsic_d}|sigma={template.noise_sigma}|{m.label}|n={n}"
                if acc["times"]:
                    cell_times[key] = statistics.median(acc["times"]) * 1e3
                if setup_times:
                    cell_times[f"{template.name}|d={template.intrinsic_d}|sigma={template.noise_sigma}|setup|n={n}"] = (
                        statistics.median(setup_times) * 1e3)

    cells.sort(key=_cell_sort_key)
    suite_mean: dict[str, float] = {}
    for m in plan.methods:
        for n in plan.n_list:
            per_manifold = [c.mean_mpe for c in cells
                            if c.method == m.label and c.n == n and c.mean_mpe is not None]
            if per_manifold:
                suite_mean[f"{m.label}|n={n}"] = float(np.mean(per_manifold))
    plan_summary = {
        "suite": [{"name": s.name, "intrinsic_d": s.intrinsic_d,
                   "ambient_D": s.ambient_D, "noise_sigma": s.noise_sigma}
                  for s in plan.suite],
        "methods": [m.label for m in plan.methods],
        "repetitions": plan.repetitions,
        "n_list": list(plan.n_list),
        "seed": plan.seed,
    }
    timing = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "total_seconds": round(time.perf_counter() - started, 3),
        "per_cell_median_ms": {k: round(v, 3) for k, v in sorted(cell_times.items())},
    }
    return BenchReport(plan_summary=plan_summary, cells=cells,
                       suite_mean_mpe=suite_mean, timing=timing)


def ingest_matrix(path: str | os.PathLike, fmt: str = "auto",
                  subsample: int | None = None, seed: int | None = None,
                  delimiter: str | None = None) -> PointCloud:
    """Read a numeric matrix as a PointCloud, optionally row-subsampled.

    ``subsample`` keeps that many rows, drawn uniformly without
    replacement from a generator seeded by ``seed`` -- the standard way
    to probe estimator behavior across subset sizes of a big dataset.
    """
    cloud = read_cloud(path, fmt=fmt, delimiter=delimiter)
    if subsample is not None and subsample < cloud.n:
        if subsample < 2:
            raise ValueError("subsample must keep at least 2 rows")
        rng = np.random.default_rng(seed)
        rows = np.sort(rng.choice(cloud.n, size=subsample, replace=False))
        cloud = PointCloud(cloud.points[rows])
    return cloud


# ---------------------------------------------------------------------------
# plan files
# ---------------------------------------------------------------------------

def _parse_method(token: str) -> MethodConfig:
    parts = token.strip().split(":")
    name = parts[0].lower()
    if name == "l2n2":
        k = int(parts[1]) if len(parts) > 1 else DEFAULT_PAIR.k
        j = int(parts[2]) if len(parts) > 2 else DEFAULT_PAIR.j
        return MethodConfig("l2n2", k=k, j=j)
    if name == "mle":
        k = int(parts[1]) if len(parts) > 1 else DEFAULT_MLE_K
        return MethodConfig("mle", k=k)
    raise ValueError(f"unknown method token {token!r} (expected l2n2[:k:j] or mle[:k])")


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def load_plan(path: str | os.PathLike) -> ExperimentPlan:
    """Load a declarative plan from an INI file (section ``[plan]``).

    Keys: ``suite`` (comma-separated manifold ids), ``methods``
    (comma-separated ``l2n2[:k:j]`` / ``mle[:k]`` tokens), ``n_list``,
    ``repetitions``, ``seed``, optional ``noise_sigma``, ``d_range``
    (``lo:hi`` calibration selector for l2n2 methods) and ``output``.
    No executable content, just key-value text.
    """
    import configparser

    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    if "plan" not in cp:
        raise ValueError(f"{path}: missing [plan] section")
    sec = cp["plan"]
    known = {"suite", "methods", "n_list", "repetitions", "seed",
             "noise_sigma", "d_range", "output"}
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"{path}: unknown plan keys: {sorted(unknown)}")
    suite_ids = [s.strip() for s in sec.get("suite", "").split(",") if s.strip()]
    if not suite_ids:
        raise ValueError(f"{path}: plan needs a non-empty suite")
    sigma = sec.getfloat("noise_sigma", 0.0)
    seed = sec.getint("seed", 0)
    suite = [ManifoldSpec(name=mid, n=2, seed=0, noise_sigma=sigma)
             for mid in suite_ids]
    d_range = _parse_range(sec.get("d_range", "1:20"))
    methods = [replace(_parse_method(tok), d_range=d_range)
               for tok in sec.get("methods", "l2n2:2:1").split(",") if tok.strip()]
    n_list = [int(v) for v in sec.get("n_list", "2500").split(",") if v.strip()]
    return ExperimentPlan(
        suite=tuple(suite), methods=tuple(methods),
        repetitions=sec.getint("repetitions", 20),
        n_list=tuple(n_list), seed=seed,
        output=sec.get("output", None))


# ---------------------------------------------------------------------------
# canned studies
# ---------------------------------------------------------------------------

def noise_sweep(dims=(6, 10), sigmas=(0.0, 0.01, 0.1), ambient_D: int = 11,
                n: int = 2500, repetitions: int = 100, seed: int = 0,
                calibration: list[CalibrationEntry] | None = None,
                d_range: tuple[int, int] = (1, 20)) -> BenchReport:
    """Noisy-sphere study: S^d in R^ambient_D across noise levels.

    Every (dimension, sigma) combination becomes one suite entry; both
    the loglog-ratio estimator and the MLE baseline are scored.
    """
    suite = [ManifoldSpec(name="sphere", intrinsic_d=d, ambient_D=ambient_D,
                          n=2, seed=0, noise_sigma=s)
             for d in dims for s in sigmas]
    methods = (MethodConfig("l2n2", k=2, j=1, d_range=d_range),
               MethodConfig("mle", k=DEFAULT_MLE_K))
    plan = ExperimentPlan(suite=tuple(suite), methods=methods,
                          repetitions=repetitions, n_list=(n,), seed=seed)
    return run_plan(plan, calibration=calibration)


def sphere_ladder(dims=(10, 20, 30, 40), n: int = 2500, repetitions: int = 20,
                  seed: int = 0,
                  calibration: list[CalibrationEntry] | None = None,
                  d_range: tuple[int, int] = (10, 40)) -> BenchReport:
    """Sphere ladder: minimal-embedding S^d across dimensions vs MLE."""
    suite = [ManifoldSpec(name="sphere", intrinsic_d=d, ambient_D=d + 1,
                          n=2, seed=0)
             for d in dims]
    methods = (MethodConfig("l2n2", k=2, j=1, d_range=d_range),
               MethodConfig("mle", k=DEFAULT_MLE_K))
    plan = ExperimentPlan(suite=tuple(suite), methods=methods,
                          repetitions=repetitions, n_list=(n,), seed=seed)
    return run_plan(plan, calibration=calibration)


def calib_study(n_list=(625, 1250, 2500, 5000), pair: KJPair = DEFAULT_PAIR,
                d_range: tuple[int, int] = (1, 20), repetitions: int = 50,
                seed: int = 0, query_cap: int | None = DEFAULT_QUERY_CAP):
    """Fit calibration coefficients across sample sizes.

    Returns (entries, report) where ``report`` has one row per n with
    the fitted coefficients and their standard errors -- the data behind
    the drift-toward-(1, gamma) curves.
    """
    entries = []
    rows = []
    started = time.perf_counter()
    for n in n_list:
        spec = CalibrationSpec(n=int(n), pair=pair, d_range=d_range,
                               repetitions=repetitions,
                               seed=derive_seed(seed, "calib-study", int(n)),
                               query_cap=query_cap)
        entry = calibrate(spec)
        entries.append(entry)
        rows.append({
            "n": int(n),
            "alpha_fit": entry.alpha_fit, "alpha_fit_stderr": entry.alpha_fit_stderr,
            "beta_fit": entry.beta_fit, "beta_fit_stderr": entry.beta_fit_stderr,
            "est_alpha": entry.est_alpha, "est_beta": entry.est_beta,
        })
    report = {
        "results": {
            "schema": REPORT_SCHEMA,
            "study": "calibration-drift",
            "pair": {"k": pair.k, "j": pair.j},
            "d_range": list(d_range), "repetitions": repetitions, "seed": seed,
            "rows": rows,
        },
        "timing": {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "total_seconds": round(time.perf_counter() - started, 3),
        },
    }
    return entries, report
