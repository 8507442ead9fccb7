"""Intrinsic-dimension estimation from nearest-neighbor distance ratios.

The estimator turns the empirical mean of the loglog ratio statistic
L = -log(log(R_k / R_j)) into a dimension estimate through a universal
constant C_{k,j} and a finite-sample linear calibration.  The package
also ships an MLE baseline, synthetic benchmark manifolds, and a
reproducible experiment harness with JSON/CSV/figure reports.
"""
from __future__ import annotations

from .bench import (BenchReport, ExperimentPlan, MethodConfig, calib_study,
                    ingest_matrix, load_plan, mpe, noise_sweep, run_plan,
                    sphere_ladder)
from .calibration import (CalibrationEntry, CalibrationFormatError,
                          CalibrationSpec, NoCalibrationError, calibrate,
                          calibration_cells, default_table, load_table,
                          lookup, lookup_nearest, sample_gaussian_cloud,
                          save_table, DEFAULT_QUERY_CAP)
from .cloud import (PointCloud, as_cloud, read_binary, read_cloud,
                    read_delimited, write_binary, write_cloud,
                    write_delimited)
from .constants import (EULER_GAMMA, KJPair, c_kj_beta_oracle, c_kj_exact,
                        c_kj_limit, constants_grid, poisson_limit_oracle,
                        unit_ball_volume)
from .estimators import (DEFAULT_MLE_K, DEFAULT_PAIR, EstimateReport,
                         estimate_l2n2, estimate_mle, estimate_subsampled,
                         round_dimension)
from .manifolds import (ManifoldSpec, UnimplementedManifoldError, add_noise,
                        generate, list_manifolds, sphere_uniform)
from .neighbors import (EmptyStatisticError, Excluded, LStatConfig,
                        NeighborTable, build_neighbor_table, l_stat,
                        l_stat_mean)
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # cloud
    "PointCloud", "as_cloud", "read_cloud", "write_cloud", "read_delimited",
    "write_delimited", "read_binary", "write_binary",
    # neighbor statistics
    "LStatConfig", "NeighborTable", "Excluded", "EmptyStatisticError",
    "build_neighbor_table", "l_stat", "l_stat_mean",
    # constants
    "EULER_GAMMA", "KJPair", "c_kj_exact", "c_kj_limit", "c_kj_beta_oracle",
    "poisson_limit_oracle", "unit_ball_volume", "constants_grid",
    # calibration
    "CalibrationSpec", "CalibrationEntry", "CalibrationFormatError",
    "NoCalibrationError", "calibrate", "calibration_cells",
    "sample_gaussian_cloud", "save_table", "load_table", "lookup",
    "lookup_nearest", "default_table", "DEFAULT_QUERY_CAP",
    # estimators
    "EstimateReport", "estimate_l2n2", "estimate_mle", "estimate_subsampled",
    "round_dimension", "DEFAULT_PAIR", "DEFAULT_MLE_K",
    # manifolds
    "ManifoldSpec", "UnimplementedManifoldError", "generate",
    "list_manifolds", "sphere_uniform", "add_noise",
    # bench
    "MethodConfig", "ExperimentPlan", "BenchReport", "mpe", "run_plan",
    "ingest_matrix", "load_plan", "noise_sweep", "sphere_ladder",
    "calib_study",
    # seeding
    "derive_seed",
]
