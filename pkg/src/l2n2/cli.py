"""Command-line interface.

Subcommands mirror the library layers: ``constants`` prints the
universal constant table, ``calibrate`` fits coefficients, ``estimate``
scores a point-cloud file, ``generate`` samples benchmark manifolds,
and ``bench`` / ``noise-sweep`` / ``sphere-ladder`` / ``calib-study``
run the canned experiment suites, writing JSON + CSV reports with PNG
figures rendered alongside them.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import bench as bench_mod
from . import plotting
from .calibration import (CalibrationSpec, calibrate, calibration_cells,
                          default_table, load_table, lookup, lookup_nearest,
                          save_table, DEFAULT_QUERY_CAP)
from .cloud import read_cloud, write_cloud
from .constants import KJPair, constants_grid
from .estimators import (DEFAULT_MLE_K, estimate_l2n2, estimate_mle,
                         estimate_subsampled)
from .manifolds import ManifoldSpec, generate, list_manifolds

__all__ = ["main", "build_parser"]


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(
            f"expected lo:hi (e.g. 1:20), got {text!r}")
    return int(lo), int(hi)


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _load_entries(source: str):
    if source == "default":
        return default_table()
    return load_table(source)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_constants(args) -> int:
    rows = constants_grid(args.k_max)
    if args.csv:
        lines = ["k,j,C"]
        lines += [f"{k},{j},{c:.12f}" for k, j, c in rows]
    else:
        lines = [f"{'k':>3} {'j':>3} {'C_kj':>16}"]
        lines += [f"{k:>3} {j:>3} {c:>16.12f}" for k, j, c in rows]
    _emit("\n".join(lines), args.output)
    return 0


def _cmd_calibrate(args) -> int:
    spec = CalibrationSpec(n=args.n, pair=KJPair(args.k, args.j),
                           d_range=args.d_range, repetitions=args.reps,
                           seed=args.seed, query_cap=args.query_cap)
    log_d, lbar = calibration_cells(spec)
    entry = calibrate(spec, cells=(log_d, lbar))
    save_table([entry], args.output)
    print(f"wrote {args.output}: {entry.key_string()} "
          f"alpha_fit={entry.alpha_fit:.4f} beta_fit={entry.beta_fit:.4f} "
          f"est_alpha={entry.est_alpha:.4f} est_beta={entry.est_beta:.4f}")
    if args.plot:
        fig_path = os.path.splitext(str(args.output))[0] + ".png"
        plotting.plot_calibration_fit(entry, log_d, lbar, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_estimate(args) -> int:
    cloud = read_cloud(args.input, fmt=args.format, delimiter=args.delimiter)
    captured: list[str] = []
    if args.method == "mle":
        report = estimate_mle(cloud, k=args.k if args.k is not None else DEFAULT_MLE_K)
    else:
        pair = KJPair(args.k if args.k is not None else 2,
                      args.j if args.j is not None else 1)
        if args.calibration == "asymptotic":
            entry = None
        else:
            entries = _load_entries(args.calibration)
            if args.cal_n is not None:
                entry = lookup(entries, args.cal_n, pair, args.cal_range)
            else:
                entry, note = lookup_nearest(entries, cloud.n, pair, args.cal_range)
                if note:
                    captured.append(note)
        if args.subset is not None:
            report = estimate_subsampled(cloud, pair, entry, args.subset,
                                         seed=args.seed)
        else:
            report = estimate_l2n2(cloud, pair, entry)
    if captured:
        report = dataclasses.replace(
            report, warnings=tuple(report.warnings) + tuple(captured))
    payload = report.to_dict()
    payload["input"] = str(args.input)
    payload["n"] = cloud.n
    payload["ambient_D"] = cloud.D
    if args.json:
        _emit(json.dumps(payload, sort_keys=True, indent=2), args.output)
    else:
        lines = [f"input: {args.input} (n={cloud.n}, D={cloud.D})",
                 f"method: {report.method}"]
        if report.pair is not None:
            lines.append(f"pair: k={report.pair.k} j={report.pair.j}")
        if report.mle_k is not None:
            lines.append(f"k: {report.mle_k}")
        if report.calibration_key is not None:
            lines.append(f"calibration: {report.calibration_key}")
        if report.mean_L is not None:
            lines.append(f"mean statistic: {report.mean_L:.6f}")
        lines.append(f"excluded queries: {report.excluded_count}")
        lines.append(f"estimated dimension: {report.d_hat:.4f}")
        if args.round:
            lines.append(f"rounded dimension: {report.d_rounded}")
        for w in report.warnings:
            lines.append(f"warning: {w}")
        _emit("\n".join(lines), args.output)
    return 0


def _cmd_generate(args) -> int:
    if args.list:
        rows = list_manifolds()
        width = max(len(r[0]) for r in rows)
        print(f"{'id':<{width}}  {'d':>3} {'D':>3}  status")
        for name, d, D, implemented in rows:
            status = "available" if implemented else "not implemented"
            print(f"{name:<{width}}  {d:>3} {D:>3}  {status}")
        return 0
    if args.name is None or args.output is None:
        raise SystemExit("generate: NAME and -o/--output are required "
                         "(or use --list)")
    spec = ManifoldSpec(name=args.name, n=args.n, seed=args.seed,
                        intrinsic_d=args.d, ambient_D=args.ambient,
                        noise_sigma=args.noise)
    cloud = generate(spec)
    write_cloud(cloud, args.output, fmt=args.format, delimiter=args.delimiter)
    print(f"wrote {args.output}: n={cloud.n} D={cloud.D} "
          f"(d={spec.intrinsic_d}, sigma={spec.noise_sigma:g})")
    return 0


def _write_report(report, outdir: str, figures: list[tuple] | None) -> int:
    paths = report.write(outdir)
    if figures:
        for fn, name in figures:
            try:
                paths.append(fn(report, os.path.join(outdir, name)))
            except ValueError as exc:
                print(f"skipped figure {name}: {exc}", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_bench(args) -> int:
    plan = bench_mod.load_plan(args.plan)
    entries = _load_entries(args.calibration)
    report = bench_mod.run_plan(plan, calibration=entries)
    outdir = args.output or plan.output or "l2n2-bench-report"
    figures = None if args.no_plots else [(plotting.plot_bench_mpe, "mpe.png")]
    return _write_report(report, outdir, figures)


def _cmd_noise_sweep(args) -> int:
    entries = _load_entries(args.calibration)
    report = bench_mod.noise_sweep(dims=args.dims, sigmas=args.sigmas,
                                   ambient_D=args.ambient, n=args.n,
                                   repetitions=args.reps, seed=args.seed,
                                   calibration=entries, d_range=args.d_range)
    figures = None if args.no_plots else [
        (plotting.plot_noise_sweep, "noise_sweep.png")]
    return _write_report(report, args.output, figures)


def _cmd_sphere_ladder(args) -> int:
    entries = _load_entries(args.calibration)
    report = bench_mod.sphere_ladder(dims=args.dims, n=args.n,
                                     repetitions=args.reps, seed=args.seed,
                                     calibration=entries, d_range=args.d_range)
    figures = None if args.no_plots else [
        (plotting.plot_sphere_ladder, "sphere_ladder.png")]
    return _write_report(report, args.output, figures)


def _cmd_calib_study(args) -> int:
    entries, report = bench_mod.calib_study(
        n_list=args.n_list, pair=KJPair(args.k, args.j), d_range=args.d_range,
        repetitions=args.reps, seed=args.seed, query_cap=args.query_cap)
    os.makedirs(args.output, exist_ok=True)
    jpath = os.path.join(args.output, "report.json")
    with open(jpath, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    tpath = os.path.join(args.output, "entries.tsv")
    save_table(entries, tpath)
    rows = report["results"]["rows"]
    cpath = os.path.join(args.output, "rows.csv")
    with open(cpath, "w", encoding="utf-8") as fh:
        cols = list(rows[0].keys())
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c])
                              for c in cols) + "\n")
    paths = [jpath, tpath, cpath]
    if not args.no_plots:
        paths.append(plotting.plot_calibration_drift(
            rows, os.path.join(args.output, "drift.png")))
    for p in paths:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2n2",
        description="Intrinsic-dimension estimation from nearest-neighbor "
                    "distance-ratio statistics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print the universal constant table")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--csv", action="store_true", help="emit CSV instead of aligned text")
    p.add_argument("-o", "--output", default=None, help="write to file instead of stdout")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("calibrate", help="fit calibration coefficients on Gaussian clouds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--d-range", type=_parse_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--query-cap", type=int, default=DEFAULT_QUERY_CAP)
    p.add_argument("-o", "--output", required=True, help="calibration table path")
    p.add_argument("--plot", action="store_true",
                   help="also render the pooled-fit figure next to the table")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("estimate", help="estimate intrinsic dimension of a point-cloud file")
    p.add_argument("input")
    p.add_argument("--method", choices=("l2n2", "mle"), default="l2n2")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--calibration", default="default",
                   help="table path, 'default', or 'asymptotic' (no finite-n correction)")
    p.add_argument("--cal-n", type=int, default=None,
                   help="force an exact table key instead of nearest-n lookup")
    p.add_argument("--cal-range", type=_parse_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--round", action="store_true", help="also print the rounded integer")
    p.add_argument("--subset", type=int, default=None,
                   help="score a random query subset of this size")
    p.add_argument("--seed", type=int, default=0, help="seed for --subset sampling")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--format", choices=("auto", "delimited", "binary"), default="auto")
    p.add_argument("--delimiter", default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("generate", help="sample a benchmark manifold to a file")
    p.add_argument("name", nargs="?", default=None, metavar="NAME")
    p.add_argument("--list", action="store_true", help="print the manifold catalog")
    p.add_argument("-n", type=int, default=2500)
    p.add_argument("--noise", type=float, default=0.0,
                   help="ambient Gaussian noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=None, help="intrinsic dimension (builtins)")
    p.add_argument("--ambient", type=int, default=None, help="ambient dimension (builtins)")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--format", choices=("delimited", "binary"), default="delimited")
    p.add_argument("--delimiter", default=",")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("bench", help="run an experiment plan from a config file")
    p.add_argument("plan", help="INI plan file (see README for the schema)")
    p.add_argument("-o", "--output", default=None, help="report directory")
    p.add_argument("--calibration", default="default")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("noise-sweep", help="noisy embedded-sphere study")
    p.add_argument("--dims", type=_parse_int_list, default=(6, 10))
    p.add_argument("--sigmas", type=_parse_float_list, default=(0.0, 0.01, 0.1))
    p.add_argument("--ambient", type=int, default=11)
    p.add_argument("-n", type=int, default=2500)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-range", type=_parse_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--calibration", default="default")
    p.add_argument("-o", "--output", default="l2n2-noise-report")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_noise_sweep)

    p = sub.add_parser("sphere-ladder", help="minimal-embedding sphere comparison")
    p.add_argument("--dims", type=_parse_int_list, default=(10, 20, 30, 40))
    p.add_argument("-n", type=int, default=2500)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-range", type=_parse_range, default=(10, 40), metavar="LO:HI")
    p.add_argument("--calibration", default="default")
    p.add_argument("-o", "--output", default="l2n2-ladder-report")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_sphere_ladder)

    p = sub.add_parser("calib-study", help="coefficient drift across sample sizes")
    p.add_argument("--n-list", type=_parse_int_list, default=(625, 1250, 2500, 5000))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--d-range", type=_parse_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--query-cap", type=int, default=DEFAULT_QUERY_CAP)
    p.add_argument("-o", "--output", default="l2n2-calib-study")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_calib_study)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, LookupError, FileNotFoundError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
