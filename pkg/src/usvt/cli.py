"""Command-line surface and file formats.

Matrix files are plain text: one row per line, comma-separated decimal
entries, no header.  Floats in all emitted files use the shortest
round-trip rendering (at most 17 significant digits) so outputs are
byte-stable.  Data goes to stdout, diagnostics to stderr; exit codes are
0 on success, 2 for usage errors, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .estimators import DEFAULT_ETA, estimate_sigma, usvt_adaptive, usvt_denoise
from .mp_law import MPLaw
from .simulate import (
    NOISE_KINDS,
    PRESETS,
    ExperimentConfig,
    aggregate,
    preset_config,
    run_experiment,
)
from .spectral import SvdConvergenceError, singular_values

RESULTS_HEADER = "rank,sigma,rep,sigma_hat,sq_err_sigma,mse_matrix,kept_rank"
SUMMARY_HEADER = "rank,sigma,mean_sq_err_sigma,mean_mse_matrix,count"


class UsageError(Exception):
    """Bad flag values; maps to exit code 2."""


class MatrixFileError(ValueError):
    """Malformed matrix file; message carries the offending line number."""


def format_float(value: float) -> str:
    """Shortest decimal rendering that round-trips, <= 17 significant digits."""
    return repr(float(value))


def read_matrix(path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise MatrixFileError(f"{path}: cannot read: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.strip().split(",")
            if fields == [""]:
                raise MatrixFileError(f"{path}: line {lineno}: blank line")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise MatrixFileError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(fields)}")
            row = []
            for col, field in enumerate(fields, start=1):
                try:
                    value = float(field)
                except ValueError:
                    raise MatrixFileError(
                        f"{path}: line {lineno}: field {col}: "
                        f"not a number: {field!r}") from None
                if not np.isfinite(value):
                    raise MatrixFileError(
                        f"{path}: line {lineno}: field {col}: non-finite value")
                row.append(value)
            rows.append(row)
    if not rows:
        raise MatrixFileError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.float64)


def write_matrix(path, matrix: np.ndarray) -> None:
    a = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in a:
            fh.write(",".join(format_float(v) for v in row))
            fh.write("\n")


def write_results(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for r in records:
            fh.write(f"{r.rank},{format_float(r.sigma)},{r.rep},"
                     f"{format_float(r.sigma_hat)},{format_float(r.sq_err_sigma)},"
                     f"{format_float(r.mse_matrix)},{r.kept_rank}\n")


def write_summary(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in rows:
            fh.write(f"{s.rank},{format_float(s.sigma)},"
                     f"{format_float(s.mean_sq_err_sigma)},"
                     f"{format_float(s.mean_mse_matrix)},{s.count}\n")


def write_report(path, report) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(report.to_dict(), indent=2))
        fh.write("\n")


def plot_script(summary_path: str, ranks, image_name: str) -> str:
    """Self-contained gnuplot script: two panels over the summary CSV,
    one curve per rank (noise-level MSE left, matrix MSE right)."""

    def panel(column: int) -> str:
        series = [
            f"'{summary_path}' skip 1 using 2:($1=={r}?${column}:1/0) "
            f"with linespoints title 'r={r}'"
            for r in ranks
        ]
        return "plot " + ", \\\n     ".join(series)

    lines = [
        "# Render with:  gnuplot <this file>",
        f"# Reads: {summary_path}",
        "set datafile separator ','",
        "set terminal pngcairo size 1100,450",
        f"set output '{image_name}'",
        "set multiplot layout 1,2",
        "set key top left",
        "set xlabel 'sigma'",
        "set title 'MSE of the noise-level estimate'",
        "set ylabel 'mean squared error'",
        panel(3),
        "set title 'MSE of the denoised matrix'",
        panel(4),
        "unset multiplot",
    ]
    return "\n".join(lines) + "\n"


def _cmd_mp_quantile(args) -> int:
    if not 0.0 < args.gamma <= 1.0:
        raise UsageError(f"--gamma must be in (0, 1], got {args.gamma}")
    if not 0.0 <= args.p <= 1.0:
        raise UsageError(f"--p must be in [0, 1], got {args.p}")
    law = MPLaw(args.gamma)
    print(f"{law.quantile(args.p):.15g}")
    return 0


def _cmd_estimate_sigma(args) -> int:
    matrix = read_matrix(args.input)
    print(format_float(estimate_sigma(matrix)))
    return 0


def _cmd_spectrum(args) -> int:
    for value in singular_values(read_matrix(args.input)):
        print(format_float(value))
    return 0


def _cmd_denoise(args) -> int:
    if not 0.0 < args.eta <= 1.0:
        raise UsageError(f"--eta must be in (0, 1], got {args.eta}")
    if args.sigma is not None and args.sigma < 0.0:
        raise UsageError(f"--sigma must be >= 0, got {args.sigma}")
    matrix = read_matrix(args.input)
    if args.sigma is None:
        denoised, report = usvt_adaptive(matrix, args.eta)
    else:
        denoised, report = usvt_denoise(matrix, args.sigma, args.eta)
    write_matrix(args.output, denoised)
    write_report(args.report, report)
    return 0


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(f) for f in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(f) for f in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}")


def _simulate_config(args) -> ExperimentConfig:
    overrides = {}
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.eta is not None:
        overrides["eta"] = args.eta
    if args.noise is not None:
        overrides["noise_kind"] = args.noise
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        if args.preset is not None:
            for flag in ("m", "n", "ranks", "sigmas"):
                if getattr(args, flag) is not None:
                    overrides[flag] = getattr(args, flag)
            return preset_config(args.preset, **overrides)
        missing = [f"--{f}" for f in ("m", "n", "ranks", "sigmas")
                   if getattr(args, f) is None]
        if missing:
            raise UsageError(
                f"without --preset, {', '.join(missing)} are required")
        return ExperimentConfig(
            m=args.m, n=args.n, ranks=args.ranks, sigmas=args.sigmas,
            replications=overrides.get("replications", 100),
            eta=overrides.get("eta", DEFAULT_ETA),
            noise_kind=overrides.get("noise_kind", "gaussian"),
            seed=overrides.get("seed", 0),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_simulate(args) -> int:
    config = _simulate_config(args)
    records = run_experiment(config)
    write_results(args.out, records)
    summary = aggregate(records)
    write_summary(args.summary, summary)
    if args.plot is not None:
        image = Path(args.plot).stem + ".png"
        with open(args.plot, "w", encoding="utf-8", newline="") as fh:
            fh.write(plot_script(str(args.summary), config.ranks, image))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usvt",
        description="Noise-level estimation and singular value thresholding "
                    "for dense matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mp-quantile",
                       help="Marchenko-Pastur quantile for aspect ratio gamma")
    p.add_argument("--gamma", type=float, required=True,
                   help="aspect ratio in (0, 1]")
    p.add_argument("--p", type=float, required=True,
                   help="quantile level in [0, 1]")
    p.set_defaults(func=_cmd_mp_quantile)

    p = sub.add_parser("estimate-sigma",
                       help="estimate the noise level of a matrix file")
    p.add_argument("--input", required=True, help="matrix file to read")
    p.set_defaults(func=_cmd_estimate_sigma)

    p = sub.add_parser("spectrum",
                       help="print singular values, one per line, descending")
    p.add_argument("--input", required=True, help="matrix file to read")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("denoise",
                       help="threshold the SVD of a matrix file")
    p.add_argument("--input", required=True, help="matrix file to read")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA,
                   help="threshold margin in (0, 1] (default %(default)s)")
    p.add_argument("--sigma", type=float, default=None,
                   help="known noise level; omit to estimate it from the input")
    p.add_argument("--output", required=True, help="denoised matrix file to write")
    p.add_argument("--report", required=True, help="JSON run report to write")
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("simulate",
                       help="run a seeded Monte Carlo study and write CSVs")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None,
                   help="named study configuration")
    p.add_argument("--m", type=int, default=None, help="signal rows")
    p.add_argument("--n", type=int, default=None, help="signal columns")
    p.add_argument("--ranks", type=_parse_int_list, default=None,
                   help="comma-separated signal ranks")
    p.add_argument("--sigmas", type=_parse_float_list, default=None,
                   help="comma-separated noise levels")
    p.add_argument("--reps", type=int, default=None,
                   help="replications per (rank, sigma) cell")
    p.add_argument("--eta", type=float, default=None,
                   help="threshold margin in (0, 1]")
    p.add_argument("--noise", choices=NOISE_KINDS, default=None,
                   help="noise distribution")
    p.add_argument("--seed", type=int, default=None, help="base seed")
    p.add_argument("--out", required=True, help="per-replication CSV to write")
    p.add_argument("--summary", required=True, help="per-cell summary CSV to write")
    p.add_argument("--plot", default=None,
                   help="optional gnuplot script to write")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reported usage or --help already
        return 0 if exc.code is None else int(exc.code)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usvt: error: {exc}", file=sys.stderr)
        return 2
    except (MatrixFileError, SvdConvergenceError) as exc:
        print(f"usvt: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"usvt: error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
