"""Command-line interface.

Subcommands:

* ``test``         run one two-sample test on two CSV files
* ``null-sim``     null-distribution study (statistic sample + KS distance)
* ``power-curve``  power (or, with --eps 0, type-I error) versus sample size
* ``roc``          ROC curves / AUC per statistic
* ``bench``        wall-clock timing paired with power

Exit codes: 0 = ran (regardless of the reject decision), 2 = usage error,
3 = data error. All randomness is controlled by --seed; CROSSMMD_THREADS
sets the numba thread count (timings only, never results).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from ._accel import backend_name
from .baselines import PermutationPlan, block_mmd_test, linear_mmd_test, permutation_test
from .cross import SplitPlan, split_samples, xmmd_test_from_gram
from .datagen import DIRICHLET, GAUSSIAN_SHIFT, SourceSpec
from .errors import DataFormatError, DegenerateDataError, InvalidInputError
from .harness import (BENCH, MEDIAN_AUTO, NULL_HIST, POWER_CURVE, ROC, TYPE_I,
                      ExperimentSpec, parse_test_id, run_bench, run_null_hist,
                      run_power_curve, run_roc, write_csv, write_raw_csv,
                      write_roc_points_csv, write_sidecar)
from .kernels import KernelSpec, gram_matrix, median_kernel_spec

USAGE_ERROR = 2
DATA_ERROR = 3


def read_sample_csv(path: str, header: bool = False) -> np.ndarray:
    """Rows = observations, columns = coordinates; '#' lines are comments."""
    rows = []
    width = None
    first_data_seen = False
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"cannot read {path}: {e}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if header and not first_data_seen:
                first_data_seen = True
                continue
            first_data_seen = True
            cells = [c.strip() for c in s.split(",")]
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise DataFormatError(
                    f"{path}: row at line {lineno} has {len(cells)} fields, expected {width}")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise DataFormatError(
                    f"{path}: row at line {lineno} has a non-numeric field") from None
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        bad = int(np.where(~np.isfinite(arr).all(axis=1))[0][0])
        raise DataFormatError(f"{path}: data row {bad + 1} has a non-finite value")
    return arr


def _parse_kernel_flags(kernel: str, scale: str):
    """('median', family, degree) or ('fixed', KernelSpec)."""
    kernel = kernel.lower()
    degree = None
    if kernel.startswith("poly"):
        family = "polynomial"
        _, _, deg = kernel.partition(":")
        degree = int(deg) if deg else 2
        if degree < 1:
            raise InvalidInputError("polynomial degree must be >= 1")
    elif kernel in ("gaussian", "laplace"):
        family = kernel
    else:
        raise InvalidInputError(
            f"unknown kernel {kernel!r} (expected gaussian, laplace, or poly:<degree>)")
    if scale == "median":
        return ("median", family, degree if degree is not None else 2)
    try:
        s = float(scale)
    except ValueError:
        raise InvalidInputError(f"--scale must be 'median' or a number, got {scale!r}") from None
    return ("fixed", KernelSpec(family, s, degree))


def _require_level(alpha: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"--alpha must lie in (0,1), got {alpha}")
    return alpha


def _json_safe_stat(v: float):
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return float(v)


def _cmd_test(args) -> int:
    alpha = _require_level(args.alpha)
    X = read_sample_csv(args.x_csv, args.header)
    Y = read_sample_csv(args.y_csv, args.header)
    if X.shape[1] != Y.shape[1]:
        raise DataFormatError(
            f"dimension mismatch: {args.x_csv} rows have {X.shape[1]} fields, "
            f"{args.y_csv} rows have {Y.shape[1]}")
    mode = _parse_kernel_flags(args.kernel, args.scale)
    t0 = time.perf_counter_ns()
    if mode[0] == "median":
        spec = median_kernel_spec(X, Y, mode[1], mode[2])
        bandwidth_rule = "median"
    else:
        spec = mode[1]
        bandwidth_rule = "fixed"
    out = {
        "test": args.test,
        "n": int(X.shape[0]),
        "m": int(Y.shape[0]),
        "d": int(X.shape[1]),
        "kernel": {**spec.describe(), "bandwidth_rule": bandwidth_rule},
        "alpha": alpha,
        "seed": args.seed,
    }
    if args.test == "xmmd":
        plan = SplitPlan.balanced(X.shape[0], Y.shape[0],
                                  shuffle_seed=None if args.no_shuffle else args.seed)
        X1, X2, Y1, Y2 = split_samples(X, Y, plan)
        gram = gram_matrix(spec, np.vstack([X1, X2]), np.vstack([Y1, Y2]))
        result = xmmd_test_from_gram(gram, plan, alpha)
        out["split"] = {"n1": plan.n1, "m1": plan.m1}
        out["threshold"] = result.threshold
    elif args.test == "mmd-perm":
        result = permutation_test(gram_matrix(spec, X, Y), alpha,
                                  PermutationPlan(B=args.B, seed=args.seed))
        out["p_value"] = result.p_value
        out["B"] = args.B
    elif args.test == "block":
        if args.block_size == "sqrt":
            b = int(np.sqrt(X.shape[0]))
        else:
            b = int(args.block_size)
        result = block_mmd_test(X, Y, spec, b, alpha,
                                fallback_plan=PermutationPlan(B=args.B, seed=args.seed))
        if result.threshold is not None:
            out["threshold"] = result.threshold
        else:
            out["p_value"] = result.p_value
        out["block_size"] = b
    elif args.test == "linear":
        result = linear_mmd_test(X, Y, spec, alpha)
        out["threshold"] = result.threshold
    else:  # argparse choices make this unreachable
        raise InvalidInputError(f"unknown test {args.test!r}")
    out["statistic"] = _json_safe_stat(result.statistic)
    out["reject"] = bool(result.reject)
    out["elapsed_ms"] = (time.perf_counter_ns() - t0) * 1e-6
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)
    return 0


def _parse_sizes(s: str):
    sizes = []
    for part in s.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            a, _, b = part.partition(":")
            sizes.append((int(a), int(b)))
        else:
            sizes.append((int(part), int(part)))
    if not sizes:
        raise InvalidInputError("--sizes produced an empty grid")
    return tuple(sizes)


def _source_from_args(args) -> SourceSpec:
    family = {"gmd": GAUSSIAN_SHIFT, "dirichlet": DIRICHLET}[args.source]
    if family == GAUSSIAN_SHIFT:
        return SourceSpec(family, d=args.d, eps=args.eps, j=args.j)
    return SourceSpec(family, d=args.d, eps=args.eps, base=args.base)


def _experiment_spec(args, kind: str) -> ExperimentSpec:
    mode = _parse_kernel_flags(args.kernel, args.scale)
    if mode[0] == "median":
        family, degree = mode[1], mode[2]
        kernel = MEDIAN_AUTO if family == "gaussian" else (
            f"{MEDIAN_AUTO}:{family}" + (f":{degree}" if family == "polynomial" else ""))
    else:
        kernel = mode[1]
    return ExperimentSpec(
        kind=kind,
        source=_source_from_args(args),
        sizes=_parse_sizes(args.sizes),
        trials=args.trials,
        tests=tuple(t.strip() for t in args.tests.split(",") if t.strip()),
        alpha=_require_level(args.alpha),
        seed=args.seed,
        kernel=kernel,
    )


def _safe_label(label: str) -> str:
    return label.replace("{", "").replace("}", "").replace("/", "-")


def _print_rows(table) -> None:
    for row in table.rows:
        bits = [f"{row['kind']}", f"test={row['test']}",
                f"n={row['n']}", f"m={row['m']}"]
        for key in ("ks", "reject_rate", "reject_sd", "predicted_perm_power",
                    "auc", "median_s", "n_pos_inf"):
            if key in row and row[key] is not None:
                v = row[key]
                bits.append(f"{key}={v:.4g}" if isinstance(v, float) else f"{key}={v}")
        print("  ".join(bits))


def _cmd_null_sim(args) -> int:
    spec = _experiment_spec(args, NULL_HIST)
    table, raw = run_null_hist(spec)
    write_csv(table, args.out + ".csv")
    write_sidecar(spec, args.out + ".json")
    for (label, n, m), values in raw.items():
        write_raw_csv(values, f"{args.out}_raw_{_safe_label(label)}_{n}_{m}.csv")
    _print_rows(table)
    return 0


def _cmd_power_curve(args) -> int:
    kind = TYPE_I if args.eps == 0 else POWER_CURVE
    spec = _experiment_spec(args, kind)
    table = run_power_curve(spec)
    write_csv(table, args.out + ".csv")
    write_sidecar(spec, args.out + ".json")
    _print_rows(table)
    return 0


def _cmd_roc(args) -> int:
    spec = _experiment_spec(args, ROC)
    table, points = run_roc(spec)
    write_csv(table, args.out + ".csv")
    write_sidecar(spec, args.out + ".json")
    write_roc_points_csv(points, args.out + "_points.csv")
    _print_rows(table)
    return 0


def _cmd_bench(args) -> int:
    spec = _experiment_spec(args, BENCH)
    table = run_bench(spec)
    write_csv(table, args.out + ".csv")
    write_sidecar(spec, args.out + ".json")
    _print_rows(table)
    return 0


def _add_kernel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", default="gaussian",
                   help="gaussian | laplace | poly:<degree> (default gaussian)")
    p.add_argument("--scale", default="median",
                   help="kernel scale: 'median' (default) or a positive number")
    p.add_argument("--alpha", type=float, default=0.05, help="test level (default 0.05)")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")


def _add_experiment_flags(p: argparse.ArgumentParser, default_tests: str) -> None:
    p.add_argument("--source", choices=("gmd", "dirichlet"), default="gmd",
                   help="data source (default gmd: Gaussian mean difference)")
    p.add_argument("--d", type=int, default=10, help="dimension (default 10)")
    p.add_argument("--eps", type=float, default=0.0, help="perturbation (0 = null)")
    p.add_argument("--j", type=int, default=1,
                   help="number of shifted coordinates (gmd only)")
    p.add_argument("--base", type=float, default=1.0,
                   help="dirichlet base parameter (default 1.0)")
    p.add_argument("--sizes", required=True,
                   help="comma list of n:m pairs (a bare integer means n=m)")
    p.add_argument("--trials", type=int, default=200, help="Monte Carlo trials per size")
    p.add_argument("--tests", default=default_tests,
                   help="comma list of test ids, e.g. xmmd,mmd-perm{200},block{sqrt},linear")
    p.add_argument("--out", default="results", help="output path prefix")
    _add_kernel_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossmmd",
        description="Kernel two-sample testing with the permutation-free cross-MMD test.")
    parser.add_argument("--version", action="version",
                        version=f"crossmmd {__version__} ({backend_name()} backend)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run one two-sample test on two CSV files")
    p_test.add_argument("x_csv", help="CSV of the first sample (rows = observations)")
    p_test.add_argument("y_csv", help="CSV of the second sample")
    p_test.add_argument("--test", choices=("xmmd", "mmd-perm", "block", "linear"),
                        default="xmmd", help="which test to run (default xmmd)")
    p_test.add_argument("--B", type=int, default=200,
                        help="permutation count for mmd-perm (default 200)")
    p_test.add_argument("--block-size", default="sqrt",
                        help="block test block size: integer or 'sqrt' (default)")
    p_test.add_argument("--header", action="store_true",
                        help="skip the first non-comment line of each CSV")
    p_test.add_argument("--no-shuffle", action="store_true",
                        help="xmmd: split by row order instead of a seeded shuffle")
    p_test.add_argument("--out", default=None, help="write the JSON result here (default stdout)")
    _add_kernel_flags(p_test)
    p_test.set_defaults(func=_cmd_test)

    p_null = sub.add_parser("null-sim", help="null-distribution study")
    _add_experiment_flags(p_null, default_tests="xmmd")
    p_null.set_defaults(func=_cmd_null_sim)

    p_power = sub.add_parser("power-curve",
                             help="power vs sample size (type-I error when --eps 0)")
    _add_experiment_flags(p_power, default_tests="xmmd,mmd-perm{200}")
    p_power.set_defaults(func=_cmd_power_curve)

    p_roc = sub.add_parser("roc", help="ROC curves and AUC per statistic")
    _add_experiment_flags(p_roc, default_tests="xmmd,mmd,block{sqrt},linear")
    p_roc.set_defaults(func=_cmd_roc)

    p_bench = sub.add_parser("bench", help="wall-clock timing paired with power")
    _add_experiment_flags(p_bench, default_tests="xmmd,mmd-perm{200}")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    threads = os.environ.get("CROSSMMD_THREADS")
    if threads and backend_name() == "numba":
        import numba
        numba.set_num_threads(max(1, int(threads)))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, DegenerateDataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR
    except (InvalidInputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
