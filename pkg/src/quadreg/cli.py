"""Command-line interface: ``quadreg {ridge,fit,path,simulate,bench}``.

Exit codes: 0 success, 1 usage error, 2 bad data or resource guard,
3 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import statistics
import sys
import time
from pathlib import Path


from .admm import AdmmConfig, admm_solve
from .core import Dataset, compute_precomputation
from .io import (DataFormatError, matrix_to_triplets, read_data_csv, read_matrix_json,
                 write_data_csv, write_matrix_json)
from .path import GridSpec, solve_path
from .penalty import PRESETS, MaskPolicy, PenaltySpec
from .ridge import ProblemTooLargeError, RidgeVariant, ridge_reference, ridge_structured
from .simulate import SimSpec, gen_design, gen_response

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3

log = logging.getLogger("quadreg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _load(args) -> Dataset:
    X, y, _ = read_data_csv(args.data)
    return Dataset.from_raw(X, y, intercept=args.intercept)


def _admm_config(args) -> AdmmConfig:
    return AdmmConfig(rho=args.rho, max_iter=args.max_iter,
                      eps_abs=args.eps_abs, eps_rel=args.eps_rel)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def run_ridge(args) -> int:
    ds = _load(args)
    t0 = time.perf_counter()
    variant = RidgeVariant(args.variant)
    if variant is RidgeVariant.STRUCTURED:
        B = ridge_structured(compute_precomputation(ds), ds, args.lam)
    else:
        B = ridge_reference(ds, args.lam, variant)
    elapsed = time.perf_counter() - t0
    payload = matrix_to_triplets(B)
    payload.update(variant=variant.value, **{"lambda": args.lam})
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    print(f"wall time: {elapsed:.6f} s", file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def run_fit(args) -> int:
    ds = _load(args)
    spec = PenaltySpec.preset(args.penalty, args.lambda1, args.lambda2, args.mask)
    sol = admm_solve(ds, compute_precomputation(ds), spec, _admm_config(args))
    payload = matrix_to_triplets(sol.sparse_block)
    payload.update(
        penalty=args.penalty, lambda1=args.lambda1, lambda2=args.lambda2,
        mask=MaskPolicy(args.mask).value, intercept=args.intercept,
        iterations=sol.iterations, converged=sol.converged,
        primal_residual=sol.primal_residuals[-1], dual_residual=sol.dual_residuals[-1],
        objective=sol.objective,
    )
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    if args.strict and not sol.converged:
        log.error("ADMM did not converge in %d iterations", sol.iterations)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


PATH_COLUMNS = ["alpha", "lambda", "lambda1", "lambda2", "objective", "iters",
                "converged", "support_size"]


def run_path(args) -> int:
    ds = _load(args)
    truth = None
    if args.truth:
        truth = read_matrix_json(args.truth)
        if truth.shape != (ds.p, ds.p):
            raise DataFormatError(f"truth matrix is {truth.shape[0]}x{truth.shape[0]}, "
                                  f"data needs {ds.p}x{ds.p}")
    spec = PenaltySpec.preset(args.penalty, 1.0, 1.0, args.mask)
    grid = GridSpec(args.n_lambda, args.n_alpha, args.lambda_min_ratio)
    res = solve_path(ds, spec, grid, _admm_config(args), truth,
                     warm_start=not args.no_warm_start, n_workers=args.workers)
    cols = PATH_COLUMNS + (["csi"] if truth is not None else [])
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(cols)
        for r in res.records:
            row = [r.alpha, r.lam, r.lambda1, r.lambda2, r.objective, r.iterations,
                   int(r.converged), r.support_size]
            if truth is not None:
                row.append(r.csi)
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    if truth is not None:
        log.info("best CSI over grid: %.4f", res.best_csi)
    if args.strict and not all(r.converged for r in res.records):
        log.error("%d grid points did not converge", sum(not r.converged for r in res.records))
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def run_simulate(args) -> int:
    spec = SimSpec(args.model, args.n, args.p, args.corr, args.noise_sd, args.seed)
    X = gen_design(spec)
    y, truth = gen_response(spec, X)
    write_data_csv(args.out, X, y)
    if args.truth_out:
        write_matrix_json(args.truth_out, truth)
    return EXIT_OK


def _time_variant(variant: RidgeVariant, ds: Dataset, lam: float) -> float:
    t0 = time.perf_counter()
    if variant is RidgeVariant.STRUCTURED:
        ridge_structured(compute_precomputation(ds), ds, lam)
    else:
        ridge_reference(ds, lam, variant)
    return time.perf_counter() - t0


def run_bench(args) -> int:
    variants = [RidgeVariant(v.strip()) for v in args.variants.split(",") if v.strip()]
    rows = []
    for p in args.p:
        spec = SimSpec(1, args.n, p, seed=args.seed)
        X = gen_design(spec)
        y, _ = gen_response(spec, X)
        ds = Dataset.from_raw(X, y)
        for variant in variants:
            try:
                _time_variant(variant, ds, args.lam)  # warm-up, not recorded
                times = [_time_variant(variant, ds, args.lam) for _ in range(args.reps)]
            except (ProblemTooLargeError, MemoryError) as exc:
                log.warning("%s at p=%d: %s", variant.value, p, exc)
                rows.append([variant.value, args.n, p, "NA", "NA"])
                continue
            sd = statistics.stdev(times) if len(times) > 1 else 0.0
            rows.append([variant.value, args.n, p, statistics.fmean(times), sd])
            log.info("%s n=%d p=%d mean %.4fs", variant.value, args.n, p, rows[-1][3])
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(["variant", "n", "p", "mean_seconds", "sd_seconds"])
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _add_data_args(sp):
    sp.add_argument("--data", required=True, help="CSV with the response in column 1")
    sp.add_argument("--no-intercept", dest="intercept", action="store_false",
                    help="do not prepend a constant column")
    sp.add_argument("--out", default=None, help="output file (default stdout)")


def _add_admm_args(sp):
    sp.add_argument("--penalty", required=True, choices=PRESETS)
    sp.add_argument("--mask", default="exclude_intercept", choices=[m.value for m in MaskPolicy])
    sp.add_argument("--rho", type=_positive_float, default=10.0)
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--eps-abs", type=_nonneg_float, default=1e-6)
    sp.add_argument("--eps-rel", type=_nonneg_float, default=1e-5)
    sp.add_argument("--strict", action="store_true",
                    help="exit 3 if any solve fails to converge")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadreg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    # also accepted after the subcommand; SUPPRESS keeps the top-level value otherwise
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("ridge", parents=[common], help="closed-form ridge quadratic regression")
    _add_data_args(sp)
    sp.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    sp.add_argument("--variant", default="structured", choices=[v.value for v in RidgeVariant])
    sp.set_defaults(func=run_ridge)

    sp = sub.add_parser("fit", parents=[common], help="single penalized fit by ADMM")
    _add_data_args(sp)
    _add_admm_args(sp)
    sp.add_argument("--lambda1", type=_nonneg_float, required=True)
    sp.add_argument("--lambda2", type=_nonneg_float, default=0.0)
    sp.set_defaults(func=run_fit)

    sp = sub.add_parser("path", parents=[common],
                        help="solution path over an (alpha, lambda) grid")
    _add_data_args(sp)
    _add_admm_args(sp)
    sp.add_argument("--n-lambda", type=int, default=50)
    sp.add_argument("--n-alpha", type=int, default=10)
    sp.add_argument("--lambda-min-ratio", type=float, default=0.01)
    sp.add_argument("--truth", default=None, help="truth matrix JSON for CSI")
    sp.add_argument("--workers", type=int, default=None,
                    help="threads over alpha slices (default $QUADREG_NUM_THREADS or CPU count)")
    sp.add_argument("--no-warm-start", action="store_true")
    sp.set_defaults(func=run_path)

    sp = sub.add_parser("simulate", parents=[common], help="generate data from a toy model")
    sp.add_argument("--model", type=int, choices=[1, 2, 3], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--corr", type=float, default=0.5)
    sp.add_argument("--noise-sd", type=_nonneg_float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="data CSV path")
    sp.add_argument("--truth-out", default=None, help="truth matrix JSON path")
    sp.set_defaults(func=run_simulate)

    sp = sub.add_parser("bench", parents=[common], help="time ridge variants")
    sp.add_argument("--variants", default="structured,woodbury")
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--p", type=_int_list, default=[100, 200])
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--lambda", dest="lam", type=_positive_float, default=10.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (DataFormatError, ProblemTooLargeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # invalid parameter combinations that argparse cannot see
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if args.command in ("simulate", "bench") else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
