"""Regularization paths over an (alpha, lambda) grid, support and CSI."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .admm import AdmmConfig, admm_solve
from .core import Dataset, Precomputation, compute_precomputation
from .penalty import PenaltySpec, lambda_max

THREADS_ENV = "QUADREG_NUM_THREADS"


@dataclass(frozen=True)
class GridSpec:
    n_lambda: int = 50
    n_alpha: int = 10
    lambda_min_ratio: float = 0.01

    def __post_init__(self):
        if self.n_lambda < 1 or self.n_alpha < 1:
            raise ValueError("n_lambda and n_alpha must be at least 1")
        if not 0 < self.lambda_min_ratio < 1:
            raise ValueError(f"lambda_min_ratio must lie in (0, 1), got {self.lambda_min_ratio}")


@dataclass(frozen=True)
class GridPoint:
    alpha: float
    lam: float
    lambda1: float
    lambda2: float


@dataclass
class PathRecord:
    alpha: float
    lam: float
    lambda1: float
    lambda2: float
    objective: float
    iterations: int
    converged: bool
    support_size: int
    csi: float | None = None
    coef: NDArray | None = field(default=None, repr=False)


@dataclass
class PathResult:
    records: list[PathRecord]
    n_alpha: int
    n_lambda: int
    lambda1_max: float
    lambda2_max: float

    @property
    def best_csi(self) -> float | None:
        values = [r.csi for r in self.records if r.csi is not None]
        return max(values) if values else None

    @property
    def total_iterations(self) -> int:
        return sum(r.iterations for r in self.records)


def alpha_values(n_alpha: int) -> NDArray:
    """Uniform interior grid on (0, 1); a single slice uses alpha = 1."""
    if n_alpha == 1:
        return np.array([1.0])
    return np.arange(1, n_alpha + 1) / (n_alpha + 1)


def lambda_values(n_lambda: int, ratio: float) -> NDArray:
    if n_lambda == 1:
        return np.array([1.0])
    return np.logspace(0.0, np.log10(ratio), n_lambda)


def make_grid(spec: GridSpec, lambda1_max: float, lambda2_max: float = 0.0) -> list[GridPoint]:
    """Grid points ordered alpha-major, lambda decreasing within each alpha."""
    grid = []
    for a in alpha_values(spec.n_alpha):
        for lam in lambda_values(spec.n_lambda, spec.lambda_min_ratio):
            grid.append(GridPoint(float(a), float(lam),
                                  float(lam * a * lambda1_max),
                                  float(lam * (1 - a) * lambda2_max)))
    return grid


def support(B: ArrayLike, tol: float = 1e-6) -> set[tuple[int, int]]:
    """Upper-triangle index pairs ``(j, k)``, ``j <= k``, with ``|B[j, k]| > tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    B = np.asarray(B)
    rows, cols = np.nonzero(np.triu(np.abs(B) > tol))
    return set(zip(rows.tolist(), cols.tolist()))


def csi(truth: ArrayLike, estimate: ArrayLike, tol: float = 1e-6) -> float:
    """Critical success index: |both nonzero| / |either nonzero| over all entries."""
    truth, estimate = np.asarray(truth), np.asarray(estimate)
    if truth.shape != estimate.shape:
        raise ValueError(f"shape mismatch: {truth.shape} vs {estimate.shape}")
    a = np.abs(truth) > tol
    b = np.abs(estimate) > tol
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def family_lambda_max(dataset: Dataset, pre: Precomputation,
                      spec: PenaltySpec) -> tuple[float, float]:
    l1 = lambda_max(spec.family(1), pre, dataset)
    second = spec.family(2)
    l2 = lambda_max(second, pre, dataset) if second.terms else 0.0
    return l1, l2


def _default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(int(env), 1)
    return os.cpu_count() or 1


def _solve_slice(dataset, pre, spec, points, config, truth, tol, keep_coef):
    records = []
    warm = None
    for pt in points:
        sol = admm_solve(dataset, pre, spec.with_weights(pt.lambda1, pt.lambda2), config, warm)
        warm = sol.state
        est = sol.sparse_block
        records.append(PathRecord(
            alpha=pt.alpha, lam=pt.lam, lambda1=pt.lambda1, lambda2=pt.lambda2,
            objective=sol.objective, iterations=sol.iterations, converged=sol.converged,
            support_size=len(support(est, tol)),
            csi=None if truth is None else csi(truth, est, tol),
            coef=est if keep_coef else None,
        ))
    return records


def solve_path(dataset: Dataset, spec: PenaltySpec, grid: GridSpec | None = None,
               config: AdmmConfig | None = None, truth: ArrayLike | None = None, *,
               pre: Precomputation | None = None, warm_start: bool = True,
               n_workers: int | None = None, tol: float = 1e-6,
               keep_coef: bool = False) -> PathResult:
    """Solve the penalty family ``spec`` (weights ignored) over a grid.

    Each alpha slice is swept from the largest lambda down, warm-starting
    every solve from its predecessor. Slices are independent and run on a
    thread pool; the result does not depend on the worker count.
    """
    grid = grid or GridSpec()
    config = config or AdmmConfig()
    pre = pre or compute_precomputation(dataset)
    if truth is not None:
        truth = np.asarray(truth, dtype=np.float64)
        if truth.shape != (dataset.p, dataset.p):
            raise ValueError(f"truth has shape {truth.shape}, expected {(dataset.p, dataset.p)}")
    single = len(spec.family(2).terms) == 0
    if single and grid.n_alpha != 1:
        grid = GridSpec(grid.n_lambda, 1, grid.lambda_min_ratio)
    l1max, l2max = family_lambda_max(dataset, pre, spec)
    points = make_grid(grid, l1max, l2max)
    slices = [points[i:i + grid.n_lambda] for i in range(0, len(points), grid.n_lambda)]
    if not warm_start:
        slices = [[pt] for pt in points]

    def run(chunk):
        return _solve_slice(dataset, pre, spec, chunk, config, truth, tol, keep_coef)

    workers = min(n_workers or _default_workers(), len(slices))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, slices))
    else:
        chunks = [run(s) for s in slices]
    records = [r for chunk in chunks for r in chunk]
    return PathResult(records, grid.n_alpha, grid.n_lambda, l1max, l2max)
