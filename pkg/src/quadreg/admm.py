"""Consensus ADMM for the squared loss plus a sum of penalty terms.

Block 0 holds the loss, block ``i >= 1`` the ``i``-th term of the penalty
spec. Every block keeps its own copy of the coefficient matrix and a scaled
dual; the consensus variable is their plain average because the duals are
started at zero and therefore always sum to zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .core import Dataset, Precomputation, objective, symmetrize
from .penalty import PenaltyKind, PenaltySpec, prox_penalty_term
from .ridge import _structured_solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmmConfig:
    rho: float = 10.0
    max_iter: int = 1000
    eps_abs: float = 1e-6
    eps_rel: float = 1e-5

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not (isinstance(self.max_iter, (int, np.integer)) and self.max_iter > 0):
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if self.eps_abs < 0 or self.eps_rel < 0:
            raise ValueError("stopping tolerances must be non-negative")


@dataclass(frozen=True)
class AdmmState:
    blocks: NDArray   # (N + 1, p, p)
    duals: NDArray    # (N + 1, p, p)
    consensus: NDArray
    iteration: int = 0

    @classmethod
    def zeros(cls, n_blocks: int, p: int) -> "AdmmState":
        z = np.zeros((n_blocks, p, p))
        return cls(blocks=z, duals=z.copy(), consensus=np.zeros((p, p)))

    @property
    def n_blocks(self) -> int:
        return self.blocks.shape[0]


@dataclass
class AdmmSolution:
    consensus: NDArray
    sparse_block: NDArray
    iterations: int
    primal_residuals: list[float]
    dual_residuals: list[float]
    converged: bool
    objective: float
    state: AdmmState = field(repr=False)


def admm_iterate(state: AdmmState, dataset: Dataset, pre: Precomputation,
                 spec: PenaltySpec, config: AdmmConfig) -> AdmmState:
    """One sweep: block proxes, averaging, dual update."""
    rho = config.rho
    if state.n_blocks != len(spec.terms) + 1:
        raise ValueError(f"state has {state.n_blocks} blocks, spec needs {len(spec.terms) + 1}")
    Bbar, U = state.consensus, state.duals
    blocks = np.empty_like(state.blocks)
    A0 = symmetrize(Bbar - U[0])
    blocks[0] = _structured_solve(pre, dataset.design, pre.D + rho * A0, rho)
    for i, term in enumerate(spec.terms, start=1):
        blocks[i] = prox_penalty_term(term, Bbar - U[i], rho)
    consensus = blocks.mean(axis=0)
    duals = U + blocks - consensus
    return AdmmState(blocks=blocks, duals=duals, consensus=consensus,
                     iteration=state.iteration + 1)


def compute_residuals(prev: AdmmState, nxt: AdmmState, rho: float) -> tuple[float, float]:
    primal = float(np.sqrt(((nxt.blocks - nxt.consensus) ** 2).sum()))
    dual = rho * np.sqrt(nxt.n_blocks) * float(np.linalg.norm(nxt.consensus - prev.consensus))
    return primal, dual


def _thresholds(state: AdmmState, config: AdmmConfig) -> tuple[float, float]:
    p = state.consensus.shape[0]
    scale_primal = max(float(np.sqrt((state.blocks ** 2).sum())),
                       np.sqrt(state.n_blocks) * float(np.linalg.norm(state.consensus)))
    scale_dual = config.rho * float(np.sqrt((state.duals ** 2).sum()))
    return (config.eps_abs * p + config.eps_rel * scale_primal,
            config.eps_abs * p + config.eps_rel * scale_dual)


def sparse_estimate(state: AdmmState, spec: PenaltySpec) -> NDArray:
    """Exactly sparse read-out of the solution.

    With an l1 term this is the l1 block itself. Otherwise the consensus is
    zeroed wherever some penalty block is exactly zero (dropped columns,
    rows, or a rank-zero nuclear block).
    """
    for i, term in enumerate(spec.terms, start=1):
        if term.kind is PenaltyKind.L1:
            return state.blocks[i].copy()
    out = state.consensus.copy()
    for i in range(1, state.n_blocks):
        out[state.blocks[i] == 0] = 0.0
    return out


def admm_solve(dataset: Dataset, pre: Precomputation, spec: PenaltySpec,
               config: AdmmConfig | None = None, warm: AdmmState | None = None) -> AdmmSolution:
    config = config or AdmmConfig()
    n_blocks = len(spec.terms) + 1
    p = dataset.p
    if warm is None:
        state = AdmmState.zeros(n_blocks, p)
    else:
        if warm.blocks.shape != (n_blocks, p, p):
            raise ValueError(f"warm state has shape {warm.blocks.shape}, "
                             f"expected {(n_blocks, p, p)}")
        state = AdmmState(warm.blocks, warm.duals, warm.consensus, 0)

    primal_hist: list[float] = []
    dual_hist: list[float] = []
    converged = False
    for _ in range(config.max_iter):
        nxt = admm_iterate(state, dataset, pre, spec, config)
        r, s = compute_residuals(state, nxt, config.rho)
        primal_hist.append(r)
        dual_hist.append(s)
        state = nxt
        eps_pri, eps_dual = _thresholds(state, config)
        if r <= eps_pri and s <= eps_dual:
            converged = True
            break
    if not converged:
        logger.debug("ADMM stopped at max_iter=%d (primal %.3g, dual %.3g)",
                     config.max_iter, primal_hist[-1], dual_hist[-1])
    sparse = sparse_estimate(state, spec)
    return AdmmSolution(
        consensus=state.consensus.copy(),
        sparse_block=sparse,
        iterations=state.iteration,
        primal_residuals=primal_hist,
        dual_residuals=dual_hist,
        converged=converged,
        objective=objective(dataset, sparse, spec),
        state=state,
    )
