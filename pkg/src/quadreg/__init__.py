"""Penalized quadratic regression on all pairwise interactions.

Solvers work with n x n, n x p and p x p matrices only; the n x p^2
interaction design is never formed outside the reference ridge variants.
"""

from .admm import AdmmConfig, AdmmSolution, AdmmState, admm_iterate, admm_solve, compute_residuals
from .core import Dataset, Precomputation, compute_precomputation, fitted_values, objective
from .estimators import PenalizedQuadraticRegression, QuadraticRidge, quadratic_features
from .path import GridSpec, PathResult, csi, make_grid, solve_path, support
from .penalty import (PRESETS, MaskPolicy, PenaltyKind, PenaltySpec, PenaltyTerm, eval_penalty,
                      lambda_max, prox_penalty_term)
from .ridge import (ProblemTooLargeError, RidgeVariant, prox_quadratic_loss, ridge_reference,
                    ridge_structured)
from .simulate import SimSpec, gen_design, gen_response, simulate

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig", "AdmmSolution", "AdmmState", "admm_iterate", "admm_solve", "compute_residuals",
    "Dataset", "Precomputation", "compute_precomputation", "fitted_values", "objective",
    "PenalizedQuadraticRegression", "QuadraticRidge", "quadratic_features",
    "GridSpec", "PathResult", "csi", "make_grid", "solve_path", "support",
    "PRESETS", "MaskPolicy", "PenaltyKind", "PenaltySpec", "PenaltyTerm", "eval_penalty",
    "lambda_max", "prox_penalty_term",
    "ProblemTooLargeError", "RidgeVariant", "prox_quadratic_loss", "ridge_reference",
    "ridge_structured",
    "SimSpec", "gen_design", "gen_response", "simulate",
]
