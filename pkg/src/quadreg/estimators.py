"""scikit-learn compatible estimators for quadratic regression."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .admm import AdmmConfig, AdmmState, admm_solve
from .core import Dataset, compute_precomputation
from .penalty import PRESETS, PenaltySpec
from .ridge import RidgeVariant, ridge_reference, ridge_structured


class _QuadraticBase(RegressorMixin, BaseEstimator):

    def _dataset(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True, dtype=np.float64)
        if self.standardize:
            self.scale_mean_ = X.mean(axis=0)
            sd = X.std(axis=0)
            self.scale_sd_ = np.where(sd > 0, sd, 1.0)
            X = (X - self.scale_mean_) / self.scale_sd_
        return Dataset.from_raw(X, y, intercept=self.fit_intercept)

    def _design(self, X):
        X = validate_data(self, X, reset=False, dtype=np.float64)
        if self.standardize:
            X = (X - self.scale_mean_) / self.scale_sd_
        if self.fit_intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
        return X

    def predict(self, X):
        check_is_fitted(self, "coef_matrix_")
        Xa = self._design(X)
        return np.einsum("ij,jk,ik->i", Xa, self.coef_matrix_, Xa)

    @property
    def intercept_(self):
        check_is_fitted(self, "coef_matrix_")
        return float(self.coef_matrix_[0, 0]) if self.fit_intercept else 0.0


class QuadraticRidge(_QuadraticBase):
    """Ridge-penalized regression on all pairwise products of the features.

    Parameters
    ----------
    lam : float
        Ridge weight; the objective is ``(1/2n) ||y - f(X)||^2 + lam/2 ||B||_F^2``.
    variant : {"structured", "woodbury", "svd", "naive"}
        Solver. Only ``"structured"`` avoids the n x p^2 interaction design.
    fit_intercept : bool
        Prepend a constant column so the model carries intercept and linear terms.
    standardize : bool
        Center and scale each feature before fitting.

    Attributes
    ----------
    coef_matrix_ : ndarray of shape (d, d)
        Symmetric coefficient matrix, ``d = n_features + fit_intercept``.
    """

    def __init__(self, lam=10.0, variant="structured", fit_intercept=True, standardize=False):
        self.lam = lam
        self.variant = variant
        self.fit_intercept = fit_intercept
        self.standardize = standardize

    def fit(self, X, y):
        ds = self._dataset(X, y)
        variant = RidgeVariant(self.variant)
        if variant is RidgeVariant.STRUCTURED:
            self.coef_matrix_ = ridge_structured(compute_precomputation(ds), ds, self.lam)
        else:
            self.coef_matrix_ = ridge_reference(ds, self.lam, variant)
        return self


class PenalizedQuadraticRegression(_QuadraticBase):
    """Quadratic regression with an l1-based penalty preset, solved by consensus ADMM.

    ``penalty`` names one of ``"l1"``, ``"l1+l2"``, ``"l1+linf"``,
    ``"l1+l1linf"`` or ``"l1+nuclear"``; ``lam1`` weights the l1 term and
    ``lam2`` the second family. ``coef_matrix_`` is the exactly sparse
    read-out of the solution; ``consensus_`` the averaged ADMM iterate.
    With ``warm_start=True`` a refit starts from the previous ADMM state.
    """

    def __init__(self, penalty="l1", lam1=1.0, lam2=0.0, rho=10.0, max_iter=1000,
                 eps_abs=1e-6, eps_rel=1e-5, mask_policy="exclude_intercept",
                 fit_intercept=True, standardize=False, warm_start=False):
        self.penalty = penalty
        self.lam1 = lam1
        self.lam2 = lam2
        self.rho = rho
        self.max_iter = max_iter
        self.eps_abs = eps_abs
        self.eps_rel = eps_rel
        self.mask_policy = mask_policy
        self.fit_intercept = fit_intercept
        self.standardize = standardize
        self.warm_start = warm_start

    def fit(self, X, y):
        if self.penalty not in PRESETS:
            raise ValueError(f"penalty must be one of {PRESETS}, got {self.penalty!r}")
        ds = self._dataset(X, y)
        spec = PenaltySpec.preset(self.penalty, self.lam1, self.lam2, self.mask_policy)
        config = AdmmConfig(self.rho, self.max_iter, self.eps_abs, self.eps_rel)
        warm = getattr(self, "state_", None) if self.warm_start else None
        shape = (len(spec.terms) + 1, ds.p, ds.p)
        if not isinstance(warm, AdmmState) or warm.blocks.shape != shape:
            warm = None
        sol = admm_solve(ds, compute_precomputation(ds), spec, config, warm)
        self.coef_matrix_ = sol.sparse_block
        self.consensus_ = sol.consensus
        self.n_iter_ = sol.iterations
        self.converged_ = sol.converged
        self.objective_ = sol.objective
        self.state_ = sol.state
        return self


def quadratic_features(X, fit_intercept=True):
    """Upper-triangle products ``x_j x_k`` (j <= k) of the augmented design.

    Only meant for small problems and for interoperating with linear models;
    the solvers in this package never build it.
    """
    X = check_array(X, dtype=np.float64)
    if fit_intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    j, k = np.triu_indices(X.shape[1])
    return X[:, j] * X[:, k]
