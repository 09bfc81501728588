"""Synthetic designs and the three toy response models.

Covariates are drawn with NumPy's ``default_rng`` (PCG64 bit generator,
ziggurat normals) and correlated through the lower Cholesky factor of the
AR(1) covariance ``corr ** |k - l|``. Output is bit-identical for a given
seed on a given NumPy version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

# (raw covariate index, raw covariate index or None for linear, coefficient)
_MODEL_TERMS = {
    1: [(1, None, 2.0), (5, None, -2.0), (10, None, 2.0),
        (1, 5, 3.0), (5, 5, -2.5), (5, 10, 4.0)],
    2: [(5, None, -2.0), (1, 5, 3.0), (5, 5, -2.5), (5, 10, 4.0)],
    3: [(1, 5, 3.0), (5, 5, -2.5), (5, 10, 4.0)],
}


@dataclass(frozen=True)
class SimSpec:
    model_id: int
    n: int
    p: int
    corr: float = 0.5
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.model_id not in _MODEL_TERMS:
            raise ValueError(f"model_id must be 1, 2 or 3, got {self.model_id}")
        if self.p < 10:
            raise ValueError(f"the toy models use X10, so p must be >= 10, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not -1 < self.corr < 1:
            raise ValueError(f"corr must lie in (-1, 1), got {self.corr}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be non-negative, got {self.noise_sd}")


def ar1_covariance(p: int, corr: float) -> NDArray:
    idx = np.arange(p)
    return corr ** np.abs(idx[:, None] - idx[None, :])


def gen_design(spec: SimSpec) -> NDArray:
    rng = np.random.default_rng(spec.seed)
    L = np.linalg.cholesky(ar1_covariance(spec.p, spec.corr))
    return rng.standard_normal((spec.n, spec.p)) @ L.T


def truth_matrix(model_id: int, p: int) -> NDArray:
    """Symmetric (p+1) x (p+1) coefficient matrix for an augmented design.

    Index 0 is the intercept and index ``j`` raw covariate ``X_j``. Linear
    and cross-product coefficients are split evenly over the two mirrored
    entries; squared terms sit on the diagonal.
    """
    B = np.zeros((p + 1, p + 1))
    for j, k, c in _MODEL_TERMS[model_id]:
        if k is None:
            B[0, j] += c / 2
            B[j, 0] += c / 2
        elif j == k:
            B[j, j] += c
        else:
            B[j, k] += c / 2
            B[k, j] += c / 2
    return B


def gen_response(spec: SimSpec, X_raw: NDArray) -> tuple[NDArray, NDArray]:
    """Return ``(y, truth)``. The noise stream is seeded independently of the design."""
    X_raw = np.asarray(X_raw, dtype=np.float64)
    if X_raw.ndim != 2 or X_raw.shape[1] < 10:
        raise ValueError(f"need an n x p design with p >= 10, got shape {X_raw.shape}")
    n, p = X_raw.shape
    truth = truth_matrix(spec.model_id, p)
    Xa = np.column_stack([np.ones(n), X_raw])
    signal = np.einsum("ij,jk,ik->i", Xa, truth, Xa)
    rng = np.random.default_rng([spec.seed, 1])
    y = signal + spec.noise_sd * rng.standard_normal(n)
    return y, truth


def simulate(spec: SimSpec) -> tuple[NDArray, NDArray, NDArray]:
    """Convenience wrapper returning ``(X_raw, y, truth)``."""
    X = gen_design(spec)
    y, truth = gen_response(spec, X)
    return X, y, truth
