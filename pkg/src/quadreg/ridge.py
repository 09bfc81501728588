"""Ridge-penalized quadratic regression.

The structured solver works entirely with n x n, n x p and p x p arrays.
The three reference variants go through the p^2-dimensional vectorized
problem and are kept as oracles and for benchmarking.
"""

from __future__ import annotations

import enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from .core import SYMMETRY_TOL, Dataset, Precomputation, symmetrize

# Entry-count guards for the vectorized variants; tune per machine.
NAIVE_MAX_P = 64
EXPLICIT_MAX_ENTRIES = 2**28


class RidgeVariant(str, enum.Enum):
    NAIVE = "naive"
    WOODBURY = "woodbury"
    SVD = "svd"
    STRUCTURED = "structured"


class ProblemTooLargeError(MemoryError):
    """The requested variant would exceed its memory guard."""


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def _spd_factor(pre: Precomputation, shift: float):
    """Cholesky factor of ``shift * I + G``, memoised on ``pre``."""
    key = ("chol", shift)
    factor = pre._cache.get(key)
    if factor is None:
        M = pre.G + shift * np.eye(pre.G.shape[0])
        try:
            factor = linalg.cho_factor(M, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"factorization of shift*I + G failed: {exc}") from exc
        pre._cache[key] = factor
    return factor


def _structured_solve(pre: Precomputation, X: NDArray, rhs: NDArray, lam: float) -> NDArray:
    # B = (rhs - X^T diag(w) X) / lam  with  (lam I + G) w = diag(X rhs X^T) / n
    n = X.shape[0]
    v = np.einsum("ij,ij->i", X @ rhs, X) / n
    w = linalg.cho_solve(_spd_factor(pre, lam), v, check_finite=False)
    B = (rhs - X.T @ (w[:, None] * X)) / lam
    return symmetrize(B)


def ridge_structured(pre: Precomputation, dataset: Dataset, lam: float) -> NDArray:
    """Closed-form ridge solution in O(n p^2 + n^3)."""
    lam = _check_positive("lambda", lam)
    return _structured_solve(pre, dataset.design, pre.D, lam)


def prox_quadratic_loss(pre: Precomputation, dataset: Dataset, A: ArrayLike, rho: float) -> NDArray:
    """argmin_B  loss(B) + rho/2 ||B - A||_F^2.

    Stationarity reads ``n^-1 sum x x^T B x x^T + rho B = D + rho A``, which is
    the ridge system with penalty ``rho`` and right-hand side ``D + rho A``.
    """
    rho = _check_positive("rho", rho)
    A = np.asarray(A, dtype=np.float64)
    if A.shape != pre.D.shape:
        raise ValueError(f"A has shape {A.shape}, expected {pre.D.shape}")
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("A must be symmetric")
    return _structured_solve(pre, dataset.design, pre.D + rho * A, rho)


def interaction_design(X: NDArray) -> NDArray:
    """The p^2 x n matrix with columns ``x_i (x) x_i / sqrt(n)``."""
    n, p = X.shape
    return (np.einsum("ij,ik->jki", X, X) / np.sqrt(n)).reshape(p * p, n)


def _check_guard(variant: RidgeVariant, n: int, p: int,
                 naive_max_p: int, max_entries: int) -> None:
    if variant is RidgeVariant.NAIVE and p > naive_max_p:
        raise ProblemTooLargeError(
            f"problem too large for this variant: naive needs p <= {naive_max_p}, got p={p}")
    if variant in (RidgeVariant.WOODBURY, RidgeVariant.SVD) and n * p * p > max_entries:
        raise ProblemTooLargeError(
            f"problem too large for this variant: {variant.value} needs n*p^2 <= "
            f"{max_entries}, got {n * p * p}")


def ridge_reference(dataset: Dataset, lam: float, variant: RidgeVariant | str = "naive", *,
                    rhs: ArrayLike | None = None, svd_via_gram: bool = False,
                    naive_max_p: int = NAIVE_MAX_P,
                    max_entries: int = EXPLICIT_MAX_ENTRIES) -> NDArray:
    """Solve ``(XX^T + lam I) vec(B) = vec(rhs)`` through the vectorized problem.

    ``rhs`` defaults to ``D``. The structured variant is accepted too so that
    callers can dispatch on a single enum.
    """
    lam = _check_positive("lambda", lam)
    variant = RidgeVariant(variant)
    X, y = dataset.design, dataset.response
    n, p = X.shape
    _check_guard(variant, n, p, naive_max_p, max_entries)

    if rhs is None:
        rhs = X.T @ (y[:, None] * X) / n
    rhs = np.asarray(rhs, dtype=np.float64)

    if variant is RidgeVariant.STRUCTURED:
        from .core import compute_precomputation
        return _structured_solve(compute_precomputation(dataset), X, rhs, lam)

    d = rhs.reshape(-1)
    if variant is RidgeVariant.SVD and svd_via_gram:
        # XX = U S V^T with G = XX^T XX = V S^2 V^T; the range(XX) part of vec(rhs) is
        # shrunk by S^2 / (S^2 + lam), so B = rhs/lam - XX V diag(1/(lam(S^2+lam))) V^T XX^T d.
        gram = X @ X.T
        s2, V = linalg.eigh(gram * gram / n)
        s2 = np.clip(s2, 0.0, None)
        t = np.einsum("ij,ij->i", X @ rhs, X) / np.sqrt(n)
        coef = V @ ((V.T @ t) / (lam * (s2 + lam)))
        B = rhs / lam - X.T @ (coef[:, None] * X) / np.sqrt(n)
        return symmetrize(B)

    Z = interaction_design(X)
    if variant is RidgeVariant.NAIVE:
        M = Z @ Z.T
        M[np.diag_indices_from(M)] += lam
        b = linalg.solve(M, d, assume_a="pos")
    elif variant is RidgeVariant.WOODBURY:
        K = Z.T @ Z
        K[np.diag_indices_from(K)] += lam
        b = (d - Z @ linalg.solve(K, Z.T @ d, assume_a="pos")) / lam
    else:
        U, s, _ = linalg.svd(Z, full_matrices=False)
        # rhs lies in range(Z) when it equals D; project generally.
        c = U.T @ d
        b = (d - U @ c) / lam + U @ (c / (s * s + lam))
    return symmetrize(b.reshape(p, p))
