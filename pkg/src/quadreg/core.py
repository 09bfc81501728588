"""Data model, squared loss and the shared n x n precomputation.

Matrices are dense NumPy arrays in C order. The design is stored n x p with
one observation per row; when intercept augmentation is on, column 0 holds
the constant 1 so that ``B[0, 0]`` is the intercept, ``B[0, j]`` (and its
mirror) the linear effect of covariate ``j`` and ``B[j, k]`` the interaction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Augmented design plus response.

    Build it through :meth:`from_raw` unless the design already carries the
    leading column of ones.
    """

    design: NDArray[np.float64]
    response: NDArray[np.float64]
    intercept_augmented: bool = True

    def __post_init__(self):
        X = np.ascontiguousarray(self.design, dtype=np.float64)
        y = np.ascontiguousarray(self.response, dtype=np.float64).reshape(-1)
        if X.ndim != 2:
            raise ValueError(f"design must be 2-D, got shape {X.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError(f"design must be non-empty, got shape {X.shape}")
        if y.shape[0] != n:
            raise ValueError(f"response has length {y.shape[0]}, design has {n} rows")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("design and response must be finite")
        if self.intercept_augmented and not np.array_equal(X[:, 0], np.ones(n)):
            raise ValueError("intercept_augmented is set but column 0 is not all ones")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "design", X)
        object.__setattr__(self, "response", y)

    @classmethod
    def from_raw(cls, X: ArrayLike, y: ArrayLike, intercept: bool = True) -> "Dataset":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
        return cls(X, y, intercept_augmented=intercept)

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]


@dataclass(frozen=True)
class Precomputation:
    """Quantities shared by every solver on a fixed dataset.

    ``D = X^T diag(y) X / n``, ``gram = X X^T`` and ``G = (gram * gram) / n``,
    the Gram matrix of the (never formed) interaction features.
    """

    D: NDArray[np.float64]
    G: NDArray[np.float64]
    gram: NDArray[np.float64]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)


def _check_coef(B: ArrayLike, p: int) -> NDArray[np.float64]:
    B = np.asarray(B, dtype=np.float64)
    if B.shape != (p, p):
        raise ValueError(f"coefficient matrix has shape {B.shape}, expected ({p}, {p})")
    return B


def symmetrize(B: NDArray) -> NDArray:
    return 0.5 * (B + B.T)


def fitted_values(data: Dataset, B: ArrayLike) -> NDArray[np.float64]:
    """Return ``x_i^T B x_i`` for every row, in O(n p^2)."""
    X = data.design
    B = _check_coef(B, data.p)
    return np.einsum("ij,ij->i", X @ B, X)


def compute_precomputation(data: Dataset) -> Precomputation:
    X, y = data.design, data.response
    n = data.n
    D = symmetrize(X.T @ (y[:, None] * X) / n)
    gram = X @ X.T
    gram = symmetrize(gram)
    G = gram * gram / n
    for a in (D, G, gram):
        a.setflags(write=False)
    return Precomputation(D=D, G=G, gram=gram)


def squared_loss(data: Dataset, B: ArrayLike) -> float:
    r = data.response - fitted_values(data, B)
    return float(r @ r) / (2 * data.n)


def objective(data: Dataset, B: ArrayLike, spec=None) -> float:
    """Squared loss plus every penalty term in ``spec`` (may be None/empty)."""
    from .penalty import eval_penalty

    B = _check_coef(B, data.p)
    value = squared_loss(data, B)
    if spec is not None:
        for term in spec.terms:
            value += eval_penalty(term, B)
    return value
