"""Proximal operators with unit proximity weight.

Each function returns ``argmin_b  lam * f(b) + 1/2 ||b - a||^2`` for its
norm ``f``. Callers solving with proximity weight ``rho`` pass ``lam / rho``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

HYBRID_TOL = 1e-10


def _check_lam(lam: float) -> float:
    lam = float(lam)
    if lam < 0 or np.isnan(lam):
        raise ValueError(f"threshold must be non-negative, got {lam}")
    return lam


def soft_threshold(a: ArrayLike, lam: float) -> NDArray:
    lam = _check_lam(lam)
    a = np.asarray(a, dtype=np.float64)
    return np.sign(a) * np.maximum(np.abs(a) - lam, 0.0)


def prox_nuclear(A: ArrayLike, lam: float) -> NDArray:
    """Soft-threshold the singular values of ``A``."""
    lam = _check_lam(lam)
    A = np.asarray(A, dtype=np.float64)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"SVD failed in nuclear prox: {exc}") from exc
    s = np.maximum(s - lam, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def prox_group_l2(a: ArrayLike, lam: float) -> NDArray:
    lam = _check_lam(lam)
    a = np.asarray(a, dtype=np.float64)
    norm = np.linalg.norm(a)
    if norm <= lam:
        return np.zeros_like(a)
    return (1.0 - lam / norm) * a


def _l1_ball_threshold(absa: NDArray, radius: float) -> float:
    # Largest k with u_k > (cumsum_k - radius) / k over the sorted magnitudes u.
    u = np.sort(absa)[::-1]
    css = np.cumsum(u) - radius
    k = np.arange(1, u.size + 1)
    active = np.nonzero(u * k > css)[0]
    # radius below float resolution of u_1 leaves no active index; u_1's own row is exact then
    rho = active[-1] if active.size else 0
    return max(css[rho] / (rho + 1), 0.0)


def project_l1_ball(a: ArrayLike, radius: float) -> NDArray:
    """Euclidean projection onto ``{b : ||b||_1 <= radius}``."""
    radius = _check_lam(radius)
    a = np.asarray(a, dtype=np.float64)
    absa = np.abs(a)
    if absa.sum() <= radius:
        return a.copy()
    if radius == 0:
        return np.zeros_like(a)
    return soft_threshold(a, _l1_ball_threshold(absa.ravel(), radius))


def prox_linf(a: ArrayLike, lam: float) -> NDArray:
    """Prox of ``lam * ||.||_inf`` via the Moreau decomposition."""
    lam = _check_lam(lam)
    a = np.asarray(a, dtype=np.float64)
    if np.abs(a).sum() <= lam:
        return np.zeros_like(a)
    return a - project_l1_ball(a, lam)


def prox_hybrid_l1_linf(a: ArrayLike, lam: float, tol: float = HYBRID_TOL) -> NDArray:
    """Prox of ``lam * max(|b_0|, ||b_1:||_1)``.

    The solution is ``(soft(a_0, t), soft(a_1:, lam - t))`` where ``t`` in
    ``[0, lam]`` minimises the squared norm of that vector. The objective is
    convex in ``t`` with a nondecreasing derivative, so bisection on the
    derivative finds ``t`` to within ``tol``.
    """
    lam = _check_lam(lam)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("hybrid prox expects a non-empty vector")
    head, tail = a[0], a[1:]
    tail_max = np.abs(tail).max(initial=0.0)
    if lam == 0:
        return a.copy()
    if lam >= abs(head) + tail_max:
        return np.zeros_like(a)

    def slope(t):
        # half the derivative of the squared-norm objective
        return -max(abs(head) - t, 0.0) + np.maximum(np.abs(tail) - (lam - t), 0.0).sum()

    lo, hi = 0.0, lam
    if slope(lo) >= 0:
        t = lo
    elif slope(hi) <= 0:
        t = hi
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if slope(mid) > 0:
                hi = mid
            else:
                lo = mid
        t = 0.5 * (lo + hi)
    out = np.empty_like(a)
    out[0] = np.sign(head) * max(abs(head) - t, 0.0)
    out[1:] = soft_threshold(tail, lam - t)
    return out


# Column-batched forms used by the matrix penalties: each column of ``A`` is
# treated as one vector ``a``.

def prox_linf_columns(A: ArrayLike, lam: float) -> NDArray:
    lam = _check_lam(lam)
    A = np.asarray(A, dtype=np.float64)
    if lam == 0:
        return A.copy()
    absA = np.abs(A)
    u = -np.sort(-absA, axis=0)
    css = np.cumsum(u, axis=0) - lam
    k = np.arange(1, A.shape[0] + 1)[:, None]
    active = u * k > css
    last = A.shape[0] - 1 - np.argmax(active[::-1], axis=0)
    last = np.where(active.any(axis=0), last, 0)
    theta = np.maximum(css[last, np.arange(A.shape[1])] / (last + 1), 0.0)
    inside = absA.sum(axis=0) <= lam
    theta = np.where(inside, 0.0, theta)
    return np.clip(A, -theta, theta)


def prox_hybrid_columns(A: ArrayLike, lam: float, tol: float = HYBRID_TOL) -> NDArray:
    lam = _check_lam(lam)
    A = np.asarray(A, dtype=np.float64)
    if lam == 0:
        return A.copy()
    head, tail = np.abs(A[0]), np.abs(A[1:])

    def slope(t):
        return -np.maximum(head - t, 0.0) + np.maximum(tail - (lam - t), 0.0).sum(axis=0)

    lo = np.zeros(A.shape[1])
    hi = np.full(A.shape[1], lam)
    for _ in range(max(int(np.ceil(np.log2(lam / tol))), 0) + 1):
        mid = 0.5 * (lo + hi)
        up = slope(mid) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    t = 0.5 * (lo + hi)
    t = np.where(slope(np.zeros_like(t)) >= 0, 0.0, t)
    t = np.where(slope(np.full_like(t, lam)) <= 0, lam, t)
    out = np.empty_like(A)
    out[0] = np.sign(A[0]) * np.maximum(head - t, 0.0)
    out[1:] = np.sign(A[1:]) * np.maximum(tail - (lam - t), 0.0)
    zero = lam >= head + tail.max(axis=0, initial=0.0)
    out[:, zero] = 0.0
    return out
