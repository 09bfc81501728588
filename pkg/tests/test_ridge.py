import numpy as np
import pytest
from oracles import brute_ridge, d_matrix, kron_rows

from quadreg.core import Dataset, compute_precomputation
from quadreg.ridge import (ProblemTooLargeError, RidgeVariant, prox_quadratic_loss,
                           ridge_reference, ridge_structured)

VARIANTS = ["naive", "woodbury", "svd", "structured"]


def scalar_dataset():
    return Dataset(np.array([[1.0]]), [3.0])


def test_scalar_case():
    # argmin 1/2 (3 - B)^2 + lam/2 B^2 = 3 / (1 + lam)
    ds = scalar_dataset()
    assert ridge_structured(compute_precomputation(ds), ds, 2.0)[0, 0] == pytest.approx(1.0)
    for v in VARIANTS:
        assert ridge_reference(ds, 2.0, v)[0, 0] == pytest.approx(1.0)


def test_zero_response(make_problem):
    ds, _ = make_problem(10, 4)
    ds0 = Dataset(ds.design, np.zeros(ds.n))
    assert np.all(ridge_structured(compute_precomputation(ds0), ds0, 1.0) == 0)


def test_rejects_nonpositive_lambda(make_problem):
    ds, pre = make_problem(5, 3)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            ridge_structured(pre, ds, bad)
        with pytest.raises(ValueError):
            prox_quadratic_loss(pre, ds, np.zeros((3, 3)), bad)


def test_structured_matches_naive(make_problem):
    ds, pre = make_problem(20, 8, seed=3)
    B = ridge_structured(pre, ds, 10.0)
    np.testing.assert_allclose(B, brute_ridge(ds.design, d_matrix(ds.design, ds.response), 10.0),
                               atol=1e-8, rtol=0)


@pytest.mark.parametrize("svd_via_gram", [False, True])
def test_variants_agree(make_problem, svd_via_gram):
    ds, pre = make_problem(15, 6, seed=4)
    sols = {v: ridge_reference(ds, 5.0, v, svd_via_gram=svd_via_gram) for v in VARIANTS}
    for a in VARIANTS:
        for b in VARIANTS:
            np.testing.assert_allclose(sols[a], sols[b], atol=1e-8, rtol=0)
        assert np.max(np.abs(sols[a] - sols[a].T)) <= 1e-10


@pytest.mark.parametrize("variant", VARIANTS)
def test_infinite_shrinkage(make_problem, variant):
    ds, _ = make_problem(12, 5, seed=5)
    assert np.linalg.norm(ridge_reference(ds, 1e12, variant), 2) <= 1e-6


def test_memory_guards(make_problem):
    ds, _ = make_problem(10, 6)
    with pytest.raises(ProblemTooLargeError, match="too large"):
        ridge_reference(ds, 1.0, "naive", naive_max_p=5)
    with pytest.raises(ProblemTooLargeError):
        ridge_reference(ds, 1.0, RidgeVariant.WOODBURY, max_entries=100)


def test_gradient_optimality(make_problem):
    ds, pre = make_problem(30, 7, seed=6)
    lam = 0.5
    B = ridge_structured(pre, ds, lam)
    X, y = ds.design, ds.response
    r = np.einsum("ij,jk,ik->i", X, B, X) - y
    grad = X.T @ (r[:, None] * X) / ds.n + lam * B
    assert np.max(np.abs(grad)) <= 1e-8 * (1 + np.max(np.abs(pre.D)))


def test_monotone_shrinkage(make_problem):
    ds, pre = make_problem(25, 6, seed=7)
    norms = [np.linalg.norm(ridge_structured(pre, ds, lam), 2) for lam in (0.01, 0.1, 1, 10, 100)]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_prox_loss_at_zero_is_ridge(make_problem):
    ds, pre = make_problem(12, 5, seed=8)
    np.testing.assert_allclose(prox_quadratic_loss(pre, ds, np.zeros((5, 5)), 3.0),
                               ridge_structured(pre, ds, 3.0), atol=1e-12)


def test_prox_loss_dominant_proximity(make_problem, rng):
    ds, pre = make_problem(12, 5, seed=9)
    A = rng.standard_normal((5, 5))
    A = A + A.T
    out = prox_quadratic_loss(pre, ds, A, 1e12)
    assert np.linalg.norm(out - A) <= 1e-4 * np.linalg.norm(A)


def test_prox_loss_brute_force(make_problem, rng):
    ds, pre = make_problem(12, 5, seed=10)
    A = rng.standard_normal((5, 5))
    A = A + A.T
    rho = 3.0
    expected = brute_ridge(ds.design, d_matrix(ds.design, ds.response) + rho * A, rho)
    np.testing.assert_allclose(prox_quadratic_loss(pre, ds, A, rho), expected, atol=1e-8, rtol=0)


def test_prox_loss_rejects_asymmetric(make_problem):
    ds, pre = make_problem(6, 3)
    A = np.zeros((3, 3))
    A[0, 1] = 1.0
    with pytest.raises(ValueError, match="symmetric"):
        prox_quadratic_loss(pre, ds, A, 1.0)


def test_interaction_design_layout(rng):
    from quadreg.ridge import interaction_design
    X = rng.standard_normal((4, 3))
    np.testing.assert_allclose(interaction_design(X).T, kron_rows(X) / 2.0, atol=1e-15)
