import numpy as np
import pytest

from sketchlab.charpoly import (
    SingularMatrixError,
    charpoly_coefficients,
    charpoly_free_coeff,
    charpoly_inverse,
    greedy_row_basis,
    is_numerically_singular,
    projection_rowspace,
)
from sketchlab.linalg import pinv

from oracles import cofactor_det, gauss_inverse, rowspace_projector_svd


def test_charpoly_identity():
    coeffs = charpoly_coefficients(np.eye(2))
    np.testing.assert_allclose(coeffs, [1.0, -2.0, 1.0])
    assert charpoly_free_coeff(np.eye(2)) == 1.0


def test_charpoly_annihilates_eigenvalues():
    rng = np.random.default_rng(0)
    for _ in range(10):
        k = int(rng.integers(2, 6))
        m = rng.standard_normal((k, k))
        coeffs = charpoly_coefficients(m)
        for lam in np.linalg.eigvals(m):
            val = sum(c * lam ** (k - i) for i, c in enumerate(coeffs))
            assert abs(val) <= 1e-6 * (1 + abs(lam)) ** k


def test_free_coeff_matches_cofactor_determinant():
    rng = np.random.default_rng(1)
    for k in (2, 3, 4):
        m = rng.standard_normal((k, k))
        expected = (-1.0) ** k * cofactor_det(m)
        assert abs(charpoly_free_coeff(m) - expected) < 1e-10 * max(1, abs(expected))


def test_free_coeff_of_singular_matrix_is_tiny():
    m = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert is_numerically_singular(m)


def test_inverse_identity_and_diagonal():
    np.testing.assert_allclose(charpoly_inverse(np.eye(2)), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(charpoly_inverse(np.diag([2.0, 4.0])),
                               np.diag([0.5, 0.25]), atol=1e-14)


def test_inverse_matches_elimination_oracle():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
    np.testing.assert_allclose(charpoly_inverse(m), gauss_inverse(m), atol=1e-8)


def test_inverse_residual_contract():
    rng = np.random.default_rng(3)
    for k in (2, 3, 5, 8):
        m = rng.standard_normal((k, k)) + 2.0 * k * np.eye(k)
        res = np.linalg.norm(m @ charpoly_inverse(m) - np.eye(k))
        assert res <= 1e-7 * k


def test_inverse_rejects_singular():
    with pytest.raises(SingularMatrixError):
        charpoly_inverse(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularMatrixError):
        charpoly_inverse(np.array([[0.0]]))


def test_greedy_basis_duplicate_rows():
    z = np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 0.0]])
    y = greedy_row_basis(z)
    assert y.shape == (1, 3)
    np.testing.assert_array_equal(y[0], z[0])


def test_greedy_basis_full_rank_keeps_all():
    rng = np.random.default_rng(4)
    z = rng.standard_normal((3, 5))
    np.testing.assert_array_equal(greedy_row_basis(z), z)


def test_greedy_basis_rank_two():
    rng = np.random.default_rng(5)
    factors = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 6))
    y = greedy_row_basis(factors)
    assert y.shape[0] == 2
    np.testing.assert_allclose(rowspace_projector_svd(y),
                               rowspace_projector_svd(factors), atol=1e-8)


def test_greedy_basis_zero_matrix():
    assert greedy_row_basis(np.zeros((3, 4))).shape == (0, 4)


def test_projection_single_basis_row():
    z = np.zeros((1, 4))
    z[0, 0] = 1.0
    np.testing.assert_allclose(projection_rowspace(z), np.diag([1.0, 0, 0, 0]),
                               atol=1e-12)


def test_projection_orthonormal_rows():
    q = np.linalg.qr(np.random.default_rng(6).standard_normal((5, 3)))[0].T
    np.testing.assert_allclose(projection_rowspace(q), q.T @ q, atol=1e-10)


def test_projection_matches_pinv_route():
    rng = np.random.default_rng(7)
    for _ in range(25):
        rank = int(rng.integers(1, 4))
        z = rng.standard_normal((4, rank)) @ rng.standard_normal((rank, 6))
        np.testing.assert_allclose(projection_rowspace(z), pinv(z) @ z, atol=1e-7)


def test_projection_zero_matrix():
    np.testing.assert_array_equal(projection_rowspace(np.zeros((2, 3))),
                                  np.zeros((3, 3)))


def test_projection_idempotent_symmetric_and_fixes_rows():
    rng = np.random.default_rng(8)
    for _ in range(25):
        k, d = int(rng.integers(1, 6)), int(rng.integers(2, 7))
        z = rng.standard_normal((k, d))
        p = projection_rowspace(z)
        assert np.abs(p @ p - p).max() < 1e-7
        assert np.abs(p - p.T).max() < 1e-7
        assert np.abs(z @ p - z).max() < 1e-7


def test_projection_invariant_under_row_permutation():
    rng = np.random.default_rng(9)
    z = rng.standard_normal((4, 5))
    p_ref = projection_rowspace(z)
    for _ in range(5):
        perm = rng.permutation(4)
        assert np.abs(projection_rowspace(z[perm]) - p_ref).max() < 1e-7
