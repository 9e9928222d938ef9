"""Dense real-matrix core: validated storage, SVD, truncation, pseudo-inverse.

All routines operate on 2-D float64 ``numpy`` arrays.  ``as_matrix`` is the
validating entry point; everything downstream assumes its output format.
Singular values at or below ``RANK_RTOL`` times the largest one are treated
as zero, which fixes the numerical rank used across the package.
"""

from typing import NamedTuple

import numpy as np

RANK_RTOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Validate and convert ``a`` to a 2-D, C-contiguous float64 array.

    Parameters
    ----------
    a : array_like
        Matrix data with positive dimensions.

    Returns
    -------
    ndarray
        Row-major float64 copy of the input.

    Raises
    ------
    ValueError
        If the input is not 2-D, has a zero dimension, or contains
        non-finite entries.
    """
    m = np.array(a, dtype=np.float64, order="C")
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    return m


class SvdResult(NamedTuple):
    """Rank-trimmed thin SVD: ``U @ diag(singular_values) @ V.T`` rebuilds
    the input.  ``U`` is n-by-r and ``V`` is d-by-r with orthonormal
    columns; ``singular_values`` is non-increasing with length r, the
    numerical rank."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def svd(a: np.ndarray) -> SvdResult:
    """Singular value decomposition trimmed to the numerical rank.

    Values sigma <= RANK_RTOL * sigma_max are treated as zero and their
    singular vectors dropped; a zero matrix yields empty factors.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the underlying iteration fails to converge.
    """
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size and s[0] > 0.0:
        r = int(np.sum(s > RANK_RTOL * s[0]))
    else:
        r = 0
    return SvdResult(u[:, :r], s[:r], vh[:r].T)


def best_rank_k(a: np.ndarray, k: int) -> np.ndarray:
    """Best rank-``k`` approximation of ``a`` in the Frobenius norm.

    If ``k`` is at least the numerical rank, returns ``a`` up to roundoff.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    u, s, v = svd(a)
    r = min(k, s.size)
    if r == 0:
        return np.zeros_like(a)
    return (u[:, :r] * s[:r]) @ v[:, :r].T


def pinv(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via the rank-trimmed SVD."""
    u, s, v = svd(a)
    if s.size == 0:
        return np.zeros((a.shape[1], a.shape[0]))
    return (v / s) @ u.T


def fro_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm (sum of squared entries)."""
    flat = np.asarray(a).ravel()
    return float(flat @ flat)
