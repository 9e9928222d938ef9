"""Deterministic proxy for the sketch-and-solve loss.

The true loss truncates ``B = A P_rowspace(SA)`` to rank k through an SVD.
The proxy replaces the SVD with arithmetic-only machinery: deterministic
standard-basis starting blocks, block power refinement, and a best-of
selection over candidates.  With enough refinement steps the proxy
over-estimates the true loss by at most ``epsilon`` and never
under-estimates it.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .charpoly import projection_rowspace
from .linalg import fro_sq
from .sketching import _dense

DEFAULT_Q_CONSTANT = 4.0

# Successive-span change below this, three times in a row, counts as
# converged; the span metric is k - ||Q_old^T Q_new||_F^2 which is ~1e-31
# at an exact fixed point.
_SPAN_STALL_TOL = 1e-26


@dataclass
class ProxyConfig:
    """Accuracy and enumeration knobs for the proxy loss."""

    epsilon: float
    subset_cap: int = 1000
    q_constant: float = DEFAULT_Q_CONSTANT

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.subset_cap < 1:
            raise ValueError(f"subset_cap must be >= 1, got {self.subset_cap}")
        if self.q_constant <= 0:
            raise ValueError(f"q_constant must be > 0, got {self.q_constant}")


def q_iterations(epsilon: float, d: int, q_constant: float = DEFAULT_Q_CONSTANT) -> int:
    """Number of power-refinement steps: ceil(c/eps * ln(max(d,2)/eps)),
    at least 1."""
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    q = math.ceil(q_constant / epsilon * math.log(max(d, 2) / epsilon))
    return max(q, 1)


def greedy_pivot_columns(v_rows: np.ndarray) -> np.ndarray:
    """Pick ``k`` standard-basis columns by greedy residual projection.

    ``v_rows`` must be a k-by-d matrix with orthonormal rows, k < d.  At
    step i the column of largest residual norm is selected, then all
    columns are re-projected against the span of the selected originals.
    The selection matrix ``P`` (d-by-k, distinct standard-basis columns)
    satisfies ``sigma_min(v_rows @ P) >= 1/sqrt(d)``.
    """
    v = np.asarray(v_rows, dtype=np.float64)
    k, d = v.shape
    if k >= d:
        raise ValueError(f"need k < d, got k={k}, d={d}")
    if np.abs(v @ v.T - np.eye(k)).max() > 1e-8:
        raise ValueError("rows are not orthonormal to 1e-8")

    p = np.zeros((d, k))
    basis = np.zeros((k, 0))
    residual = v.copy()
    for i in range(k):
        j = int(np.argmax(np.sum(residual * residual, axis=0)))
        p[j, i] = 1.0
        w = v[:, j] - basis @ (basis.T @ v[:, j])
        basis = np.concatenate([basis, (w / np.linalg.norm(w))[:, None]], axis=1)
        residual = v - basis @ (basis.T @ v)
    return p


def candidate_bases(b: np.ndarray, k: int, cfg: ProxyConfig) -> list[np.ndarray]:
    """Starting blocks for the power refinement.

    When the number of k-subsets of the d standard-basis vectors fits under
    ``cfg.subset_cap``, all of them are returned.  Otherwise a single block
    is chosen greedily from the top-k right singular rows of ``b``; it
    still keeps the refined loss within a factor 1 + d of optimal.
    """
    d = b.shape[1]
    if not (1 <= k < d):
        raise ValueError(f"need 1 <= k < d, got k={k}, d={d}")
    if math.comb(d, k) <= cfg.subset_cap:
        out = []
        for cols in combinations(range(d), k):
            p = np.zeros((d, k))
            p[list(cols), range(k)] = 1.0
            out.append(p)
        return out
    _, _, vh = np.linalg.svd(b, full_matrices=False)
    return [greedy_pivot_columns(vh[:k])]


def power_refine(b: np.ndarray, p: np.ndarray, q: int) -> np.ndarray:
    """Refine the block ``B @ P`` by ``q`` steps of ``Z <- (B B^T) Z``.

    Returns a matrix with the column space of ``(B B^T)^q B P``.  For
    ``q = 0`` this is literally ``B @ P``; for ``q >= 1`` the iteration is
    run with per-step orthonormalization (raw products lose every
    subdominant direction to roundoff once its amplified ratio drops below
    machine precision) and stops early once the span stalls.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    z = b @ p
    if q == 0:
        return z
    if np.abs(z).max() == 0.0:
        return z
    qmat, _ = np.linalg.qr(z)
    stalled = 0
    for _ in range(q):
        qnew, _ = np.linalg.qr(b @ (b.T @ qmat))
        overlap = qmat.T @ qnew
        change = qmat.shape[1] - fro_sq(overlap)
        qmat = qnew
        stalled = stalled + 1 if change < _SPAN_STALL_TOL else 0
        if stalled >= 3:
            break
    return qmat


def proxy_loss(sketch, a: np.ndarray, k: int, cfg: ProxyConfig) -> float:
    """Arithmetic-only over-estimate of the sketch-and-solve loss.

    Pipeline: project ``a`` onto the row space of ``SA``; refine every
    candidate starting block; keep the refined block whose column space
    captures ``B`` best; report the residual against ``a``.  The result
    exceeds the true loss by at most ``cfg.epsilon`` (and is never below
    it) when the candidate enumeration is exhaustive.
    """
    sa = _dense(sketch) @ a
    b = a @ projection_rowspace(sa)
    q = q_iterations(cfg.epsilon, a.shape[1], cfg.q_constant)

    best_loss = math.inf
    best_proj = None
    for p in candidate_bases(b, k, cfg):
        z = power_refine(b, p, q)
        proj = projection_rowspace(z.T)
        loss = fro_sq(b - proj @ b)
        if loss < best_loss:
            best_loss = loss
            best_proj = proj
    return fro_sq(a - best_proj @ b)
