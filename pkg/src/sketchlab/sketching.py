"""Sparse sketching matrices and the sketch-and-solve low-rank pipeline.

A :class:`SparseSketch` is an m-by-n matrix with a frozen per-column
sparsity pattern (``s`` nonzero slots per column) and freely settable slot
values; the slot values are what gets trained.  ``sketch_lowrank``
implements the classic sketch-and-solve rank-``k`` approximation: sketch
the input down to ``S @ A``, take its SVD, and solve the small problem in
the sketched row space.
"""

from dataclasses import dataclass, field

import numpy as np

from .charpoly import projection_rowspace
from .linalg import best_rank_k, fro_sq, svd

# Entrywise magnitude at or below this counts as "the sketched matrix is zero".
ZERO_SKETCH_ATOL = 1e-14


@dataclass(eq=False)
class SparseSketch:
    """m-by-n sketching matrix with ``s`` nonzero slots per column.

    Parameters
    ----------
    m, n, s : int
        Row count, column count, and slots per column (1 <= s <= m).
    pattern : ndarray of int64, shape (n, s)
        For each column, the sorted distinct row indices of its slots.
    values : ndarray of float64, shape (n, s)
        Slot values aligned with ``pattern``; zeros are allowed and do not
        change the pattern.
    """

    m: int
    n: int
    s: int
    pattern: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (1 <= self.s <= self.m):
            raise ValueError(f"need 1 <= s <= m, got s={self.s}, m={self.m}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        self.pattern = np.asarray(self.pattern, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.pattern.shape != (self.n, self.s):
            raise ValueError(
                f"pattern shape {self.pattern.shape} != {(self.n, self.s)}"
            )
        if self.values.shape != (self.n, self.s):
            raise ValueError(
                f"values shape {self.values.shape} != {(self.n, self.s)}"
            )
        if self.pattern.min() < 0 or self.pattern.max() >= self.m:
            raise ValueError("pattern indices out of range [0, m)")
        if np.any(np.diff(self.pattern, axis=1) <= 0):
            raise ValueError("pattern rows must be sorted and distinct per column")
        if not np.isfinite(self.values).all():
            raise ValueError("sketch values must be finite")

    def dense(self) -> np.ndarray:
        """Materialize the m-by-n matrix."""
        out = np.zeros((self.m, self.n))
        cols = np.repeat(np.arange(self.n), self.s)
        out[self.pattern.ravel(), cols] = self.values.ravel()
        return out

    def with_values(self, values: np.ndarray) -> "SparseSketch":
        """New sketch with the same pattern and the given slot values."""
        return SparseSketch(self.m, self.n, self.s, self.pattern, values)


def _dense(sketch) -> np.ndarray:
    return sketch.dense() if hasattr(sketch, "dense") else np.asarray(sketch, float)


def random_sparse_sketch(m: int, n: int, s: int, seed) -> SparseSketch:
    """Sample an oblivious sparse sketch.

    Each column gets ``s`` slot positions drawn uniformly without
    replacement from the ``m`` rows, each filled with an independent
    uniform +-1 value.  ``seed`` may be an int or a ``numpy`` Generator;
    a fixed int seed reproduces the sketch exactly.
    """
    if not (1 <= s <= m):
        raise ValueError(f"need 1 <= s <= m, got s={s}, m={m}")
    if m > n:
        raise ValueError(f"need m <= n, got m={m}, n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    keys = rng.random((n, m))
    pattern = np.sort(np.argsort(keys, axis=1)[:, :s], axis=1)
    values = rng.choice([-1.0, 1.0], size=(n, s))
    return SparseSketch(m, n, s, pattern, values)


def sketch_lowrank(a: np.ndarray, k: int, sketch) -> np.ndarray:
    """Sketch-and-solve rank-``k`` approximation of ``a``.

    Steps: form ``SA``; if it vanishes return the zero matrix; otherwise
    take the SVD ``U S V^T`` of ``SA``, form ``A V``, and return
    ``[A V]_k V^T``.  The output always has rank at most ``k``.
    """
    s_mat = _dense(sketch)
    if s_mat.shape[1] != a.shape[0]:
        raise ValueError(
            f"sketch has {s_mat.shape[1]} columns but the matrix has "
            f"{a.shape[0]} rows"
        )
    if not (1 <= k <= min(a.shape)):
        raise ValueError(f"need 1 <= k <= min(A.shape), got k={k}")
    sa = s_mat @ a
    if np.abs(sa).max() <= ZERO_SKETCH_ATOL:
        return np.zeros_like(a)
    _, _, v = svd(sa)
    av = a @ v
    return best_rank_k(av, k) @ v.T


def sketch_lowrank_via_projection(a: np.ndarray, k: int, sketch) -> np.ndarray:
    """Equivalent form of :func:`sketch_lowrank`: ``[A P]_k`` where ``P``
    projects onto the row space of ``SA``."""
    s_mat = _dense(sketch)
    sa = s_mat @ a
    if np.abs(sa).max() <= ZERO_SKETCH_ATOL:
        return np.zeros_like(a)
    proj = projection_rowspace(sa)
    return best_rank_k(a @ proj, k)


def sketch_loss(sketch, a: np.ndarray, k: int) -> float:
    """Squared-Frobenius error of the sketch-and-solve approximation.

    For inputs normalized to unit squared Frobenius norm the value lies in
    [0, 1]; in general it never exceeds ``fro_sq(a)``.
    """
    return fro_sq(a - sketch_lowrank(a, k, sketch))


def rank1_closed_form_loss(a: np.ndarray, w: np.ndarray) -> float:
    """Closed-form sketch-and-solve loss for a single sketching vector and
    target rank 1.

    Equals ``fro_sq(a)`` when ``w^T A`` vanishes, and otherwise
    ``fro_sq(A - A t t^T / ||t||^2)`` with ``t = A^T w``.  Agrees with
    ``sketch_loss`` for the 1-row sketch ``w^T``.
    """
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if w.size != a.shape[0]:
        raise ValueError(f"w has length {w.size}, expected {a.shape[0]}")
    t = a.T @ w
    t_norm = float(np.linalg.norm(t))
    if t_norm <= 1e-12 * np.linalg.norm(a) * np.linalg.norm(w):
        return fro_sq(a)
    out = np.outer(a @ t, t) / (t_norm * t_norm)
    return fro_sq(a - out)
