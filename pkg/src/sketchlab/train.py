"""Training loop for learned sparse sketches.

The sparsity pattern stays frozen; only slot values move.  Gradients of the
sketch-and-solve loss are estimated by central finite differences on each
slot value, since the truncation step inside the pipeline is only piecewise
smooth and differentiating through the SVD buys nothing at desk scale.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import fro_sq
from .sketching import SparseSketch, _dense, sketch_loss


@dataclass
class TrainConfig:
    """Hyperparameters for finite-difference SGD."""

    epochs: int
    step_size: float
    batch_size: int
    fd_step: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (0 < self.fd_step <= 1e-3):
            raise ValueError(f"fd_step must be in (0, 1e-3], got {self.fd_step}")


def make_dataset(matrices) -> list[np.ndarray]:
    """Validate and normalize a training set.

    All matrices must share one shape; each is rescaled to unit squared
    Frobenius norm.
    """
    mats = [np.array(m, dtype=np.float64) for m in matrices]
    if not mats:
        raise ValueError("dataset must be nonempty")
    shape = mats[0].shape
    out = []
    for i, m in enumerate(mats):
        if m.ndim != 2 or m.shape != shape:
            raise ValueError(
                f"matrix {i} has shape {m.shape}, expected {shape}"
            )
        if not np.isfinite(m).all():
            raise ValueError(f"matrix {i} contains non-finite entries")
        norm_sq = fro_sq(m)
        if norm_sq == 0.0:
            raise ValueError(f"matrix {i} is zero and cannot be normalized")
        out.append(m / np.sqrt(norm_sq))
    return out


def empirical_loss(sketch, data, k: int) -> float:
    """Mean sketch-and-solve loss over a dataset."""
    return float(np.mean([sketch_loss(sketch, a, k) for a in data]))


def finite_difference_sgd(values, loss_fn, cfg: TrainConfig, n_batches: int = 1,
                          history: list | None = None,
                          full_loss_fn=None) -> np.ndarray:
    """Generic mini-batch SGD with central finite-difference gradients.

    ``loss_fn(values, batch_index, epoch)`` evaluates the batch loss at a
    flat parameter vector.  After each epoch the full loss (via
    ``full_loss_fn`` or batch 0) is appended to ``history`` when given.
    Aborts with a diagnostic if a loss evaluates non-finite.
    """
    vals = np.array(values, dtype=np.float64).ravel()
    h = cfg.fd_step
    for epoch in range(cfg.epochs):
        for b in range(n_batches):
            grad = np.empty_like(vals)
            for j in range(vals.size):
                orig = vals[j]
                vals[j] = orig + h
                up = loss_fn(vals, b, epoch)
                vals[j] = orig - h
                down = loss_fn(vals, b, epoch)
                vals[j] = orig
                if not (np.isfinite(up) and np.isfinite(down)):
                    raise FloatingPointError(
                        f"non-finite loss at epoch {epoch}, batch {b}, "
                        f"parameter {j}: up={up}, down={down}"
                    )
                grad[j] = (up - down) / (2.0 * h)
            vals -= cfg.step_size * grad
        if history is not None:
            full = full_loss_fn(vals) if full_loss_fn else loss_fn(vals, 0, epoch)
            if not np.isfinite(full):
                raise FloatingPointError(
                    f"non-finite loss after epoch {epoch}: {full}"
                )
            history.append(float(full))
    return vals


def sgd_train(pattern: SparseSketch, data, k: int, cfg: TrainConfig,
              history: list | None = None) -> SparseSketch:
    """Train the slot values of ``pattern`` by finite-difference SGD on the
    mean sketch-and-solve loss.

    The returned sketch has exactly the input pattern.  With a fixed
    config the whole trajectory is deterministic.  Per-epoch training
    losses are appended to ``history`` when a list is passed.
    """
    rng = np.random.default_rng(cfg.seed)
    order = np.arange(len(data))
    batch_size = min(cfg.batch_size, len(data))
    n_batches = (len(data) + batch_size - 1) // batch_size
    shape = pattern.values.shape

    # One shuffle per epoch, drawn up front so loss_fn stays pure.
    perms = [rng.permutation(order) for _ in range(max(cfg.epochs, 1))]

    def batch_loss(vals, b, epoch):
        sk = pattern.with_values(vals.reshape(shape))
        idx = perms[epoch][b * batch_size:(b + 1) * batch_size]
        return float(np.mean([sketch_loss(sk, data[i], k) for i in idx]))

    def full_loss(vals):
        return empirical_loss(pattern.with_values(vals.reshape(shape)), data, k)

    trained = finite_difference_sgd(
        pattern.values, batch_loss, cfg, n_batches=n_batches,
        history=history, full_loss_fn=full_loss,
    )
    return pattern.with_values(trained.reshape(shape))


def safeguard(learned: SparseSketch, oblivious: SparseSketch) -> SparseSketch:
    """Stack an oblivious sketch below a learned one.

    The result is an (m1+m2)-by-n sketch whose row space contains both row
    spaces, so its sketch-and-solve loss never exceeds either input's.
    Per-column sparsity becomes s1 + s2.
    """
    if learned.n != oblivious.n:
        raise ValueError(
            f"column counts differ: {learned.n} vs {oblivious.n}"
        )
    pattern = np.concatenate(
        [learned.pattern, oblivious.pattern + learned.m], axis=1
    )
    values = np.concatenate([learned.values, oblivious.values], axis=1)
    return SparseSketch(
        learned.m + oblivious.m, learned.n, learned.s + oblivious.s,
        pattern, values,
    )


def few_shot_loss(sketch, a: np.ndarray, k: int) -> float:
    """Surrogate training loss ``||U_k^T S^T S U - I0||_F^2``.

    ``U`` is the full n-by-n left factor of the SVD of ``a`` (orthonormal
    completion included) and ``I0`` is the order-``k`` identity padded on
    the right with zero columns.  Zero when the sketch rows coincide with
    the top-``k`` left singular vectors; equal to ``k`` for a zero sketch.
    """
    n = a.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    u, _, _ = np.linalg.svd(a, full_matrices=True)
    s_mat = _dense(sketch)
    i0 = np.zeros((k, n))
    i0[:, :k] = np.eye(k)
    m = u[:, :k].T @ s_mat.T @ s_mat @ u
    return fro_sq(m - i0)
