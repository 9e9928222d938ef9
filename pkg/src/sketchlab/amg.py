"""Two-level algebraic multigrid stepping and its learned-prolongation loss.

One cycle is ``s1`` forward Gauss-Seidel sweeps, a coarse correction
through the prolongation matrix, then ``s2`` more sweeps.  The error
propagates linearly, so the same step has a closed matrix form around the
exact solution; checking the two against each other is the module's
central identity.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .charpoly import charpoly_inverse, is_numerically_singular
from .train import TrainConfig, finite_difference_sgd

_DIVERGENCE_NORM = 1e12


class DivergenceError(ArithmeticError):
    """Raised when iterates blow past the divergence guard."""


@dataclass
class AMGProblem:
    """Square system with a prolongation and smoothing counts.

    ``a`` is n-by-n with a numerically invertible lower-triangular part,
    ``p`` is the n-by-m prolongation (its nonzero positions are the frozen
    training pattern), and ``x0`` the initial guess.
    """

    a: np.ndarray
    b: np.ndarray
    p: np.ndarray
    s1: int
    s2: int
    x0: np.ndarray = field(default=None)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        self.p = np.asarray(self.p, dtype=np.float64)
        n = self.a.shape[0]
        if self.a.shape != (n, n):
            raise ValueError(f"A must be square, got {self.a.shape}")
        if self.b.size != n:
            raise ValueError(f"b has length {self.b.size}, expected {n}")
        if self.p.shape[0] != n or self.p.shape[1] < 1:
            raise ValueError(f"P must be n-by-m, got {self.p.shape}")
        # zero sweeps are allowed so the bare coarse correction is testable
        if self.s1 < 0 or self.s2 < 0:
            raise ValueError("smoothing counts must be >= 0")
        if self.x0 is None:
            self.x0 = np.zeros(n)
        self.x0 = np.asarray(self.x0, dtype=np.float64).reshape(-1)
        if self.x0.size != n:
            raise ValueError(f"x0 has length {self.x0.size}, expected {n}")
        if np.abs(np.diag(self.a)).min() < 1e-12:
            raise ValueError("diagonal of A is numerically singular")
        if is_numerically_singular(self.p.T @ self.a @ self.p):
            raise ValueError("coarse matrix P^T A P is numerically singular")

    def lower(self) -> np.ndarray:
        """Lower-triangular part of A, diagonal included."""
        return np.tril(self.a)

    def solution(self) -> np.ndarray:
        """Exact solution of ``A x = b`` (elimination oracle)."""
        return np.linalg.solve(self.a, self.b)

    def with_prolongation_values(self, values: np.ndarray) -> "AMGProblem":
        """Same problem with new values on the frozen P pattern."""
        mask = self.p != 0.0
        p = np.zeros_like(self.p)
        p[mask] = np.asarray(values, dtype=np.float64).ravel()
        return AMGProblem(self.a, self.b, p, self.s1, self.s2, self.x0)


def smoothing_sweep(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One forward Gauss-Seidel sweep: ``x + L^{-1}(b - A x)`` with L the
    lower-triangular part of A.  The error contracts by ``I - L^{-1} A``."""
    lower = np.tril(a)
    if np.abs(np.diag(lower)).min() < 1e-12:
        raise ValueError("zero diagonal entry; sweep undefined")
    return x + solve_triangular(lower, b - a @ x, lower=True)


def amg_step(prob: AMGProblem, x: np.ndarray) -> np.ndarray:
    """One explicit cycle: s1 sweeps, coarse correction, s2 sweeps.

    Raises
    ------
    SingularMatrixError
        If the coarse matrix cannot be inverted.
    """
    for _ in range(prob.s1):
        x = smoothing_sweep(prob.a, prob.b, x)
    coarse = prob.p.T @ prob.a @ prob.p
    residual = prob.b - prob.a @ x
    x = x + prob.p @ (charpoly_inverse(coarse) @ (prob.p.T @ residual))
    for _ in range(prob.s2):
        x = smoothing_sweep(prob.a, prob.b, x)
    return x


def amg_step_error_form(prob: AMGProblem, x: np.ndarray,
                        x_star: np.ndarray) -> np.ndarray:
    """Closed form of one cycle around the exact solution:

        x' = x* + (I - L^{-1}A)^{s2} (I - P (P^T A P)^{-1} P^T A)
                  (I - L^{-1}A)^{s1} (x - x*).
    """
    n = prob.a.shape[0]
    eye = np.eye(n)
    smoother = eye - solve_triangular(prob.lower(), prob.a, lower=True)
    coarse = prob.p.T @ prob.a @ prob.p
    corrector = eye - prob.p @ charpoly_inverse(coarse) @ prob.p.T @ prob.a
    propagate = (
        np.linalg.matrix_power(smoother, prob.s2)
        @ corrector
        @ np.linalg.matrix_power(smoother, prob.s1)
    )
    return x_star + propagate @ (x - x_star)


def amg_loss(prob: AMGProblem, q: int) -> float:
    """Squared residual norm ``||A x_q - b||^2`` after ``q`` explicit
    cycles from the initial guess.

    Raises
    ------
    DivergenceError
        If an iterate's norm passes 1e12.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    x = prob.x0
    for i in range(q):
        x = amg_step(prob, x)
        norm = float(np.linalg.norm(x))
        if not np.isfinite(norm) or norm > _DIVERGENCE_NORM:
            raise DivergenceError(f"iterate norm {norm:.3e} after cycle {i + 1}")
    r = prob.a @ x - prob.b
    return float(r @ r)


def train_prolongation(problems, cfg: TrainConfig, q: int = 1,
                       history: list | None = None):
    """Fit shared prolongation values over a family of problems by
    finite-difference SGD on the mean cycle loss.

    All problems must share one P pattern.  Returns the trained flat value
    vector; apply it with :meth:`AMGProblem.with_prolongation_values`.
    """
    mask = problems[0].p != 0.0
    for prob in problems[1:]:
        if not np.array_equal(prob.p != 0.0, mask):
            raise ValueError("problems must share one prolongation pattern")
    init = problems[0].p[mask]

    def loss(vals, _b, _e):
        return float(np.mean([
            amg_loss(prob.with_prolongation_values(vals), q)
            for prob in problems
        ]))

    return finite_difference_sgd(init, loss, cfg, history=history)
