import numpy as np
import pytest

from sketchlab.amg import (
    AMGProblem,
    DivergenceError,
    amg_loss,
    amg_step,
    amg_step_error_form,
    smoothing_sweep,
    train_prolongation,
)
from sketchlab.synth import random_amg_problem
from sketchlab.train import TrainConfig


def test_sweep_solves_lower_triangular_exactly():
    rng = np.random.default_rng(0)
    a = np.tril(rng.standard_normal((5, 5))) + 3.0 * np.eye(5)
    x_star = rng.standard_normal(5)
    b = a @ x_star
    out = smoothing_sweep(a, b, np.zeros(5))
    np.testing.assert_allclose(out, x_star, atol=1e-12)


def test_sweep_fixed_point_and_error_form():
    rng = np.random.default_rng(1)
    a = np.diag(rng.uniform(1, 2, 6)) + 0.1 * rng.standard_normal((6, 6))
    x_star = rng.standard_normal(6)
    b = a @ x_star
    np.testing.assert_allclose(smoothing_sweep(a, b, x_star), x_star, atol=1e-12)
    x = rng.standard_normal(6)
    prop = np.eye(6) - np.linalg.solve(np.tril(a), a)
    expected = x_star + prop @ (x - x_star)
    np.testing.assert_allclose(smoothing_sweep(a, b, x), expected, atol=1e-10)


def test_sweep_rejects_zero_diagonal():
    a = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        smoothing_sweep(a, np.ones(2), np.zeros(2))


def test_step_fixed_point():
    rng = np.random.default_rng(2)
    prob = random_amg_problem(rng, 8, 3, 2, 1)
    x_star = prob.solution()
    np.testing.assert_allclose(amg_step(prob, x_star), x_star, atol=1e-10)


def test_full_coarse_space_solves_exactly():
    rng = np.random.default_rng(3)
    n = 6
    a = np.diag(rng.uniform(1, 2, n)) + 0.1 * rng.standard_normal((n, n))
    b = rng.standard_normal(n)
    p = rng.standard_normal((n, n)) + 3.0 * np.eye(n)
    prob = AMGProblem(a, b, p, 0, 0, rng.standard_normal(n))
    out = amg_step(prob, prob.x0)
    np.testing.assert_allclose(out, prob.solution(), atol=1e-8)


def test_coarse_correction_is_projector_on_error():
    rng = np.random.default_rng(4)
    n = 8
    a = np.diag(rng.uniform(1, 2, n)) + 0.1 * rng.standard_normal((n, n))
    prob = AMGProblem(a, rng.standard_normal(n),
                      random_amg_problem(rng, n, 3, 1, 1).p, 0, 0)
    x = rng.standard_normal(n)
    once = amg_step(prob, x)
    twice = amg_step(prob, once)
    np.testing.assert_allclose(once, twice, atol=1e-9)


def test_formula_matches_explicit_step():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(4, 21))
        m = int(rng.integers(2, min(8, n) + 1))
        prob = random_amg_problem(rng, n, m, int(rng.integers(1, 4)),
                                  int(rng.integers(1, 4)))
        x = rng.standard_normal(n)
        x_star = prob.solution()
        dev = np.linalg.norm(amg_step(prob, x)
                             - amg_step_error_form(prob, x, x_star))
        assert dev <= 1e-8 * (1.0 + np.linalg.norm(x))


def test_loss_at_zero_cycles_and_at_solution():
    rng = np.random.default_rng(6)
    prob = random_amg_problem(rng, 8, 3, 1, 1)
    r0 = prob.a @ prob.x0 - prob.b
    assert amg_loss(prob, 0) == pytest.approx(float(r0 @ r0))
    solved = AMGProblem(prob.a, prob.b, prob.p, prob.s1, prob.s2,
                        prob.solution())
    for q in (0, 1, 3):
        assert amg_loss(solved, q) <= 1e-20


def test_loss_decreases_on_dominated_systems():
    rng = np.random.default_rng(7)
    prob = random_amg_problem(rng, 8, 4, 2, 2)
    losses = [amg_loss(prob, q) for q in range(5)]
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_loss_equals_propagated_error_form():
    rng = np.random.default_rng(8)
    prob = random_amg_problem(rng, 10, 4, 1, 2)
    x_star = prob.solution()
    x = prob.x0
    for _ in range(3):
        x = amg_step_error_form(prob, x, x_star)
    r = prob.a @ x - prob.b
    assert amg_loss(prob, 3) == pytest.approx(float(r @ r), abs=1e-9)


def test_divergence_is_reported():
    a = np.array([[1.0, 3.0], [3.0, 1.0]])
    p = np.array([[1.0], [0.0]])
    prob = AMGProblem(a, np.ones(2), p, 1, 1, np.array([5.0, -3.0]))
    with pytest.raises(DivergenceError):
        amg_loss(prob, 60)


def test_problem_validation():
    rng = np.random.default_rng(9)
    a = np.diag(rng.uniform(1, 2, 4))
    with pytest.raises(ValueError):
        AMGProblem(a, np.ones(4), np.zeros((4, 2)), 1, 1)  # singular coarse
    bad = a.copy()
    bad[2, 2] = 0.0
    with pytest.raises(ValueError):
        AMGProblem(bad, np.ones(4), np.ones((4, 1)), 1, 1)


def test_train_prolongation_reduces_loss():
    rng = np.random.default_rng(10)
    problems = []
    base = random_amg_problem(rng, 8, 3, 1, 1)
    for _ in range(3):
        b = rng.standard_normal(8)
        problems.append(AMGProblem(base.a, b, base.p, 1, 1,
                                   rng.standard_normal(8)))
    before = np.mean([amg_loss(pr, 1) for pr in problems])
    vals = train_prolongation(problems, TrainConfig(8, 0.05, 1, seed=0), q=1)
    after = np.mean([
        amg_loss(pr.with_prolongation_values(vals), 1) for pr in problems
    ])
    assert after < before
