"""Solvers over seminorm balls, checked against the brute-force grid oracle."""

import numpy as np
import pytest

import qmetric as qm
from qmetric.convex import (
    BallSolver,
    LinearObjective,
    NormImageObjective,
    SpreadObjective,
)
from qmetric.core import child_rng
from qmetric.errors import (
    InvalidInputError,
    UnboundedProblemError,
    UnsupportedDimensionError,
)

from conftest import TWO_POINT_D, amplified_dirac, first_point_state


def traceless_random(seed, n):
    a = qm.random_hermitian(seed, n).mat
    return a - np.trace(a).real / n * np.eye(n)


# -- max_linear ---------------------------------------------------------------


def test_max_linear_zero_objective(two_point, cfg):
    _, lip = two_point
    res = qm.max_linear_over_ball(np.zeros((2, 2)), qm.BallSpec(lip), cfg)
    assert res.value == 0.0
    assert np.allclose(res.matrix, 0.0)
    assert res.certificate == 0.0


def test_max_linear_two_point_state_difference(two_point, cfg):
    _, lip = two_point
    c = qm.pure_state([1, 0]).rho - qm.pure_state([0, 1]).rho
    res = qm.max_linear_over_ball(c, qm.BallSpec(lip), cfg)
    assert res.value == pytest.approx(1.0, rel=1e-6)
    assert res.certificate >= res.value - 1e-12
    orc = qm.brute_force_oracle("max-linear", qm.BallSpec(lip), c, 201, cfg)
    assert abs(res.value - orc.value) <= max(orc.error_bound, 1e-6)


def test_max_linear_radius_homogeneity_exact(two_point, cfg):
    _, lip = two_point
    c = np.diag([1.0, -1.0])
    v1 = qm.max_linear_over_ball(c, qm.BallSpec(lip, 1.0), cfg).value
    v2 = qm.max_linear_over_ball(c, qm.BallSpec(lip, 2.0), cfg).value
    assert v2 == 2.0 * v1


def test_max_linear_symmetry(two_point, cfg):
    _, lip = two_point
    c = traceless_random(3, 2)
    v_plus = qm.max_linear_over_ball(c, qm.BallSpec(lip), cfg).value
    v_minus = qm.max_linear_over_ball(-c, qm.BallSpec(lip), cfg).value
    assert v_plus == pytest.approx(v_minus, rel=1e-9)


def test_max_linear_unbounded_direction(two_point, cfg):
    _, lip = two_point
    with pytest.raises(UnboundedProblemError):
        qm.max_linear_over_ball(np.eye(2), qm.BallSpec(lip), cfg)


def test_degenerate_ball_rejected(cfg):
    alg = qm.AlgebraSpec((2,))
    lip = qm.LipNorm(qm.DiracCommutator(qm.random_hermitian(0, 2).mat), alg)
    with pytest.raises(UnboundedProblemError):
        qm.max_linear_over_ball(traceless_random(1, 2), qm.BallSpec(lip), cfg)


def test_max_linear_certificate_sandwich(cfg):
    lip = amplified_dirac(130, 2)
    ball = qm.BallSpec(lip)
    for seed in range(5):
        c = traceless_random(seed + 10, 2)
        res = qm.max_linear_over_ball(c, ball, cfg)
        assert res.converged
        assert res.value <= res.certificate + 1e-12
        assert res.certificate - res.value <= 2 * cfg.tol * max(1.0, abs(res.value))
        # the argmax is feasible up to tolerance
        assert lip.eval(res.matrix) <= 1.0 + 10 * cfg.tol


# -- min_distance ---------------------------------------------------------------


def test_min_distance_point_inside(two_point, cfg):
    _, lip = two_point
    a = np.diag([0.2, -0.2])  # L(a) = 0.4 < 1
    res = qm.min_distance_to_ball(a, qm.BallSpec(lip), cfg)
    assert res.value == pytest.approx(0.0, abs=1e-9)
    assert np.abs(res.matrix - a).max() < 1e-6


def test_min_distance_central_shift_invariance(two_point, cfg):
    _, lip = two_point
    a = np.diag([3.0, -1.0])
    base = qm.min_distance_to_ball(a, qm.BallSpec(lip), cfg).value
    for t in (-2.0, 1.5):
        shifted = qm.min_distance_to_ball(a + t * np.eye(2), qm.BallSpec(lip), cfg).value
        assert shifted == pytest.approx(base, abs=1e-8)


def test_min_distance_sliced_two_point_vs_oracle(two_point, cfg):
    _, lip = two_point
    ball = qm.BallSpec(lip, 1.0, first_point_state())
    a = np.diag([2.0, 0.0])
    res = qm.min_distance_to_ball(a, ball, cfg)
    orc = qm.brute_force_oracle("min-distance", ball, a, 201, cfg)
    assert abs(res.value - orc.value) <= max(orc.error_bound, 1e-5)
    assert lip.eval(res.matrix) <= 1.0 + 10 * cfg.tol


def test_min_distance_monotone_in_radius(two_point, cfg):
    _, lip = two_point
    a = np.diag([4.0, 0.0])
    d1 = qm.min_distance_to_ball(a, qm.BallSpec(lip, 1.0), cfg).value
    d2 = qm.min_distance_to_ball(a, qm.BallSpec(lip, 2.0), cfg).value
    assert d2 <= d1 + 1e-9


# -- max_convex ---------------------------------------------------------------


def test_max_convex_opnorm_on_first_point_slice(two_point, cfg):
    _, lip = two_point
    ball = qm.BallSpec(lip, 1.0, first_point_state())
    solver = BallSolver(ball, cfg)
    obj = NormImageObjective(solver.ws.stack)
    res = qm.max_convex_over_ball(obj, ball, cfg)
    # the sliced ball is the segment {diag(0, y) : |y| <= 1}
    assert res.value == pytest.approx(1.0, rel=1e-6)


def test_max_convex_constant_zero(two_point, cfg):
    _, lip = two_point
    ball = qm.BallSpec(lip, 1.0, first_point_state())
    res = qm.max_convex_over_ball(lambda a: 0.0, ball, cfg)
    assert res.value == 0.0


def test_max_convex_recovers_linear(cfg):
    lip = amplified_dirac(140, 2)
    ball = qm.BallSpec(lip, 1.0, qm.maximally_mixed(2))
    solver = BallSolver(ball, cfg)
    for seed in range(4):
        c = traceless_random(seed + 60, 2)
        gamma = solver.ws.coords(c)
        lin = solver.max_linear(gamma)
        res = qm.max_convex_over_ball(LinearObjective(gamma), ball, cfg)
        assert abs(res.value - lin.value) <= 2 * cfg.tol * max(1.0, abs(lin.value))


def test_max_convex_boundary_termination(cfg):
    lip = amplified_dirac(141, 2)
    ball = qm.BallSpec(lip, 1.0, qm.maximally_mixed(2))
    solver = BallSolver(ball, cfg)
    res = solver.max_convex(SpreadObjective(solver.ws.stack))
    assert lip.eval(res.matrix) == pytest.approx(1.0, rel=1e-9)


def test_max_convex_deterministic(cfg):
    lip = amplified_dirac(142, 2)
    ball = qm.BallSpec(lip, 1.0, qm.maximally_mixed(2))
    u = qm.random_unitary(9, 2)
    vals = []
    for _ in range(2):
        solver = BallSolver(ball, cfg)
        obj = NormImageObjective(np.stack([u.apply(e) - e for e in solver.ws.stack]))
        vals.append(solver.max_convex(obj, seed_tags=("det-check",)).value)
    assert vals[0] == vals[1]


# -- oracle ---------------------------------------------------------------------


def test_oracle_two_point_error_bound(two_point, cfg):
    _, lip = two_point
    c = qm.pure_state([1, 0]).rho - qm.pure_state([0, 1]).rho
    for res in (51, 201):
        orc = qm.brute_force_oracle("max-linear", qm.BallSpec(lip), c, res, cfg)
        assert abs(orc.value - 1.0) <= orc.error_bound
        assert orc.error_bound <= 4.0 / res


def test_oracle_zero_objective(two_point, cfg):
    _, lip = two_point
    orc = qm.brute_force_oracle("max-linear", qm.BallSpec(lip), np.zeros((2, 2)), 51, cfg)
    assert orc.value == 0.0


def test_oracle_scaled_ball_homogeneity(two_point, cfg):
    _, lip = two_point
    scaled = qm.LipNorm(qm.Scaled(2.0, lip.spec), lip.algebra)
    c = np.diag([1.0, -1.0])
    o1 = qm.brute_force_oracle("max-linear", qm.BallSpec(lip), c, 201, cfg)
    o2 = qm.brute_force_oracle("max-linear", qm.BallSpec(scaled), c, 201, cfg)
    assert o2.value == pytest.approx(o1.value / 2.0, abs=o1.error_bound + o2.error_bound)


def test_oracle_validation_errors(two_point, cfg):
    _, lip = two_point
    with pytest.raises(InvalidInputError):
        qm.brute_force_oracle("max-linear", qm.BallSpec(lip), np.diag([1.0, -1.0]), 21, cfg)
    big = amplified_dirac(150, 3)  # traceless dimension 8 > 3
    with pytest.raises(UnsupportedDimensionError):
        qm.brute_force_oracle(
            "max-linear", qm.BallSpec(big), traceless_random(0, 3), 51, cfg
        )
    with pytest.raises(InvalidInputError):
        qm.brute_force_oracle("nonsense", qm.BallSpec(lip), np.eye(2), 51, cfg)


def test_solver_vs_oracle_small_batch(cfg):
    # a fuller 50-instance sweep runs in the acceptance suite
    worst = 0.0
    for i in range(5):
        lip = amplified_dirac(160 + i, 2)
        ball = qm.BallSpec(lip)
        c = traceless_random(170 + i, 2)
        res = qm.max_linear_over_ball(c, ball, cfg)
        orc = qm.brute_force_oracle("max-linear", ball, c, 61, cfg)
        denom = max(abs(orc.value), 1e-9)
        if abs(res.value - orc.value) > orc.error_bound:
            worst = max(worst, abs(res.value - orc.value) / denom)
    assert worst <= 0.02


def test_monotone_radius_never_decreases_max(two_point, cfg):
    _, lip = two_point
    c = np.diag([1.0, -1.0])
    v1 = qm.max_linear_over_ball(c, qm.BallSpec(lip, 1.0), cfg).value
    v2 = qm.max_linear_over_ball(c, qm.BallSpec(lip, 1.5), cfg).value
    assert v2 >= v1 - 1e-12
