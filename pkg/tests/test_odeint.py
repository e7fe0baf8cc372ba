import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.errors import ArgumentError
from hopfkit.functions import ExprFunction
from hopfkit.odeint import (
    TrajectoryFunction,
    integrate_linear_ivp,
    integrate_nonlinear_ivp,
    integrate_two_sided,
    solve_second_order_bvp,
)
from hopfkit.operator import LinearOperator

import oracles


def _sine_error(h):
    op = LinearOperator(["1", "0"], (0.0, math.pi / 2))
    traj = integrate_linear_ivp(op, None, [0.0, 1.0], h)
    return abs(traj.u[-1] - 1.0), float(np.max(np.abs(traj.u - np.sin(traj.grid))))


def test_sine():
    assert _sine_error(1e-3)[0] <= 1e-6


def test_fourth_order_convergence():
    h = math.pi / 2 / 64
    ratio = _sine_error(h)[1] / _sine_error(h / 2)[1]
    assert ratio == pytest.approx(oracles.FROZEN["rk4_ratio"], rel=0.1)


def test_exponential_first_order_companion():
    traj = integrate_nonlinear_ivp(lambda x, y: y[0], [1.0], (0.0, 1.0), 1e-3)
    assert traj.u[-1] == pytest.approx(math.e, abs=1e-6)


def test_closed_form_f():
    traj = integrate_nonlinear_ivp(lambda x, y: 3 * y[0] * y[1] - y[0] ** 3, [1.0, 0.0], (0.0, 0.5), 2 ** -12)
    assert traj.u[-1] == pytest.approx(oracles.FROZEN["f_half"], abs=1e-6)


def test_blowup_flagged_before_singularity():
    traj = integrate_nonlinear_ivp(lambda x, y: y[0] ** 2, [1.0], (0.0, 2.0), 1e-3)
    assert traj.blowup
    assert traj.grid[-1] <= 1.0
    assert traj.blowup_at is not None and traj.blowup_at <= 1.0 + 1.5e-3


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_zero_rhs_keeps_top_constant(n):
    traj = integrate_nonlinear_ivp(lambda x, y: 0.0, [0.0] * (n - 1) + [1.0], (0.0, 1.0), 1 / 64)
    assert np.all(traj.states[:, n - 1] == 1.0)


def test_backward_run_is_reported_in_increasing_x():
    op = LinearOperator(["0", "0"], (0.0, 1.0))
    traj = integrate_linear_ivp(op, 2.0, [0.0, 0.0], 1 / 128, span=(1.0, 0.0))
    assert np.all(np.diff(traj.grid) > 0)
    assert traj.grid[-1] == 1.0 and traj.u[-1] == 0.0
    xs = traj.grid
    assert np.allclose(traj.u, -(xs - 1.0) ** 2, atol=1e-12)


def test_two_sided_agrees_with_exact_solution():
    traj = integrate_two_sided(lambda x, y: -y[0], [0.0, 1.0], 0.25, -0.5, 1.0, 1 / 256)
    assert np.allclose(traj.u, np.sin(traj.grid - 0.25), atol=1e-9)


def test_bvp_linear():
    op = LinearOperator(["0", "0"], (0.0, 1.0))
    traj = solve_second_order_bvp(op, None, 0.0, 1.0, 0.0, 1.0, 1e-3)
    assert np.max(np.abs(traj.u - traj.grid)) <= 1e-9


def test_bvp_parabola():
    op = LinearOperator(["0", "0"], (0.0, 1.0))
    traj = solve_second_order_bvp(op, 2.0, 0.0, 1.0, 0.0, 0.0, 1e-3)   # g'' = -2
    g = TrajectoryFunction(traj)
    assert float(g.values(0.5)) == pytest.approx(0.25, abs=1e-8)


def test_bvp_rejects_third_order():
    with pytest.raises(ArgumentError):
        solve_second_order_bvp(LinearOperator.derivative(3), None, 0.0, 1.0, 0.0, 0.0, 1e-2)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_short_bvp_is_nonnegative(seed):
    rng = np.random.default_rng(seed)
    a1, a0 = rng.uniform(-1, 1, 2)
    op = LinearOperator([ExprFunction(repr(float(a0))), ExprFunction(f"{float(a1)!r}*cos(x)")], (0.0, 0.1))
    q = float(rng.uniform(0, 1))
    traj = solve_second_order_bvp(op, q, 0.0, 0.1, 0.0, 0.0, 0.1 / 256)
    assert np.min(traj.u) >= -1e-9


def test_trajectory_function_exact_at_nodes_and_linear_between():
    traj = integrate_nonlinear_ivp(lambda x, y: -y[0], [0.0, 1.0], (0.0, 1.0), 1 / 8)
    g = TrajectoryFunction(traj)
    assert np.array_equal(g.values(traj.grid), traj.u)
    mid = 0.5 * (traj.grid[2] + traj.grid[3])
    assert float(g.values(mid)) == pytest.approx(0.5 * (traj.u[2] + traj.u[3]), rel=1e-14)
    j = g.jet(traj.grid[4], 2)
    assert float(j.derivs[2]) == pytest.approx(traj.top[4])


def test_csv_round_trip(tmp_path):
    traj = integrate_nonlinear_ivp(lambda x, y: -y[0], [0.0, 1.0], (0.0, 1.0), 1 / 16)
    path = tmp_path / "t.csv"
    traj.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "x,u,u^(1),u^(2)"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 0], traj.grid)
    assert np.array_equal(data[:, 1:], traj.table)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-2, 2), d=st.floats(-2, 2))
def test_linear_ivp_reproduces_quadratics(c, d):
    # u'' = 0 is integrated exactly by RK4
    op = LinearOperator(["0", "0"], (0.0, 1.0))
    traj = integrate_linear_ivp(op, None, [c, d], 1 / 32)
    assert np.allclose(traj.u, c + d * traj.grid, atol=1e-12)
