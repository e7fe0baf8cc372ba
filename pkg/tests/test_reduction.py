import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.errors import ArgumentError
from hopfkit.functions import ConstantFunction, ExprFunction, PolynomialFunction
from hopfkit.operator import LinearOperator
from hopfkit.reduction import (
    b_from_f,
    matching_residual,
    push_v,
    reduce_chain,
    solve_f_ode,
    verify_reduction_identity,
)

import oracles

PROBES = [ExprFunction(s) for s in ("1", "x", "x^2", "sin(x)", "exp(x)")]


def closed_f(x):
    return (1 - x) / (1 - x + x ** 2 / 2)


def test_b_examples():
    assert b_from_f([0.0, 0.0], [1.0, 0.0], 2) == pytest.approx(oracles.FROZEN["b_zero_coeffs"])
    assert b_from_f([0.0, 3.0], [1.0, 0.0], 2) == pytest.approx(oracles.FROZEN["b_a2_three"])
    assert b_from_f([0.0] * 4, [0.0] * 4, 4) == [0.0] * 4


@settings(max_examples=80, deadline=None)
@given(k=st.integers(1, 6), data=st.data())
def test_b_round_trip(k, data):
    # any (a_1..a_k, f-jet) yields b that rebuilds a_1..a_k; a_0 is rebuilt via the f-equation
    vals = st.floats(-3, 3, allow_nan=False)
    a = data.draw(st.lists(vals, min_size=k, max_size=k))
    f = data.draw(st.lists(vals, min_size=k, max_size=k))
    a0 = data.draw(vals)
    b = b_from_f(a, f, k)
    top = a0 - sum(bm * fm for bm, fm in zip(b, f))
    res = matching_residual([a0] + a, b, f + [top], k)
    assert np.max(res) <= 1e-9  # intermediates reach ~3^k, so allow cancellation error


def test_closed_form_f_and_b():
    step = solve_f_ode(LinearOperator.derivative(3), h=2 ** -12)
    lo, hi = step.span
    assert lo == 0.0 and hi >= 0.9
    xs = step.grid[step.grid <= 0.9]
    f = step.f.values(xs)
    assert np.max(np.abs(f - closed_f(xs))) <= 1e-7
    assert float(step.f.values(0.5)) == pytest.approx(oracles.FROZEN["f_half"], abs=1e-9)
    assert float(step.f.values(1.0)) == pytest.approx(oracles.FROZEN["f_one"], abs=1e-6)
    b0, b1 = step.b_grid[:, 0]
    assert [b0, b1] == pytest.approx(oracles.FROZEN["b_closed_form_at_0"], abs=1e-12)


def test_push_v_examples():
    v = push_v(ExprFunction("x^2"), ConstantFunction(1.0))
    xs = np.linspace(-1, 1, 5)
    assert np.allclose(v.values(xs), xs ** 2 + 2 * xs)
    assert float(v.jet(0.0, 1).derivs[1]) == 2.0
    u = ExprFunction("sin(3*x)")
    w = push_v(u, ConstantFunction(0.0))
    assert np.allclose(w.values(xs), 3 * np.cos(3 * xs))
    step = solve_f_ode(LinearOperator.derivative(3), h=2 ** -10)
    assert float(push_v(ExprFunction("x^2"), step.f).values(0.0)) == 0.0


def test_identity_on_kernel_element():
    step = solve_f_ode(LinearOperator.derivative(3), h=2 ** -10)
    grid = step.grid[step.grid <= 0.9]
    v = push_v(ExprFunction("x^2"), step.f)
    assert np.max(np.abs(step.reduced.apply(v, grid))) <= 1e-7


def test_identity_on_zero_is_exact():
    step = solve_f_ode(LinearOperator(["x", "cos(x)", "1"], (0.0, 1.0)), h=2 ** -9)
    chk = verify_reduction_identity(step, [ConstantFunction(0.0)])
    assert chk.max_residual == 0.0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(3, 5))
def test_identity_random_polynomial_coefficients(seed, n):
    rng = np.random.default_rng(seed)
    coeffs = [PolynomialFunction(rng.uniform(-1, 1, 3) * 2 / 3) for _ in range(n)]
    step = solve_f_ode(LinearOperator(coeffs, (0.0, 1.0)), h=1 / 512)
    assert verify_reduction_identity(step, PROBES).passed


def test_f_is_stable_at_two_step_sizes():
    rng = np.random.default_rng(7)
    coeffs = [PolynomialFunction([0.0])] + [PolynomialFunction(rng.uniform(-1, 1, 1)) for _ in range(3)]
    op = LinearOperator(coeffs, (0.0, 0.5))
    f1 = solve_f_ode(op, h=1 / 256)
    f2 = solve_f_ode(op, h=1 / 512)
    assert not f1.f_traj.blowup and not f2.f_traj.blowup
    assert np.all(np.isfinite(f1.f_traj.u))
    assert f1.f_traj.u[-1] == pytest.approx(f2.f_traj.u[-1], rel=1e-8)


def test_chain_slopes():
    c3 = reduce_chain(LinearOperator.derivative(3), ExprFunction("x^2 - x^4"), h=1 / 1024)
    assert len(c3.steps) == 1
    assert float(c3.final_v.jet(0.0, 1).derivs[1]) == pytest.approx(2.0, abs=1e-12)
    c4 = reduce_chain(LinearOperator.derivative(4), ExprFunction("x^3 - x^5"), h=1 / 1024)
    assert len(c4.steps) == 2 and c4.final_operator.order == 2
    assert float(c4.final_v.jet(0.0, 1).derivs[1]) == pytest.approx(6.0, abs=1e-10)


def test_chain_with_full_zero_jet_has_no_transfer_witness():
    chain = reduce_chain(LinearOperator.derivative(3), ExprFunction("-x^4"), h=1 / 1024)
    assert all(st.sequence.status != "PASS" for st in chain.stages)


def test_chain_needs_order_three():
    with pytest.raises(ArgumentError):
        reduce_chain(LinearOperator.derivative(2), ExprFunction("x"))
