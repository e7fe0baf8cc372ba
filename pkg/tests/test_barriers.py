import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.barriers import certify_sign, make_barrier, positive_root
from hopfkit.errors import ArgumentError, BarrierError
from hopfkit.operator import LinearOperator
from hopfkit.suites import bounded_coefficient

import oracles

F = oracles.FROZEN


def test_parameters_for_unit_bound():
    h = make_barrier("small_interval_h", 1.0, 0.0)
    assert h.params["gamma"] == pytest.approx(F["gamma"], rel=1e-15)
    assert h.params["delta"] == pytest.approx(F["delta"], rel=1e-15)
    e = make_barrier("exp_subsolution", 1.0, (0.0, 1.0))
    assert e.params["lambda"] == pytest.approx(F["lambda"], rel=1e-15)
    m = make_barrier("third_order_m", 1.0, (0.0, 1.0))
    assert m.params["theta"] == pytest.approx(F["theta"], rel=1e-15)
    assert m.params["eta"] == pytest.approx(F["eta"], rel=1e-15)
    assert m.params["eta_rule"] == "ln4"


def test_positive_root():
    assert positive_root(1.0, 2.0) == 2.0


def test_shapes():
    for kind, geom in [("small_interval_h", 0.0), ("exp_subsolution", (0.0, 1.0)),
                       ("third_order_m", (0.0, 1.0)), ("sine_hi", (0.0, 0.01))]:
        checks = make_barrier(kind, 1.0, geom).shape_checks()
        assert all(checks.values()), (kind, checks)


def test_sine_hi_rejects_long_intervals():
    with pytest.raises(BarrierError):
        make_barrier("sine_hi", 1.0, (0.0, 1.0))


def test_bad_arguments():
    with pytest.raises(ArgumentError):
        make_barrier("nope", 1.0, 0.0)
    with pytest.raises(ArgumentError):
        make_barrier("exp_subsolution", 0.0, (0.0, 1.0))
    with pytest.raises(ArgumentError):
        certify_sign(make_barrier("third_order_m", 1.0, (0.0, 1.0)), LinearOperator.derivative(2))


def test_eta_falls_back_on_short_intervals():
    m = make_barrier("third_order_m", 1.0, (0.0, 0.05))
    assert m.params["eta_rule"].startswith("eq_bound")
    assert m.slack["eta_condition"] > 0
    assert m.params["eta"] <= 0.05


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), C=st.sampled_from([0.5, 1.0, 5.0]))
def test_certificates_for_bounded_coefficients(seed, C):
    rng = np.random.default_rng(seed)
    op2 = LinearOperator([bounded_coefficient(rng, C) for _ in range(2)], (0.0, 1.0), bound=C)
    op3 = LinearOperator([bounded_coefficient(rng, C) for _ in range(3)], (0.0, 1.0), bound=C)
    a = float(rng.uniform(0, 0.5))
    assert certify_sign(make_barrier("small_interval_h", C, 0.0), op2).passed
    assert certify_sign(make_barrier("exp_subsolution", C, (0.0, 1.0)), op2).passed
    assert certify_sign(make_barrier("third_order_m", C, (a, 1.0)), op3).passed
    assert certify_sign(make_barrier("sine_hi", C, (a, a + 0.01)), op2).passed


@settings(max_examples=60, deadline=None)
@given(C=st.floats(0.01, 50.0))
def test_parameters_are_strict(C):
    g = make_barrier("small_interval_h", C, 0.0).params["gamma"]
    assert g * g - C * g - 2 * C > 0
    assert math.exp(g * make_barrier("small_interval_h", C, 0.0).params["delta"]) < 3
    lam = make_barrier("exp_subsolution", C, (0.0, 1.0)).params["lambda"]
    assert lam * lam - C * lam - C > 0


def test_small_interval_h_is_half_open():
    h = make_barrier("small_interval_h", 1.0, 0.0)
    grid = h.default_grid(16)
    assert grid[0] == 0.0 and grid[-1] < h.region[1]
