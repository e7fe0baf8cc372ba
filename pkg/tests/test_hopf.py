import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.errors import ArgumentError, CapabilityError
from hopfkit.functions import ExprFunction
from hopfkit.gallery import SharpExampleFunction
from hopfkit.hopf import (
    AutonomousRHS,
    HopfProblem,
    boundary_dichotomy,
    check_equivalent_form,
    check_hopf_left,
    check_hopf_right,
    check_third_order_bounded,
    reflect_problem,
    small_interval_max_principle,
    unique_continuation_probe,
    uniqueness_probe,
)
from hopfkit.odeint import TrajectoryFunction, integrate_linear_ivp
from hopfkit.operator import LinearOperator
from hopfkit.report import FAILS, HOLDS, HYPOTHESES_UNMET, NOT_APPLICABLE, UNDETERMINED

d2 = LinearOperator.derivative(2)
d3 = LinearOperator.derivative(3)


def hp(op, src, endpoint="left", **kw):
    u = ExprFunction(src) if isinstance(src, str) else src
    return HopfProblem(op, u, endpoint=endpoint, **kw)


def test_left_second_order():
    rep = check_hopf_left(hp(d2, "x - x^2"))
    assert rep.status == HOLDS
    assert rep.measured["top_derivative"] == 1.0


def test_left_third_order():
    rep = check_hopf_left(hp(d3, "x^2 - x^4"))
    assert rep.status == HOLDS and rep.measured["top_derivative"] == 2.0


def test_left_sharp_example_unmet():
    rep = check_hopf_left(hp(d3, SharpExampleFunction(3, 0.5)))
    assert rep.status == HYPOTHESES_UNMET
    assert rep.hypothesis("sequence").passed is False
    assert rep.measured["top_derivative"] == 0.0


def test_left_sequence_failure_for_negative_u():
    assert check_hopf_left(hp(d2, "-x")).status == HYPOTHESES_UNMET


def test_chain_mode():
    rep = check_hopf_left(hp(d3, "x^2 - x^4", grid=1024), mode="chain")
    assert rep.status == HOLDS
    assert rep.conclusion("subsolution").passed
    assert rep.conclusion("chain_slope_transfer").value == [2.0]


def test_chain_mode_zero_jet_is_unmet():
    rep = check_hopf_left(hp(d3, "-x^4", grid=1024), mode="chain")
    assert rep.status == HYPOTHESES_UNMET


def test_mode_and_endpoint_validation():
    with pytest.raises(ArgumentError):
        check_hopf_left(hp(d2, "x"), mode="fast")
    with pytest.raises(ArgumentError):
        check_hopf_left(hp(d2, "x", "right"))
    with pytest.raises(ArgumentError):
        check_hopf_right(hp(d2, "x"))


def test_right_second_order():
    rep = check_hopf_right(hp(d2, "x*(1 - x)", "right"))
    assert rep.status == HOLDS and rep.measured["top_derivative"] == -1.0


def test_right_third_order_both_routes():
    p = hp(d3, "-(1 - x)^2 + (1 - x)^4", "right")
    for route in ("reflect", "direct"):
        rep = check_hopf_right(p, route=route)
        assert rep.status == HOLDS
        assert rep.measured["top_derivative"] == pytest.approx(-2.0, abs=1e-12)


def test_right_even_sharp_unmet():
    op = LinearOperator.derivative(4, (-1.0, 0.0))
    assert check_hopf_right(hp(op, SharpExampleFunction(4, 0.5), "right")).status == HYPOTHESES_UNMET


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.1, 2.0), c=st.floats(0.0, 1.0), n=st.integers(2, 4))
def test_left_and_reflected_right_agree(s, c, n):
    src = f"{s!r}*x^{n - 1} - {c!r}*x^{n}"
    p = hp(LinearOperator.derivative(n), src, grid=512)
    mirror = reflect_problem(p)
    left, right = check_hopf_left(p), check_hopf_right(mirror)
    assert left.status == right.status == HOLDS
    assert right.measured["top_derivative"] == pytest.approx(-left.measured["top_derivative"], rel=1e-12)


def test_double_reflection_of_problem():
    p = hp(LinearOperator(["x", "1"], (0.0, 1.0)), "x - x^2")
    twice = reflect_problem(reflect_problem(p), 0.0)
    xs = np.linspace(0.05, 0.95, 13)
    assert np.allclose(twice.u.values(xs), p.u.values(xs), atol=1e-12)
    assert np.allclose(twice.op.apply(twice.u, xs), p.op.apply(p.u, xs), atol=1e-12)


def test_equivalent_form_examples():
    op = LinearOperator.derivative(3)
    traj = integrate_linear_ivp(op, 6.0, [0.0, 0.0, 0.0], 1 / 512)    # u''' = -6
    rep = check_equivalent_form(HopfProblem(op, TrajectoryFunction(traj), grid=512))
    assert rep.status == HOLDS
    assert np.allclose(traj.u, -traj.grid ** 3, atol=1e-12)
    assert check_equivalent_form(hp(d3, "(1 - x)^3", "right")).status == HOLDS


def test_equivalent_form_wrong_sign_is_undetermined():
    assert check_equivalent_form(hp(d3, "x^3 - x^4")).status != HOLDS


def test_max_principle_parabola():
    rep = small_interval_max_principle(LinearOperator(["0", "0"], (0.0, 0.3), bound=1.0),
                                       ExprFunction("x*(0.3 - x)/2"), 0.0, 0.3)
    assert rep.status == HOLDS and rep.measured["delta"] > 0.3


def test_max_principle_third_order_not_applicable():
    rep = small_interval_max_principle(LinearOperator.derivative(3, (0.0, 1.0)),
                                       ExprFunction("(x - 1/2)^2 - 1/4"), 0.0, 1.0)
    assert rep.status == NOT_APPLICABLE


def test_max_principle_negative_boundary_unmet():
    rep = small_interval_max_principle(LinearOperator(["0", "0"], (0.0, 0.3), bound=1.0),
                                       ExprFunction("x - 1"), 0.0, 0.3)
    assert rep.status == HYPOTHESES_UNMET
    assert rep.hypothesis("left_boundary").passed is False


def test_max_principle_long_interval_not_applicable():
    rep = small_interval_max_principle(LinearOperator(["0", "0"], (0.0, 1.0), bound=1.0),
                                       ExprFunction("x*(1 - x)"), 0.0, 1.0)
    assert rep.status == NOT_APPLICABLE


def test_third_order_bounded():
    rep = check_third_order_bounded(hp(d3, "x^2 - x^4"), 0.5)
    assert rep.status == HOLDS
    assert rep.conclusion("u2_positive").value == pytest.approx(2.0)
    assert rep.conclusion("quotient_identity").passed
    assert rep.conclusion("quotient_start").passed


def test_boundary_branches():
    r2 = boundary_dichotomy(AutonomousRHS("1", 2), ExprFunction("x^2/2"), (0.0, 1.0))
    assert r2.status == HOLDS and r2.measured["branch"] == 2
    r1 = boundary_dichotomy(AutonomousRHS("-1", 2), ExprFunction("x - x^2/2"), (0.0, 1.0))
    assert r1.status == HOLDS and r1.measured["branch"] == 1 and r1.measured["case"] == 1


def test_boundary_holder_counterexample():
    rep = boundary_dichotomy(AutonomousRHS("-pow(abs(z1), 0.5)", 3), SharpExampleFunction(3, 0.5),
                             (-1.0, 0.0), "right")
    assert rep.status == FAILS
    assert any("Lipschitz" in n for n in rep.notes)


def test_boundary_right_endpoint_maps_values_back():
    rep = boundary_dichotomy(AutonomousRHS("-1", 2), ExprFunction("(1 - x) - (1 - x)^2/2"), (0.0, 1.0), "right")
    assert rep.status == HOLDS
    assert rep.measured["u_n_minus_1"] == pytest.approx(-1.0)


def test_uniqueness():
    rep = uniqueness_probe(LinearOperator(["x", "1"], (0.0, 1.0)), span=1.0, h=1 / 512, eps=1e-3)
    assert rep.status == HOLDS
    assert rep.measured["sup_zero"] == 0.0
    assert rep.measured["control_peak"] >= 5e-4


def test_unique_continuation():
    rep = unique_continuation_probe(hp(d3, "x^2 - x^4"), 6)
    assert rep.status == HOLDS and rep.measured["first_nonvanishing"] == 2 and rep.measured["value"] == 2.0
    rep = unique_continuation_probe(hp(d2, "x - x^2"), 4)
    assert rep.measured["first_nonvanishing"] == 1 and rep.measured["value"] == 1.0
    assert unique_continuation_probe(hp(d3, SharpExampleFunction(3, 0.5)), 3).status == HYPOTHESES_UNMET


def test_unique_continuation_capability_limit():
    traj = integrate_linear_ivp(d3, 1.0, [0.0, 0.0, 1.0], 1 / 64)
    with pytest.raises(CapabilityError):
        unique_continuation_probe(HopfProblem(d3, TrajectoryFunction(traj), grid=64), 6)


def test_zero_function_is_not_holds():
    rep = check_hopf_left(hp(d2, "0"))
    assert rep.status in (UNDETERMINED, HYPOTHESES_UNMET)
    assert math.isfinite(rep.measured["top_derivative"])
