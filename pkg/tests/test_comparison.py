import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.comparison import NonlinearOperator, compare_contact, fundamental_identity_residual, linearize
from hopfkit.errors import ArgumentError, MonotonicityError
from hopfkit.functions import ExprFunction
from hopfkit.report import HOLDS, HYPOTHESES_UNMET

import oracles


def test_pure_top_derivative():
    c = linearize(NonlinearOperator(3, "z5"), ExprFunction("sin(x)"), ExprFunction("x^2"), 0.4)
    assert list(c) == [0.0, 0.0, 0.0, 1.0]


def test_equal_functions_collapse_the_segment():
    u = ExprFunction("0.3 + x")
    c = linearize(NonlinearOperator(2, "z4 + sin(z2)"), u, u, 0.5)
    assert c[0] == pytest.approx(math.cos(0.8), rel=1e-14)
    assert c[2] == 1.0


def test_square_term_against_oracle():
    c = linearize(NonlinearOperator(2, "z4 + z2^2"), ExprFunction("x"), ExprFunction("0"), 1.0)
    assert c[0] == pytest.approx(oracles.FROZEN["c0_square"], rel=1e-14)


def test_monotonicity_error():
    with pytest.raises(MonotonicityError):
        linearize(NonlinearOperator(2, "-z4"), ExprFunction("x"), ExprFunction("0"), 0.5)


def test_variables_out_of_range():
    with pytest.raises(ArgumentError):
        NonlinearOperator(2, "z5")


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), n=st.integers(2, 4))
def test_fundamental_identity(a, b, n):
    K = NonlinearOperator(n, f"z{n + 2} + sin(z1)*z2 + z3^3 + exp(z2)/4")
    u = ExprFunction(f"{a!r}*sin(x) + x^{n}")
    v = ExprFunction(f"{b!r}*cos(x)")
    assert fundamental_identity_residual(K, u, v, np.linspace(-1, 1, 33)) <= 1e-8


def test_even_pattern():
    rep = compare_contact(NonlinearOperator(2, "z4"), ExprFunction("0"), ExprFunction("x^2"), 0.0, (-1, 1))
    assert rep.status == HOLDS and rep.left == rep.right == "u <= v"


def test_odd_pattern():
    rep = compare_contact(NonlinearOperator(3, "z5"), ExprFunction("0"), ExprFunction("x^3"), 0.0, (-1, 1))
    assert rep.status == HOLDS and rep.left == "u >= v" and rep.right == "u <= v"
    assert rep.delta >= 0.05


def test_missing_contact_is_unmet():
    rep = compare_contact(NonlinearOperator(2, "z4"), ExprFunction("0"), ExprFunction("x^2 + x"), 0.0, (-1, 1))
    assert rep.status == HYPOTHESES_UNMET


def test_contact_point_must_be_interior():
    with pytest.raises(ArgumentError):
        compare_contact(NonlinearOperator(2, "z4"), ExprFunction("0"), ExprFunction("x^2"), 1.0, (-1, 1))
