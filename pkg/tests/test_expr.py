import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit import expr
from hopfkit.errors import NonDifferentiableError, ParseError, UnboundVariableError
from hopfkit.expr import Binary, Call, Num, Var
from hopfkit.jets import Jet
from hopfkit.suites import PARSER_CORPUS


def test_parse_structure():
    tree = expr.parse("exp(2*x) - 1")
    assert isinstance(tree, Binary) and tree.op == "-"
    assert isinstance(tree.left, Call) and tree.left.fn == "exp"
    inner = tree.left.args[0]
    assert isinstance(inner, Binary) and inner.op == "*"
    assert isinstance(inner.left, Num) and isinstance(inner.right, Var)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        expr.parse("sin(")
    assert err.value.position == 4
    assert err.value.caret().splitlines()[1] == "    ^"


def test_variables():
    assert expr.variables(expr.parse("pow(abs(z1), 0.5)")) == {"z1"}


def test_eval_jet_square():
    j = expr.eval_jet(expr.parse("x^2"), {"x": Jet(1.0, [1.0, 1.0, 0.0])}, 2)
    assert [float(v) for v in j.derivs] == [1.0, 2.0, 2.0]


def test_eval_jet_exp_minus_one():
    j = expr.eval_jet(expr.parse("exp(x)-1"), {"x": Jet.variable(0.0, 1)}, 1)
    assert [float(v) for v in j.derivs] == [0.0, 1.0]


def test_abs_power_at_zero_non_differentiable():
    with pytest.raises(NonDifferentiableError):
        expr.eval_jet(expr.parse("abs(x)^0.5"), {"x": Jet.variable(0.0, 2)}, 2)


def test_unknown_identifier_is_a_parse_error():
    with pytest.raises(ParseError) as err:
        expr.parse("x + y")
    assert err.value.position == 4


def test_unbound_variable():
    with pytest.raises(UnboundVariableError):
        expr.evaluate(expr.parse("x + z2"), {"x": 1.0})


@pytest.mark.parametrize("src", ["", "1 +", "sin(x", "foo(x)", "x $ 2", "sin(x, 2)"])
def test_malformed(src):
    with pytest.raises(ParseError):
        expr.parse(src)


@pytest.mark.parametrize("src", PARSER_CORPUS)
def test_round_trip_fixed_point(src):
    once = expr.to_source(expr.parse(src))
    assert expr.to_source(expr.parse(once)) == once


@pytest.mark.parametrize("src", PARSER_CORPUS)
def test_round_trip_preserves_values(src):
    tree = expr.parse(src)
    again = expr.parse(expr.to_source(tree))
    env = {name: 0.3 for name in expr.variables(tree)}
    assert expr.evaluate(again, env) == pytest.approx(expr.evaluate(tree, env), rel=1e-15)


leaves = st.one_of(
    st.sampled_from(["x", "pi", "z1"]),
    st.floats(0.0, 10.0, allow_nan=False).map(repr),
    st.integers(0, 9).map(str),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/^"), children).map(lambda t: f"({t[0]}){t[1]}({t[2]})"),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda c: f"-({c})"),
    )


expressions = st.recursive(leaves, _combine, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(src=expressions)
def test_round_trip_property(src):
    once = expr.to_source(expr.parse(src))
    assert expr.to_source(expr.parse(once)) == once


@settings(max_examples=100, deadline=None)
@given(src=expressions)
def test_printed_form_evaluates_identically(src):
    tree = expr.parse(src)
    env = {"x": 0.7, "z1": -0.4}
    with np.errstate(all="ignore"):
        try:
            a = expr.evaluate(tree, env)
        except Exception as exc:  # domain errors must reproduce too
            with pytest.raises(type(exc)):
                expr.evaluate(expr.parse(expr.to_source(tree)), env)
            return
        b = expr.evaluate(expr.parse(expr.to_source(tree)), env)
    assert np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True)
