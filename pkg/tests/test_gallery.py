import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfkit.errors import NonDifferentiableError
from hopfkit.gallery import (
    SharpExampleFunction,
    counterexample_suite,
    g_family,
    gallery_cases,
    get_case,
    hopf_problems,
    lambda_half,
    parity_consistency,
    sharp_example,
    sharp_identity_residual,
    sharp_parameters,
)
from hopfkit.problem import run_problem

import oracles

CASES = gallery_cases()


@pytest.mark.parametrize("case", CASES, ids=[c.id for c in CASES])
def test_case_reproduces(case):
    assert case.run().status == case.expected
    assert all(bool(v) for v in case.self_check().values())


@pytest.mark.parametrize("case", CASES, ids=[c.id for c in CASES])
def test_problem_file_reproduces(case):
    assert run_problem(case.problem).report.status == case.expected


def test_ids_unique():
    ids = [c.id for c in CASES]
    assert len(ids) == len(set(ids))
    with pytest.raises(KeyError):
        get_case("nope")


def test_sharp_parameters():
    p = sharp_parameters(3, 0.5)
    assert p["beta"] == 3.0 and p["p"] == 6.0
    assert p["lambda"] == pytest.approx(oracles.FROZEN["lambda3_half"], rel=1e-14)
    assert lambda_half(3) == pytest.approx(oracles.FROZEN["lambda3_half"], rel=1e-14)


def test_sharp_values_at_one():
    u = SharpExampleFunction(3, 0.5)
    d = u.jet(1.0, 3).derivs
    assert float(d[0]) == pytest.approx(oracles.FROZEN["u3_at_one"], rel=1e-14)
    assert float(d[3]) == pytest.approx(oracles.FROZEN["u3_third_at_one"], rel=1e-14)
    assert float(d[3]) == pytest.approx(-abs(float(d[0])) ** 0.5, rel=1e-14)


@pytest.mark.parametrize("n,alpha", [(3, 0.5), (4, 0.5), (3, 1 / 3), (5, 0.25)])
def test_sharp_jet_vanishes_at_zero(n, alpha):
    u = SharpExampleFunction(n, alpha)
    assert all(float(v) == 0.0 for v in u.jet(0.0, n).derivs)
    assert sharp_identity_residual(n, alpha) <= 1e-8


def test_sharp_smoothness_limit():
    u = SharpExampleFunction(3, 0.5)   # p = 6
    with pytest.raises(NonDifferentiableError):
        u.jet(0.0, 7)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 6), alpha=st.floats(0.05, 0.9))
def test_sharp_identity_property(n, alpha):
    assert sharp_identity_residual(n, alpha) <= 1e-8


def test_g_family_minimum():
    for i in (2, 8, 32):
        xs = np.linspace(0, 2 / i, 4097)
        g = g_family(i).values(xs)
        assert g.min() == pytest.approx(-1 / i ** 2, rel=1e-12)
        assert xs[np.argmin(g)] == pytest.approx(1 / i)


def test_counterexamples_registered():
    ids = {c.id for c in counterexample_suite()}
    assert {"g2", "sin-x", "sharp-n3-half"} <= ids
    assert get_case("sharp-n3-half").expected == "HYPOTHESES_UNMET"


def test_sharp_example_lookup():
    assert sharp_example(3, 0.5).id == "sharp-n3-half"
    fresh = sharp_example(5, 0.25)
    assert fresh.run().status == "HYPOTHESES_UNMET"


@pytest.mark.parametrize("name,problem", hopf_problems(), ids=[n for n, _ in hopf_problems()])
def test_parity_consistency(name, problem):
    res = parity_consistency(problem)
    assert res["left"] == res["right"] == res["right_direct"]
