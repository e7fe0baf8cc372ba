import math

import pytest

import oracles


def test_frozen_values_match_symbolic_derivation():
    pytest.importorskip("sympy")
    fresh = oracles.derive()
    assert set(fresh) == set(oracles.FROZEN)
    for key, frozen in oracles.FROZEN.items():
        got = fresh[key]
        if isinstance(frozen, list):
            assert got == pytest.approx(frozen, rel=1e-14, abs=1e-15), key
        else:
            assert math.isclose(got, frozen, rel_tol=1e-14, abs_tol=1e-15), key
