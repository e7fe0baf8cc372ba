import time

import numpy as np
import pytest

from hopfkit import suites


def test_fornberg_weights_match_textbook():
    w = suites.fornberg_weights(2, [-1, 0, 1])
    assert np.allclose(w, [1, -2, 1])
    w = suites.fornberg_weights(1, [-2, -1, 0, 1, 2])
    assert np.allclose(w, [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])


def test_fornberg_exact_on_polynomials():
    offs = np.arange(-4, 5)
    for k in (1, 2, 3):
        w = suites.fornberg_weights(k, offs)
        for deg in range(9):
            exact = float(np.prod(range(deg - k + 1, deg + 1))) * 0.0 ** (deg - k) if deg >= k else 0.0
            assert w @ offs.astype(float) ** deg == pytest.approx(exact, abs=1e-9)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("HOPFKIT_THREADS", "1")
    assert suites.worker_count() == 1
    monkeypatch.setenv("HOPFKIT_THREADS", "junk")
    assert suites.worker_count() >= 1


def test_parallel_map_order(monkeypatch):
    monkeypatch.setenv("HOPFKIT_THREADS", "4")
    assert suites.parallel_map(lambda v: v * v, range(20)) == [v * v for v in range(20)]


def test_seed_determinism(monkeypatch):
    monkeypatch.setenv("HOPFKIT_THREADS", "3")
    a = suites.hopf_positivity_suite(seed=11, draws=10)
    monkeypatch.setenv("HOPFKIT_THREADS", "1")
    b = suites.hopf_positivity_suite(seed=11, draws=10)
    assert a.ok and b.ok
    assert a.stats == b.stats
    c = suites.max_principle_suite(seed=3, draws=8)
    d = suites.max_principle_suite(seed=3, draws=8)
    assert c.stats == d.stats


def test_different_seeds_differ():
    a = suites.max_principle_suite(seed=1, draws=5)
    b = suites.max_principle_suite(seed=2, draws=5)
    assert a.stats != b.stats


def test_gallery_only_is_fast():
    t0 = time.perf_counter()
    res = suites.selftest(gallery_only=True)
    assert time.perf_counter() - t0 < 5.0
    assert [r.name for r in res] == ["gallery"] and res[0].ok


def test_suite_result_line():
    r = suites.SuiteResult("x", total=2, passed=1)
    assert r.line().startswith("FAIL x: 1/2")
