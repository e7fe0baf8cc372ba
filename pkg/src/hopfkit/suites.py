"""Seeded randomized property suites and the self-test driver."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import expr as _expr
from .barriers import certify_sign, make_barrier
from .comparison import NonlinearOperator, compare_contact
from .functions import ExprFunction, PolynomialFunction
from .gallery import gallery_cases
from .hopf import (
    C_FLOOR,
    HopfProblem,
    check_equivalent_form,
    check_hopf_left,
    small_interval_max_principle,
    uniqueness_probe,
)
from .jets import Jet
from .odeint import TrajectoryFunction, integrate_linear_ivp, integrate_two_sided, solve_second_order_bvp
from .operator import LinearOperator
from .reduction import solve_f_ode, verify_reduction_identity
from .report import HOLDS

DEFAULT_SEED = 20240601
PROBES = ("1", "x", "x^2", "sin(x)", "exp(x)")

JET_CORPUS = (
    "sin(x)",
    "exp(sin(x))",
    "x^3 - 2*x + 1",
    "log(1 + x^2)",
    "cos(x)*exp(-x)",
    "pow(2 + x, 0.5)",
    "1/(1 + x^2)",
    "sin(x)/(2 + cos(x))",
    "pow(1.5 + x, 0.7)",
    "x*exp(-x^2)",
)

PARSER_CORPUS = JET_CORPUS + (
    "-x^2", "2^-3", "(x - 1/8)^2 - 1/8^2", "exp(0.5*(x - 1)) - 1", "-pow(abs(z1), 0.5)",
    "z5 + sin(z1) + z2", "sin(pi/2 + 0.25*(x - 0.5))", "x*(1 - x)", "-(1 - x)^2 + (1 - x)^4", "1e-3*x",
)


def worker_count() -> int:
    """Worker threads, capped by HOPFKIT_THREADS (default: min(4, cpu count))."""
    default = min(4, os.cpu_count() or 1)
    raw = os.environ.get("HOPFKIT_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map preserving input order, so results merge deterministically."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class SuiteResult:
    name: str
    total: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}: {self.passed}/{self.total} ({self.seconds:.2f} s)"

    def to_dict(self) -> dict:
        return {"name": self.name, "total": self.total, "passed": self.passed, "ok": self.ok,
                "failures": self.failures, "stats": self.stats, "seconds": self.seconds}


def _collect(name: str, outcomes: list, t0: float, stats: dict | None = None) -> SuiteResult:
    """outcomes: (passed, info) per draw, info is stored for failures."""
    res = SuiteResult(name, total=len(outcomes), stats=stats or {})
    for i, (ok, info) in enumerate(outcomes):
        if ok:
            res.passed += 1
        else:
            res.failures.append({"draw": i, **info})
    res.seconds = time.perf_counter() - t0
    return res


def _children(seed: int, tag: int, count: int) -> list:
    ss = np.random.SeedSequence([seed, tag])
    return [np.random.default_rng(s) for s in ss.spawn(count)]


def bounded_coefficient(rng, C: float) -> ExprFunction:
    """r0 + r1 sin(w x + phi) scaled by C with |r0| + |r1| <= 1, so sup |a| <= C."""
    r = rng.uniform(-1.0, 1.0, 2)
    r = r / max(1.0, float(np.sum(np.abs(r))))
    c0, c1 = float(C * r[0]), float(C * r[1])
    w, phi = float(rng.uniform(0.0, 6.0)), float(rng.uniform(0.0, 2 * math.pi))
    return ExprFunction(f"({c0!r}) + ({c1!r})*sin({w!r}*x + {phi!r})")


def bounded_polynomial(rng, bound: float, degree: int = 2) -> PolynomialFunction:
    """Random polynomial with sum |c_j| <= bound, hence |p| <= bound on [-1, 1]."""
    c = rng.uniform(-1.0, 1.0, degree + 1)
    c *= rng.uniform(0.0, bound) / max(float(np.sum(np.abs(c))), 1e-12)
    return PolynomialFunction(c)


def nonnegative_forcing(rng, floor: float = 0.1) -> PolynomialFunction:
    """q(x) = q0 + q1 x^2 with q0 in [floor, 1] and q1 in [0, 1]."""
    return PolynomialFunction([rng.uniform(floor, 1.0), 0.0, rng.uniform(0.0, 1.0)])


# ---------------------------------------------------------------------------
# suites

def reduction_suite(seed: int = DEFAULT_SEED, draws: int = 50, steps: int = 512) -> SuiteResult:
    t0 = time.perf_counter()
    probes = [ExprFunction(s) for s in PROBES]
    jobs = [(n, rng) for n in (3, 4, 5) for rng in _children(seed, 100 + n, draws)]
    h = 1.0 / steps

    def one(job):
        n, rng = job
        op = LinearOperator([bounded_polynomial(rng, 2.0) for _ in range(n)], (0.0, 1.0))
        step = solve_f_ode(op, h=h)
        chk = verify_reduction_identity(step, probes)
        return chk.passed, {"n": n, "relative": chk.relative, "witness": chk.worst_point,
                            "span": list(step.span)}

    out = parallel_map(one, jobs)
    worst = max(info["relative"] for _, info in out)
    shortest = min(info["span"][1] - info["span"][0] for _, info in out)
    return _collect("reduction_identity", [(ok, info) for ok, info in out], t0,
                    {"max_relative_residual": worst, "shortest_span": shortest, "h": h})


def barrier_suite(seed: int = DEFAULT_SEED, draws: int = 50) -> SuiteResult:
    t0 = time.perf_counter()
    jobs = [(C, rng) for C in (0.5, 1.0, 5.0) for rng in _children(seed, 200 + int(10 * C), draws)]

    def one(job):
        C, rng = job
        op2 = LinearOperator([bounded_coefficient(rng, C) for _ in range(2)], (0.0, 1.0), bound=C)
        op3 = LinearOperator([bounded_coefficient(rng, C) for _ in range(3)], (0.0, 1.0), bound=C)
        a = float(rng.uniform(0.0, 0.5))
        xi = a + float(rng.uniform(0.001, 0.01))
        certs = {
            "small_interval_h": certify_sign(make_barrier("small_interval_h", C, 0.0), op2),
            "exp_subsolution": certify_sign(make_barrier("exp_subsolution", C, (0.0, 1.0)), op2),
            "third_order_m": certify_sign(make_barrier("third_order_m", C, (a, 1.0)), op3),
            "sine_hi": certify_sign(make_barrier("sine_hi", C, (a, xi)), op2),
        }
        margins = {k: c.margin for k, c in certs.items()}
        worst = min(margins, key=margins.get)
        return all(c.passed for c in certs.values()), {"C": C, "margins": margins, "worst_kind": worst,
                                                         "witness": certs[worst].worst_point}

    out = parallel_map(one, jobs)
    low = min(min(info["margins"].values()) for _, info in out)
    return _collect("barrier_certificates", out, t0, {"min_margin": low})


def equivalent_form_suite(seed: int = DEFAULT_SEED, draws: int = 200, steps: int = 512) -> SuiteResult:
    t0 = time.perf_counter()
    h = 1.0 / steps

    def one(rng):
        n = int(rng.integers(2, 5))
        op = LinearOperator([bounded_polynomial(rng, 1.0) for _ in range(n)], (0.0, 1.0))
        q = nonnegative_forcing(rng)
        info = {"n": n}
        ok = True
        for side, span in (("left", (0.0, 1.0)), ("right", (1.0, 0.0))):
            traj = integrate_linear_ivp(op, q, [0.0] * n, h, span=span)
            p = HopfProblem(op, TrajectoryFunction(traj), endpoint=side, grid=steps)
            rep = check_equivalent_form(p)
            info[side] = {"status": rep.status, "rho": rep.measured["rho"],
                          "witness": rep.conclusion("parity_sign").witness}
            ok = ok and rep.status == HOLDS
        return ok, info

    out = parallel_map(one, _children(seed, 300, draws))
    rho = min(min(i["left"]["rho"], i["right"]["rho"]) for _, i in out)
    return _collect("equivalent_form", out, t0, {"min_rho": rho, "h": h})


def max_principle_suite(seed: int = DEFAULT_SEED, draws: int = 100, steps: int = 512) -> SuiteResult:
    t0 = time.perf_counter()

    def one(rng):
        C = float(rng.choice([0.5, 1.0, 2.0, 5.0]))
        delta = make_barrier("small_interval_h", max(C, C_FLOOR), 0.0).params["delta"]
        length = float(rng.uniform(0.2, 0.95)) * delta
        op = LinearOperator([bounded_coefficient(rng, C) for _ in range(2)], (0.0, length), bound=C)
        alpha, beta = (float(v) for v in rng.uniform(0.0, 1.0, 2) * (rng.random(2) < 0.8))
        q = nonnegative_forcing(rng, floor=0.0)
        traj = solve_second_order_bvp(op, q, 0.0, length, alpha, beta, length / steps)
        g = TrajectoryFunction(traj)
        rep = small_interval_max_principle(op, g, 0.0, length, points=steps)
        mins = float(np.min(traj.u))
        k = int(np.argmin(traj.u))
        ok = rep.status == HOLDS and mins >= -1e-9
        return ok, {"C": C, "length": length, "delta": delta, "min_g": mins, "witness": float(traj.grid[k]),
                    "status": rep.status}

    out = parallel_map(one, _children(seed, 400, draws))
    return _collect("max_principle", out, t0, {"min_g": min(i["min_g"] for _, i in out)})


def hopf_positivity_suite(seed: int = DEFAULT_SEED, draws: int = 200, steps: int = 512) -> SuiteResult:
    t0 = time.perf_counter()
    h = 1.0 / steps
    slopes = np.round(np.arange(1, 11) / 10.0, 12)

    def build(rng, s):
        n = int(rng.integers(2, 5))
        op = LinearOperator([bounded_polynomial(rng, 1.0) for _ in range(n)], (0.0, 1.0))
        q = nonnegative_forcing(rng)
        traj = integrate_linear_ivp(op, q, [0.0] * (n - 1) + [s], h)
        return n, check_hopf_left(HopfProblem(op, TrajectoryFunction(traj), grid=steps))

    def one(rng):
        s = float(rng.choice(slopes))
        n, rep = build(rng, s)
        top = rep.measured["top_derivative"]
        ok = rep.status == HOLDS and abs(top - s) <= 1e-9
        return ok, {"n": n, "s": s, "measured": top, "status": rep.status}

    def zero(rng):
        n, rep = build(rng, 0.0)
        return rep.status != HOLDS, {"n": n, "s": 0.0, "measured": rep.measured["top_derivative"],
                                     "status": rep.status}

    rngs = _children(seed, 500, draws + 20)
    out = parallel_map(one, rngs[:draws]) + parallel_map(zero, rngs[draws:])
    err = max(abs(i["measured"] - i["s"]) for _, i in out)
    return _collect("hopf_positivity", out, t0, {"max_slope_error": err, "zero_slope_draws": 20})


def comparison_suite(seed: int = DEFAULT_SEED, draws: int = 20, steps: int = 1024) -> SuiteResult:
    t0 = time.perf_counter()
    jobs = [(n, rng) for n in (2, 3, 4) for rng in _children(seed, 600 + n, draws)]
    half = 0.5

    def one(job):
        n, rng = job
        x0 = float(np.round(rng.uniform(-0.5, 0.5) * steps) / steps)
        lo, hi = x0 - half, x0 + half
        h = (hi - lo) / steps
        init = list(rng.uniform(-1.0, 1.0, n))
        qc = rng.uniform(0.1, 1.0)

        def fv(x, y):
            return -math.sin(x) - y[0]

        def fu(x, y):
            return -math.sin(x) - y[0] - qc * (1.0 + 0.5 * math.cos(3.0 * x))

        u = TrajectoryFunction(integrate_two_sided(fu, init, x0, lo, hi, h), "u")
        v = TrajectoryFunction(integrate_two_sided(fv, init, x0, lo, hi, h), "v")
        Kop = NonlinearOperator(n, f"z{n + 2} + sin(z1) + z2")
        rep = compare_contact(Kop, u, v, x0, (lo, hi), grid=steps, rng=rng)
        resid = rep.trace["identity_residual"]
        ok = rep.status == HOLDS and rep.delta >= 0.05 and resid <= 1e-8
        return ok, {"n": n, "x0": x0, "delta": rep.delta, "identity_residual": resid, "status": rep.status,
                    "witness": [c.witness for c in rep.conclusions]}

    out = parallel_map(one, jobs)
    return _collect("comparison_patterns", out, t0,
                    {"min_delta": min(i["delta"] for _, i in out),
                     "max_identity_residual": max(i["identity_residual"] for _, i in out)})


def uniqueness_suite(seed: int = DEFAULT_SEED, draws: int = 100, steps: int = 512) -> SuiteResult:
    t0 = time.perf_counter()

    def one(rng):
        n = int(rng.integers(2, 6))
        op = LinearOperator([bounded_polynomial(rng, 2.0) for _ in range(n)], (0.0, 1.0))
        rep = uniqueness_probe(op, span=0.5, h=0.5 / steps)
        return rep.status == HOLDS, {"n": n, **rep.measured}

    out = parallel_map(one, _children(seed, 700, draws))
    return _collect("uniqueness", out, t0)


def fornberg_weights(order: int, offsets) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 on ``offsets``."""
    z = np.asarray(offsets, dtype=float)
    m = len(z)
    c = np.zeros((m, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, m):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def jet_fd_suite(seed: int = DEFAULT_SEED, points: int = 5, step: float = 0.01) -> SuiteResult:
    """Jet derivatives 1..3 against 9-point central differences of the values."""
    t0 = time.perf_counter()
    offsets = np.arange(-4, 5)
    weights = {k: fornberg_weights(k, offsets) for k in (1, 2, 3)}
    rng = _children(seed, 800, 1)[0]
    xs = rng.uniform(-0.4, 0.4, points)
    out = []
    for src in JET_CORPUS:
        tree = _expr.parse(src)
        worst, where = 0.0, None
        for x in xs:
            d = _expr.eval_jet(tree, {"x": Jet.variable(float(x), 3)}, 3).derivs
            vals = np.array([float(_expr.evaluate(tree, {"x": float(x + o * step)})) for o in offsets])
            for k in (1, 2, 3):
                fd = float(weights[k] @ vals) / step ** k
                rel = abs(float(d[k]) - fd) / (1.0 + abs(float(d[k])))
                if rel > worst:
                    worst, where = rel, (float(x), k)
        out.append((worst <= 1e-6, {"expr": src, "relative": worst, "witness": where}))
    return _collect("jets_vs_differences", out, t0,
                    {"max_relative": max(i["relative"] for _, i in out), "step": step, "stencil": 9})


def parser_roundtrip_suite() -> SuiteResult:
    t0 = time.perf_counter()
    out = []
    for src in PARSER_CORPUS:
        once = _expr.to_source(_expr.parse(src))
        twice = _expr.to_source(_expr.parse(once))
        out.append((once == twice, {"expr": src, "printed": once, "reprinted": twice}))
    return _collect("parser_roundtrip", out, t0)


def gallery_suite() -> SuiteResult:
    t0 = time.perf_counter()
    cases = gallery_cases()

    def one(case):
        rep = case.run()
        checks = case.self_check()
        ok = rep.status == case.expected and all(bool(v) for v in checks.values())
        return ok, {"id": case.id, "expected": case.expected, "status": rep.status, "checks": checks}

    return _collect("gallery", parallel_map(one, cases), t0)


SUITES = {
    "gallery": lambda seed: gallery_suite(),
    "reduction_identity": reduction_suite,
    "barrier_certificates": barrier_suite,
    "equivalent_form": equivalent_form_suite,
    "max_principle": max_principle_suite,
    "hopf_positivity": hopf_positivity_suite,
    "comparison_patterns": comparison_suite,
    "uniqueness": uniqueness_suite,
    "jets_vs_differences": jet_fd_suite,
    "parser_roundtrip": lambda seed: parser_roundtrip_suite(),
}


def selftest(seed: int = DEFAULT_SEED, gallery_only: bool = False) -> list[SuiteResult]:
    names = ["gallery"] if gallery_only else list(SUITES)
    return [SUITES[name](seed) for name in names]
