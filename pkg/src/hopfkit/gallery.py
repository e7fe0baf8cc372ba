"""Built-in cases: the sharp family u^(n) = -|u|^alpha, counterexamples, and named problems.

Each case knows which checker it exercises and which status that checker
must return, so the registry doubles as a regression corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .comparison import NonlinearOperator, compare_contact
from .errors import ArgumentError, NonDifferentiableError
from .functions import ExprFunction, FunctionOracle, _broadcast
from .hopf import (
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
from .jets import Jet
from .operator import LinearOperator
from .report import FAILS, HOLDS, HYPOTHESES_UNMET, NOT_APPLICABLE

EXCLUSION = 0.05


def sharp_parameters(n: int, alpha: float) -> dict:
    """beta, exponent p = n/(1-alpha) and lambda_n for the sharp family."""
    if n < 1 or not 0 < alpha < 1:
        raise ArgumentError("sharp family needs n >= 1 and 0 < alpha < 1")
    beta = n * alpha / (1.0 - alpha)
    prod = 1.0
    for j in range(1, n + 1):
        prod *= beta + j
    lam = prod ** (1.0 / (alpha - 1.0))
    return {"n": n, "alpha": alpha, "beta": beta, "p": n / (1.0 - alpha), "lambda": lam, "product": prod}


def lambda_half(n: int) -> float:
    """lambda_n at alpha = 1/2 in factorial form, (n!/(2n)!)^2."""
    return (math.factorial(n) / math.factorial(2 * n)) ** 2


class SharpExampleFunction(FunctionOracle):
    """-lam x^p for x >= 0 and (-1)^(n-1) lam (-x)^p for x < 0, with closed-form jets."""

    def __init__(self, n: int, alpha: float):
        self.params = sharp_parameters(n, alpha)
        self.n, self.alpha = n, alpha
        self.p, self.lam = self.params["p"], self.params["lambda"]
        self.left_sign = (-1.0) ** (n - 1)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        xa = np.asarray(x, dtype=float)
        ax = np.abs(xa)
        p = self.p
        if order > p and np.any(xa == 0):
            raise NonDifferentiableError(f"order {order} exceeds the smoothness p = {p} at 0")
        coef = 1.0
        derivs = []
        for k in range(order + 1):
            e = p - k
            with np.errstate(divide="ignore", invalid="ignore"):
                mag = np.where(ax > 0, np.power(ax, e), 0.0 if e > 0 else 1.0)
            right = -self.lam * coef * mag
            left = self.left_sign * self.lam * coef * ((-1.0) ** k) * mag
            val = np.where(xa >= 0, right, left)
            derivs.append(_broadcast(val, x))
            coef *= e
        return Jet(x, derivs)

    def values(self, x):
        return _broadcast(self.jet(x, 0).value, x)

    def describe(self) -> dict:
        return {"gallery": "sharp", "n": self.n, "alpha": self.alpha}


def sharp_identity_residual(n: int, alpha: float, points: int = 40) -> float:
    """max relative |u^(n) + |u|^alpha| at points in [-1,-0.05] and [0.05, 1]."""
    u = SharpExampleFunction(n, alpha)
    half = points // 2
    xs = np.concatenate([np.linspace(-1.0, -EXCLUSION, half), np.linspace(EXCLUSION, 1.0, points - half)])
    d = u.jet(xs, n).derivs
    rhs = -np.power(np.abs(d[0]), alpha)
    return float(np.max(np.abs(d[n] - rhs) / np.maximum(np.abs(rhs), 1e-300)))


def g_family(i: int) -> ExprFunction:
    return ExprFunction(f"(x - 1/{i})^2 - 1/{i}^2")


@dataclass
class GalleryCase:
    id: str
    title: str
    checker: str
    expected: str
    build: Callable
    params: dict = field(default_factory=dict)
    problem: dict | None = None
    checks: Callable | None = None

    def run(self):
        return self.build()

    def self_check(self) -> dict:
        return {} if self.checks is None else self.checks()


def _hopf(op, u, endpoint="left", **kw):
    return HopfProblem(op, u, endpoint=endpoint, **kw)


def _sharp_checks(n, alpha):
    def run():
        par = sharp_parameters(n, alpha)
        u = SharpExampleFunction(n, alpha)
        jet0 = u.jet(0.0, n).derivs
        out = {"identity": sharp_identity_residual(n, alpha) <= 1e-8,
               "zero_jet": all(d == 0.0 for d in jet0)}
        if alpha == 0.5:
            out["lambda_factorial_form"] = abs(par["lambda"] - lambda_half(n)) <= 1e-14 * lambda_half(n)
        return out
    return run


def _g_checks(i):
    def run():
        g = g_family(i)
        xs = np.linspace(0.0, 2.0 / i, 2049)
        gv = g.values(xs)
        third = np.abs(g.jet(xs, 3).derivs[3]).max()
        return {"ends_zero": abs(g.values(0.0)) <= 1e-15 and abs(g.values(2.0 / i)) <= 1e-15,
                "minimum": bool(abs(gv.min() + 1.0 / i ** 2) <= 1e-15 and abs(xs[np.argmin(gv)] - 1.0 / i) <= 1e-12),
                "third_derivative_zero": bool(third == 0.0)}
    return run


def _sin_checks():
    op = LinearOperator(["0", "1", "0"], (0.0, 2 * math.pi))
    u = ExprFunction("sin(x)")

    def run():
        rng = np.random.default_rng(3)
        xs = rng.uniform(0, 2 * math.pi, 100)
        lu = np.abs(op.apply(u, xs)).max()
        return {"annihilated": bool(lu <= 1e-12), "ends_zero": abs(u.values(2 * math.pi)) <= 1e-15,
                "negative_inside": abs(u.values(1.5 * math.pi) + 1.0) <= 1e-15}
    return run


def _registry() -> list[GalleryCase]:
    d2 = LinearOperator.derivative(2)
    d3 = LinearOperator.derivative(3)
    cases = []

    cases.append(GalleryCase(
        "hopf-left-n2", "x - x^2 under d2 at 0", "hopf_left", HOLDS,
        lambda: check_hopf_left(_hopf(d2, ExprFunction("x - x^2"))),
        problem={"kind": "hopf_left", "order": 2, "interval": [0, 1], "u": {"expr": "x - x^2"}}))
    cases.append(GalleryCase(
        "hopf-left-n3", "x^2 - x^4 under d3 at 0", "hopf_left", HOLDS,
        lambda: check_hopf_left(_hopf(d3, ExprFunction("x^2 - x^4"))),
        problem={"kind": "hopf_left", "order": 3, "interval": [0, 1], "u": {"expr": "x^2 - x^4"}}))
    cases.append(GalleryCase(
        "hopf-left-n3-chain", "x^2 - x^4 under d3 at 0, reduction chain", "hopf_left", HOLDS,
        lambda: check_hopf_left(_hopf(d3, ExprFunction("x^2 - x^4"), grid=1024), mode="chain"),
        problem={"kind": "hopf_left", "order": 3, "interval": [0, 1], "u": {"expr": "x^2 - x^4"},
                 "mode": "chain", "grid": 1024}))
    cases.append(GalleryCase(
        "hopf-right-n2", "x(1 - x) under d2 at 1", "hopf_right", HOLDS,
        lambda: check_hopf_right(_hopf(d2, ExprFunction("x*(1 - x)"), "right")),
        problem={"kind": "hopf_right", "order": 2, "interval": [0, 1], "u": {"expr": "x*(1 - x)"},
                 "endpoint": "right"}))
    cases.append(GalleryCase(
        "hopf-right-n3", "-(1-x)^2 + (1-x)^4 under d3 at 1", "hopf_right", HOLDS,
        lambda: check_hopf_right(_hopf(d3, ExprFunction("-(1 - x)^2 + (1 - x)^4"), "right")),
        problem={"kind": "hopf_right", "order": 3, "interval": [0, 1],
                 "u": {"expr": "-(1 - x)^2 + (1 - x)^4"}, "endpoint": "right"}))

    for n, alpha, tag in [(3, 0.5, "n3-half"), (4, 0.5, "n4-half"), (3, 1.0 / 3.0, "n3-third")]:
        cases.append(GalleryCase(
            f"sharp-{tag}", f"sharp family n={n}, alpha={alpha:.4g} at 0", "hopf_left", HYPOTHESES_UNMET,
            (lambda n=n, alpha=alpha: check_hopf_left(
                _hopf(LinearOperator.derivative(n), SharpExampleFunction(n, alpha)))),
            params={"n": n, "alpha": alpha}, checks=_sharp_checks(n, alpha),
            problem={"kind": "hopf_left", "order": n, "interval": [0, 1],
                     "u": {"sharp": {"n": n, "alpha": alpha}}}))
    cases.append(GalleryCase(
        "sharp-right-n4", "sharp family n=4 at the right end of (-1, 0)", "hopf_right", HYPOTHESES_UNMET,
        lambda: check_hopf_right(_hopf(LinearOperator.derivative(4, (-1.0, 0.0)),
                                       SharpExampleFunction(4, 0.5), "right")),
        params={"n": 4, "alpha": 0.5},
        problem={"kind": "hopf_right", "order": 4, "interval": [-1, 0],
                 "u": {"sharp": {"n": 4, "alpha": 0.5}}, "endpoint": "right"}))

    for i in (2, 8, 32):
        cases.append(GalleryCase(
            f"g{i}", f"g_{i} = (x - 1/{i})^2 - 1/{i}^2 under d3", "max_principle", NOT_APPLICABLE,
            (lambda i=i: small_interval_max_principle(LinearOperator.derivative(3, (0.0, 2.0 / i)),
                                                       g_family(i), 0.0, 2.0 / i)),
            params={"i": i}, checks=_g_checks(i),
            problem={"kind": "max_principle", "order": 3, "interval": [0, 2.0 / i],
                     "u": {"expr": f"(x - 1/{i})^2 - 1/{i}^2"}}))
    cases.append(GalleryCase(
        "sin-x", "sin x under d3 + d1 on [0, 2 pi]", "max_principle", NOT_APPLICABLE,
        lambda: small_interval_max_principle(LinearOperator(["0", "1", "0"], (0.0, 2 * math.pi)),
                                             ExprFunction("sin(x)"), 0.0, 2 * math.pi),
        checks=_sin_checks(),
        problem={"kind": "max_principle", "order": 3, "interval": [0, 2 * math.pi],
                 "coefficients": ["0", "1", "0"], "u": {"expr": "sin(x)"}}))
    cases.append(GalleryCase(
        "max-principle-parabola", "g'' = -1 on [0, 0.3] with C = 1", "max_principle", HOLDS,
        lambda: small_interval_max_principle(LinearOperator(["0", "0"], (0.0, 0.3), bound=1.0),
                                             ExprFunction("x*(0.3 - x)/2"), 0.0, 0.3),
        problem={"kind": "max_principle", "order": 2, "interval": [0, 0.3], "bound": 1.0,
                 "u": {"expr": "x*(0.3 - x)/2"}}))
    cases.append(GalleryCase(
        "equivalent-left-n3", "-x^3 under d3 at 0", "equivalent", HOLDS,
        lambda: check_equivalent_form(_hopf(d3, ExprFunction("-x^3"))),
        problem={"kind": "equivalent", "order": 3, "interval": [0, 1], "u": {"expr": "-x^3"}}))
    cases.append(GalleryCase(
        "equivalent-right-n3", "(1-x)^3 under d3 at 1", "equivalent", HOLDS,
        lambda: check_equivalent_form(_hopf(d3, ExprFunction("(1 - x)^3"), "right")),
        problem={"kind": "equivalent", "order": 3, "interval": [0, 1], "u": {"expr": "(1 - x)^3"},
                 "endpoint": "right"}))
    cases.append(GalleryCase(
        "third-order-bounded", "x^2 - x^4 under d3, C floored", "third_order_bounded", HOLDS,
        lambda: check_third_order_bounded(_hopf(d3, ExprFunction("x^2 - x^4")), 0.5),
        problem={"kind": "third_order_bounded", "order": 3, "interval": [0, 1],
                 "u": {"expr": "x^2 - x^4"}, "nonneg_nbhd": 0.5}))
    cases.append(GalleryCase(
        "dichotomy-branch1", "u'' = -1, u = x - x^2/2", "boundary", HOLDS,
        lambda: boundary_dichotomy(AutonomousRHS("-1", 2), ExprFunction("x - x^2/2"), (0.0, 1.0)),
        problem={"kind": "boundary", "order": 2, "interval": [0, 1], "rhs": "-1",
                 "u": {"expr": "x - x^2/2"}}))
    cases.append(GalleryCase(
        "dichotomy-branch2", "u'' = 1, u = x^2/2", "boundary", HOLDS,
        lambda: boundary_dichotomy(AutonomousRHS("1", 2), ExprFunction("x^2/2"), (0.0, 1.0)),
        problem={"kind": "boundary", "order": 2, "interval": [0, 1], "rhs": "1",
                 "u": {"expr": "x^2/2"}}))
    cases.append(GalleryCase(
        "dichotomy-sharp", "sharp family n=3 with f = -|z1|^(1/2) at the right end of (-1, 0)",
        "boundary", FAILS,
        lambda: boundary_dichotomy(AutonomousRHS("-pow(abs(z1), 0.5)", 3), SharpExampleFunction(3, 0.5),
                                   (-1.0, 0.0), "right"),
        problem={"kind": "boundary", "order": 3, "interval": [-1, 0], "rhs": "-pow(abs(z1), 0.5)",
                 "u": {"sharp": {"n": 3, "alpha": 0.5}}, "endpoint": "right"}))
    cases.append(GalleryCase(
        "unique-continuation-n3", "first nonvanishing derivative of x^2 - x^4", "unique_continuation",
        HOLDS, lambda: unique_continuation_probe(_hopf(d3, ExprFunction("x^2 - x^4")), 6),
        problem={"kind": "unique_continuation", "order": 3, "interval": [0, 1],
                 "u": {"expr": "x^2 - x^4"}, "max_order": 6}))
    cases.append(GalleryCase(
        "uniqueness-n3", "zero data under d3 + x d1", "uniqueness", HOLDS,
        lambda: uniqueness_probe(LinearOperator(["0", "x", "0"], (0.0, 0.5))),
        problem={"kind": "uniqueness", "order": 3, "interval": [0, 0.5], "coefficients": ["0", "x", "0"]}))
    cases.append(GalleryCase(
        "compare-n2", "K = z4, u = 0, v = x^2 at 0", "compare", HOLDS,
        lambda: compare_contact(NonlinearOperator(2, "z4"), ExprFunction("0"), ExprFunction("x^2"),
                                0.0, (-1.0, 1.0)),
        problem={"kind": "compare", "order": 2, "interval": [-1, 1], "K": "z4", "x0": 0,
                 "u": {"expr": "0"}, "v": {"expr": "x^2"}}))
    cases.append(GalleryCase(
        "compare-n3", "K = z5, u = 0, v = x^3 at 0", "compare", HOLDS,
        lambda: compare_contact(NonlinearOperator(3, "z5"), ExprFunction("0"), ExprFunction("x^3"),
                                0.0, (-1.0, 1.0)),
        problem={"kind": "compare", "order": 3, "interval": [-1, 1], "K": "z5", "x0": 0,
                 "u": {"expr": "0"}, "v": {"expr": "x^3"}}))
    return cases


_CASES = None


def gallery_cases() -> list[GalleryCase]:
    global _CASES
    if _CASES is None:
        _CASES = _registry()
    return _CASES


def get_case(case_id: str) -> GalleryCase:
    for c in gallery_cases():
        if c.id == case_id:
            return c
    raise KeyError(f"unknown gallery case {case_id!r}")


def sharp_example(n: int, alpha: float) -> GalleryCase:
    for c in gallery_cases():
        if c.id.startswith("sharp-") and c.params == {"n": n, "alpha": alpha} and c.checker == "hopf_left":
            return c
    return GalleryCase(
        f"sharp-n{n}-a{alpha:.6g}", f"sharp family n={n}, alpha={alpha:.6g}", "hopf_left", HYPOTHESES_UNMET,
        lambda: check_hopf_left(_hopf(LinearOperator.derivative(n), SharpExampleFunction(n, alpha))),
        params={"n": n, "alpha": alpha}, checks=_sharp_checks(n, alpha),
        problem={"kind": "hopf_left", "order": n, "interval": [0, 1], "u": {"sharp": {"n": n, "alpha": alpha}}})


def counterexample_suite() -> list[GalleryCase]:
    ids = {"g2", "g8", "g32", "sin-x", "sharp-n3-half"}
    return [c for c in gallery_cases() if c.id in ids]


def hopf_problems() -> list[tuple[str, HopfProblem]]:
    """The gallery's left/right Hopf problems, for parity consistency checks."""
    d2 = LinearOperator.derivative(2)
    d3 = LinearOperator.derivative(3)
    out = [
        ("hopf-left-n2", _hopf(d2, ExprFunction("x - x^2"))),
        ("hopf-left-n3", _hopf(d3, ExprFunction("x^2 - x^4"))),
        ("hopf-right-n2", _hopf(d2, ExprFunction("x*(1 - x)"), "right")),
        ("hopf-right-n3", _hopf(d3, ExprFunction("-(1 - x)^2 + (1 - x)^4"), "right")),
        ("sharp-right-n4", _hopf(LinearOperator.derivative(4, (-1.0, 0.0)), SharpExampleFunction(4, 0.5),
                                 "right")),
    ]
    for n, alpha in [(3, 0.5), (4, 0.5), (3, 1.0 / 3.0)]:
        out.append((f"sharp-n{n}-a{alpha:.4g}", _hopf(LinearOperator.derivative(n), SharpExampleFunction(n, alpha))))
    return out


def parity_consistency(p: HopfProblem) -> dict:
    """Statuses of a problem and of its mirror image, through both endpoint checkers."""
    mirror = reflect_problem(p)
    if p.endpoint == "left":
        left, right = check_hopf_left(p), check_hopf_right(mirror)
        direct = check_hopf_right(mirror, route="direct")
    else:
        left, right = check_hopf_left(mirror), check_hopf_right(p)
        direct = check_hopf_right(p, route="direct")
    return {"left": left.status, "right": right.status, "right_direct": direct.status,
            "top_left": left.measured["top_derivative"], "top_right": right.measured["top_derivative"]}
