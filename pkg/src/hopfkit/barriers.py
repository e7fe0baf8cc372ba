"""Barrier functions with strictly signed L[barrier] and their sampled certificates.

Four families:

small_interval_h   exp(g*d) - exp(g*(x - c))            L[h] < 0 on [c, c + d)
exp_subsolution    exp(l*(x - a)) - 1                   L > 0 on [a, b]
third_order_m      exp(t*e) - exp(-t*(x - a))           L > 0 on [a, a + e] (order 3)
sine_hi            sin(pi/2 + (pi/9)(x - y)/(x_i - a))  L < 0 on [a, x_i]

"Large enough" parameters are the positive root of the defining
polynomial plus 1; "small enough" ones are 0.9 times their bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, BarrierError
from .functions import ExprFunction

KINDS = ("small_interval_h", "exp_subsolution", "third_order_m", "sine_hi")
ORDER_FOR_KIND = {"small_interval_h": 2, "exp_subsolution": 2, "third_order_m": 3, "sine_hi": 2}
SIGN_FOR_KIND = {"small_interval_h": -1, "exp_subsolution": 1, "third_order_m": 1, "sine_hi": -1}
CERT_GRID = 4096
CERT_MARGIN = 1e-10


def _num(v: float) -> str:
    return f"({float(v)!r})"


def positive_root(b: float, c: float) -> float:
    """Positive root of t^2 - b t - c with c > 0."""
    return 0.5 * (b + math.sqrt(b * b + 4.0 * c))


@dataclass
class Certificate:
    points: int
    sign: int
    margin: float
    worst_point: float
    region: tuple

    @property
    def passed(self) -> bool:
        return self.margin >= CERT_MARGIN

    def to_dict(self) -> dict:
        return {"points": self.points, "sign": self.sign, "margin": self.margin,
                "worst_point": self.worst_point, "region": list(self.region), "passed": self.passed}


@dataclass
class CertifiedBarrier:
    kind: str
    C: float
    params: dict
    region: tuple
    oracle: ExprFunction
    slack: dict
    certificates: list = field(default_factory=list)

    @property
    def sign(self) -> int:
        return SIGN_FOR_KIND[self.kind]

    @property
    def source(self) -> str:
        return self.oracle.source

    def values(self, x):
        return self.oracle.values(x)

    def default_grid(self, points: int = CERT_GRID) -> np.ndarray:
        lo, hi = self.region
        if self.kind == "small_interval_h":
            return np.linspace(lo, hi, points + 1)[:-1]  # half-open [c, c + d)
        return np.linspace(lo, hi, points)

    def shape_checks(self, points: int = 1024) -> dict:
        """Sampled shape properties the constructions rely on."""
        xs = self.default_grid(points)
        v = np.asarray(self.values(xs), dtype=float)
        p = self.params
        if self.kind == "small_interval_h":
            end = float(self.values(self.region[1]))
            return {"positive": bool(np.all(v > 0)), "vanishes_at_end": end == 0.0}
        if self.kind == "exp_subsolution":
            return {"nonnegative": bool(np.all(v >= 0)), "zero_at_a": float(v[0]) == 0.0}
        if self.kind == "third_order_m":
            a = self.region[0]
            aux = np.exp(p["theta"] * p["eta"] + p["theta"] * (xs - a)) - 1.0
            bound = p["theta"] * p["length"]
            return {"positive": bool(np.all(v > 0)),
                    "aux_in_range": bool(np.all(aux > 0) and np.all(aux < bound))}
        lower = math.sin(math.pi / 2 - math.pi / 9)
        return {"in_band": bool(np.all(v >= lower) and np.all(v <= 1.0))}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "C": self.C, "params": self.params, "region": list(self.region),
                "expr": self.source, "slack": self.slack,
                "certificates": [c.to_dict() for c in self.certificates]}


def make_barrier(kind: str, C: float, geometry) -> CertifiedBarrier:
    """Build a barrier of ``kind`` for coefficient bound C.

    geometry: small_interval_h -> c (left end, default 0); exp_subsolution and
    third_order_m -> (a, b); sine_hi -> (a, x_i).
    """
    if kind not in KINDS:
        raise ArgumentError(f"unknown barrier kind {kind!r}; expected one of {KINDS}")
    C = float(C)
    if not (C > 0 and math.isfinite(C)):
        raise ArgumentError(f"barrier construction needs a finite C > 0, got {C}")

    if kind == "small_interval_h":
        c = 0.0 if geometry is None else float(geometry if np.ndim(geometry) == 0 else geometry[0])
        gamma = positive_root(C, 2.0 * C) + 1.0
        delta = 0.9 * math.log(3.0) / gamma
        src = f"exp({_num(gamma)} * {_num(delta)}) - exp({_num(gamma)} * (x - {_num(c)}))"
        slack = {"gamma_poly": gamma * gamma - C * gamma - 2.0 * C,
                 "delta_bound": math.log(3.0) / gamma - delta}
        return _finish(kind, C, {"gamma": gamma, "delta": delta, "c": c}, (c, c + delta), src, slack)

    a, b = (float(g) for g in geometry)
    if not b > a:
        raise ArgumentError(f"degenerate geometry: need {b} > {a}")

    if kind == "exp_subsolution":
        lam = positive_root(C, C) + 1.0
        src = f"exp({_num(lam)} * (x - {_num(a)})) - 1"
        slack = {"lambda_poly": lam * lam - C * lam - C}
        return _finish(kind, C, {"lambda": lam, "a": a, "b": b}, (a, b), src, slack)

    if kind == "third_order_m":
        length = b - a
        theta = positive_root(C, (1.0 + length) * C) + 1.0
        eta = 0.9 * math.log(4.0) / (2.0 * theta)
        rule = "ln4"
        if math.exp(2.0 * theta * eta) - 1.0 >= theta * length:
            eta = 0.9 * math.log1p(theta * length) / (2.0 * theta)
            rule = "eq_bound"
        if eta > length:
            eta = length
            rule += "+cap"
        src = f"exp({_num(theta)} * {_num(eta)}) - exp(-{_num(theta)} * (x - {_num(a)}))"
        slack = {"theta_poly": theta ** 3 - C * theta ** 2 - (1.0 + length) * C * theta,
                 "eta_condition": theta * length - (math.exp(2.0 * theta * eta) - 1.0)}
        params = {"theta": theta, "eta": eta, "a": a, "b": b, "length": length, "eta_rule": rule}
        return _finish(kind, C, params, (a, a + eta), src, slack)

    # sine_hi
    xi = b
    y = 0.5 * (xi + a)
    K = math.pi / (9.0 * (xi - a))
    slack = {"sine_bound": K * K * math.sin(7.0 * math.pi / 18.0) - C * K - C}
    if slack["sine_bound"] <= 0:
        raise BarrierError(f"x_i - a = {xi - a} too large for C = {C}: slack {slack['sine_bound']}")
    src = f"sin(pi / 2 + {_num(K)} * (x - {_num(y)}))"
    return _finish(kind, C, {"x_i": xi, "y_i": y, "a": a, "K": K}, (a, xi), src, slack)


def _finish(kind, C, params, region, src, slack) -> CertifiedBarrier:
    bad = {k: v for k, v in slack.items() if not v > 0}
    if bad:
        raise BarrierError(f"{kind}: non-positive parameter slack {bad}")
    return CertifiedBarrier(kind, C, params, region, ExprFunction(src), slack)


def certify_sign(barrier: CertifiedBarrier, op, grid=None) -> Certificate:
    """min over the grid of sign * L[barrier]; passes when it is >= 1e-10."""
    need = ORDER_FOR_KIND[barrier.kind]
    if op.order != need:
        raise ArgumentError(f"{barrier.kind} is certified against order-{need} operators, got {op.order}")
    xs = barrier.default_grid() if grid is None else np.asarray(grid, dtype=float)
    vals = barrier.sign * np.asarray(op.apply(barrier.oracle, xs), dtype=float) * np.ones_like(xs)
    k = int(np.argmin(vals))
    cert = Certificate(len(xs), barrier.sign, float(vals[k]), float(xs[k]),
                       (float(xs[0]), float(xs[-1])))
    barrier.certificates.append(cert)
    return cert
