"""The linear operator L[u] = u^(n) + sum_{i<n} a_i u^(i) and the hypothesis scans."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .functions import ConstantFunction, FunctionOracle, ReflectedFunction, _as_oracle, jet_table

BOUND_GRID = 4096
TOL_EQ = 1e-8
TOL_POS = 1e-10
LADDER_DEPTH = 40
SHELL_SAMPLES = 64


class LinearOperator:
    """Order-n operator with coefficient oracles a_0..a_{n-1} on [a, b].

    ``bound`` is the sampled sup of |a_i| over a uniform grid of
    ``BOUND_GRID`` points, padded by the largest jump between adjacent
    samples so that it also dominates the coefficients between samples of
    moderate variation.  A declared bound must dominate the sampled one.
    """

    def __init__(self, coeffs, interval, bound: float | None = None, label: str | None = None,
                 min_order: int = 2):
        self.coeffs = [_as_oracle(c) for c in coeffs]
        self.order = len(self.coeffs)
        if self.order < min_order:
            raise ArgumentError(f"operator order must be at least {min_order}, got {self.order}")
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise ArgumentError(f"interval needs a < b, got ({a}, {b})")
        self.interval = (a, b)
        self.label = label
        sampled = self._sampled_bound()
        if bound is None:
            self.bound = sampled
            self.bound_declared = False
        else:
            bound = float(bound)
            if not np.isfinite(bound) or bound < sampled["sup"]:
                raise ArgumentError(f"declared bound {bound} is below the sampled sup {sampled['sup']}")
            self.bound = {"sup": sampled["sup"], "value": bound, "grid": BOUND_GRID}
            self.bound_declared = True

    def _sampled_bound(self) -> dict:
        a, b = self.interval
        xs = np.linspace(a, b, BOUND_GRID)
        sup = 0.0
        jump = 0.0
        for c in self.coeffs:
            v = np.abs(np.asarray(c.values(xs), dtype=float))
            if v.shape == ():
                v = np.full(xs.shape, float(v))
            if not np.all(np.isfinite(v)):
                raise ArgumentError("coefficient is not finite on the sampling grid")
            sup = max(sup, float(v.max()))
            if len(v) > 1:
                jump = max(jump, float(np.max(np.abs(np.diff(v)))))
        return {"sup": sup, "value": sup + jump, "grid": BOUND_GRID}

    @property
    def C(self) -> float:
        return self.bound["value"]

    # construction helpers ---------------------------------------------------
    @classmethod
    def from_strings(cls, coeffs, interval, **kw) -> "LinearOperator":
        return cls([_as_oracle(c) for c in coeffs], interval, **kw)

    @classmethod
    def derivative(cls, n: int, interval=(0.0, 1.0)) -> "LinearOperator":
        """Pure n-th derivative (all lower coefficients zero)."""
        return cls([ConstantFunction(0.0) for _ in range(n)], interval, label=f"d^{n}/dx^{n}")

    def reflect(self, pivot: float | None = None) -> "LinearOperator":
        """Operator acting on u(2p - x): coefficients (-1)^(n-i) a_i(2p - x)."""
        p = self.interval[1] if pivot is None else float(pivot)
        n = self.order
        coeffs = [ReflectedFunction(c, p, (-1.0) ** (n - i)) for i, c in enumerate(self.coeffs)]
        a, b = self.interval
        lo, hi = sorted((2 * p - a, 2 * p - b))
        return LinearOperator(coeffs, (lo, hi), label=f"reflected({self.label or 'L'})")

    # evaluation ------------------------------------------------------------
    def coeff_values(self, x) -> list:
        return [c.values(x) for c in self.coeffs]

    def apply(self, u: FunctionOracle, x):
        """L[u](x) for a float or an array of points."""
        n = self.order
        j = u.jet(x, n)
        acc = j.derivs[n]
        for i, c in enumerate(self.coeffs):
            acc = acc + c.values(x) * j.derivs[i]
        return acc

    def describe(self) -> dict:
        out = {"order": self.order, "interval": list(self.interval), "bound": self.bound}
        out["coeffs"] = [c.describe() for c in self.coeffs]
        if self.label:
            out["label"] = self.label
        return out

    def __repr__(self) -> str:
        return f"LinearOperator(order={self.order}, interval={self.interval})"


def apply_operator(op: LinearOperator, u: FunctionOracle, x):
    return op.apply(u, x)


def interior_grid(interval, points: int) -> np.ndarray:
    """Uniform grid with ``points`` intervals, endpoints excluded."""
    a, b = interval
    return np.linspace(a, b, points + 1)[1:-1]


@dataclass
class InequalityCheck:
    max_violation: float
    worst_point: float
    scale: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"max_violation": self.max_violation, "worst_point": self.worst_point,
                "scale": self.scale, "tol": self.tol, "passed": self.passed}


def verify_inequality(op: LinearOperator, u: FunctionOracle, grid, tol: float = TOL_EQ) -> InequalityCheck:
    """max over the grid of L[u]; passes iff it is <= tol * (1 + max |L[u]|)."""
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(op.apply(u, grid), dtype=float)
    vals = np.broadcast_to(vals, grid.shape)
    k = int(np.argmax(vals))  # argmax returns the first (smallest x) maximizer
    scale = 1.0 + float(np.max(np.abs(vals)))
    worst = float(vals[k])
    return InequalityCheck(worst, float(grid[k]), scale, tol, worst <= tol * scale)


@dataclass
class EndpointJet:
    endpoint: float
    values: list
    passed: list
    top: float
    tol: float

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def to_dict(self) -> dict:
        return {"endpoint": self.endpoint, "values": self.values, "passed": self.passed,
                "top": self.top, "tol": self.tol}


def endpoint_jet_check(u: FunctionOracle, endpoint: float, n: int, tol: float = TOL_EQ) -> EndpointJet:
    """|u^(k)(endpoint)| <= tol for k = 0..n-2, and the value of u^(n-1)(endpoint)."""
    j = u.jet(float(endpoint), n - 1)
    vals = [float(d) for d in j.derivs]
    passed = [abs(v) <= tol for v in vals[: n - 1]]
    return EndpointJet(float(endpoint), vals, passed, vals[n - 1], tol)


PASS = "PASS"
FAIL = "FAIL"
UNDET = "UNDETERMINED"


@dataclass
class SequenceVerdict:
    status: str
    deepest: int | None
    ladder: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    sign: float = 1.0

    @property
    def passed(self) -> bool | None:
        return {PASS: True, FAIL: False}.get(self.status)

    def to_dict(self) -> dict:
        return {"status": self.status, "deepest_resolvable": self.deepest, "sign": self.sign,
                "witnesses": self.witnesses[:12],
                "note": "dyadic ladder surrogate for a sequence condition"}


def ladder_points(endpoint: float, side: int, span: float, depth: int = LADDER_DEPTH) -> np.ndarray:
    j = np.arange(1, depth + 1)
    return endpoint + side * span * np.ldexp(1.0, -j)


def detect_sequence_condition(u: FunctionOracle, endpoint: float, side: int, sign: float, span: float,
                              tol_pos: float = TOL_POS, depth: int = LADDER_DEPTH) -> SequenceVerdict:
    """Scan endpoint + side*span*2^-j, j=1..depth.

    The deepest point where |u| exceeds ``tol_pos`` decides: PASS if there
    sign*u > tol_pos, FAIL otherwise; UNDETERMINED if no rung resolves.
    """
    if side not in (1, -1):
        raise ArgumentError("side must be +1 (right of the endpoint) or -1 (left)")
    xs = ladder_points(endpoint, side, span, depth)
    vals = np.asarray(u.values(xs), dtype=float)
    ladder = [(float(x), float(v)) for x, v in zip(xs, vals)]
    resolvable = np.nonzero(np.abs(vals) > tol_pos)[0]
    witnesses = [(float(xs[k]), float(vals[k])) for k in range(len(xs)) if sign * vals[k] > tol_pos]
    if len(resolvable) == 0:
        return SequenceVerdict(UNDET, None, ladder, witnesses, sign)
    deepest = int(resolvable[-1])
    status = PASS if sign * vals[deepest] > tol_pos else FAIL
    return SequenceVerdict(status, deepest + 1, ladder, witnesses, sign)


@dataclass
class RadiusScan:
    rho: float
    shells: int
    failure: float | None

    def to_dict(self) -> dict:
        return {"rho": self.rho, "shells": self.shells, "first_failure": self.failure}


def dyadic_radius(predicate, endpoint: float, side: int, span: float, depth: int = LADDER_DEPTH,
                  samples: int = SHELL_SAMPLES) -> RadiusScan:
    """Largest r = span*2^-j such that ``predicate`` holds on every shell (r'/2, r'] with r' <= r.

    ``predicate(xs)`` returns a boolean array.  The failing point reported is
    the one closest to the endpoint within the deepest failing shell.
    """
    ok = []
    fails = []
    for j in range(depth + 1):
        r = span * 2.0 ** (-j)
        t = np.linspace(0.5, 1.0, samples + 1)[1:]
        xs = endpoint + side * r * t
        good = np.asarray(predicate(xs), dtype=bool)
        ok.append(bool(np.all(good)))
        fails.append(float(xs[np.nonzero(~good)[0][0]]) if not np.all(good) else None)
    rho = 0.0
    failure = None
    for j in range(depth, -1, -1):
        if not ok[j]:
            failure = fails[j]
            break
        rho = span * 2.0 ** (-j)
    return RadiusScan(rho, depth + 1, failure)
