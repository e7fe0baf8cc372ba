"""Reduction of order: v = f*u + u' turns an order-(k+1) operator into an order-k one.

With L[u] = u^(k+1) + sum_{j<=k} a_j u^(j) and M[v] = v^(k) + sum_{m<k} b_m v^(m),
the identity L[u] = M[v] for every u fixes b_{k-1}, ..., b_0 from the jet
of f by a downward recurrence, and leaves one scalar ODE of order k for f:

    f^(k) = a_0 - sum_{m<k} b_m f^(m),   f(a) = 1, f'(a) = ... = 0.

Only coefficient values enter; no derivatives of the a_j are needed.  A
chain of reductions integrates all its f-equations as one coupled system
on a shared grid, so each level sees the previous level's b values at
the RK4 stage points without interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ReductionError
from .functions import FunctionOracle, GridFunction, _intersect
from .jets import BINOM, Jet
from .odeint import Trajectory, TrajectoryFunction, _half_grid_values, _steps, integrate_block_companion
from .operator import TOL_EQ, TOL_POS, LinearOperator, detect_sequence_condition

MIN_STEPS = 8
MIN_CHAIN_STEPS = 16


def b_from_f(a_vals, f_derivs, k: int) -> list:
    """b_0..b_{k-1} (ascending) from a_1..a_k and f, f', ..., f^(k-1).

    Entries may be floats or equal-shape arrays.
    """
    if k < 1:
        raise ArgumentError("reduction needs k >= 1")
    if len(a_vals) != k or len(f_derivs) < k:
        raise ArgumentError(f"need a_1..a_{k} and f through order {k - 1}")
    f = f_derivs
    b = [0.0] * k
    for j in range(k, 0, -1):
        acc = a_vals[j - 1] - BINOM[k][j] * f[k - j]
        for m in range(j, k):
            acc = acc - b[m] * BINOM[m][j] * f[m - j]
        b[j - 1] = acc
    return b


def f_top(a0, b, f_derivs, k: int):
    """Right-hand side of the f-equation: a_0 - sum_m b_m f^(m)."""
    acc = a0
    for m in range(k):
        acc = acc - b[m] * f_derivs[m]
    return acc


def matching_residual(a_vals_full, b, f_derivs, k: int) -> np.ndarray:
    """Rebuild a_0..a_k from b and the jet of f (through order k); return |rebuilt - a| / (1 + |a|)."""
    f = f_derivs
    rebuilt = []
    for j in range(0, k + 1):
        if j == 0:
            acc = f[k]
            for m in range(k):
                acc = acc + b[m] * f[m]
        else:
            acc = BINOM[k][j] * f[k - j] + b[j - 1]
            for m in range(j, k):
                acc = acc + b[m] * BINOM[m][j] * f[m - j]
        rebuilt.append(acc)
    a = np.asarray(a_vals_full, dtype=float)
    r = np.asarray(rebuilt, dtype=float)
    return np.abs(r - a) / (1.0 + np.abs(a))


@dataclass
class ReductionStep:
    source: LinearOperator
    f_traj: Trajectory
    b_grid: np.ndarray
    reduced: LinearOperator

    @property
    def k(self) -> int:
        return self.f_traj.order

    @property
    def f(self) -> TrajectoryFunction:
        return TrajectoryFunction(self.f_traj, label="f")

    @property
    def b_coeffs(self) -> list:
        return self.reduced.coeffs

    @property
    def span(self) -> tuple[float, float]:
        return self.f_traj.span

    @property
    def grid(self) -> np.ndarray:
        return self.f_traj.grid

    def summary(self) -> dict:
        return {
            "k": self.k,
            "span": list(self.span),
            "truncated": self.f_traj.blowup,
            "f_end": self.f_traj.table[-1].tolist(),
            "b_at_a": self.b_grid[:, 0].tolist(),
        }


def _chain_integrate(op: LinearOperator, levels: int, h: float, span=None) -> list[ReductionStep]:
    n = op.order
    if n - levels < 2:
        raise ArgumentError(f"an order-{n} operator admits at most {n - 2} reductions")
    x0, x1 = op.interval if span is None else span
    nsteps, hs = _steps(x0, x1, h)
    avals = [_half_grid_values(c, x0, hs, nsteps) for c in op.coeffs]
    ks = [n - 1 - lvl for lvl in range(levels)]

    def tops(stage, _x, blocks):
        src = [col[stage] for col in avals]  # a_0..a_k of level 0
        out = []
        for lvl, k in enumerate(ks):
            f = blocks[lvl]
            b = b_from_f(src[1:], f, k)
            out.append(f_top(src[0], b, f, k))
            src = b
        return out

    init = [[1.0] + [0.0] * (k - 1) for k in ks]
    trajs = integrate_block_companion(tops, init, (x0, x1), h)
    grid = trajs[0].grid
    if len(grid) - 1 < MIN_STEPS:
        raise ReductionError(f"f-equation blew up after {len(grid) - 1} steps (fewer than {MIN_STEPS})")
    span_out = (float(grid[0]), float(grid[-1]))
    src_vals = [np.asarray(c.values(grid), dtype=float) * np.ones_like(grid) for c in op.coeffs]
    source = op if span is None and not trajs[0].blowup else LinearOperator(
        op.coeffs, span_out, label=op.label)
    steps = []
    for lvl, k in enumerate(ks):
        tab = trajs[lvl].table.T
        b = b_from_f(src_vals[1:], tab, k)
        b_grid = np.array(b)
        reduced = LinearOperator([GridFunction(grid, bg, label=f"b{m}") for m, bg in enumerate(b)],
                                 span_out, label=f"reduced order {k}")
        steps.append(ReductionStep(source, trajs[lvl], b_grid, reduced))
        source = reduced
        src_vals = list(b_grid)
    return steps


def solve_f_ode(source: LinearOperator, h: float | None = None, span=None) -> ReductionStep:
    """One reduction step: integrate the f-equation and build the reduced operator."""
    if source.order < 3:
        raise ArgumentError("reduction needs a source operator of order >= 3")
    a, b = source.interval if span is None else span
    h = (b - a) / 4096 if h is None else h
    return _chain_integrate(source, 1, h, span)[0]


class VFunction(FunctionOracle):
    """v = f*u + u', with jets through the Leibniz ladder."""

    def __init__(self, u: FunctionOracle, f: FunctionOracle):
        self.u, self.f = u, f
        self.max_order = min(u.max_order - 1, f.max_order)
        self.domain = _intersect(u.domain, f.domain)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        uj = self.u.jet(x, order + 1)
        fj = self.f.jet(x, order)
        return fj * uj.truncate(order) + uj.derivative()

    def describe(self) -> dict:
        return {"v": {"u": self.u.describe(), "f": self.f.describe()}}


def push_v(u: FunctionOracle, f: FunctionOracle) -> VFunction:
    return VFunction(u, f)


@dataclass
class IdentityCheck:
    max_residual: float
    scale: float
    worst_point: float | None
    tol: float

    @property
    def relative(self) -> float:
        return self.max_residual / self.scale

    @property
    def passed(self) -> bool:
        return self.relative <= self.tol

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "scale": self.scale, "relative": self.relative,
                "worst_point": self.worst_point, "tol": self.tol, "passed": self.passed}


def verify_reduction_identity(step: ReductionStep, probes, grid=None, tol: float = 1e-6) -> IdentityCheck:
    """max |L_{k+1}[u] - M_k[v]| over probes and grid, relative to 1 + max |L_{k+1}[u]|."""
    grid = step.grid if grid is None else np.asarray(grid, dtype=float)
    f = step.f
    worst, where, lmax = 0.0, None, 0.0
    for u in probes:
        lhs = np.asarray(step.source.apply(u, grid), dtype=float) * np.ones_like(grid)
        rhs = np.asarray(step.reduced.apply(push_v(u, f), grid), dtype=float) * np.ones_like(grid)
        r = np.abs(lhs - rhs)
        k = int(np.argmax(r))
        if r[k] > worst or where is None:
            worst, where = float(r[k]), float(grid[k])
        lmax = max(lmax, float(np.max(np.abs(lhs))))
    return IdentityCheck(worst, 1.0 + lmax, where, tol)


@dataclass
class ChainStage:
    k: int
    v_jet_at_a: list
    zero_jet: list
    slope: float
    previous_top: float
    sequence: object

    def to_dict(self) -> dict:
        return {"k": self.k, "v_jet_at_a": self.v_jet_at_a, "zero_jet_passed": self.zero_jet,
                "v_top_at_a": self.slope, "input_derivative_at_a": self.previous_top,
                "transfer_witness": self.sequence.to_dict()}


@dataclass
class ChainResult:
    steps: list
    vs: list
    stages: list = field(default_factory=list)

    @property
    def span(self) -> tuple[float, float]:
        return self.steps[-1].span

    @property
    def final_operator(self) -> LinearOperator:
        return self.steps[-1].reduced

    @property
    def final_v(self) -> FunctionOracle:
        return self.vs[-1]

    def summary(self) -> dict:
        return {"steps": [s.summary() for s in self.steps],
                "stages": [st.to_dict() for st in self.stages]}


def reduce_chain(op: LinearOperator, u: FunctionOracle, h: float | None = None,
                 tol: float = TOL_EQ, tol_pos: float = TOL_POS) -> ChainResult:
    """Reduce an order-n operator down to order 2, pushing u through each v = f*w + w'."""
    n = op.order
    if n < 3:
        raise ArgumentError("a reduction chain needs order >= 3")
    a, b = op.interval
    h = (b - a) / 4096 if h is None else h
    steps = _chain_integrate(op, n - 2, h)
    lo, hi = steps[-1].span
    if (hi - lo) < MIN_CHAIN_STEPS * h * (1 - 1e-9):
        raise ReductionError(f"chain span collapsed to {hi - lo} (< {MIN_CHAIN_STEPS}h)")
    vs = []
    stages = []
    w = u
    for st in steps:
        k = st.k
        prev = w.jet(a, k)
        w = push_v(w, st.f)
        vs.append(w)
        vj = [float(d) for d in w.jet(a, k - 1).derivs]
        zero = [abs(v) <= tol for v in vj[: k - 1]]
        seq = detect_sequence_condition(w, a, 1, 1.0, hi - lo, tol_pos)
        stages.append(ChainStage(k, vj, zero, vj[k - 1], float(prev.derivs[k]), seq))
    return ChainResult(steps, vs, stages)
