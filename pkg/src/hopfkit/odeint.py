"""Fixed-step classical RK4 for scalar n-th order equations in companion form.

The state at a grid point is (u, u', ..., u^(n-1)); the right-hand side
returns u^(n).  Every trajectory also stores u^(n) at the grid points so a
trajectory can serve jets of order n exactly at the nodes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, ShootingError
from .functions import FunctionOracle, _broadcast
from .jets import Jet

BLOWUP = 1e12
SHOOT_MAXITER = 200


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Grid, companion states and top derivative of one integration run."""

    grid: np.ndarray
    states: np.ndarray
    top: np.ndarray
    h: float
    closure: Callable | None = field(default=None, repr=False)
    blowup: bool = False
    blowup_at: float | None = None

    @property
    def order(self) -> int:
        return self.states.shape[1]

    @property
    def span(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def table(self) -> np.ndarray:
        """(N+1, n+1) array of u, u', ..., u^(n) per grid point."""
        return np.column_stack([self.states, self.top])

    @property
    def u(self) -> np.ndarray:
        return self.states[:, 0]

    def as_function(self) -> "TrajectoryFunction":
        return TrajectoryFunction(self)

    def to_csv(self, path) -> None:
        n = self.order
        header = ["x", "u"] + [f"u^({k})" for k in range(1, n + 1)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for x, row in zip(self.grid, self.table):
                w.writerow([repr(float(x))] + [repr(float(v)) for v in row])

    def summary(self) -> dict:
        return {
            "span": list(self.span),
            "h": self.h,
            "points": int(len(self.grid)),
            "blowup": self.blowup,
            "blowup_at": self.blowup_at,
        }


def _steps(x0: float, x1: float, h: float) -> tuple[int, float]:
    if not h > 0 or not math.isfinite(h):
        raise ArgumentError(f"step h must be positive and finite, got {h}")
    length = x1 - x0
    if length == 0:
        raise ArgumentError("integration span has zero length")
    nsteps = max(1, int(round(abs(length) / h)))
    return nsteps, length / nsteps


def _rk4(top, x0: float, y0: Sequence[float], hs: float, nsteps: int):
    """Integrate y' = (y[1], ..., y[n-1], top(stage, x, y)).

    ``stage`` indexes the half-step grid (2*i at x_i, 2*i+1 at the midpoint)
    so callers can precompute coefficient samples.  Returns the python lists
    of states and tops plus the blow-up position, if any.
    """
    n = len(y0)
    y = [float(v) for v in y0]
    states = [y]
    tops = []
    half = 0.5 * hs
    sixth = hs / 6.0
    blow_at = None
    for i in range(nsteps):
        x = x0 + i * hs
        t1 = top(2 * i, x, y)
        tops.append(t1)
        k1 = y[1:] + [t1]
        y2 = [y[j] + half * k1[j] for j in range(n)]
        k2 = y2[1:] + [top(2 * i + 1, x + half, y2)]
        y3 = [y[j] + half * k2[j] for j in range(n)]
        k3 = y3[1:] + [top(2 * i + 1, x + half, y3)]
        y4 = [y[j] + hs * k3[j] for j in range(n)]
        k4 = y4[1:] + [top(2 * i + 2, x + hs, y4)]
        ynew = [y[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]) for j in range(n)]
        if not all(math.isfinite(v) and abs(v) <= BLOWUP for v in ynew):
            blow_at = x0 + (i + 1) * hs
            break
        y = ynew
        states.append(y)
    last = len(states) - 1
    t_last = top(2 * last, x0 + last * hs, states[-1])
    if not math.isfinite(t_last) or abs(t_last) > BLOWUP:
        # the top derivative itself overflowed: drop the last node
        if last == 0:
            raise ArgumentError("right-hand side is not finite at the initial state")
        states.pop()
        blow_at = x0 + last * hs if blow_at is None else blow_at
    else:
        tops.append(t_last)
    return states, tops[: len(states)], blow_at


def _assemble(x0, hs, states, tops, blow_at, closure) -> Trajectory:
    m = len(states)
    grid = x0 + hs * np.arange(m)
    st = np.array(states, dtype=float)
    tp = np.array(tops, dtype=float)
    if hs < 0:
        grid, st, tp = grid[::-1].copy(), st[::-1].copy(), tp[::-1].copy()
    return Trajectory(grid=grid, states=st, top=tp, h=abs(hs), closure=closure,
                      blowup=blow_at is not None, blowup_at=blow_at)


def integrate_nonlinear_ivp(rhs: Callable, init: Sequence[float], span, h: float) -> Trajectory:
    """Integrate u^(n) = rhs(x, state) from span[0] to span[1].

    ``span[1] < span[0]`` integrates backwards; the returned grid is always
    increasing.  Blow-up (|state| > 1e12 or non-finite) truncates the run
    and sets the ``blowup`` flag.
    """
    x0, x1 = float(span[0]), float(span[1])
    nsteps, hs = _steps(x0, x1, h)
    if len(init) < 1:
        raise ArgumentError("initial state must have at least one component")

    def top(_stage, x, y):
        return float(rhs(x, y))

    states, tops, blow_at = _rk4(top, x0, init, hs, nsteps)
    return _assemble(x0, hs, states, tops, blow_at, rhs)


def integrate_two_sided(rhs: Callable, init: Sequence[float], x0: float, lo: float, hi: float,
                        h: float) -> Trajectory:
    """Integrate from an interior point x0 out to both lo and hi on one uniform grid."""
    if not lo < x0 < hi:
        raise ArgumentError("two-sided integration needs lo < x0 < hi")
    nl = max(1, int(round((x0 - lo) / h)))
    nr = max(1, int(round((hi - x0) / h)))
    left = integrate_nonlinear_ivp(rhs, init, (x0, x0 - nl * h), h)
    right = integrate_nonlinear_ivp(rhs, init, (x0, x0 + nr * h), h)
    grid = np.concatenate([left.grid[:-1], right.grid])
    states = np.vstack([left.states[:-1], right.states])
    top = np.concatenate([left.top[:-1], right.top])
    blow = left.blowup or right.blowup
    where = right.blowup_at if right.blowup else left.blowup_at
    return Trajectory(grid=grid, states=states, top=top, h=h, closure=rhs,
                      blowup=blow, blowup_at=where)


def integrate_block_companion(tops: Callable, init_blocks: Sequence[Sequence[float]], span,
                              h: float) -> list[Trajectory]:
    """Several coupled companion blocks on one grid.

    Block b has state (y_b, y_b', ..., y_b^(d_b - 1)); ``tops(stage, x, blocks)``
    returns the list of top derivatives.  All blocks share the grid and are
    truncated together at the first blow-up.
    """
    x0, x1 = float(span[0]), float(span[1])
    nsteps, hs = _steps(x0, x1, h)
    dims = [len(b) for b in init_blocks]
    offs = np.cumsum([0] + dims).tolist()
    nb = len(dims)

    def split(y):
        return [y[offs[b]:offs[b + 1]] for b in range(nb)]

    def deriv(stage, x, y):
        tp = tops(stage, x, split(y))
        out = []
        for b in range(nb):
            out.extend(y[offs[b] + 1:offs[b + 1]])
            out.append(tp[b])
        return out, tp

    y = [float(v) for blk in init_blocks for v in blk]
    n = len(y)
    states = [y]
    toplist = []
    half = 0.5 * hs
    sixth = hs / 6.0
    blow_at = None
    for i in range(nsteps):
        x = x0 + i * hs
        k1, t1 = deriv(2 * i, x, y)
        toplist.append(t1)
        y2 = [y[j] + half * k1[j] for j in range(n)]
        k2, _ = deriv(2 * i + 1, x + half, y2)
        y3 = [y[j] + half * k2[j] for j in range(n)]
        k3, _ = deriv(2 * i + 1, x + half, y3)
        y4 = [y[j] + hs * k3[j] for j in range(n)]
        k4, _ = deriv(2 * i + 2, x + hs, y4)
        ynew = [y[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]) for j in range(n)]
        if not all(math.isfinite(v) and abs(v) <= BLOWUP for v in ynew):
            blow_at = x0 + (i + 1) * hs
            break
        y = ynew
        states.append(y)
    while True:
        last = len(states) - 1
        _, tl = deriv(2 * last, x0 + last * hs, states[-1])
        if all(math.isfinite(t) and abs(t) <= BLOWUP for t in tl):
            break
        if last == 0:
            raise ArgumentError("right-hand side is not finite at the initial state")
        states.pop()
        blow_at = x0 + last * hs if blow_at is None else blow_at
    toplist = toplist[:len(states) - 1] + [tl]
    st = np.array(states, dtype=float)
    tp = np.array(toplist, dtype=float)
    grid = x0 + hs * np.arange(len(states))
    return [Trajectory(grid=grid, states=st[:, offs[b]:offs[b + 1]].copy(), top=tp[:, b].copy(),
                       h=abs(hs), blowup=blow_at is not None, blowup_at=blow_at)
            for b in range(nb)]


def _half_grid_values(oracle, x0: float, hs: float, nsteps: int) -> list:
    xs = x0 + 0.5 * hs * np.arange(2 * nsteps + 1)
    return np.asarray(_broadcast(oracle.values(xs), xs), dtype=float).tolist()


def integrate_linear_ivp(op, forcing, init: Sequence[float], h: float, span=None) -> Trajectory:
    """Integrate u^(n) = -sum_i a_i u^(i) - q, so that L[u] = -q.

    ``span`` defaults to the operator interval, integrating from its left end.
    Coefficients and forcing are sampled once on the half-step grid.
    """
    from .functions import _as_oracle

    n = op.order
    if len(init) != n:
        raise ArgumentError(f"initial state must have {n} entries, got {len(init)}")
    x0, x1 = (op.interval if span is None else (float(span[0]), float(span[1])))
    nsteps, hs = _steps(x0, x1, h)
    q = _as_oracle(0.0 if forcing is None else forcing)
    avals = [_half_grid_values(c, x0, hs, nsteps) for c in op.coeffs]
    qvals = _half_grid_values(q, x0, hs, nsteps)
    rng = range(n)

    def top(stage, _x, y):
        acc = qvals[stage]
        for i in rng:
            acc += avals[i][stage] * y[i]
        return -acc

    def closure(x, y):
        return -float(q.values(x)) - sum(float(op.coeffs[i].values(x)) * y[i] for i in rng)

    states, tops, blow_at = _rk4(top, x0, init, hs, nsteps)
    return _assemble(x0, hs, states, tops, blow_at, closure)


def solve_second_order_bvp(op, forcing, c: float, d: float, alpha: float, beta: float,
                           h: float) -> Trajectory:
    """Shoot on the initial slope until g(d) = beta within 1e-10 * (1 + |beta|)."""
    if op.order != 2:
        raise ArgumentError("shooting solver handles second-order operators only")
    if not d > c:
        raise ArgumentError("boundary interval needs d > c")
    tol = 1e-10 * (1.0 + abs(beta))

    def shoot(s):
        traj = integrate_linear_ivp(op, forcing, [alpha, s], h, span=(c, d))
        if traj.blowup:
            return traj, math.nan
        return traj, float(traj.states[-1, 0]) - beta

    s0 = (beta - alpha) / (d - c)
    s1 = s0 + 1.0
    t0, r0 = shoot(s0)
    if abs(r0) <= tol:
        return t0
    t1, r1 = shoot(s1)
    bracket = None
    for _ in range(SHOOT_MAXITER):
        if abs(r1) <= tol:
            return t1
        if math.isfinite(r0) and math.isfinite(r1) and r0 * r1 < 0:
            bracket = (s0, r0, s1, r1)
        if math.isfinite(r0) and math.isfinite(r1) and r1 != r0:
            s2 = s1 - r1 * (s1 - s0) / (r1 - r0)
        elif bracket is not None:
            s2 = 0.5 * (bracket[0] + bracket[2])
        else:
            raise ShootingError("shooting residual did not change between iterates")
        if bracket is not None:
            lo, hi = sorted((bracket[0], bracket[2]))
            if not lo < s2 < hi:
                s2 = 0.5 * (lo + hi)
        t2, r2 = shoot(s2)
        s0, r0, s1, r1, t1 = s1, r1, s2, r2, t2
        if bracket is not None and math.isfinite(r2):
            a_s, a_r, b_s, b_r = bracket
            bracket = (s2, r2, b_s, b_r) if a_r * r2 > 0 else (a_s, a_r, s2, r2)
    raise ShootingError(f"no convergence in {SHOOT_MAXITER} shooting iterations")


class TrajectoryFunction(FunctionOracle):
    """Jets of a trajectory: exact at grid nodes, linear in between."""

    def __init__(self, traj: Trajectory, label: str = "trajectory"):
        self.traj = traj
        self.domain = traj.span
        self.max_order = traj.order
        self.label = label
        self._table = traj.table
        self._nseg = len(traj.grid) - 1

    def _rows(self, x):
        xa = np.asarray(x, dtype=float)
        g0 = float(self.traj.grid[0])
        if self._nseg == 0:
            return np.zeros(xa.shape, dtype=int), np.zeros(xa.shape)
        t = (xa - g0) / self.traj.h
        r = np.rint(t)
        on = np.abs(t - r) < 1e-11
        t = np.where(on, r, t)
        idx = np.clip(np.floor(t), 0, self._nseg - 1).astype(int)
        w = np.clip(t - idx, 0.0, 1.0)
        return idx, w

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        idx, w = self._rows(x)
        tab = self._table
        lo = tab[idx] if self._nseg else tab[np.zeros_like(idx)]
        hi = tab[idx + 1] if self._nseg else lo
        vals = lo * (1.0 - w)[..., None] + hi * w[..., None]
        if np.ndim(x) == 0:
            return Jet(x, [float(vals[k]) for k in range(order + 1)])
        return Jet(x, [vals[:, k] for k in range(order + 1)])

    def values(self, x):
        return _broadcast(self.jet(x, 0).value, x)

    def describe(self) -> dict:
        return {"trajectory": self.label, **self.traj.summary()}
