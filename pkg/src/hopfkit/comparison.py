"""Nonlinear operators K(z1, ..., z_{n+2}) with z1 = x, z2 = u, ..., z_{n+2} = u^(n).

The difference K[u] - K[v] along the segment t*u + (1-t)*v is written as
sum_i c_i w^(i) with w = u - v and

    c_i(x) = int_0^1 dK/dz_{i+2}(x, t u + (1-t) v, ..., t u^(n) + (1-t) v^(n)) dt,

evaluated with 16-point Gauss-Legendre quadrature and partials taken by a
first-order dual perturbation of one slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import expr as _expr
from .errors import ArgumentError, MonotonicityError
from .functions import GridFunction
from .jets import Jet
from .operator import TOL_EQ, LinearOperator, dyadic_radius, interior_grid
from .report import VerdictReport, Item

GL_NODES = 16
_XI, _WG = np.polynomial.legendre.leggauss(GL_NODES)
QUAD_T = 0.5 * (_XI + 1.0)
QUAD_W = 0.5 * _WG
TOL_SIGN = 1e-9

_ZVAR = re.compile(r"z([1-9][0-9]*)$")


class StateExpression:
    """An expression in x and z1..z_m evaluated on stacked state arrays."""

    def __init__(self, source: str, nvars: int):
        self.source = source
        self.tree = _expr.parse(source)
        self.nvars = nvars
        for name in _expr.variables(self.tree):
            if name == "x":
                continue
            m = _ZVAR.match(name)
            if not m or int(m.group(1)) > nvars:
                raise ArgumentError(f"variable {name!r} outside x, z1..z{nvars}")

    def _env(self, x, zs) -> dict:
        env = {f"z{i + 1}": z for i, z in enumerate(zs)}
        env["x"] = x
        return env

    def values(self, x, zs):
        """K at (x, zs[0], ..., zs[m-1]); entries floats or equal-shape arrays."""
        return _expr.evaluate(self.tree, self._env(x, zs))

    def partial(self, x, zs, slot: int):
        """dK/dz_slot (1-based) by a dual number in that slot.

        ``x`` is bound separately so that, for the z1 = x convention, callers
        pass the same array as zs[0] and perturb only the slot itself.
        """
        pt = x
        bindings = {}
        for i, z in enumerate(zs):
            bindings[f"z{i + 1}"] = Jet(pt, (z, 1.0 if i + 1 == slot else 0.0))
        bindings["x"] = Jet(pt, (x, 0.0))
        return _expr.eval_jet(self.tree, bindings, 1).derivs[1]


class NonlinearOperator:
    """K(z1, ..., z_{n+2}) with z1 = x and z_{i+2} = u^(i)."""

    def __init__(self, n: int, source: str):
        if n < 1:
            raise ArgumentError("nonlinear operator order must be >= 1")
        self.n = n
        self.K = StateExpression(source, n + 2)

    @property
    def source(self) -> str:
        return self.K.source

    def _slots(self, x, derivs):
        return [x] + list(derivs)

    def apply(self, u, x):
        d = u.jet(x, self.n).derivs
        return self.K.values(x, self._slots(x, d))

    def describe(self) -> dict:
        return {"n": self.n, "K": self.source, "convention": "z1 = x, z_{i+2} = u^(i)"}


def _segment(uj, vj, t):
    return [t * p + (1.0 - t) * q for p, q in zip(uj, vj)]


def linearize(Kop: NonlinearOperator, u, v, x) -> np.ndarray:
    """c_0..c_n at x (float or array): shape (n+1,) or (n+1, len(x))."""
    n = Kop.n
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    uj = [np.broadcast_to(d, xs.shape) for d in u.jet(xs, n).derivs]
    vj = [np.broadcast_to(d, xs.shape) for d in v.jet(xs, n).derivs]
    # stack the quadrature nodes along a leading axis and flatten
    T = QUAD_T[:, None]
    X = np.broadcast_to(xs, (GL_NODES, len(xs))).ravel()
    seg = [s.ravel() for s in (np.broadcast_to(z, (GL_NODES, len(xs))) for z in _segment(uj, vj, T))]
    slots = [X] + seg
    out = np.empty((n + 1, len(xs)))
    for i in range(n + 1):
        dk = np.broadcast_to(np.asarray(Kop.K.partial(X, slots, i + 2), dtype=float), X.shape)
        dk = dk.reshape(GL_NODES, len(xs))
        if i == n and np.any(dk <= 0):
            k = np.argwhere(dk <= 0)[0]
            raise MonotonicityError(
                f"dK/dz{n + 2} = {dk[k[0], k[1]]} <= 0 at x = {xs[k[1]]}, t = {QUAD_T[k[0]]}")
        out[i] = QUAD_W @ dk
    return out[:, 0] if scalar else out


def fundamental_identity_residual(Kop: NonlinearOperator, u, v, xs) -> float:
    """max |sum_i c_i w^(i) - (K[u] - K[v])| / (1 + max |K[u] - K[v]|)."""
    xs = np.asarray(xs, dtype=float)
    c = linearize(Kop, u, v, xs)
    wd = [p - q for p, q in zip(u.jet(xs, Kop.n).derivs, v.jet(xs, Kop.n).derivs)]
    lin = sum(c[i] * wd[i] for i in range(Kop.n + 1))
    diff = np.asarray(Kop.apply(u, xs), dtype=float) - np.asarray(Kop.apply(v, xs), dtype=float)
    return float(np.max(np.abs(lin - diff)) / (1.0 + np.max(np.abs(diff))))


def lipschitz_sample(fn, centers: np.ndarray, box_lo, box_hi, rng, pairs: int = 10_000,
                     scales: int = 8) -> dict:
    """Sampled Lipschitz ratios |fn(p) - fn(q)| / |p - q|_inf.

    ``fn`` maps an (m, N) array of points to N values.  Random pairs in the
    box give the sampled constant; pairs around ``centers`` at shrinking
    scales expose ratios that grow without bound (Hoelder-type behaviour).
    """
    lo = np.asarray(box_lo, dtype=float)
    hi = np.asarray(box_hi, dtype=float)
    width = hi - lo
    pad = 0.1 * width + 1e-3 * (1.0 + np.abs(lo) + np.abs(hi))
    lo, hi = lo - pad, hi + pad
    m = len(lo)
    p = lo[:, None] + (hi - lo)[:, None] * rng.random((m, pairs))
    q = lo[:, None] + (hi - lo)[:, None] * rng.random((m, pairs))
    dist = np.max(np.abs(p - q), axis=0)
    ratio = np.abs(np.asarray(fn(p)) - np.asarray(fn(q))) / np.where(dist > 0, dist, np.inf)
    sampled = float(np.max(ratio))
    cen = np.asarray(centers, dtype=float)
    if cen.shape[1] > 200:
        cen = cen[:, np.linspace(0, cen.shape[1] - 1, 200).astype(int)]
    growth = []
    for j in range(1, scales + 1):
        s = (hi - lo) * 10.0 ** (-j)
        dirs = rng.uniform(-1.0, 1.0, cen.shape)
        other = cen + s[:, None] * dirs
        d = np.max(np.abs(other - cen), axis=0)
        r = np.abs(np.asarray(fn(other)) - np.asarray(fn(cen))) / np.where(d > 0, d, np.inf)
        growth.append(float(np.max(r)))
    finite = bool(np.isfinite(sampled) and all(np.isfinite(growth)))
    first = max(growth[0], 1e-300)
    plausible = finite and growth[-1] <= 100.0 * max(first, sampled)
    return {"sampled": sampled, "by_scale": growth, "plausible": plausible, "pairs": pairs}


@dataclass
class SignPatternReport(VerdictReport):
    parity: str = ""
    left: str = ""
    right: str = ""
    delta: float = 0.0
    c_traces: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update({"parity": self.parity, "left": self.left, "right": self.right,
                  "delta": self.delta, "c_traces": self.c_traces})
        return d


def compare_contact(Kop: NonlinearOperator, u, v, x0: float, interval, grid: int = 4096,
                    tol: float = TOL_EQ, tol_sign: float = TOL_SIGN, rng=None) -> SignPatternReport:
    """Sign pattern of w = u - v around a contact point x0 of order n-1."""
    n = Kop.n
    a, b = float(interval[0]), float(interval[1])
    if not a < x0 < b:
        raise ArgumentError("contact point must lie inside the interval")
    h = (b - a) / grid
    rep = SignPatternReport("compare")
    rep.parity = "even" if n % 2 == 0 else "odd"

    xs = interior_grid((a, b), grid)
    ku = np.asarray(Kop.apply(u, xs), dtype=float) * np.ones_like(xs)
    kv = np.asarray(Kop.apply(v, xs), dtype=float) * np.ones_like(xs)
    excess = ku - kv
    k = int(np.argmax(excess))
    scale = 1.0 + float(max(np.max(np.abs(ku)), np.max(np.abs(kv))))
    rep.hypotheses.append(Item("inequality", bool(excess[k] <= tol * scale), float(excess[k]),
                               "K[u] - K[v] <= 0", witness=float(xs[k])))

    wj = [float(p - q) for p, q in zip(u.jet(x0, n - 1).derivs, v.jet(x0, n - 1).derivs)]
    rep.hypotheses.append(Item("contact", all(abs(d) <= tol for d in wj), wj,
                               f"|w^(k)(x0)| <= {tol} for k < {n}"))

    trace_x = np.linspace(max(a, x0 - 0.25 * (x0 - a)), min(b, x0 + 0.25 * (b - x0)), 9)
    c = linearize(Kop, u, v, trace_x)  # raises MonotonicityError when c_n <= 0
    rep.c_traces = {"x": trace_x.tolist(), "c": c.tolist(), "quadrature": f"gauss-legendre-{GL_NODES}"}
    cgrid = linearize(Kop, u, v, xs)
    ratio = [GridFunction(xs, cgrid[i] / cgrid[n], label=f"c{i}/c{n}") for i in range(n)]
    induced = LinearOperator(ratio, (float(xs[0]), float(xs[-1])), label="induced")
    w = _Difference(u, v)
    lw = np.asarray(induced.apply(w, xs), dtype=float)
    rep.trace["induced_operator"] = {"bound": induced.bound, "max_Lw": float(np.max(lw))}
    rep.trace["identity_residual"] = fundamental_identity_residual(Kop, u, v, xs)

    if rng is not None:
        ud = np.array([np.asarray(d, dtype=float) * np.ones_like(xs) for d in u.jet(xs, n).derivs])
        vd = np.array([np.asarray(d, dtype=float) * np.ones_like(xs) for d in v.jet(xs, n).derivs])
        both = np.hstack([np.vstack([xs, ud]), np.vstack([xs, vd])])
        lip = lipschitz_sample(lambda P: np.asarray(Kop.K.values(P[0], list(P)), dtype=float) * np.ones(P.shape[1]), both,
                               both.min(axis=1), both.max(axis=1), rng)
        rep.trace["lipschitz"] = lip

    span = min(x0 - a, b - x0)
    left_sign = -1.0 if n % 2 == 0 else 1.0   # u <= v (even) / u >= v (odd) left of x0
    wl = dyadic_radius(lambda t: left_sign * w.values(t) >= -tol_sign, x0, -1, span)
    wr = dyadic_radius(lambda t: -w.values(t) >= -tol_sign, x0, 1, span)
    rep.left = "u <= v" if n % 2 == 0 else "u >= v"
    rep.right = "u <= v"
    rep.delta = min(wl.rho, wr.rho)
    rep.conclusions.append(Item("left_pattern", wl.rho >= 8 * h, wl.rho, rep.left + " left of x0",
                                witness=wl.failure))
    rep.conclusions.append(Item("right_pattern", wr.rho >= 8 * h, wr.rho, rep.right + " right of x0",
                                witness=wr.failure))
    rep.measured = {"delta": rep.delta, "h": h, "x0": x0, "w_jet_at_x0": wj}
    return rep


class _Difference:
    """w = u - v as a minimal oracle."""

    def __init__(self, u, v):
        self.u, self.v = u, v

    def jet(self, x, order):
        return self.u.jet(x, order) - self.v.jet(x, order)

    def values(self, x):
        return np.asarray(self.u.values(x), dtype=float) - np.asarray(self.v.values(x), dtype=float)
