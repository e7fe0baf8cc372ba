"""Executable Hopf-type statements: hypotheses and conclusions as verdict reports.

Every checker samples on a uniform grid with step h = span / grid.  A
one-sided "neighborhood" conclusion is reported as a detected dyadic radius
rho and only counts when rho >= 8h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .barriers import certify_sign, make_barrier
from .comparison import TOL_SIGN, StateExpression, lipschitz_sample
from .errors import ArgumentError, CapabilityError, ReductionError
from .functions import FunctionOracle, Quotient, ReflectedFunction
from .odeint import TrajectoryFunction, integrate_linear_ivp
from .operator import (
    TOL_EQ,
    TOL_POS,
    LinearOperator,
    detect_sequence_condition,
    dyadic_radius,
    endpoint_jet_check,
    interior_grid,
    verify_inequality,
)
from .reduction import reduce_chain
from .report import HOLDS, NOT_APPLICABLE, Item, VerdictReport

C_FLOOR = 0.01
DEFAULT_GRID = 4096
MIN_RADIUS_STEPS = 8


@dataclass
class HopfProblem:
    op: LinearOperator
    u: FunctionOracle
    endpoint: str = "left"
    grid: int = DEFAULT_GRID
    tol: float = TOL_EQ
    tol_pos: float = TOL_POS
    tol_sign: float = TOL_SIGN

    def __post_init__(self):
        if self.endpoint not in ("left", "right"):
            raise ArgumentError(f"endpoint must be 'left' or 'right', got {self.endpoint!r}")
        if self.grid < 16:
            raise ArgumentError("grid must have at least 16 intervals")

    @property
    def n(self) -> int:
        return self.op.order

    @property
    def span(self) -> float:
        a, b = self.op.interval
        return b - a

    @property
    def h(self) -> float:
        return self.span / self.grid

    @property
    def point(self) -> float:
        return self.op.interval[0] if self.endpoint == "left" else self.op.interval[1]

    def with_(self, **kw) -> "HopfProblem":
        d = dict(op=self.op, u=self.u, endpoint=self.endpoint, grid=self.grid, tol=self.tol,
                 tol_pos=self.tol_pos, tol_sign=self.tol_sign)
        d.update(kw)
        return HopfProblem(**d)


def reflect_problem(p: HopfProblem, pivot: float | None = None) -> HopfProblem:
    """Mirror about ``pivot`` (default: the problem's endpoint): u -> (-1)^n u(2p - x).

    With coefficients (-1)^(n-i) a_i(2p - x) the reflected operator applied
    to the reflected function equals L[u](2p - x), and the endpoint flips side.
    """
    piv = p.point if pivot is None else float(pivot)
    n = p.n
    u_r = ReflectedFunction(p.u, piv, (-1.0) ** n)
    side = "left" if p.endpoint == "right" else "right"
    return p.with_(op=p.op.reflect(piv), u=u_r, endpoint=side)


def _sequence_item(seq) -> Item:
    return Item("sequence", seq.passed, seq.status, "sign*u > tol_pos at the deepest resolvable rung",
                witness=seq.witnesses[-1] if seq.witnesses else None,
                note="dyadic ladder surrogate for a limit-point condition")


def _hypotheses(p: HopfProblem, rep: VerdictReport, side: int, seq_sign: float) -> None:
    x_e = p.point
    ineq = verify_inequality(p.op, p.u, interior_grid(p.op.interval, p.grid), p.tol)
    rep.hypotheses.append(Item("inequality", ineq.passed, ineq.max_violation, "L[u] <= 0",
                               witness=ineq.worst_point))
    ej = endpoint_jet_check(p.u, x_e, p.n, p.tol)
    rep.hypotheses.append(Item("zero_jet", ej.all_passed, ej.values[: p.n - 1],
                               f"|u^(k)| <= {p.tol} for k <= {p.n - 2}"))
    seq = detect_sequence_condition(p.u, x_e, side, seq_sign, p.span, p.tol_pos)
    rep.hypotheses.append(_sequence_item(seq))
    rep.measured["top_derivative"] = ej.top
    rep.trace["sequence"] = seq.to_dict()


def check_hopf_left(p: HopfProblem, mode: str = "direct") -> VerdictReport:
    """Zero jet through n-2, L[u] <= 0 and the sequence condition give u^(n-1)(a) > 0."""
    if p.endpoint != "left":
        raise ArgumentError("check_hopf_left needs a left-endpoint problem")
    if mode not in ("direct", "chain"):
        raise ArgumentError(f"mode must be 'direct' or 'chain', got {mode!r}")
    a = p.point
    rep = VerdictReport("hopf_left")
    _hypotheses(p, rep, 1, 1.0)
    top = rep.measured["top_derivative"]
    rep.conclusions.append(Item("top_derivative_positive", top > p.tol_pos, top,
                                f"u^({p.n - 1})(a) > 0", margin=top - p.tol_pos))
    scan = dyadic_radius(lambda xs: np.asarray(p.u.values(xs)) > 0, a, 1, p.span)
    need = MIN_RADIUS_STEPS * p.h
    rep.conclusions.append(Item("positive_neighborhood", scan.rho >= need, scan.rho,
                                f"u > 0 on (a, a + rho], rho >= {need:g}", witness=scan.failure))
    rep.measured.update({"rho": scan.rho, "h": p.h, "mode": mode})
    if mode == "chain":
        _chain_mechanism(p, rep)
    return rep


def _chain_mechanism(p: HopfProblem, rep: VerdictReport) -> None:
    a = p.point
    if p.n >= 3:
        try:
            chain = reduce_chain(p.op, p.u, h=p.h, tol=p.tol, tol_pos=p.tol_pos)
        except ReductionError as exc:
            rep.conclusions.append(Item("chain", None, str(exc), "reduction chain completes"))
            return
        rep.trace["chain"] = chain.summary()
        M, v = chain.final_operator, chain.final_v
        stage = chain.stages[-1]
        seq = stage.sequence
        lo, hi = chain.span
        slopes = [st.slope for st in chain.stages]
        same = all(abs(s - rep.measured["top_derivative"]) <= p.tol * (1 + abs(s)) for s in slopes)
        rep.conclusions.append(Item("chain_slope_transfer", same, slopes,
                                    "v^(k-1)(a) equals u^(n-1)(a) at every stage"))
    else:
        M, v = p.op, p.u
        lo, hi = p.op.interval
        seq = detect_sequence_condition(v, a, 1, 1.0, hi - lo, p.tol_pos)
    rep.conclusions.append(Item("chain_transfer_witness", seq.passed, seq.status,
                                "v > 0 along the ladder of the reduced problem",
                                witness=seq.witnesses[-1] if seq.witnesses else None))
    if not seq.passed:
        return
    C = max(M.C, C_FLOOR)
    bar = make_barrier("exp_subsolution", C, (lo, hi))
    delta = make_barrier("small_interval_h", C, lo).params["delta"]
    lam = bar.params["lambda"]
    picks = [(x, val) for x, val in seq.witnesses if x - a < delta and x - a >= p.h]
    if not picks:
        picks = [(x, val) for x, val in seq.witnesses if x - a < delta]
    if not picks:
        rep.conclusions.append(Item("subsolution", None, None, "witness inside (a, a + delta)"))
        return
    x0, v0 = picks[-1]
    eps = v0 / math.expm1(lam * (x0 - a))
    xs = np.linspace(a, x0, 65)
    g = np.asarray(v.values(xs), dtype=float) - eps * np.asarray(bar.values(xs), dtype=float)
    nodes = a + p.h * np.arange(0, int(math.floor((x0 - a) / p.h + 1e-9)) + 1)
    mg = (np.asarray(M.apply(v, nodes), dtype=float)
          - eps * np.asarray(M.apply(bar.oracle, nodes), dtype=float)) * np.ones_like(nodes)
    slope = float(v.jet(a, 1).derivs[1])
    bound = eps * lam
    rep.trace["subsolution"] = {"x_i0": x0, "epsilon": eps, "lambda": lam, "delta": delta, "C": C,
                                "min_g": float(g.min()), "max_Mg": float(mg.max()),
                                "slope_lower_bound": bound, "slope": slope}
    ok = (g.min() >= -p.tol and mg.max() <= p.tol * (1 + abs(mg).max()) and bound > 0
          and slope >= bound * (1 - 1e-9) - p.tol)
    rep.conclusions.append(Item("subsolution", bool(ok), slope, "v'(a) >= eps*lambda > 0",
                                margin=slope - bound, witness=x0))


def check_hopf_right(p: HopfProblem, route: str = "reflect") -> VerdictReport:
    """Right endpoint: u^(n-1)(b) < 0 and (-1)^n u > 0 near b.

    route="reflect" mirrors the problem to a left problem and maps the
    result back; route="direct" scans the original problem at b.
    """
    if p.endpoint != "right":
        raise ArgumentError("check_hopf_right needs a right-endpoint problem")
    n = p.n
    sgn = (-1.0) ** n
    if route == "reflect":
        left = check_hopf_left(reflect_problem(p))
        rep = VerdictReport("hopf_right", left.hypotheses, [], dict(left.measured), dict(left.trace),
                            list(left.notes))
        top = -left.measured["top_derivative"]
        rep.measured["top_derivative"] = top
        rho = left.measured["rho"]
        c = left.conclusion("positive_neighborhood")
        rep.conclusions.append(Item("top_derivative_negative", top < -p.tol_pos, top,
                                    f"u^({n - 1})(b) < 0", margin=-top - p.tol_pos))
        rep.conclusions.append(Item("signed_neighborhood", c.passed, rho,
                                    "(-1)^n u > 0 on [b - rho, b)",
                                    witness=None if c.witness is None else 2 * p.point - c.witness))
        rep.measured["route"] = route
        return rep
    if route != "direct":
        raise ArgumentError(f"route must be 'reflect' or 'direct', got {route!r}")
    b = p.point
    rep = VerdictReport("hopf_right")
    _hypotheses(p, rep, -1, sgn)
    top = rep.measured["top_derivative"]
    rep.conclusions.append(Item("top_derivative_negative", top < -p.tol_pos, top,
                                f"u^({n - 1})(b) < 0", margin=-top - p.tol_pos))
    scan = dyadic_radius(lambda xs: sgn * np.asarray(p.u.values(xs)) > 0, b, -1, p.span)
    need = MIN_RADIUS_STEPS * p.h
    rep.conclusions.append(Item("signed_neighborhood", scan.rho >= need, scan.rho,
                                "(-1)^n u > 0 on [b - rho, b)", witness=scan.failure))
    rep.measured.update({"rho": scan.rho, "h": p.h, "route": route})
    return rep


def check_equivalent_form(p: HopfProblem, side: str | None = None) -> VerdictReport:
    """Full zero jet through n-1 and L[u] <= 0 force u <= 0 near a; near b the sign is (-1)^(n+1)."""
    side = p.endpoint if side is None else side
    n = p.n
    a, b = p.op.interval
    x_e, direction = (a, 1) if side == "left" else (b, -1)
    want = -1.0 if side == "left" else (-1.0) ** (n + 1)
    rep = VerdictReport("equivalent_" + side)
    ineq = verify_inequality(p.op, p.u, interior_grid(p.op.interval, p.grid), p.tol)
    rep.hypotheses.append(Item("inequality", ineq.passed, ineq.max_violation, "L[u] <= 0",
                               witness=ineq.worst_point))
    ej = endpoint_jet_check(p.u, x_e, n + 1, p.tol)
    rep.hypotheses.append(Item("full_zero_jet", ej.all_passed, ej.values[:n],
                               f"|u^(k)| <= {p.tol} for k <= {n - 1}"))
    scan = dyadic_radius(lambda xs: want * np.asarray(p.u.values(xs)) >= -p.tol_sign,
                         x_e, direction, p.span)
    need = MIN_RADIUS_STEPS * p.h
    label = "u <= 0" if want < 0 else "u >= 0"
    rep.conclusions.append(Item("parity_sign", True if scan.rho >= need else None, scan.rho,
                                f"{label} on a one-sided neighborhood (rho >= {need:g})",
                                witness=scan.failure))
    rep.measured = {"rho": scan.rho, "h": p.h, "required_sign": want, "side": side}
    return rep


def small_interval_max_principle(op2: LinearOperator, g: FunctionOracle, c: float, d: float,
                                 tol: float = TOL_EQ, points: int = 4096) -> VerdictReport:
    """Second order, L[g] <= 0, g(c), g(d) >= 0 and d - c < delta(C) give g >= 0 on [c, d]."""
    rep = VerdictReport("max_principle")
    if op2.order != 2:
        rep.forced_status = NOT_APPLICABLE
        rep.notes.append(f"the small-interval principle is second-order only; got order {op2.order} "
                         "(see the gallery counterexamples)")
        return rep
    if not d > c:
        raise ArgumentError("max principle needs d > c")
    ineq = verify_inequality(op2, g, interior_grid((c, d), points), tol)
    rep.hypotheses.append(Item("inequality", ineq.passed, ineq.max_violation, "L[g] <= 0",
                               witness=ineq.worst_point))
    gc, gd = float(g.values(c)), float(g.values(d))
    rep.hypotheses.append(Item("left_boundary", gc >= -tol, gc, "g(c) >= 0"))
    rep.hypotheses.append(Item("right_boundary", gd >= -tol, gd, "g(d) >= 0"))
    C = max(op2.C, C_FLOOR)
    bar = make_barrier("small_interval_h", C, c)
    delta = bar.params["delta"]
    rep.measured = {"C": C, "delta": delta, "length": d - c}
    rep.trace["barrier"] = bar.to_dict()
    if any(h.passed is False for h in rep.hypotheses):
        return rep
    if d - c >= delta:
        rep.forced_status = NOT_APPLICABLE
        rep.notes.append(f"interval length {d - c} is not below delta(C) = {delta}")
        return rep
    xs = np.linspace(c, d, points + 1)
    gv = np.asarray(g.values(xs), dtype=float)
    k = int(np.argmin(gv))
    rep.conclusions.append(Item("nonnegative", bool(gv[k] >= -tol), float(gv[k]), "min g >= 0",
                                witness=float(xs[k])))
    rep.measured["min_g"] = float(gv[k])
    return rep


def check_third_order_bounded(p: HopfProblem, nonneg_nbhd: float, points: int = 1024) -> VerdictReport:
    """Order 3, bounded coefficients, u >= 0 near a: u''(a) > 0 through the quotient z = u/m."""
    if p.n != 3:
        raise ArgumentError("check_third_order_bounded handles third-order operators only")
    a, b = p.op.interval
    rep = VerdictReport("third_order_bounded")
    ineq = verify_inequality(p.op, p.u, interior_grid(p.op.interval, p.grid), p.tol)
    rep.hypotheses.append(Item("inequality", ineq.passed, ineq.max_violation, "L[u] <= 0",
                               witness=ineq.worst_point))
    ej = endpoint_jet_check(p.u, a, 3, p.tol)
    rep.hypotheses.append(Item("zero_jet", ej.all_passed, ej.values[:2], "u(a) = u'(a) = 0"))
    xs_nb = np.linspace(a, a + nonneg_nbhd, points + 1)[1:]
    un = np.asarray(p.u.values(xs_nb), dtype=float)
    rep.hypotheses.append(Item("nonnegative_near_a", bool(un.min() >= -p.tol), float(un.min()),
                               f"u >= 0 on (a, a + {nonneg_nbhd}]"))
    seq = detect_sequence_condition(p.u, a, 1, 1.0, p.span, p.tol_pos)
    rep.hypotheses.append(_sequence_item(seq))

    C = max(p.op.C, C_FLOOR)
    m = make_barrier("third_order_m", C, (a, b))
    cert = certify_sign(m, p.op)
    rep.trace["barrier"] = m.to_dict()
    eta = m.params["eta"]
    xs = np.linspace(a, a + eta, points + 1)
    mj = m.oracle.jet(xs, 3).derivs
    a0, a1, a2 = (np.asarray(v, dtype=float) * np.ones_like(xs) for v in p.op.coeff_values(xs))
    lm = mj[3] + a2 * mj[2] + a1 * mj[1] + a0 * mj[0]
    s2 = 3 * mj[1] / mj[0] + a2
    s1 = (3 * mj[2] + 2 * a2 * mj[1]) / mj[0] + a1
    s0 = lm / mj[0]
    z = Quotient(p.u, m.oracle)
    zj = z.jet(xs, 3).derivs
    za = [float(d) for d in z.jet(a, 2).derivs]
    # v = z' satisfies v'' + s2 v' + s1 v = L[u]/m - s0 z <= 0 where z >= 0
    mv = zj[3] + s2 * zj[2] + s1 * zj[1]
    lu = np.asarray(p.op.apply(p.u, xs), dtype=float) * np.ones_like(xs)
    u2 = ej.top
    rep.measured = {"u2_at_a": u2, "z_jet_at_a": za, "m_at_a": float(mj[0][0]), "C": C,
                    "starred_bound": float(max(np.abs(s0).max(), np.abs(s1).max(), np.abs(s2).max()))}
    rep.conclusions.append(Item("barrier_certificate", cert.passed, cert.margin, "L[m] > 0 on [a, a+eta]"))
    rep.conclusions.append(Item("a0_star_positive", bool(s0.min() > 0), float(s0.min()), "a0* > 0"))
    rep.conclusions.append(Item("quotient_start", abs(za[0]) <= p.tol and abs(za[1]) <= p.tol, za[:2],
                                "z(a) = z'(a) = 0"))
    resid = mv + s0 * zj[0] - lu / mj[0]
    rep.conclusions.append(Item("reduced_identity", bool(np.max(np.abs(resid)) <= 1e-8 * (1 + np.abs(lu).max())),
                                float(np.max(np.abs(resid))), "z''' + a2* z'' + a1* z' + a0* z = L[u]/m"))
    qid = abs(u2 - float(mj[0][0]) * za[2])
    rep.conclusions.append(Item("quotient_identity", qid <= 1e-8, qid, "u''(a) = m(a) z''(a)"))
    rep.conclusions.append(Item("u2_positive", u2 > p.tol_pos, u2, "u''(a) > 0", margin=u2 - p.tol_pos))
    return rep


class AutonomousRHS:
    """f(z1, ..., zn) with z1 = u, ..., zn = u^(n-1); x may also appear."""

    def __init__(self, source: str, n: int):
        self.n = n
        self.expr = StateExpression(source, n)

    @property
    def source(self) -> str:
        return self.expr.source

    def values(self, x, states):
        return self.expr.values(x, list(states))

    def reflected(self, pivot: float) -> "AutonomousRHS":
        return _ReflectedRHS(self, pivot)


class _ReflectedRHS(AutonomousRHS):
    """(-1)^n f(z1, -z2, ..., (-1)^(n-1) zn) at the mirrored point."""

    def __init__(self, base: AutonomousRHS, pivot: float):
        self.base, self.n, self.pivot = base, base.n, pivot
        self.expr = base.expr

    @property
    def source(self) -> str:
        return f"reflected({self.base.source})"

    def values(self, x, states):
        flipped = [((-1) ** i) * s for i, s in enumerate(states)]
        return ((-1) ** self.n) * self.base.values(2 * self.pivot - np.asarray(x), flipped)


def boundary_dichotomy(rhs: AutonomousRHS, u: FunctionOracle, interval, endpoint: str = "left",
                       grid: int = DEFAULT_GRID, tol: float = TOL_EQ, tol_pos: float = TOL_POS,
                       seed: int = 0) -> VerdictReport:
    """u^(n) = f(u, ..., u^(n-1)), zero jet through n-2, u > 0 one-sided: classify the branch."""
    n = rhs.n
    a, b = float(interval[0]), float(interval[1])
    if endpoint == "right":
        u_l = ReflectedFunction(u, b, 1.0)
        rep = boundary_dichotomy(rhs.reflected(b), u_l, (b, 2 * b - a), "left", grid, tol, tol_pos, seed)
        rep.checker = "boundary_right"
        top1, top2 = rep.measured["u_n_minus_1"], rep.measured["u_n"]
        rep.measured["u_n_minus_1"] = (-1) ** (n - 1) * top1
        rep.measured["u_n"] = (-1) ** n * top2
        rep.measured["reflected_branch_values"] = [top1, top2]
        rep.notes.append("right endpoint mapped to the left by x -> 2b - x")
        return rep
    h = (b - a) / grid
    rep = VerdictReport("boundary_left")
    xs = interior_grid((a, b), grid)
    d = u.jet(xs, n).derivs
    fval = np.asarray(rhs.values(xs, d[:n]), dtype=float) * np.ones_like(xs)
    res = np.abs(np.asarray(d[n]) - fval)
    k = int(np.argmax(res))
    scale = 1.0 + float(np.max(np.abs(d[n])))
    rep.hypotheses.append(Item("equation", bool(res[k] <= tol * scale), float(res[k]),
                               "u^(n) = f(u, ..., u^(n-1))", witness=float(xs[k])))
    ej = endpoint_jet_check(u, a, n + 1, tol)
    rep.hypotheses.append(Item("zero_jet", all(ej.passed[: n - 1]), ej.values[: n - 1],
                               f"|u^(k)(a)| <= {tol} for k <= {n - 2}"))
    pos = dyadic_radius(lambda t: np.asarray(u.values(t)) > 0, a, 1, b - a)
    rep.hypotheses.append(Item("one_sided_positive", pos.rho >= MIN_RADIUS_STEPS * h, pos.rho,
                               "u > 0 on (a, a + rho]", witness=pos.failure))

    states = np.array([np.asarray(v, dtype=float) * np.ones_like(xs) for v in d[:n]])
    rng = np.random.default_rng(seed)
    lip = lipschitz_sample(lambda P: np.asarray(rhs.values(a, list(P)), dtype=float) * np.ones(P.shape[1]),
                           states, states.min(axis=1), states.max(axis=1), rng)
    rep.trace["lipschitz"] = lip
    if not lip["plausible"]:
        rep.notes.append("sampled difference quotients of f grow without bound near the data: "
                         "f does not look Lipschitz, so the dichotomy is not guaranteed")

    f0 = float(np.asarray(rhs.values(a, [0.0] * n), dtype=float))
    case = 1 if f0 <= 0 else 2
    t1, t2 = ej.values[n - 1], ej.values[n]
    if t1 > tol_pos:
        branch = 1
    elif abs(t1) <= tol and t2 > tol_pos:
        branch = 2
    else:
        branch = 0
    rep.measured = {"u_n_minus_1": t1, "u_n": t2, "f_at_zero": f0, "case": case, "branch": branch,
                    "lipschitz_sampled": lip["sampled"], "h": h}
    rep.conclusions.append(Item("branch", branch in (1, 2), branch,
                                "u^(n-1)(a) > 0, or u^(n-1)(a) = 0 and u^(n)(a) > 0"))
    if case == 1:
        rep.conclusions.append(Item("case_consistency", branch == 1, case, "f(0) <= 0 gives branch 1"))
    mono = dyadic_radius(lambda t: np.asarray(u.jet(t, 1).derivs[1]) * np.ones_like(t) > 0, a, 1, b - a)
    rep.conclusions.append(Item("monotone", mono.rho >= MIN_RADIUS_STEPS * h, mono.rho,
                                "u' > 0 near the endpoint", witness=mono.failure))
    return rep


def uniqueness_probe(op: LinearOperator, span: float | None = None, h: float | None = None,
                     eps: float = 1e-3) -> VerdictReport:
    """Zero data and zero forcing give u = 0; a control run with u^(n-1)(a) = eps does not."""
    a, b = op.interval
    span = (b - a) if span is None else span
    h = span / DEFAULT_GRID if h is None else h
    n = op.order
    rep = VerdictReport("uniqueness")
    zero = integrate_linear_ivp(op, None, [0.0] * n, h, span=(a, a + span))
    sup = float(np.max(np.abs(zero.states)))
    rep.conclusions.append(Item("zero_solution", sup <= 1e-12, sup, "sup |u| <= 1e-12"))
    ctrl = integrate_linear_ivp(op, None, [0.0] * (n - 1) + [eps], h, span=(a, a + span))
    peak = float(np.max(np.abs(ctrl.u)))
    need = eps * span ** (n - 1) / (2 * math.factorial(n - 1))
    rep.conclusions.append(Item("control_nonzero", peak >= need, peak, f"max |u| >= {need:g}",
                                margin=peak - need))
    rep.measured = {"sup_zero": sup, "control_peak": peak, "threshold": need, "h": h, "span": span}
    return rep


def unique_continuation_probe(p: HopfProblem, max_order: int) -> VerdictReport:
    """Under the left-endpoint hypotheses the first nonvanishing derivative at a is u^(n-1)."""
    n = p.n
    if isinstance(p.u, TrajectoryFunction) and max_order > n - 1:
        raise CapabilityError("trajectory-backed functions only supply derivatives through order n-1 "
                              "at the endpoint for this probe")
    a = p.point
    rep = VerdictReport("unique_continuation")
    _hypotheses(p, rep, 1, 1.0)
    vals = [float(d) for d in p.u.jet(a, max_order).derivs]
    first = next((k for k, v in enumerate(vals) if abs(v) > p.tol_pos), None)
    rep.measured = {"jet_at_a": vals, "first_nonvanishing": first,
                    "value": None if first is None else vals[first]}
    rep.conclusions.append(Item("first_nonvanishing_order", first == n - 1, first,
                                f"first nonvanishing order is {n - 1}"))
    return rep


__all__ = [
    "HopfProblem", "reflect_problem", "check_hopf_left", "check_hopf_right", "check_equivalent_form",
    "small_interval_max_principle", "check_third_order_bounded", "AutonomousRHS",
    "boundary_dichotomy", "uniqueness_probe", "unique_continuation_probe", "HOLDS",
]
