"""JSON problem files: schema, validation and dispatch to the checkers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import expr as _expr
from .barriers import KINDS as BARRIER_KINDS
from .barriers import certify_sign, make_barrier
from .comparison import TOL_SIGN, NonlinearOperator, compare_contact
from .errors import ArgumentError, HopfkitError, ParseError
from .functions import ExprFunction
from .gallery import SharpExampleFunction
from .hopf import (
    AutonomousRHS,
    HopfProblem,
    boundary_dichotomy,
    check_equivalent_form,
    check_hopf_left,
    check_hopf_right,
    check_third_order_bounded,
    small_interval_max_principle,
    unique_continuation_probe,
    uniqueness_probe,
)
from .odeint import (
    TrajectoryFunction,
    integrate_linear_ivp,
    integrate_nonlinear_ivp,
    integrate_two_sided,
    solve_second_order_bvp,
)
from .operator import TOL_EQ, TOL_POS, LinearOperator
from .reduction import reduce_chain, verify_reduction_identity
from .report import Item, VerdictReport

PROBLEM_VERSION = "hopfkit-problem/1"
KINDS = ("hopf_left", "hopf_right", "equivalent", "max_principle", "third_order_bounded", "boundary",
         "compare", "reduce", "barrier", "uniqueness", "unique_continuation")
DEFAULT_GRID = 4096
DEFAULT_PROBES = ["1", "x", "x^2", "sin(x)", "exp(x)"]

_SOURCE = {
    "type": "object",
    "oneOf": [
        {"required": ["expr"], "properties": {"expr": {"type": "string"}}, "additionalProperties": False},
        {"required": ["sharp"], "additionalProperties": False,
         "properties": {"sharp": {"type": "object", "required": ["n", "alpha"],
                                  "properties": {"n": {"type": "integer", "minimum": 1},
                                                 "alpha": {"type": "number", "exclusiveMinimum": 0,
                                                           "exclusiveMaximum": 1}},
                                  "additionalProperties": False}}},
        {"required": ["ivp"], "additionalProperties": False,
         "properties": {"ivp": {
             "type": "object", "required": ["init"], "additionalProperties": False,
             "properties": {
                 "init": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                 "forcing": {"type": ["string", "number"]},
                 "rhs": {"type": "string"},
                 "direction": {"enum": ["forward", "backward", "two_sided"]},
                 "x0": {"type": "number"}}}}},
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hopfkit problem file",
    "type": "object",
    "required": ["kind", "order", "interval"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": PROBLEM_VERSION},
        "id": {"type": "string"},
        "title": {"type": "string"},
        "kind": {"enum": list(KINDS)},
        "order": {"type": "integer", "minimum": 1, "maximum": 10},
        "interval": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "coefficients": {"type": "array", "items": {"type": ["string", "number"]}},
        "bound": {"type": "number", "exclusiveMinimum": 0},
        "u": _SOURCE,
        "v": _SOURCE,
        "K": {"type": "string"},
        "rhs": {"type": "string"},
        "x0": {"type": "number"},
        "endpoint": {"enum": ["left", "right"]},
        "mode": {"enum": ["direct", "chain"]},
        "grid": {"type": "integer", "minimum": 16},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "tolerances": {"type": "object", "additionalProperties": False,
                       "properties": {"eq": {"type": "number", "exclusiveMinimum": 0},
                                      "pos": {"type": "number", "exclusiveMinimum": 0},
                                      "sign": {"type": "number", "exclusiveMinimum": 0}}},
        "seed": {"type": "integer", "minimum": 0},
        "nonneg_nbhd": {"type": "number", "exclusiveMinimum": 0},
        "max_order": {"type": "integer", "minimum": 0, "maximum": 12},
        "barrier": {"type": "object", "required": ["kind"], "additionalProperties": False,
                    "properties": {"kind": {"enum": list(BARRIER_KINDS)},
                                   "C": {"type": "number", "exclusiveMinimum": 0},
                                   "geometry": {"type": "array", "items": {"type": "number"}}}},
        "bvp": {"type": "object", "required": ["alpha", "beta"], "additionalProperties": False,
                "properties": {"alpha": {"type": "number"}, "beta": {"type": "number"},
                               "forcing": {"type": ["string", "number"]}}},
        "span": {"type": "number", "exclusiveMinimum": 0},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "probes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
}


class ProblemError(HopfkitError):
    """Invalid problem file; carries the JSON path and, for expressions, the parse error."""

    def __init__(self, message: str, path: str = "", parse_error: ParseError | None = None):
        self.path = path
        self.parse_error = parse_error
        super().__init__(f"{path}: {message}" if path else message)


def validate(problem: dict) -> None:
    try:
        jsonschema.validate(problem, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ProblemError(exc.message, path) from None


def _parse_at(path: str, source: str):
    try:
        return _expr.parse(source)
    except ParseError as exc:
        raise ProblemError(exc.reason + f" at position {exc.position}", path, exc) from None


@dataclass
class Settings:
    grid: int
    tol_eq: float
    tol_pos: float
    tol_sign: float
    mode: str
    seed: int

    @property
    def tolerances(self) -> dict:
        return {"eq": self.tol_eq, "pos": self.tol_pos, "sign": self.tol_sign}


@dataclass
class Outcome:
    report: VerdictReport
    settings: Settings
    problem: dict
    trajectories: dict = field(default_factory=dict)


def resolve(problem: dict, grid: int | None = None, step: float | None = None, tol: float | None = None,
            mode: str | None = None, seed: int | None = None) -> tuple[dict, Settings]:
    """Apply command-line overrides and defaults; return the echoed problem and settings."""
    p = json.loads(json.dumps(problem))
    validate(p)
    a, b = p["interval"]
    if not a < b:
        raise ProblemError("interval needs a < b", "interval")
    if grid is not None:
        p["grid"] = int(grid)
    if step is not None:
        p["step"] = float(step)
    if tol is not None:
        p.setdefault("tolerances", {})["eq"] = float(tol)
    if mode is not None:
        p["mode"] = mode
    if seed is not None:
        p["seed"] = int(seed)
    if "step" in p:
        p["grid"] = max(16, int(round((b - a) / p["step"])))
    p.setdefault("version", PROBLEM_VERSION)
    p.setdefault("grid", DEFAULT_GRID)
    p.setdefault("endpoint", "left")
    p.setdefault("mode", "direct")
    p.setdefault("seed", 0)
    t = p.setdefault("tolerances", {})
    t.setdefault("eq", TOL_EQ)
    t.setdefault("pos", TOL_POS)
    t.setdefault("sign", TOL_SIGN)
    s = Settings(p["grid"], t["eq"], t["pos"], t["sign"], p["mode"], p["seed"])
    return p, s


def _function(path: str, source) -> ExprFunction:
    source = source if isinstance(source, str) else repr(float(source))
    _parse_at(path, source)
    try:
        return ExprFunction(source)
    except ArgumentError as exc:
        raise ProblemError(str(exc), path) from None


def _operator(p: dict) -> LinearOperator:
    n = p["order"]
    coeffs = p.get("coefficients", ["0"] * n)
    if len(coeffs) != n:
        raise ProblemError(f"expected {n} coefficients a_0..a_{n - 1}, got {len(coeffs)}", "coefficients")
    oracles = [_function(f"coefficients/{i}", c) for i, c in enumerate(coeffs)]
    try:
        return LinearOperator(oracles, tuple(p["interval"]), bound=p.get("bound"))
    except ArgumentError as exc:
        raise ProblemError(str(exc), "coefficients") from None


def _source(p: dict, key: str, s: Settings, op: LinearOperator | None, trajs: dict):
    cfg = p.get(key)
    if cfg is None:
        raise ProblemError("required for this kind", key)
    a, b = p["interval"]
    h = (b - a) / s.grid
    if "expr" in cfg:
        return _function(f"{key}/expr", cfg["expr"])
    if "sharp" in cfg:
        return SharpExampleFunction(cfg["sharp"]["n"], cfg["sharp"]["alpha"])
    ivp = cfg["ivp"]
    init = ivp["init"]
    direction = ivp.get("direction", "forward")
    if "rhs" in ivp:
        n = len(init)
        _parse_at(f"{key}/ivp/rhs", ivp["rhs"])
        rhs = AutonomousRHS(ivp["rhs"], n)
        fn = lambda x, y: float(rhs.values(x, y))  # noqa: E731
        if direction == "two_sided":
            if "x0" not in ivp:
                raise ProblemError("two-sided integration needs x0", f"{key}/ivp")
            traj = integrate_two_sided(fn, init, ivp["x0"], a, b, h)
        elif direction == "backward":
            traj = integrate_nonlinear_ivp(fn, init, (b, a), h)
        else:
            traj = integrate_nonlinear_ivp(fn, init, (a, b), h)
    else:
        if op is None:
            raise ProblemError("a linear IVP needs the problem operator", f"{key}/ivp")
        if len(init) != op.order:
            raise ProblemError(f"init needs {op.order} entries", f"{key}/ivp/init")
        forcing = ivp.get("forcing", 0.0)
        if isinstance(forcing, str):
            forcing = _function(f"{key}/ivp/forcing", forcing)
        span = (b, a) if direction == "backward" else (a, b)
        traj = integrate_linear_ivp(op, forcing, init, h, span=span)
    trajs[key] = traj
    return TrajectoryFunction(traj, label=key)


def run_problem(problem: dict, **overrides) -> Outcome:
    p, s = resolve(problem, **overrides)
    kind = p["kind"]
    n = p["order"]
    a, b = p["interval"]
    trajs: dict = {}
    needs_op = kind not in ("compare", "boundary")
    op = _operator(p) if needs_op else None
    try:
        rep = _dispatch(kind, p, s, op, n, a, b, trajs)
    except ProblemError:
        raise
    except ArgumentError as exc:
        raise ProblemError(str(exc), kind) from None
    return Outcome(rep, s, p, trajs)


def _dispatch(kind, p, s, op, n, a, b, trajs) -> VerdictReport:
    def hp(u, endpoint=None):
        return HopfProblem(op, u, endpoint=endpoint or p["endpoint"], grid=s.grid, tol=s.tol_eq,
                           tol_pos=s.tol_pos, tol_sign=s.tol_sign)

    if kind == "hopf_left":
        return check_hopf_left(hp(_source(p, "u", s, op, trajs), "left"), mode=s.mode)
    if kind == "hopf_right":
        return check_hopf_right(hp(_source(p, "u", s, op, trajs), "right"))
    if kind == "equivalent":
        return check_equivalent_form(hp(_source(p, "u", s, op, trajs)))
    if kind == "third_order_bounded":
        return check_third_order_bounded(hp(_source(p, "u", s, op, trajs), "left"),
                                         p.get("nonneg_nbhd", 0.5 * (b - a)))
    if kind == "unique_continuation":
        return unique_continuation_probe(hp(_source(p, "u", s, op, trajs), "left"), p.get("max_order", n + 2))
    if kind == "max_principle":
        if "bvp" in p:
            bvp = p["bvp"]
            forcing = bvp.get("forcing", 0.0)
            if isinstance(forcing, str):
                forcing = _function("bvp/forcing", forcing)
            if op.order != 2:
                raise ProblemError("the boundary-value solver is second-order only", "bvp")
            traj = solve_second_order_bvp(op, forcing, a, b, bvp["alpha"], bvp["beta"], (b - a) / s.grid)
            trajs["u"] = traj
            g = TrajectoryFunction(traj, label="g")
        else:
            g = _source(p, "u", s, op, trajs)
        return small_interval_max_principle(op, g, a, b, tol=s.tol_eq, points=s.grid)
    if kind == "boundary":
        if "rhs" not in p:
            raise ProblemError("required for this kind", "rhs")
        _parse_at("rhs", p["rhs"])
        rhs = AutonomousRHS(p["rhs"], n)
        return boundary_dichotomy(rhs, _source(p, "u", s, None, trajs), (a, b), p["endpoint"], s.grid,
                                  s.tol_eq, s.tol_pos, s.seed)
    if kind == "compare":
        if "K" not in p or "x0" not in p:
            raise ProblemError("compare needs K and x0", "K" if "K" not in p else "x0")
        _parse_at("K", p["K"])
        Kop = NonlinearOperator(n, p["K"])
        u = _source(p, "u", s, None, trajs)
        v = _source(p, "v", s, None, trajs)
        return compare_contact(Kop, u, v, p["x0"], (a, b), grid=s.grid, tol=s.tol_eq, tol_sign=s.tol_sign,
                               rng=np.random.default_rng(s.seed))
    if kind == "reduce":
        return _reduce_report(p, s, op, trajs)
    if kind == "barrier":
        cfg = p.get("barrier")
        if cfg is None:
            raise ProblemError("required for this kind", "barrier")
        C = cfg.get("C", max(op.C, 0.01))
        geom = cfg.get("geometry")
        if geom is None:
            geom = a if cfg["kind"] == "small_interval_h" else (a, b)
        bar = make_barrier(cfg["kind"], C, geom)
        cert = certify_sign(bar, op)
        rep = VerdictReport("barrier")
        rep.hypotheses.append(Item("bound", C >= op.bound["sup"], C, "C >= sampled sup |a_i|"))
        for name, val in bar.slack.items():
            rep.conclusions.append(Item(f"slack_{name}", val > 0, val, "> 0"))
        rep.conclusions.append(Item("certificate", cert.passed, cert.margin, "sign * L[barrier] >= 1e-10",
                                    witness=cert.worst_point))
        rep.trace["barrier"] = bar.to_dict()
        return rep
    if kind == "uniqueness":
        return uniqueness_probe(op, span=p.get("span"), h=(p.get("span") or (b - a)) / s.grid,
                                eps=p.get("eps", 1e-3))
    raise ProblemError(f"unknown kind {kind!r}", "kind")


def _reduce_report(p, s, op, trajs) -> VerdictReport:
    a, b = p["interval"]
    h = (b - a) / s.grid
    probes = [_function(f"probes/{i}", src) for i, src in enumerate(p.get("probes", DEFAULT_PROBES))]
    rep = VerdictReport("reduce")
    if op.order < 3:
        raise ProblemError("reduction needs order >= 3", "order")
    u = _source(p, "u", s, op, trajs) if "u" in p else ExprFunction("0")
    chain = reduce_chain(op, u, h=h, tol=s.tol_eq, tol_pos=s.tol_pos)
    for i, st in enumerate(chain.steps):
        chk = verify_reduction_identity(st, probes, tol=1e-6)
        rep.conclusions.append(Item(f"identity_step_{i + 1}", chk.passed, chk.relative,
                                    "|L[u] - M[v]| <= 1e-6 (1 + max |L[u]|)", witness=chk.worst_point))
        trajs[f"f{i + 1}"] = st.f_traj
    rep.trace["chain"] = chain.summary()
    rep.measured = {"span": list(chain.span), "steps": len(chain.steps), "h": h}
    return rep


def locate(raw_text: str, path: str, position: int) -> tuple[int, int] | None:
    """1-based line and column in the problem file of character ``position`` of the string at ``path``."""
    try:
        doc = json.loads(raw_text)
    except ValueError:
        return None
    node = doc
    for part in path.split("/"):
        if isinstance(node, list):
            node = node[int(part)]
        elif isinstance(node, dict) and part in node:
            node = node[part]
        else:
            return None
    if not isinstance(node, str):
        return None
    needle = json.dumps(node)
    idx = raw_text.find(needle)
    if idx < 0:
        return None
    offset = idx + 1 + len(json.dumps(node[:position])) - 2
    line = raw_text.count("\n", 0, offset) + 1
    col = offset - (raw_text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def load(path) -> tuple[dict, str]:
    with open(path) as fh:
        raw = fh.read()
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None


