"""hopfkit command line: run problem files, the self-test and the gallery."""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HopfkitError, ParseError, ReductionError, ShootingError
from .expr import GRAMMAR_VERSION
from .gallery import gallery_cases, get_case
from .problem import PROBLEM_VERSION, ProblemError, load, locate, run_problem
from .report import UNDETERMINED, VerdictReport, jsonable
from .suites import DEFAULT_SEED, selftest, worker_count

INPUT_ERROR = 3


def environment(settings=None, h=None) -> dict:
    env = {
        "hopfkit": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "grammar": GRAMMAR_VERSION,
        "problem_version": PROBLEM_VERSION,
        "threads": worker_count(),
    }
    if settings is not None:
        env.update({"grid": settings.grid, "h": h, "tolerances": settings.tolerances, "seed": settings.seed,
                    "mode": settings.mode})
    return env


def dump(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _diagnostic(exc: Exception, raw: str | None = None) -> str:
    if isinstance(exc, ProblemError) and exc.parse_error is not None:
        pe = exc.parse_error
        lines = [f"error: {exc}", pe.caret()]
        where = locate(raw, exc.path, pe.position) if raw else None
        if where:
            lines.append(f"  in the problem file at line {where[0]}, column {where[1]}")
        return "\n".join(lines)
    if isinstance(exc, ParseError):
        return f"error: {exc}\n{exc.caret()}"
    return f"error: {exc}"


def _write_csv(trajs: dict, path: str) -> list[str]:
    written = []
    if not trajs:
        return written
    base = Path(path)
    for key, traj in trajs.items():
        target = base if len(trajs) == 1 else base.with_name(f"{base.stem}_{key}{base.suffix or '.csv'}")
        traj.to_csv(target)
        written.append(str(target))
    return written


def cmd_run(args) -> int:
    raw = None
    try:
        problem, raw = load(args.problem)
        outcome = run_problem(problem, grid=args.grid, step=args.step, tol=args.tol, mode=args.mode,
                              seed=args.seed)
        rep, settings, echoed, trajs = outcome.report, outcome.settings, outcome.problem, outcome.trajectories
    except (ReductionError, ShootingError) as exc:
        # numerics could not decide: report it rather than treating it as bad input
        rep = VerdictReport(problem.get("kind", "unknown"), forced_status=UNDETERMINED, notes=[str(exc)])
        settings, echoed, trajs = None, problem, {}
    except (HopfkitError, OSError) as exc:
        print(_diagnostic(exc, raw), file=sys.stderr)
        return INPUT_ERROR
    a, b = echoed["interval"]
    h = (b - a) / settings.grid if settings is not None else None
    doc = {
        "report": rep.to_dict(),
        "status": rep.status,
        "exit_code": rep.exit_code,
        "problem": echoed,
        "environment": environment(settings, h),
        "timestamp": _timestamp(),
    }
    if args.csv:
        doc["csv"] = _write_csv(trajs, args.csv)
    text = dump(doc)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if not args.quiet:
        print(text if not args.out else f"{rep.status} (report written to {args.out})")
    return rep.exit_code


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = selftest(seed=args.seed, gallery_only=args.gallery_only)
    elapsed = time.perf_counter() - t0
    ok = all(r.ok for r in results)
    if not args.quiet:
        for r in results:
            print(r.line())
            for f in r.failures[:5]:
                print("   ", json.dumps(jsonable(f), sort_keys=True))
        print(f"{'PASS' if ok else 'FAIL'} selftest: {sum(r.passed for r in results)}/"
              f"{sum(r.total for r in results)} in {elapsed:.1f} s")
    if args.out:
        doc = {"suites": [r.to_dict() for r in results], "ok": ok, "seed": args.seed,
               "environment": environment(), "timestamp": _timestamp(), "seconds": elapsed}
        Path(args.out).write_text(dump(doc) + "\n")
    return 0 if ok else 1


def cmd_gallery(args) -> int:
    if args.action == "list":
        for c in gallery_cases():
            print(f"{c.id:24s} {c.checker:20s} {c.expected:17s} {c.title}")
        return 0
    if not args.case:
        print("error: gallery run/export needs a case id (or 'all')", file=sys.stderr)
        return INPUT_ERROR
    try:
        cases = gallery_cases() if args.case == "all" else [get_case(args.case)]
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return INPUT_ERROR
    if args.action == "export":
        out = Path(args.dir)
        out.mkdir(parents=True, exist_ok=True)
        for c in cases:
            doc = {"version": PROBLEM_VERSION, "id": c.id, "title": c.title, **c.problem}
            path = out / f"{c.id}.json"
            path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
            if not args.quiet:
                print(path)
        return 0
    worst = 0
    for c in cases:
        rep = c.run()
        match = rep.status == c.expected
        if not args.quiet:
            print(f"{'PASS' if match else 'FAIL'} {c.id}: {rep.status} (expected {c.expected})")
            if len(cases) == 1:
                print(dump({"report": rep.to_dict(), "checks": c.self_check(), "case": c.id}))
        worst = max(worst, 0 if match else 1)
    return worst


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 3, not argparse's 2 (which means UNMET)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hopfkit", description="Numerical checks of boundary-point "
                                 "principles for linear and nonlinear ODE inequalities.")
    ap.add_argument("--version", action="version", version=f"hopfkit {__version__} ({GRAMMAR_VERSION})")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="check a JSON problem file")
    run.add_argument("problem", help="path to the problem file")
    run.add_argument("--grid", type=int, help="grid intervals N (default 4096)")
    run.add_argument("--step", type=float, help="step h; overrides --grid")
    run.add_argument("--tol", type=float, help="equality tolerance (default 1e-8)")
    run.add_argument("--mode", choices=["direct", "chain"], help="hopf_left mechanism")
    run.add_argument("--csv", help="write integrated trajectories to this CSV path")
    run.add_argument("--seed", type=int, help="seed for sampled diagnostics")
    run.add_argument("--out", help="write the JSON report here instead of stdout")
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    st = sub.add_parser("selftest", help="gallery plus seeded randomized suites")
    st.add_argument("--seed", type=int, default=DEFAULT_SEED)
    st.add_argument("--gallery-only", action="store_true")
    st.add_argument("--out", help="write a JSON summary here")
    st.add_argument("--quiet", action="store_true")
    st.set_defaults(func=cmd_selftest)

    gal = sub.add_parser("gallery", help="list, run or export the built-in cases")
    gal.add_argument("action", choices=["list", "run", "export"])
    gal.add_argument("case", nargs="?", help="case id or 'all'")
    gal.add_argument("--dir", default="gallery", help="export directory")
    gal.add_argument("--quiet", action="store_true")
    gal.set_defaults(func=cmd_gallery)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
