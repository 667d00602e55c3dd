"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 audit or acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .bias import auto_bias, claim_bound, compute_t, isolation_case, min_rounds, n_choose_2, select_strict_bias
from .board import Owner
from .errors import BiasInfeasible, GameError, InvalidConfig, Unsupported
from .experiments import (
    EXIT_CONFIG,
    EXIT_FAILED,
    EXIT_OK,
    OUTPUT_ENV,
    ExperimentSpec,
    analyze_transcript,
    default_output_dir,
    run_experiment,
    sweep_bias,
    write_curve,
)
from .solver import append_snapshot, solve_strict, thresholds


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _params(text: str | None) -> dict:
    if not text:
        return {}
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"parameters must be a JSON object: {exc}") from exc
    if not isinstance(value, dict):
        raise InvalidConfig("parameters must be a JSON object")
    return value


def cmd_simulate(args) -> int:
    spec = ExperimentSpec.load(args.spec)
    out = Path(args.out) if args.out else default_output_dir()
    code, outcomes = run_experiment(spec, out, jobs=args.jobs, log=None if args.quiet else print)
    failed = [o for o in outcomes if not o.ok]
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} runs ok; summary in {out / 'summary.csv'}")
    for o in failed:
        print(f"FAILED {o.transcript_path}: {o.error}", file=sys.stderr)
    return code


def cmd_sweep(args) -> int:
    if args.b_grid is not None and args.c_grid is not None:
        raise InvalidConfig("give --b-grid or --c-grid, not both")
    if args.c_grid is not None:
        grid = [auto_bias(args.n, c) for c in args.c_grid]
    else:
        grid = args.b_grid or []
    points = sweep_bias(args.n, args.family, args.avoider, args.enforcer, grid,
                        seeds=range(args.seed, args.seed + args.seeds), rule=args.rule,
                        avoider_params=_params(args.avoider_params),
                        enforcer_params=_params(args.enforcer_params))
    out = Path(args.out) if args.out else default_output_dir() / "curve.csv"
    write_curve(points, out)
    print(out.read_text(encoding="utf-8"), end="")
    return EXIT_FAILED if any(p.audit_failures for p in points) else EXIT_OK


def cmd_solve(args) -> int:
    first = Owner[args.first_player.upper()]
    if args.b is not None:
        winner = solve_strict(args.n, args.b, args.family, first)
        print("n,family,b,winner")
        print(f"{args.n},{args.family},{args.b},{winner.label}")
        return EXIT_OK
    res = thresholds(args.n, args.family, first)
    print("n,family,b,winner")
    for b, w in res.winner_by_bias.items():
        print(f"{args.n},{res.family},{b},{w.label}")
    print(json.dumps({"f_minus": res.f_minus, "f_plus": res.f_plus, "flips": res.flips}))
    snap = Path(args.snapshot) if args.snapshot else default_output_dir() / "solver_snapshots.jsonl"
    append_snapshot(res, snap)
    return EXIT_OK


def cmd_bias(args) -> int:
    n = args.n
    if n < 3:
        raise InvalidConfig("n must be at least 3")
    t = compute_t(n)
    b200 = auto_bias(n)
    out = {
        "n": n,
        "edges": n_choose_2(n),
        "n_ln_n": n * math.log(n),
        "t": t,
        "auto_200": b200,
        "min_rounds_auto_200": min_rounds(n, b200),
        "claim_bounds": {str(k): claim_bound(n, k) for k in range(2, t + 1)},
        "isolation_range": [math.ceil(49 * n / 100), math.floor(59 * n / 100)],
    }
    try:
        out["theorem2"] = select_strict_bias(n).as_dict()
    except BiasInfeasible as exc:
        out["theorem2"] = {"error": str(exc), "remainders": list(exc.remainders)}
    if args.b is not None:
        out["b"] = args.b
        out["isolation_case"] = isolation_case(n, args.b)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_analyze(args) -> int:
    report = analyze_transcript(args.transcript)
    print(json.dumps(report, indent=2, default=str))
    return EXIT_OK if report["audit_ok"] else EXIT_FAILED


def cmd_verify(args) -> int:
    from .verify import AcceptanceSuite, write_report

    suite = AcceptanceSuite(seeds=args.seeds, quick=args.quick, log=print if args.verbose else None)
    results = suite.run(only=args.only)
    for r in results:
        print(r.line())
    out = Path(args.out) if args.out else default_output_dir()
    path = write_report(results, out / "acceptance.json")
    print(f"report: {path}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="avoider-enforcer", description="Biased Avoider-Enforcer games on K_n.",
                epilog=f"Default output directory: ${OUTPUT_ENV} or ./results.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run an experiment spec file")
    s.add_argument("spec")
    s.add_argument("--out", help="output directory")
    s.add_argument("--jobs", type=int, default=None, help="parallel runs (default: CPU count)")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="play one matchup over a grid of biases")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--family", default="cycle")
    s.add_argument("--avoider", default="avoider.staged")
    s.add_argument("--enforcer", default="enforcer.random")
    s.add_argument("--avoider-params")
    s.add_argument("--enforcer-params")
    s.add_argument("--rule", choices=["strict", "monotone"], default="strict")
    s.add_argument("--b-grid", type=_ints, help="comma-separated biases")
    s.add_argument("--c-grid", type=_floats, help="comma-separated c for b = ceil(c n ln n)")
    s.add_argument("--seeds", type=int, default=1, help="games per grid point")
    s.add_argument("--seed", type=int, default=0, help="first seed")
    s.add_argument("--out", help="curve CSV path")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("solve", help="exact solution on tiny boards")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--b", type=int)
    s.add_argument("--first-player", choices=["avoider", "enforcer"], default="avoider")
    s.add_argument("--snapshot", help="snapshot file to append threshold results to")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("bias", help="bias arithmetic for one n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--b", type=int, help="also classify this bias for the isolation strategy")
    s.set_defaults(func=cmd_bias)

    s = sub.add_parser("analyze", help="audit a transcript and report graph statistics")
    s.add_argument("transcript")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--quick", action="store_true", help="small-scale smoke run")
    s.add_argument("--only", type=_ints, help="comma-separated criterion numbers")
    s.add_argument("--seeds", type=int, default=5)
    s.add_argument("--out", help="directory for acceptance.json")
    s.add_argument("--verbose", "-v", action="store_true")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GameError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
