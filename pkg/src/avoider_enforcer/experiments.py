"""Batch experiments: spec files, runs, summaries and bias sweeps.

Spec file (JSON)::

    {
      "name": "forest-small",
      "memory_cap_gb": 4,
      "runs": [
        {"id": "staged-vs-random", "n": 20000, "bias": "auto-200",
         "rule": "strict", "first_player": "avoider",
         "avoider": "avoider.staged", "avoider_params": {},
         "enforcer": "enforcer.random", "enforcer_params": {},
         "family": "cycle", "seeds": [0, 1, 2]}
      ]
    }

``bias`` is an integer, ``"auto-<c>"`` (ceil(c n ln n)), ``{"c": c}`` (same),
``"theorem2"`` (the certified strict bias) or ``{"fraction": f}``
(floor(f n), f given as a number or a fraction string such as "57/100").
Instead of ``seeds`` a run may give ``"repeat": r`` (and optionally
``"seed": s``) meaning seeds s, s+1, ..., s+r-1.  ``census_scale`` (default
10) is the constant of the census audit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .analysis import PlayerGraph, forest_excess, girth, isolated_count
from .bias import auto_bias, n_choose_2, select_strict_bias
from .board import Owner
from .errors import BiasInfeasible, GameError, InvalidConfig, StrategyViolation, TheoremViolation
from .families import get_family
from .rules import audit_transcript, play_game
from .strategies import check_strategy, make_strategy
from .transcript import GameConfig, Rule, Transcript, read_transcript, write_transcript

__all__ = [
    "OUTPUT_ENV",
    "default_output_dir",
    "RunSpec",
    "ExperimentSpec",
    "SummaryRow",
    "resolve_bias",
    "estimate_memory",
    "summarize",
    "run_one",
    "run_experiment",
    "sweep_bias",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_FAILED",
]

OUTPUT_ENV = "AVOIDER_ENFORCER_OUTPUT"
EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2
GB = 1 << 30


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "results"))


def resolve_bias(n: int, bias) -> int:
    """Turn a spec ``bias`` entry into an integer bias."""
    if isinstance(bias, bool):
        raise InvalidConfig(f"bad bias {bias!r}")
    if isinstance(bias, int):
        b = bias
    elif isinstance(bias, str) and bias == "theorem2":
        try:
            b = select_strict_bias(n).b
        except BiasInfeasible as exc:
            raise InvalidConfig(f"theorem2 bias unavailable for n={n}: {exc}") from exc
    elif isinstance(bias, str) and re.fullmatch(r"auto-[0-9.]+", bias):
        b = auto_bias(n, float(bias[5:]))
    elif isinstance(bias, dict) and set(bias) == {"c"}:
        b = auto_bias(n, float(bias["c"]))
    elif isinstance(bias, dict) and set(bias) == {"fraction"}:
        b = math.floor(Fraction(str(bias["fraction"])) * n)
    else:
        raise InvalidConfig(f"bad bias {bias!r}")
    if b < 1:
        raise InvalidConfig(f"bias {bias!r} gives b={b} for n={n}")
    return b


def estimate_memory(n: int, b: int) -> int:
    """Rough peak bytes of one run: two packed boards plus a few move-sized arrays."""
    m = n_choose_2(n)
    return 2 * (m // 4) + 32 * min(b, m) + 256 * n


@dataclass
class RunSpec:
    id: str
    n: int
    bias: object
    avoider: str
    enforcer: str
    family: str = "cycle"
    rule: str = "strict"
    first_player: str = "avoider"
    avoider_params: dict = field(default_factory=dict)
    enforcer_params: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0])
    census_scale: float = 10.0

    @classmethod
    def from_json(cls, d: dict, index: int) -> RunSpec:
        d = dict(d)
        known = {f.name for f in fields(cls)} | {"repeat", "seed"}
        extra = sorted(set(d) - known)
        if extra:
            raise InvalidConfig(f"run {index}: unknown key(s) {', '.join(extra)}")
        for key in ("n", "bias", "avoider", "enforcer"):
            if key not in d:
                raise InvalidConfig(f"run {index}: missing {key!r}")
        repeat = d.pop("repeat", None)
        start = d.pop("seed", 0)
        if "seeds" not in d:
            d["seeds"] = list(range(start, start + (1 if repeat is None else int(repeat))))
        d.setdefault("id", f"run{index}")
        return cls(**d)

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidConfig(f"{self.id}: n must be an integer >= 2")
        check_strategy(self.avoider, "avoider", self.avoider_params)
        check_strategy(self.enforcer, "enforcer", self.enforcer_params)
        get_family(self.family)
        try:
            Rule(self.rule)
        except ValueError as exc:
            raise InvalidConfig(f"{self.id}: unknown rule {self.rule!r}") from exc
        if self.first_player not in ("avoider", "enforcer"):
            raise InvalidConfig(f"{self.id}: first_player must be avoider or enforcer")
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", self.id):
            raise InvalidConfig(f"bad run id {self.id!r}")
        resolve_bias(self.n, self.bias)
        for s in self.seeds:
            if not isinstance(s, int) or s < 0:
                raise InvalidConfig(f"{self.id}: seeds must be non-negative integers")

    def config(self, seed: int) -> GameConfig:
        return GameConfig(self.n, resolve_bias(self.n, self.bias), Rule(self.rule),
                          Owner[self.first_player.upper()], seed)


@dataclass
class ExperimentSpec:
    name: str
    runs: list[RunSpec]
    memory_cap_gb: float = 4.0

    @classmethod
    def from_json(cls, d: dict) -> ExperimentSpec:
        if not isinstance(d, dict) or "runs" not in d:
            raise InvalidConfig("spec must be an object with a 'runs' list")
        runs = [RunSpec.from_json(r, i) for i, r in enumerate(d["runs"])]
        ids = [r.id for r in runs]
        if len(set(ids)) != len(ids):
            raise InvalidConfig("run ids must be unique")
        spec = cls(name=d.get("name", "experiment"), runs=runs, memory_cap_gb=float(d.get("memory_cap_gb", 4.0)))
        spec.validate()
        return spec

    @classmethod
    def load(cls, path) -> ExperimentSpec:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidConfig(f"cannot read spec {path}: {exc}") from exc
        return cls.from_json(data)

    def validate(self) -> None:
        for run in self.runs:
            run.validate()
            need = estimate_memory(run.n, resolve_bias(run.n, run.bias))
            if need > self.memory_cap_gb * GB:
                raise InvalidConfig(
                    f"{run.id}: estimated {need / GB:.1f} GB exceeds the {self.memory_cap_gb:g} GB cap"
                )


@dataclass
class SummaryRow:
    run_id: str
    seed: int
    n: int
    b: int
    rule: str
    avoider: str
    enforcer: str
    family: str
    winner: str
    forest_excess: int
    isolated: int
    girth: float
    rounds: int
    avoider_edges: int
    census_violations: int
    audit_ok: bool
    peak_memory_mb: int
    wall_time: float = field(default=0.0, compare=False)

    # the CSV leaves out wall_time so summaries are reproducible byte for byte
    CSV_FIELDS = (
        "run_id", "seed", "n", "b", "rule", "avoider", "enforcer", "family", "winner",
        "forest_excess", "isolated", "girth", "rounds", "avoider_edges",
        "census_violations", "audit_ok", "peak_memory_mb",
    )

    def csv_row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in self.CSV_FIELDS}


def summarize(t: Transcript, run_id: str, census_scale: float = 10.0, wall_time: float = 0.0):
    """Audit ``t`` by replay and derive its summary row from the replayed board."""
    report = audit_transcript(t, census_scale=census_scale)
    board = report.board
    g = PlayerGraph.from_board(board)
    cfg = t.config
    row = SummaryRow(
        run_id=run_id,
        seed=cfg.seed,
        n=cfg.n,
        b=cfg.b,
        rule=cfg.rule.value,
        avoider=t.avoider_name,
        enforcer=t.enforcer_name,
        family=t.family,
        winner=t.winner.label if t.winner is not None else "none",
        forest_excess=forest_excess(g),
        isolated=isolated_count(board),
        girth=girth(g),
        rounds=len(t.rounds),
        avoider_edges=board.avoider_count,
        census_violations=report.census_violations,
        audit_ok=report.ok,
        peak_memory_mb=estimate_memory(cfg.n, cfg.b) >> 20,
        wall_time=round(wall_time, 3),
    )
    return row, report


def _live_matches(row: SummaryRow, t: Transcript) -> bool:
    live = t.final_board
    g = PlayerGraph.from_board(live)
    return (row.forest_excess, row.isolated, row.avoider_edges) == (
        forest_excess(g), isolated_count(live), live.avoider_count)


@dataclass
class RunOutcome:
    row: SummaryRow | None
    transcript_path: str
    ok: bool
    error: str | None = None


def run_one(run: RunSpec, seed: int, out_dir: Path) -> RunOutcome:
    run_id = f"{run.id}-s{seed}"
    path = out_dir / "transcripts" / f"{run_id}.jsonl"
    avoider = make_strategy(run.avoider, "avoider", run.avoider_params)
    enforcer = make_strategy(run.enforcer, "enforcer", run.enforcer_params)
    start = time.perf_counter()
    try:
        t = play_game(run.config(seed), avoider, enforcer, run.family)
    except StrategyViolation as exc:
        write_transcript(exc.transcript, path)
        return RunOutcome(None, str(path), False, str(exc))
    except (TheoremViolation, GameError) as exc:
        return RunOutcome(None, str(path), False, f"{type(exc).__name__}: {exc}")
    wall = time.perf_counter() - start
    write_transcript(t, path)
    row, report = summarize(t, run_id, run.census_scale, wall)
    ok = report.ok and _live_matches(row, t)
    error = None if ok else "; ".join(str(f) for f in report.failures) or "live and replayed summaries differ"
    return RunOutcome(row, str(path), ok, error)


def _run_job(args):
    run, seed, out_dir = args
    return run_one(run, seed, Path(out_dir))


def write_summary(rows: list[SummaryRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SummaryRow.CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row.csv_row())
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def run_experiment(spec: ExperimentSpec, out_dir=None, jobs: int | None = None, log=None) -> tuple[int, list[RunOutcome]]:
    """Run every (run, seed) pair; write transcripts, summary.csv and timings.csv.

    Returns the exit code (0 when every run completed and passed its audit,
    2 otherwise) and the per-run outcomes in spec order.
    """
    out_dir = Path(out_dir) if out_dir is not None else default_output_dir()
    (out_dir / "transcripts").mkdir(parents=True, exist_ok=True)
    jobs_list = [(run, seed, str(out_dir)) for run in spec.runs for seed in run.seeds]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_job, jobs_list))
    else:
        outcomes = []
        for job in jobs_list:
            outcomes.append(_run_job(job))
            if log:
                o = outcomes[-1]
                log(f"{Path(o.transcript_path).stem}: {'ok' if o.ok else 'FAILED ' + (o.error or '')}")
    rows = [o.row for o in outcomes if o.row is not None]
    write_summary(rows, out_dir / "summary.csv")
    with open(out_dir / "timings.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("run_id,wall_time\n")
        for r in rows:
            fh.write(f"{r.run_id},{r.wall_time}\n")
    code = EXIT_OK if all(o.ok for o in outcomes) else EXIT_FAILED
    return code, outcomes


@dataclass
class CurvePoint:
    b: int
    c: float
    runs: int
    avoider_wins: int
    win_rate: float
    excess_mean: float
    excess_max: int
    audit_failures: int


def sweep_bias(n: int, family: str, avoider: str, enforcer: str, grid, seeds=(0,),
               rule: str = "strict", avoider_params=None, enforcer_params=None) -> list[CurvePoint]:
    """Play the matchup at every bias in ``grid``; one curve point per bias."""
    check_strategy(avoider, "avoider", avoider_params)
    check_strategy(enforcer, "enforcer", enforcer_params)
    fam = get_family(family)
    points = []
    scale = n * math.log(n) if n > 1 else 1.0
    for b in grid:
        b = int(b)
        excess, wins, fails = [], 0, 0
        for seed in seeds:
            t = play_game(GameConfig(n, b, Rule(rule), seed=seed),
                          make_strategy(avoider, "avoider", avoider_params),
                          make_strategy(enforcer, "enforcer", enforcer_params), fam)
            row, report = summarize(t, f"b{b}-s{seed}")
            excess.append(row.forest_excess)
            wins += t.winner == Owner.AVOIDER
            fails += not report.ok
        k = len(excess)
        points.append(CurvePoint(
            b=b, c=round(b / scale, 6), runs=k, avoider_wins=wins,
            win_rate=round(wins / k, 6) if k else 0.0,
            excess_mean=round(sum(excess) / k, 6) if k else 0.0,
            excess_max=max(excess, default=0), audit_failures=fails,
        ))
    return points


def write_curve(points: list[CurvePoint], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [f.name for f in fields(CurvePoint)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names, lineterminator="\n")
        w.writeheader()
        for p in points:
            w.writerow(asdict(p))
    return path


def analyze_transcript(path) -> dict:
    """Audit a transcript file and report its summary and graph statistics."""
    from .analysis import graph_report

    t = read_transcript(path)
    row, report = summarize(t, Path(path).stem)
    g = PlayerGraph.from_board(report.board)
    out = {"summary": row.csv_row(), "audit_ok": report.ok,
           "failures": [str(f) for f in report.failures],
           "max_census_ratio": report.max_census_ratio}
    try:
        out["graph"] = graph_report(g)
    except GameError as exc:
        out["graph"] = {"error": str(exc)}
    return out
