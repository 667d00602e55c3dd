import csv
import json
import math

import pytest

from avoider_enforcer import experiments
from avoider_enforcer.bias import auto_bias, n_choose_2, select_strict_bias
from avoider_enforcer.errors import InvalidConfig
from avoider_enforcer.experiments import (
    EXIT_FAILED,
    EXIT_OK,
    ExperimentSpec,
    RunSpec,
    analyze_transcript,
    estimate_memory,
    resolve_bias,
    run_experiment,
    run_one,
    sweep_bias,
    write_curve,
)
from avoider_enforcer.rules import Strategy
from avoider_enforcer.transcript import read_transcript


def _spec(*runs, **extra):
    return ExperimentSpec.from_json({"name": "t", "runs": list(runs), **extra})


def test_resolve_bias_modes():
    n = 3000
    assert resolve_bias(n, 77) == 77
    assert resolve_bias(n, "auto-200") == auto_bias(n) == math.ceil(200 * n * math.log(n))
    assert resolve_bias(n, "auto-2.5") == math.ceil(2.5 * n * math.log(n))
    assert resolve_bias(n, {"c": 10}) == math.ceil(10 * n * math.log(n))
    assert resolve_bias(5000, {"fraction": "1/2"}) == 2500
    assert resolve_bias(5000, {"fraction": 0.57}) == 2850
    assert resolve_bias(10_000, "theorem2") == select_strict_bias(10_000).b


@pytest.mark.parametrize("bad", [0, -3, True, "auto-", "certified", {"c": 1, "x": 2}, [1]])
def test_resolve_bias_rejects(bad):
    with pytest.raises(InvalidConfig):
        resolve_bias(100, bad)


def test_certified_bias_infeasible_is_config_error():
    with pytest.raises(InvalidConfig):
        resolve_bias(3250, "theorem2")


def test_run_spec_defaults_and_repeat():
    run = RunSpec.from_json({"n": 10, "bias": 2, "avoider": "avoider.staged",
                             "enforcer": "enforcer.random", "repeat": 3, "seed": 5}, 0)
    assert run.seeds == [5, 6, 7] and run.id == "run0" and run.family == "cycle"


@pytest.mark.parametrize("patch", [
    {"avoider": "avoider.nope"},
    {"enforcer": "enforcer.nope"},
    {"family": "hamiltonian"},
    {"rule": "weird"},
    {"avoider_params": {"k": 3}},
    {"colour": "blue"},
    {"n": 1},
    {"seeds": [-1]},
    {"id": "has space"},
])
def test_spec_validation_errors(patch):
    run = {"n": 10, "bias": 2, "avoider": "avoider.staged", "enforcer": "enforcer.random", **patch}
    with pytest.raises(InvalidConfig):
        _spec(run)


def test_spec_requires_core_keys_and_unique_ids():
    with pytest.raises(InvalidConfig):
        _spec({"n": 10, "bias": 2, "avoider": "avoider.staged"})
    run = {"id": "x", "n": 10, "bias": 2, "avoider": "avoider.staged", "enforcer": "enforcer.random"}
    with pytest.raises(InvalidConfig):
        _spec(run, run)
    with pytest.raises(InvalidConfig):
        ExperimentSpec.from_json([run])


def test_memory_guardrail():
    run = {"n": 200_000, "bias": "auto-200", "avoider": "avoider.staged", "enforcer": "enforcer.random"}
    assert estimate_memory(200_000, 1) > 4 * (1 << 30)
    with pytest.raises(InvalidConfig, match="cap"):
        _spec(run)
    small = dict(run, n=2000)
    with pytest.raises(InvalidConfig):
        _spec(small, memory_cap_gb=0.0001)
    assert _spec(small).memory_cap_gb == 4.0


def test_load_reports_unreadable_files(tmp_path):
    with pytest.raises(InvalidConfig):
        ExperimentSpec.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidConfig):
        ExperimentSpec.load(bad)


SMALL = [
    {"id": "forest", "n": 60, "bias": 40, "avoider": "avoider.staged",
     "enforcer": "enforcer.random", "seeds": [0, 1]},
    {"id": "iso", "n": 200, "bias": {"fraction": "1/2"}, "avoider": "fp.random",
     "enforcer": "enforcer.isolation"},
    {"id": "np", "n": 40, "bias": 30, "rule": "monotone", "avoider": "avoider.random",
     "avoider_params": {"max_claim": 2}, "enforcer": "enforcer.nonplanar-mono",
     "family": "non-planar", "enforcer_params": {"k": 4, "C": 1.0}},
]


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_experiment_outputs_and_determinism(tmp_path):
    spec = _spec(*SMALL)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    code1, outcomes = run_experiment(spec, out1, jobs=1)
    code2, _ = run_experiment(spec, out2, jobs=2)
    assert code1 == code2 == EXIT_OK
    assert all(o.ok for o in outcomes) and len(outcomes) == 4
    names = sorted(p.name for p in (out1 / "transcripts").iterdir())
    assert names == ["forest-s0.jsonl", "forest-s1.jsonl", "iso-s0.jsonl", "np-s0.jsonl"]
    for name in names:
        assert (out1 / "transcripts" / name).read_bytes() == (out2 / "transcripts" / name).read_bytes()
    assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()
    rows = _read_rows(out1 / "summary.csv")
    assert [r["run_id"] for r in rows] == ["forest-s0", "forest-s1", "iso-s0", "np-s0"]
    assert "wall_time" not in rows[0]
    assert len(_read_rows(out1 / "timings.csv")) == 4
    iso = rows[2]
    assert int(iso["isolated"]) >= 200 // 9


def test_summary_equals_recomputation_from_transcript(tmp_path):
    spec = _spec(*SMALL[:2])
    run_experiment(spec, tmp_path, jobs=1)
    rows = {r["run_id"]: r for r in _read_rows(tmp_path / "summary.csv")}
    for run_id, row in rows.items():
        report = analyze_transcript(tmp_path / "transcripts" / f"{run_id}.jsonl")
        again = {k: str(v) for k, v in report["summary"].items()}
        assert again == row
        assert report["audit_ok"]


def test_output_dir_created_from_environment(tmp_path, monkeypatch):
    target = tmp_path / "deep" / "out"
    monkeypatch.setenv(experiments.OUTPUT_ENV, str(target))
    code, _ = run_experiment(_spec(SMALL[0]), jobs=1)
    assert code == EXIT_OK
    assert (target / "summary.csv").exists() and (target / "transcripts").is_dir()


class _Cheater(Strategy):
    name = "cheater"

    def move(self, board, request):
        if request.round_no < 3:
            return board.lowest_unclaimed(request.count)
        return [0] * request.count


def test_strategy_violation_keeps_partial_transcript(tmp_path, monkeypatch):
    real = experiments.make_strategy

    def fake(name, seat, params=None):
        return _Cheater() if seat == "enforcer" else real(name, seat, params)

    monkeypatch.setattr(experiments, "make_strategy", fake)
    code, outcomes = run_experiment(_spec(SMALL[0] | {"seeds": [0]}), tmp_path, jobs=1)
    assert code == EXIT_FAILED
    (o,) = outcomes
    assert not o.ok and o.row is None
    t = read_transcript(o.transcript_path)
    assert len(t.rounds) == 2 and not t.complete
    assert _read_rows(tmp_path / "summary.csv") == []


def test_census_mutation_is_caught(tmp_path):
    run = RunSpec.from_json({"n": 300, "bias": "auto-200", "avoider": "avoider.staged",
                             "enforcer": "enforcer.random", "census_scale": 1000.0}, 0)
    good = run_one(RunSpec.from_json({"n": 300, "bias": "auto-200", "avoider": "avoider.staged",
                                      "enforcer": "enforcer.random"}, 1), 0, tmp_path)
    bad = run_one(run, 0, tmp_path)
    assert good.ok and good.row.census_violations == 0
    assert not bad.ok and bad.row.census_violations > 0


def test_sweep_empty_grid():
    assert sweep_bias(50, "cycle", "avoider.staged", "enforcer.random", []) == []


def test_sweep_huge_bias_is_one_round(tmp_path):
    n = 30
    pts = sweep_bias(n, "cycle", "avoider.staged", "enforcer.random", [n_choose_2(n) + 5, 10], seeds=[0, 1])
    assert pts[0].runs == 2 and pts[0].avoider_wins == 2 and pts[0].excess_max == 0
    assert pts[1].b == 10 and pts[1].audit_failures == 0
    path = write_curve(pts, tmp_path / "c.csv")
    rows = _read_rows(path)
    assert [int(r["b"]) for r in rows] == [n_choose_2(n) + 5, 10]
    assert float(rows[1]["c"]) == round(10 / (n * math.log(n)), 6)


def test_sweep_rejects_unknown_names():
    with pytest.raises(InvalidConfig):
        sweep_bias(10, "cycle", "avoider.x", "enforcer.random", [1])
    with pytest.raises(InvalidConfig):
        sweep_bias(10, "cycle", "avoider.staged", "enforcer.random", [1], enforcer_params={"k": 3})


def test_analyze_reports_graph(tmp_path):
    run_experiment(_spec(SMALL[0] | {"seeds": [0]}), tmp_path, jobs=1)
    report = analyze_transcript(tmp_path / "transcripts" / "forest-s0.jsonl")
    assert report["audit_ok"] and report["failures"] == []
    assert json.dumps(report, default=str)
    assert report["max_census_ratio"] <= 1
