import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from avoider_enforcer.board import Owner
from avoider_enforcer.errors import InvalidConfig
from avoider_enforcer.transcript import (
    EdgeList,
    GameConfig,
    Round,
    Rule,
    Transcript,
    read_transcript,
    transcript_digest,
    write_transcript,
)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        GameConfig(1, 1)
    with pytest.raises(InvalidConfig):
        GameConfig(4, 0)
    with pytest.raises(InvalidConfig):
        GameConfig(4, 1, seed=-1)
    cfg = GameConfig(5, 2, "monotone", "enforcer", 7)
    assert cfg.rule == Rule.MONOTONE and cfg.first_player == Owner.ENFORCER
    assert GameConfig.from_json(cfg.to_json()) == cfg


@given(st.lists(st.integers(0, 2**40), unique=True, max_size=300), st.booleans())
def test_edge_list_round_trip(values, sort):
    el = EdgeList.of(values, sort=sort)
    want = sorted(values) if sort else values
    assert el.tolist() == want
    assert EdgeList.from_json(el.to_json()) == el
    assert el.first() == (want[0] if want else None)


def test_long_sorted_lists_are_compact():
    rng = np.random.default_rng(0)
    edges = np.sort(rng.choice(10**7, size=10**5, replace=False))
    el = EdgeList.of(edges, sort=True)
    packed = el.to_json()
    assert packed["enc"] == "delta8z"
    assert len(packed["data"]) + len(packed["wide"]) < 2 * len(edges)
    assert np.array_equal(el.to_array(), edges)
    shuffled = EdgeList.of(rng.permutation(edges))
    assert shuffled.to_json()["enc"] == "i64z"
    assert sorted(shuffled.tolist()) == edges.tolist()


def _sample_transcript():
    t = Transcript(GameConfig(4, 4), "a", "e", "cycle", "gen", avoider_params={"x": 1})
    t.rounds = [Round(EdgeList.of([0]), EdgeList.of([1, 2, 3, 4], sort=True)), Round(EdgeList.of([5]), EdgeList.of([]))]
    t.winner, t.complete = Owner.AVOIDER, True
    return t


def test_file_round_trip(tmp_path):
    t = _sample_transcript()
    path = write_transcript(t, tmp_path / "sub" / "t.jsonl")
    back = read_transcript(path)
    assert back.config == t.config and back.rounds == t.rounds
    assert back.winner == Owner.AVOIDER and back.complete
    assert back.avoider_params == {"x": 1}
    assert transcript_digest(back) == transcript_digest(t)
    assert path.read_bytes() == write_transcript(back, tmp_path / "again.jsonl").read_bytes()


def test_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.jsonl"
    p.write_text('{"hello": 1}\n')
    with pytest.raises(ValueError):
        read_transcript(p)
