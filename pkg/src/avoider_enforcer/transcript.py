"""Game transcripts and their JSON-lines serialisation.

A transcript file is UTF-8 JSON lines:

* a header object (``"format"``, config, strategy names and parameters,
  loss family, random generator id);
* one object per round, ``{"round": r, "avoider": ..., "enforcer": ...}``;
* a result object ``{"result": {...}}``.

Edge lists of up to 32 entries are written as plain JSON arrays.  Longer
lists use a compact encoding: Enforcer moves are stored sorted (their order
carries no meaning) as byte deltas, ``{"enc": "delta8z", "count": m, "data":
..., "wide": ...}`` where ``data`` is zlib+base64 of ``min(delta, 255)`` per
edge and ``wide`` holds the deltas >= 255 as little-endian uint64.  Long
unsorted lists use ``"i64z"`` (zlib+base64 of little-endian int64).  Avoider
moves always keep their order.
"""

from __future__ import annotations

import base64
import hashlib
import json
import zlib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .board import Owner

__all__ = [
    "Rule",
    "GameConfig",
    "EdgeList",
    "Round",
    "Transcript",
    "write_transcript",
    "read_transcript",
    "transcript_lines",
    "transcript_digest",
    "FORMAT",
]

FORMAT = "avoider-enforcer-transcript/1"
INLINE_LIMIT = 32
_ZLEVEL = 1


class Rule(str, Enum):
    STRICT = "strict"
    MONOTONE = "monotone"


@dataclass(frozen=True)
class GameConfig:
    n: int
    b: int
    rule: Rule = Rule.STRICT
    first_player: Owner = Owner.AVOIDER
    seed: int = 0

    def __post_init__(self):
        from .errors import InvalidConfig

        object.__setattr__(self, "rule", Rule(self.rule))
        fp = self.first_player
        if isinstance(fp, str):
            fp = Owner[fp.upper()]
        object.__setattr__(self, "first_player", Owner(fp))
        if self.n < 2:
            raise InvalidConfig(f"n must be at least 2, got {self.n}")
        if self.b < 1:
            raise InvalidConfig(f"bias must be positive, got {self.b}")
        if self.first_player == Owner.UNCLAIMED:
            raise InvalidConfig("first player must be avoider or enforcer")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must fit in 64 bits")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "b": self.b,
            "rule": self.rule.value,
            "first_player": self.first_player.label,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, d: dict) -> GameConfig:
        return cls(d["n"], d["b"], Rule(d["rule"]), Owner[d["first_player"].upper()], d["seed"])


def _b64(raw: bytes) -> str:
    return base64.b64encode(zlib.compress(raw, _ZLEVEL)).decode("ascii")


def _unb64(text: str) -> bytes:
    return zlib.decompress(base64.b64decode(text))


class EdgeList:
    """An immutable list of edge indices, compressed when long."""

    __slots__ = ("_inline", "_packed", "_count")

    def __init__(self, inline=None, packed=None, count=0):
        self._inline = inline
        self._packed = packed
        self._count = count

    @classmethod
    def of(cls, edges, sort: bool = False) -> EdgeList:
        arr = np.asarray(edges, dtype=np.int64).reshape(-1)
        if sort and not _is_increasing(arr):
            arr = np.sort(arr)
        if len(arr) <= INLINE_LIMIT:
            return cls(inline=tuple(arr.tolist()), count=len(arr))
        return cls(packed=_encode(arr), count=len(arr))

    def __len__(self) -> int:
        return self._count

    def to_array(self) -> np.ndarray:
        if self._inline is not None:
            return np.array(self._inline, dtype=np.int64)
        return _decode(self._packed)

    def tolist(self) -> list[int]:
        return list(self._inline) if self._inline is not None else self.to_array().tolist()

    def first(self) -> int | None:
        if not self._count:
            return None
        return self._inline[0] if self._inline is not None else int(self.to_array()[0])

    def to_json(self):
        return list(self._inline) if self._inline is not None else self._packed

    @classmethod
    def from_json(cls, obj) -> EdgeList:
        if isinstance(obj, list):
            return cls(inline=tuple(int(x) for x in obj), count=len(obj))
        return cls(packed=dict(obj), count=int(obj["count"]))

    def __eq__(self, other):
        if not isinstance(other, EdgeList):
            return NotImplemented
        return len(self) == len(other) and np.array_equal(self.to_array(), other.to_array())

    def __repr__(self):
        return f"EdgeList(count={self._count})"


def _is_increasing(arr: np.ndarray) -> bool:
    return bool(np.all(arr[1:] > arr[:-1]))


def _encode(arr: np.ndarray) -> dict:
    if _is_increasing(arr) and arr[0] >= 0:
        deltas = np.empty_like(arr)
        deltas[0] = arr[0]
        np.subtract(arr[1:], arr[:-1], out=deltas[1:])
        wide = deltas[deltas >= 255].astype("<u8")
        np.minimum(deltas, 255, out=deltas)
        small = deltas.astype(np.uint8)
        del deltas
        return {
            "enc": "delta8z",
            "count": int(len(arr)),
            "data": _b64(small.tobytes()),
            "wide": _b64(wide.tobytes()),
        }
    return {"enc": "i64z", "count": int(len(arr)), "data": _b64(arr.astype("<i8").tobytes())}


def _decode(obj: dict) -> np.ndarray:
    if obj["enc"] == "delta8z":
        deltas = np.frombuffer(_unb64(obj["data"]), dtype=np.uint8).astype(np.int64)
        wide = np.frombuffer(_unb64(obj["wide"]), dtype="<u8").astype(np.int64)
        deltas[deltas == 255] = wide
        out = np.cumsum(deltas, out=deltas)
    elif obj["enc"] == "i64z":
        out = np.frombuffer(_unb64(obj["data"]), dtype="<i8").astype(np.int64)
    else:
        raise ValueError(f"unknown edge-list encoding {obj['enc']!r}")
    if len(out) != obj["count"]:
        raise ValueError("edge-list length mismatch")
    return out


@dataclass
class Round:
    avoider: EdgeList
    enforcer: EdgeList

    def edges_of(self, player: Owner) -> EdgeList:
        return self.avoider if player == Owner.AVOIDER else self.enforcer


@dataclass
class Transcript:
    config: GameConfig
    avoider_name: str
    enforcer_name: str
    family: str
    generator: str
    rounds: list[Round] = field(default_factory=list)
    winner: Owner | None = None
    certificate: dict | None = None
    complete: bool = False
    avoider_params: dict = field(default_factory=dict)
    enforcer_params: dict = field(default_factory=dict)
    # final board of a live game; never serialised
    final_board: object = field(default=None, repr=False, compare=False)

    def header(self) -> dict:
        return {
            "format": FORMAT,
            "config": self.config.to_json(),
            "avoider": self.avoider_name,
            "avoider_params": self.avoider_params,
            "enforcer": self.enforcer_name,
            "enforcer_params": self.enforcer_params,
            "family": self.family,
            "generator": self.generator,
        }

    def result(self) -> dict:
        return {
            "winner": self.winner.label if self.winner is not None else None,
            "certificate": self.certificate,
            "complete": self.complete,
            "rounds": len(self.rounds),
        }

    def avoider_edge_count(self) -> int:
        return sum(len(r.avoider) for r in self.rounds)


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=False)


def transcript_lines(t: Transcript):
    """Yield the serialised document line by line (each ends with a newline)."""
    yield _dump(t.header()) + "\n"
    for i, r in enumerate(t.rounds, 1):
        yield _dump({"round": i, "avoider": r.avoider.to_json(), "enforcer": r.enforcer.to_json()}) + "\n"
    yield _dump({"result": t.result()}) + "\n"


def transcript_digest(t: Transcript) -> str:
    h = hashlib.sha256()
    for line in transcript_lines(t):
        h.update(line.encode("utf-8"))
    return h.hexdigest()


def write_transcript(t: Transcript, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in transcript_lines(t):
            fh.write(line)
    return path


def read_transcript(path) -> Transcript:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != FORMAT:
            raise ValueError(f"{path}: not a transcript (format {header.get('format')!r})")
        t = Transcript(
            config=GameConfig.from_json(header["config"]),
            avoider_name=header["avoider"],
            enforcer_name=header["enforcer"],
            family=header["family"],
            generator=header["generator"],
            avoider_params=header.get("avoider_params", {}),
            enforcer_params=header.get("enforcer_params", {}),
        )
        for line in fh:
            obj = json.loads(line)
            if "result" in obj:
                res = obj["result"]
                t.winner = Owner[res["winner"].upper()] if res["winner"] else None
                t.certificate = res["certificate"]
                t.complete = res["complete"]
                break
            if obj["round"] != len(t.rounds) + 1:
                raise ValueError(f"{path}: round {obj['round']} out of order")
            t.rounds.append(Round(EdgeList.from_json(obj["avoider"]), EdgeList.from_json(obj["enforcer"])))
    return t
