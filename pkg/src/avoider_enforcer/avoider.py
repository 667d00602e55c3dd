"""Avoider strategies: the staged forest strategy, its strict variant, random play.

The staged strategy works through stages 1..t.  In stage k < t Avoider
joins two of his components whose sizes add up to exactly k+1 (lowest edge
index first), so his graph stays a forest; when no such edge is left he
moves on, possibly through several empty stages in one turn.  In stage t he
takes any edge.  With a bias of at least 200 n ln n the last stage lasts at
most one round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bias import compute_t
from .board import Board, Owner
from .errors import BoardExhausted, TheoremViolation
from .rules import MoveRequest, Strategy

__all__ = [
    "compute_t",
    "StageState",
    "staged_move",
    "strict_forest_move",
    "random_avoider_move",
    "spread_toucher_move",
    "StagedAvoider",
    "StrictForestAvoider",
    "RandomAvoider",
    "SpreadToucher",
]


@dataclass
class StageState:
    t: int
    current_stage: int = 1
    entered_stage_t_rounds: int = 0

    @classmethod
    def for_board(cls, n: int) -> StageState:
        return cls(t=compute_t(n) if n >= 3 else 1)


def _advance(board: Board, state: StageState) -> int | None:
    while state.current_stage < state.t:
        e = board.find_merge_edge(state.current_stage + 1)
        if e is not None:
            return e
        state.current_stage += 1
    return None


def staged_move(board: Board, state: StageState) -> int:
    if board.unclaimed_total == 0:
        raise BoardExhausted("staged Avoider asked to move on a full board")
    e = _advance(board, state)
    if e is not None:
        return e
    state.entered_stage_t_rounds += 1
    return int(board.lowest_unclaimed(1)[0])


def strict_forest_move(board: Board, state: StageState) -> int:
    """Like :func:`staged_move`, but in the last stage only joins two components."""
    if board.unclaimed_total == 0:
        raise BoardExhausted("staged Avoider asked to move on a full board")
    e = _advance(board, state)
    if e is not None:
        return e
    state.entered_stage_t_rounds += 1
    e = board.find_inter_component_edge()
    if e is None:
        raise TheoremViolation(
            f"final stage reached with {board.unclaimed_total} unclaimed edges, "
            "all inside Avoider's components"
        )
    return e


def random_avoider_move(board: Board, rng: np.random.Generator) -> int:
    return board.random_unclaimed(rng)


class _RowPointer:
    """Lowest row that may still hold an edge of some monotone-shrinking class."""

    def __init__(self):
        self.row = 0


def _scan_rows(board: Board, pointer: _RowPointer, row_mask) -> int | None:
    n = board.n
    touched = board.touched_by_avoider
    u = pointer.row
    while u < n - 1:
        if board.row_unclaimed[u]:
            mask = row_mask(u, board.row_states(u) == Owner.UNCLAIMED, touched)
            if mask is not None:
                j = int(mask.argmax())
                if mask[j]:
                    pointer.row = u
                    return int(board.row_start[u]) + j
        u += 1
    pointer.row = u
    return None


def _both_fresh(u, free, touched):
    if touched[u]:
        return None
    return free & ~touched[u + 1:]


def _one_fresh(u, free, touched):
    return free if not touched[u] else free & ~touched[u + 1:]


def spread_toucher_move(board: Board, pointers=None) -> int:
    """Lowest unclaimed edge with both ends untouched by Avoider, else one, else any."""
    if board.unclaimed_total == 0:
        raise BoardExhausted("no unclaimed edge left")
    pointers = pointers or (_RowPointer(), _RowPointer())
    for ptr, rule in zip(pointers, (_both_fresh, _one_fresh)):
        e = _scan_rows(board, ptr, rule)
        if e is not None:
            return e
    return int(board.lowest_unclaimed(1)[0])


# -- Strategy wrappers -----------------------------------------------------------------


class _SingleEdgeAvoider(Strategy):
    def move(self, board: Board, request: MoveRequest):
        return [self.pick(board)]


class StagedAvoider(_SingleEdgeAvoider):
    name = "avoider.staged"

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.state = StageState.for_board(board.n)

    def pick(self, board):
        return staged_move(board, self.state)


class StrictForestAvoider(StagedAvoider):
    name = "avoider.staged-strict"

    def pick(self, board):
        return strict_forest_move(board, self.state)


class RandomAvoider(Strategy):
    """Uniformly random edges; under monotone rules, optionally several per turn."""

    name = "avoider.random"

    def __init__(self, max_claim: int = 1):
        self.max_claim = max(1, int(max_claim))

    def params(self):
        return {"max_claim": self.max_claim} if self.max_claim > 1 else {}

    def move(self, board, request):
        if request.exact or self.max_claim == 1:
            return [random_avoider_move(board, self.rng)]
        k = int(self.rng.integers(1, self.max_claim + 1))
        return board.sample_unclaimed(self.rng, k)


class SpreadToucher(_SingleEdgeAvoider):
    """First-player adversary that keeps touching fresh vertices."""

    name = "fp.spread"

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.pointers = (_RowPointer(), _RowPointer())

    def pick(self, board):
        return spread_toucher_move(board, self.pointers)
