"""Exhaustive minimax for strict (1:b) games on tiny boards (n <= 6).

Positions are pairs of bitmasks (Avoider's edges, Enforcer's edges) plus the
player to move.  Avoider branches over single free edges, Enforcer over all
b-subsets of the free edges (or the whole remainder when fewer than b are
left).  A position where Avoider's graph already lies in the losing family
is an Enforcer win, since the families are monotone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .analysis import PlayerGraph
from .board import Board, Owner, edge_endpoints, num_edges
from .errors import Unsupported
from .families import LossFamily, get_family
from .rules import MoveRequest, seat_rng
from .strategies import AVOIDERS, make_strategy
from .transcript import GameConfig

__all__ = [
    "MAX_SOLVER_N",
    "Solver",
    "SolverResult",
    "solve_strict",
    "thresholds",
    "best_response_check",
    "append_snapshot",
]

MAX_SOLVER_N = 6


class Solver:
    """Minimax for one (n, b, family, first player).

    ``memo=False`` and ``prune=False`` switch off the transposition table and
    the early family check; both exist to cross-check the default solver.
    """

    def __init__(self, n: int, b: int, family, first_player: Owner = Owner.AVOIDER,
                 memo: bool = True, prune: bool = True):
        if n > MAX_SOLVER_N:
            raise Unsupported(f"exact solving is limited to n <= {MAX_SOLVER_N} (got n={n})")
        if n < 2 or b < 1:
            raise Unsupported("solver needs n >= 2 and b >= 1")
        self.n, self.b = n, b
        self.family: LossFamily = get_family(family)
        self.first_player = Owner(first_player)
        self.m = num_edges(n)
        self.full = (1 << self.m) - 1
        self.pairs = [edge_endpoints(n, i) for i in range(self.m)]
        self.memo_on, self.prune = memo, prune
        self.memo: dict[tuple[int, int, int], bool] = {}
        self._lost: dict[int, bool] = {}
        self.nodes = 0

    def lost(self, amask: int) -> bool:
        hit = self._lost.get(amask)
        if hit is None:
            edges = [self.pairs[i] for i in range(self.m) if amask >> i & 1]
            hit = self._lost[amask] = self.family.holds(PlayerGraph(self.n, edges))
        return hit

    def _free(self, a: int, e: int) -> list[int]:
        free = self.full & ~(a | e)
        return [i for i in range(self.m) if free >> i & 1]

    def enforcer_moves(self, a: int, e: int):
        free = self._free(a, e)
        for combo in combinations(free, min(self.b, len(free))):
            yield sum(1 << i for i in combo)

    def avoider_wins(self, a: int, e: int, player: Owner) -> bool:
        """Value of the position for Avoider under perfect play."""
        key = (a, e, int(player))
        if self.memo_on and key in self.memo:
            return self.memo[key]
        self.nodes += 1
        if self.prune and self.lost(a):
            value = False
        elif (a | e) == self.full:
            value = not self.lost(a)
        elif player == Owner.AVOIDER:
            value = any(self.avoider_wins(a | 1 << i, e, Owner.ENFORCER) for i in self._free(a, e))
        else:
            value = all(self.avoider_wins(a, e | mv, Owner.AVOIDER) for mv in self.enforcer_moves(a, e))
        if self.memo_on:
            self.memo[key] = value
        return value

    def winner(self) -> Owner:
        return Owner.AVOIDER if self.avoider_wins(0, 0, self.first_player) else Owner.ENFORCER


def solve_strict(n: int, b: int, family, first_player: Owner = Owner.AVOIDER, **kw) -> Owner:
    return Solver(n, b, family, first_player, **kw).winner()


@dataclass
class SolverResult:
    """Winners for every bias and the two threshold biases.

    ``f_minus`` is the largest b with Enforcer winning for all b' <= b (0 if
    Avoider wins at b = 1).  ``f_plus`` is the smallest b0 >= 0 with Avoider
    winning for all b > b0; it is None when Enforcer still wins at
    b = C(n,2), where every larger bias plays the same game.
    ``flips`` lists the b where raising the bias to b+1 hands the win to
    Enforcer (strict games need not be bias-monotone).
    """

    n: int
    family: str
    first_player: Owner
    winner_by_bias: dict[int, Owner] = field(default_factory=dict)
    f_minus: int = 0
    f_plus: int | None = 0
    flips: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "family": self.family,
            "first_player": self.first_player.label,
            "winner_by_bias": {str(b): w.label for b, w in self.winner_by_bias.items()},
            "f_minus": self.f_minus,
            "f_plus": self.f_plus,
            "flips": self.flips,
        }


def thresholds(n: int, family, first_player: Owner = Owner.AVOIDER) -> SolverResult:
    fam = get_family(family)
    m = num_edges(n)
    if n > MAX_SOLVER_N:
        raise Unsupported(f"exact solving is limited to n <= {MAX_SOLVER_N} (got n={n})")
    res = SolverResult(n=n, family=fam.name, first_player=Owner(first_player))
    for b in range(1, m + 1):
        res.winner_by_bias[b] = solve_strict(n, b, fam, first_player)
    w = res.winner_by_bias
    f_minus = 0
    while f_minus < m and w[f_minus + 1] == Owner.ENFORCER:
        f_minus += 1
    res.f_minus = f_minus
    if w[m] == Owner.ENFORCER:
        res.f_plus = None
    else:
        b0 = m - 1
        while b0 >= 1 and w[b0] == Owner.AVOIDER:
            b0 -= 1
        res.f_plus = b0
    res.flips = [b for b in range(1, m) if w[b] == Owner.AVOIDER and w[b + 1] == Owner.ENFORCER]
    return res


def _mask_of(edges) -> int:
    return sum(1 << int(e) for e in edges)


def best_response_check(n: int, b: int, family, strategy: str, seed: int = 0,
                        first_player: Owner = Owner.AVOIDER, params: dict | None = None) -> bool:
    """Play ``strategy`` against the solver's perfect opponent.

    Returns False only when the strategy's side has a winning strategy from
    the start and the bundled strategy still loses.
    """
    solver = Solver(n, b, family, first_player)
    seat = "avoider" if strategy in AVOIDERS else "enforcer"
    me = Owner.AVOIDER if seat == "avoider" else Owner.ENFORCER
    should_win = solver.winner() == me
    config = GameConfig(n, b, first_player=first_player, seed=seed)
    board = Board(n)
    strat = make_strategy(strategy, seat, params)
    strat.start(board, config, seat_rng(seed, me))
    a = e = 0
    player = first_player
    round_no = 1
    while board.unclaimed_total:
        count = min(1 if player == Owner.AVOIDER else b, board.unclaimed_total)
        if player == me:
            edges = np.asarray(strat.move(board, MoveRequest(me, count, True, round_no)), dtype=np.int64)
        else:
            edges = _perfect_reply(solver, a, e, player)
        board.claim_many(edges, player)
        strat.observe(board, player, edges)
        if player == Owner.AVOIDER:
            a |= _mask_of(edges)
        else:
            e |= _mask_of(edges)
            round_no += 1
        player = Owner(3 - player)
    won = solver.lost(a) == (me == Owner.ENFORCER)
    return won or not should_win


def _perfect_reply(solver: Solver, a: int, e: int, player: Owner) -> np.ndarray:
    wants_avoider_win = player == Owner.AVOIDER
    options = ([1 << i for i in solver._free(a, e)] if player == Owner.AVOIDER
               else list(solver.enforcer_moves(a, e)))
    best = options[0]
    for mv in options:
        na, ne = (a | mv, e) if player == Owner.AVOIDER else (a, e | mv)
        if solver.avoider_wins(na, ne, Owner(3 - player)) == wants_avoider_win:
            best = mv
            break
    return np.array([i for i in range(solver.m) if best >> i & 1], dtype=np.int64)


def append_snapshot(result: SolverResult, path) -> Path:
    """Append one JSON line with ``result`` to the regression-snapshot file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(result.as_dict(), sort_keys=True) + "\n")
    return path
