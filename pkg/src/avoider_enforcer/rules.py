"""Referee for strict and monotone (1:b) Avoider-Enforcer games on E(K_n)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .analysis import PlayerGraph
from .bias import auto_bias, claim_bound, compute_t
from .board import Board, Owner
from .errors import IllegalMove, StrategyViolation
from .families import LossFamily, get_family
from .transcript import EdgeList, GameConfig, Round, Rule, Transcript

__all__ = [
    "MoveRequest",
    "Strategy",
    "seat_rng",
    "GENERATOR_ID",
    "play_game",
    "AuditFailure",
    "AuditReport",
    "audit_transcript",
    "STAGED_AVOIDERS",
]

GENERATOR_ID = "numpy.PCG64(SeedSequence([seed, seat])) seat: avoider=1 enforcer=2"

STAGED_AVOIDERS = ("avoider.staged", "avoider.staged-strict")


def seat_rng(seed: int, player: Owner) -> np.random.Generator:
    """Independent random stream for one seat of one game."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, int(player)])))


@dataclass(frozen=True)
class MoveRequest:
    player: Owner
    count: int
    exact: bool
    round_no: int


class Strategy:
    """A move generator for one seat.

    ``move`` returns distinct unclaimed edge indices: exactly ``request.count``
    of them when ``request.exact`` (strict rules) and at least that many
    otherwise.  ``observe`` is called after every move of either player.
    """

    name = "strategy"

    def start(self, board: Board, config: GameConfig, rng: np.random.Generator) -> None:
        self.config = config
        self.rng = rng

    def observe(self, board: Board, player: Owner, edges: np.ndarray) -> None:
        pass

    def move(self, board: Board, request: MoveRequest) -> Sequence[int]:
        raise NotImplementedError

    def params(self) -> dict:
        return {}


def _request(board: Board, config: GameConfig, player: Owner, round_no: int) -> MoveRequest:
    need = 1 if player == Owner.AVOIDER else config.b
    return MoveRequest(player, min(need, board.unclaimed_total), config.rule == Rule.STRICT, round_no)


def play_game(
    config: GameConfig,
    avoider: Strategy,
    enforcer: Strategy,
    family: LossFamily | str,
    on_round: Callable[[int, Board], None] | None = None,
) -> Transcript:
    """Play one game to the end and return its transcript.

    The board is exhausted before the game stops, so the winner is decided by
    the family predicate on Avoider's final graph; incremental families also
    record the round and edge where Avoider first lost.
    """
    family = get_family(family)
    board = Board(config.n)
    seats = {Owner.AVOIDER: avoider, Owner.ENFORCER: enforcer}
    for player, strat in seats.items():
        strat.start(board, config, seat_rng(config.seed, player))
    order = (config.first_player, Owner(3 - config.first_player))
    t = Transcript(
        config=config,
        avoider_name=avoider.name,
        enforcer_name=enforcer.name,
        family=family.name,
        generator=GENERATOR_ID,
        avoider_params=avoider.params(),
        enforcer_params=enforcer.params(),
    )
    lost_at = None
    round_no = 0
    while board.unclaimed_total > 0:
        round_no += 1
        moves = {Owner.AVOIDER: np.empty(0, np.int64), Owner.ENFORCER: np.empty(0, np.int64)}
        for player in order:
            if board.unclaimed_total == 0:
                break
            req = _request(board, config, player, round_no)
            edges = np.asarray(seats[player].move(board, req), dtype=np.int64).reshape(-1)
            _check_size(edges, req, t, round_no)
            try:
                board.claim_many(edges, player)
            except IllegalMove as exc:
                raise StrategyViolation(
                    f"round {round_no}: {player.label} ({seats[player].name}) {exc}",
                    round_no, player, t,
                ) from exc
            moves[player] = edges
            if player == Owner.AVOIDER and lost_at is None and family.incremental:
                for e in edges.tolist():
                    if family.hit_by(board, e):
                        lost_at = {"round": round_no, "edge": e}
                        break
            for strat in seats.values():
                strat.observe(board, player, edges)
        t.rounds.append(Round(EdgeList.of(moves[Owner.AVOIDER]), EdgeList.of(moves[Owner.ENFORCER], sort=True)))
        if on_round is not None:
            on_round(round_no, board)
    t.complete = True
    if family.incremental:
        t.winner = Owner.ENFORCER if lost_at else Owner.AVOIDER
        t.certificate = lost_at
    else:
        lost = family.holds(PlayerGraph.from_board(board))
        t.winner = Owner.ENFORCER if lost else Owner.AVOIDER
        t.certificate = {"round": "final"} if lost else None
    t.final_board = board
    return t


def _check_size(edges, req: MoveRequest, t: Transcript, round_no: int) -> None:
    k = len(edges)
    if req.exact and k != req.count:
        raise StrategyViolation(
            f"round {round_no}: {req.player.label} claimed {k} edges, strict rules require {req.count}",
            round_no, req.player, t,
        )
    if not req.exact and k < req.count:
        raise StrategyViolation(
            f"round {round_no}: {req.player.label} claimed {k} edges, needs at least {req.count}",
            round_no, req.player, t,
        )


# -- audit ---------------------------------------------------------------------------


@dataclass
class AuditFailure:
    round_no: int | None
    rule: str
    detail: str

    def __str__(self):
        where = f"round {self.round_no}" if self.round_no is not None else "game"
        return f"{where}: {self.rule}: {self.detail}"


@dataclass
class AuditReport:
    failures: list[AuditFailure] = field(default_factory=list)
    rounds: int = 0
    census_checked: bool = False
    census_violations: int = 0
    max_census_ratio: float = 0.0
    excess: int = 0
    avoider_edges: int = 0
    winner: Owner | None = None
    board: Board | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return not self.failures


def audit_transcript(
    t: Transcript,
    check_census: bool | None = None,
    census_scale: float = 10.0,
    check_winner: bool = True,
) -> AuditReport:
    """Replay ``t`` on a fresh board and verify every rule.

    Checks claim legality, per-round move sizes, player order, that the edge
    lists partition E(K_n), the recorded winner, and the bound
    ``created_count[k] <= n (k / (census_scale ln n))^(k-1)`` for k <= t
    after every round.  By default the bound is checked for the staged
    Avoider strategies at b >= ceil(200 n ln n), the only regime where it is
    guaranteed; ``check_census`` forces it on or off.
    """
    cfg = t.config
    board = Board(cfg.n)
    report = AuditReport(board=board)
    if check_census is None:
        check_census = t.avoider_name in STAGED_AVOIDERS and cfg.n >= 3 and cfg.b >= auto_bias(cfg.n)
    report.census_checked = bool(check_census) and cfg.n >= 3
    if report.census_checked:
        tcap = compute_t(cfg.n)
        bounds = {k: claim_bound(cfg.n, k, census_scale) for k in range(2, tcap + 1)}
    order = (cfg.first_player, Owner(3 - cfg.first_player))
    strict = cfg.rule == Rule.STRICT
    fail = report.failures.append
    for r, rnd in enumerate(t.rounds, 1):
        if board.unclaimed_total == 0:
            fail(AuditFailure(r, "game-over", "round played after every edge was claimed"))
            break
        for player in order:
            edges = rnd.edges_of(player).to_array()
            remaining = board.unclaimed_total
            need = min(1 if player == Owner.AVOIDER else cfg.b, remaining)
            if remaining == 0:
                if len(edges):
                    fail(AuditFailure(r, "game-over", f"{player.label} moved on an exhausted board"))
                continue
            if strict and len(edges) != need:
                fail(AuditFailure(r, "move-size", f"{player.label} claimed {len(edges)}, strict requires {need}"))
            elif not strict and len(edges) < need:
                fail(AuditFailure(r, "move-size", f"{player.label} claimed {len(edges)}, needs at least {need}"))
            try:
                board.claim_many(edges, player)
            except IllegalMove as exc:
                fail(AuditFailure(r, "legality", f"{player.label}: {exc}"))
                return _finish(report, board, t, r)
        if report.census_checked:
            created = board.census.created_count
            for k, bound in bounds.items():
                ratio = created.get(k, 0) / bound
                report.max_census_ratio = max(report.max_census_ratio, ratio)
                if created.get(k, 0) > bound:
                    report.census_violations += 1
                    fail(AuditFailure(r, "census-bound", f"created_count[{k}]={created[k]} > {bound:.4g}"))
    report = _finish(report, board, t, len(t.rounds))
    if t.complete and board.unclaimed_total != 0:
        fail(AuditFailure(None, "cover", f"{board.unclaimed_total} edges never claimed"))
    if check_winner and t.complete and not report.failures:
        family = get_family(t.family)
        lost = family.holds(PlayerGraph.from_board(board))
        report.winner = Owner.ENFORCER if lost else Owner.AVOIDER
        if report.winner != t.winner:
            fail(AuditFailure(None, "winner", f"recorded {t.winner}, replay gives {report.winner}"))
    return report


def _finish(report: AuditReport, board: Board, t: Transcript, rounds: int) -> AuditReport:
    report.rounds = rounds
    report.excess = board.census.excess
    report.avoider_edges = board.avoider_count
    report.board = board
    return report
