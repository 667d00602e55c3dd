"""Enforcer strategies.

* ``enforcer.isolation``: isolate as many vertices as possible by fixing a
  few fresh targets, narrowing them down as Avoider touches some, and
  finally claiming every edge at the survivor.
* ``enforcer.girth``: block every unclaimed edge that would close a cycle of
  length at most k in Avoider's graph (shortest threats first).
* ``enforcer.nonplanar``: split the bias between the two above.
* ``enforcer.nonplanar-mono``: the same against a tracked subgraph holding one
  Avoider edge per round, for monotone play.
* ``enforcer.random`` / ``enforcer.spread``: baselines.

All "arbitrary" choices are resolved towards the lowest edge or vertex index.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bias import choose_k, girth_budget, isolation_case
from .board import Board, Owner, edge_index
from .errors import InvalidConfig
from .rules import MoveRequest, Strategy

__all__ = [
    "AvoiderView",
    "IsolationState",
    "isolation_move",
    "GirthState",
    "girth_blocker_move",
    "threat_set",
    "BiasSplit",
    "nonplanarity_move",
    "TrackedSubgraph",
    "monotone_wrapper_move",
    "RandomEnforcer",
    "SpreadEnforcer",
    "IsolationEnforcer",
    "GirthBlocker",
    "NonplanarEnforcer",
    "MonotoneNonplanarEnforcer",
    "choose_k",
]

_EMPTY = np.empty(0, dtype=np.int64)


class AvoiderView:
    """What an Enforcer strategy treats as Avoider's graph."""

    def __init__(self, n: int):
        self.n = n
        self.touched = np.zeros(n, dtype=bool)
        self.adj: dict[int, set[int]] = {}
        self.edges: list[int] = []

    def add(self, board: Board, edges) -> list[tuple[int, int]]:
        pairs = []
        for e in edges:
            e = int(e)
            u, v = board.endpoints(e)
            self.edges.append(e)
            self.touched[u] = self.touched[v] = True
            self.adj.setdefault(u, set()).add(v)
            self.adj.setdefault(v, set()).add(u)
            pairs.append((u, v))
        return pairs


def _fill(board: Board, chosen: np.ndarray, count: int) -> np.ndarray:
    """Top ``chosen`` up to ``count`` edges with the lowest-index unclaimed ones."""
    short = count - len(chosen)
    if short <= 0:
        return chosen[:count]
    return np.concatenate([chosen, board.lowest_unclaimed(short, exclude=chosen)])


# -- isolation ---------------------------------------------------------------------


@dataclass
class IsolationState:
    """Progress of the isolation strategy.

    ``phase`` indexes the current cycle's schedule: a list of
    ``(number of targets, edges per target)`` steps where ``None`` means
    "every remaining incident edge".
    """

    n: int
    bias: int
    case_id: int
    in_range: bool
    c: Fraction = Fraction(1, 1000)
    phase: int = 0
    targets: list[int] = field(default_factory=list)
    second_phase: bool = False
    completed: int = 0
    idle_rounds: int = 0

    @classmethod
    def create(cls, n: int, bias: int) -> IsolationState:
        case = isolation_case(n, bias)
        return cls(n=n, bias=bias, case_id=case or 1, in_range=case is not None)

    def schedule(self) -> list[tuple[int, int | None]]:
        b = self.bias
        if self.case_id == 1:
            return [(4, (b - 6) // 4), (3, b // 3), (2, b // 2), (1, None)]
        if self.case_id == 3 and self.second_phase:
            return [(2, (b - 1) // 2), (1, None)]
        return [(3, (b - 3) // 3), (2, b // 2), (1, None)]

    def second_phase_trigger(self) -> int:
        return self.n - math.ceil(Fraction(3, 2) * self.bias)


def _isolated_mask(board: Board) -> np.ndarray:
    return (board.unclaimed_at == 0) & (board.avoider_degree == 0)


def isolation_move(board: Board, state: IsolationState, budget: int, touched=None) -> np.ndarray:
    """One move of the isolation strategy, exactly ``min(budget, unclaimed)`` edges."""
    touched = board.touched_by_avoider if touched is None else touched
    budget = min(budget, board.unclaimed_total)
    isolated = _isolated_mask(board)
    picked: list[np.ndarray] = []
    room = budget

    def take(edges):
        nonlocal room
        edges = edges[:room]
        if len(edges):
            picked.append(edges)
            room -= len(edges)

    def so_far():
        return np.concatenate(picked) if picked else _EMPTY

    state.targets = [v for v in state.targets if not touched[v] and not isolated[v]]
    if not state.targets:
        state.phase = 0
        if state.case_id == 3 and not state.second_phase:
            if int(isolated.sum()) >= state.second_phase_trigger():
                state.second_phase = True
        need = state.schedule()[0][0]
        fresh = np.flatnonzero(~touched & ~isolated)[:need]
        if len(fresh) == need:
            state.targets = fresh.tolist()
            clique = [edge_index(board.n, a, b) for i, a in enumerate(state.targets)
                      for b in state.targets[i + 1:]]
            clique = np.array(clique, dtype=np.int64)
            take(clique[board.owners(clique) == Owner.UNCLAIMED])
    if state.targets:
        schedule = state.schedule()
        step = min(state.phase, len(schedule) - 1)
        count, per = schedule[step]
        state.targets = state.targets[:count]
        for v in state.targets:
            quota = board.n if per is None else per
            take(board.lowest_unclaimed_incident(v, min(quota, room), exclude=so_far()))
        if per is None:
            claimed = so_far()
            survivor = state.targets[0]
            left = board.unclaimed_at[survivor] - int(np.sum(np.isin(board.incident_edges(survivor), claimed)))
            if left == 0:
                state.completed += 1
                state.targets = []
                state.phase = 0
        else:
            state.phase = step + 1
    else:
        state.idle_rounds += 1
    return _fill(board, so_far(), budget)


# -- girth blocking -------------------------------------------------------------------


@dataclass
class GirthState:
    k: int
    threats: dict[int, int] = field(default_factory=dict)
    exhausted: bool = False
    exhausted_rounds: int = 0


def _ball(adj: dict[int, set[int]], s: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for y in adj.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return np.fromiter(dist.keys(), dtype=np.int64), np.fromiter(dist.values(), dtype=np.int64)


def register_edge(board: Board, state: GirthState, adj: dict[int, set[int]], u: int, v: int) -> None:
    """Update the threat map after Avoider's view gained the edge uv (already in ``adj``)."""
    k = state.k
    if k < 3:
        return
    xs, dx = _ball(adj, u, k - 2)
    ys, dy = _ball(adj, v, k - 2)
    X = np.repeat(xs, len(ys))
    Y = np.tile(ys, len(xs))
    D = np.repeat(dx, len(ys)) + 1 + np.tile(dy, len(xs))
    keep = (D <= k - 1) & (X != Y)
    X, Y, D = X[keep], Y[keep], D[keep]
    lo, hi = np.minimum(X, Y), np.maximum(X, Y)
    idx = lo * board.n - lo * (lo + 1) // 2 + (hi - lo - 1)
    free = board.owners(idx) == Owner.UNCLAIMED
    threats = state.threats
    for e, d in zip(idx[free].tolist(), D[free].tolist()):
        old = threats.get(e)
        if old is None or d < old:
            threats[e] = d


def threat_set(board: Board, adj: dict[int, set[int]], k: int) -> dict[int, int]:
    """Brute-force threat map: unclaimed edges joining vertices at distance <= k-1."""
    out = {}
    for s in adj:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if dist[x] == k - 1:
                continue
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        for y, d in dist.items():
            if y > s and d >= 1:
                e = edge_index(board.n, s, y)
                if board.owner(e) == Owner.UNCLAIMED:
                    out[e] = d
    return out


def girth_blocker_move(board: Board, state: GirthState, budget: int, pad: bool = True) -> np.ndarray:
    """Claim the shortest-distance threats first, up to ``budget``; pad with lowest edges."""
    budget = min(budget, board.unclaimed_total)
    threats = state.threats
    if threats:
        idx = np.fromiter(threats.keys(), dtype=np.int64, count=len(threats))
        dist = np.fromiter(threats.values(), dtype=np.int64, count=len(threats))
        live = board.owners(idx) == Owner.UNCLAIMED
        for e in idx[~live].tolist():
            del threats[e]
        idx, dist = idx[live], dist[live]
        order = np.lexsort((idx, dist))
        chosen = idx[order[:budget]]
        if len(idx) > budget:
            state.exhausted = True
            state.exhausted_rounds += 1
        for e in chosen.tolist():
            del threats[e]
    else:
        chosen = _EMPTY
    return _fill(board, chosen, budget) if pad else chosen


# -- the non-planarity composite -------------------------------------------------------


@dataclass(frozen=True)
class BiasSplit:
    b: int
    b1: int
    b2: int
    k: int
    C: float

    @classmethod
    def create(cls, n: int, b: int, k: int = 4, C: float = 1.0) -> BiasSplit:
        b1 = min(b, girth_budget(n, k, C))
        return cls(b=b, b1=b1, b2=b - b1, k=k, C=C)


def nonplanarity_move(board: Board, split: BiasSplit, iso: IsolationState, girth: GirthState,
                      touched=None, count: int | None = None) -> np.ndarray:
    """Girth blocking with b1 edges plus isolation with b2; collisions replaced."""
    count = min(split.b if count is None else count, board.unclaimed_total)
    g_budget = min(split.b1, count)
    blocked = girth_blocker_move(board, girth, g_budget)
    isolating = isolation_move(board, iso, count - g_budget, touched=touched)
    merged = np.union1d(blocked, isolating)
    return _fill(board, merged, count)


@dataclass
class TrackedSubgraph:
    a_star: list[int] = field(default_factory=list)
    rounds_seen: int = 0

    def __len__(self):
        return len(self.a_star)


def monotone_wrapper_move(board: Board, proposal, count: int) -> np.ndarray:
    """Replace proposed edges that are not unclaimed (Avoider's edges outside A*)."""
    proposal = np.unique(np.asarray(proposal, dtype=np.int64))
    ok = proposal[board.owners(proposal) == Owner.UNCLAIMED]
    return _fill(board, ok, min(count, board.unclaimed_total))


# -- Strategy classes -----------------------------------------------------------------


class EnforcerStrategy(Strategy):
    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.view = AvoiderView(board.n)

    def observe(self, board, player, edges):
        if player == Owner.AVOIDER and len(edges):
            self.see(board, edges)

    def see(self, board, edges):
        self.view.add(board, edges)


class RandomEnforcer(EnforcerStrategy):
    name = "enforcer.random"

    def move(self, board, request):
        return board.sample_unclaimed(self.rng, request.count)


class SpreadEnforcer(EnforcerStrategy):
    """Claims edges between Avoider-untouched vertices first, then edges with
    one untouched end, then the rest; lowest index first within each class."""

    name = "enforcer.spread"

    def move(self, board, request):
        return spread_edges(board, request.count)


def spread_edges(board: Board, count: int) -> np.ndarray:
    touched = board.touched_by_avoider
    parts: list[np.ndarray] = []
    room = min(count, board.unclaimed_total)
    rules = (
        lambda u, free: None if touched[u] else free & ~touched[u + 1:],
        lambda u, free: free & (touched[u + 1:] if not touched[u] else ~touched[u + 1:]),
        lambda u, free: free & touched[u + 1:] if touched[u] else None,
    )
    for rule in rules:
        for u in np.flatnonzero(board.row_unclaimed > 0).tolist():
            if room == 0:
                break
            mask = rule(u, board.row_states(u) == Owner.UNCLAIMED)
            if mask is None:
                continue
            hits = np.flatnonzero(mask)[:room]
            if len(hits):
                parts.append(hits + board.row_start[u])
                room -= len(hits)
    return np.concatenate(parts) if parts else _EMPTY


class IsolationEnforcer(EnforcerStrategy):
    name = "enforcer.isolation"

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.state = IsolationState.create(board.n, config.b)

    def params(self):
        return {"c": "1/1000"}

    def move(self, board, request):
        return isolation_move(board, self.state, request.count, touched=self.view.touched)


class GirthBlocker(EnforcerStrategy):
    name = "enforcer.girth"

    def __init__(self, k: int = 3, budget: int | None = None):
        if k < 3:
            raise InvalidConfig("girth target k must be at least 3")
        self.k = int(k)
        self.budget = budget

    def params(self):
        d = {"k": self.k}
        if self.budget is not None:
            d["budget"] = self.budget
        return d

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.state = GirthState(self.k)

    def see(self, board, edges):
        for u, v in self.view.add(board, edges):
            register_edge(board, self.state, self.view.adj, u, v)

    def move(self, board, request):
        budget = request.count if self.budget is None else min(self.budget, request.count)
        return _fill(board, girth_blocker_move(board, self.state, budget), request.count)

    @property
    def exhausted(self):
        return self.state.exhausted


class NonplanarEnforcer(GirthBlocker):
    name = "enforcer.nonplanar"

    def __init__(self, k: int = 4, C: float = 1.0, c=Fraction(1, 1000)):
        super().__init__(k=k)
        self.C = float(C)
        self.c = Fraction(c)

    def params(self):
        return {"k": self.k, "C": self.C, "c": str(self.c)}

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.split = BiasSplit.create(board.n, config.b, self.k, self.C)
        self.iso = IsolationState.create(board.n, max(1, self.split.b2))

    def move(self, board, request):
        return nonplanarity_move(board, self.split, self.iso, self.state,
                                 touched=self.view.touched, count=request.count)


class MonotoneNonplanarEnforcer(EnforcerStrategy):
    """Plays the composite against A*: the first edge of each Avoider move."""

    name = "enforcer.nonplanar-mono"

    def __init__(self, k: int = 4, C: float = 1.0, c=Fraction(1, 1000), inner: Strategy | None = None):
        self.inner = inner if inner is not None else NonplanarEnforcer(k=k, C=C, c=c)

    def params(self):
        return self.inner.params()

    def start(self, board, config, rng):
        super().start(board, config, rng)
        self.tracked = TrackedSubgraph()
        self.inner.start(board, config, rng)

    def see(self, board, edges):
        super().see(board, edges)
        first = int(edges[0])
        self.tracked.a_star.append(first)
        self.tracked.rounds_seen += 1
        self.inner.see(board, [first])

    def move(self, board, request):
        full = MoveRequest(request.player, request.count, True, request.round_no)
        return monotone_wrapper_move(board, self.inner.move(board, full), request.count)
