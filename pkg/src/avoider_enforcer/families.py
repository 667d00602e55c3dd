"""Monotone-increasing losing families evaluated on Avoider's graph."""

from __future__ import annotations

import re

from .analysis import PlayerGraph, chromatic_at_most, forest_excess, has_kt_minor, is_planar
from .board import Board
from .errors import InvalidConfig, Unsupported

__all__ = [
    "LossFamily",
    "ContainsCycle",
    "ContainsSpanningTree",
    "ContainsTriangle",
    "NonKColorable",
    "NonPlanar",
    "HasKtMinor",
    "get_family",
    "FAMILY_NAMES",
]


class LossFamily:
    """Avoider loses once his graph satisfies :meth:`holds`.

    Families with ``incremental = True`` can also be evaluated after every
    Avoider edge from the board's running state via :meth:`hit_by`; the
    others are evaluated at the end of the game.
    """

    name = "family"
    incremental = False

    def holds(self, g: PlayerGraph) -> bool:
        raise NotImplementedError

    def hit_by(self, board: Board, edge: int) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return f"<LossFamily {self.name}>"


class ContainsCycle(LossFamily):
    name = "cycle"
    incremental = True

    def holds(self, g):
        return forest_excess(g) > 0

    def hit_by(self, board, edge):
        return board.census.excess > 0


class ContainsSpanningTree(LossFamily):
    name = "spanning-tree"
    incremental = True

    def holds(self, g):
        return len(g.adj) == g.n and forest_excess(g) == len(g.edges) - g.n + 1

    def hit_by(self, board, edge):
        return board.census.components == 1


class ContainsTriangle(LossFamily):
    name = "triangle"
    incremental = True

    def holds(self, g):
        adj = g.adj
        return any(adj[u] & adj[v] for u, v in g.edges)

    def hit_by(self, board, edge):
        u, v = board.endpoints(edge)
        return bool(board.avoider_adj.get(u, set()) & board.avoider_adj.get(v, set()))


class NonKColorable(LossFamily):
    incremental = False

    def __init__(self, k: int):
        if k < 1:
            raise InvalidConfig("k must be positive")
        self.k = k
        self.name = f"non-{k}-colorable"

    def holds(self, g):
        answer = chromatic_at_most(g, self.k)
        if not answer.exact:
            raise Unsupported(f"{self.k}-colourability undecided for this graph")
        return not answer.colorable


class NonPlanar(LossFamily):
    name = "non-planar"
    incremental = False

    def holds(self, g):
        return not is_planar(g)


class HasKtMinor(LossFamily):
    incremental = False

    def __init__(self, t: int):
        if t < 1:
            raise InvalidConfig("t must be positive")
        self.t = t
        self.name = f"k{t}-minor"

    def holds(self, g):
        return has_kt_minor(g, self.t)


FAMILY_NAMES = ("cycle", "spanning-tree", "triangle", "non-planar", "non-<k>-colorable", "k<t>-minor")

_ALIASES = {
    "cycle": ContainsCycle,
    "contains-cycle": ContainsCycle,
    "spanning-tree": ContainsSpanningTree,
    "contains-spanning-tree": ContainsSpanningTree,
    "connectivity": ContainsSpanningTree,
    "triangle": ContainsTriangle,
    "contains-triangle": ContainsTriangle,
    "non-planar": NonPlanar,
    "nonplanar": NonPlanar,
}


def get_family(name: str | LossFamily) -> LossFamily:
    if isinstance(name, LossFamily):
        return name
    key = name.strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]()
    m = re.fullmatch(r"non-(\d+)-colou?rable", key)
    if m:
        return NonKColorable(int(m.group(1)))
    m = re.fullmatch(r"k(\d+)-minor", key)
    if m:
        return HasKtMinor(int(m.group(1)))
    raise InvalidConfig(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
