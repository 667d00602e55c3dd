"""Structural properties of a player's graph.

Forest excess, girth, isolation counts, the Euler-formula non-planarity
certificate, exact planarity, k-colourability and small K_t minors.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import networkx as nx
import numpy as np

from .board import Board, Owner, edge_endpoints
from .errors import InvalidCertificate, Unsupported

__all__ = [
    "PlayerGraph",
    "Colorability",
    "forest_excess",
    "girth",
    "isolated_count",
    "euler_nonplanarity_certificate",
    "is_planar",
    "is_bipartite",
    "chromatic_at_most",
    "has_kt_minor",
    "graph_report",
]

EXACT_COLORING_LIMIT = 64
EXACT_MINOR_LIMIT = 20


@dataclass
class PlayerGraph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        self.edges = norm

    @classmethod
    def from_indices(cls, n: int, indices) -> PlayerGraph:
        return cls(n, [edge_endpoints(n, int(e)) for e in indices])

    @classmethod
    def from_board(cls, board: Board) -> PlayerGraph:
        """Avoider's graph on ``board``."""
        return cls(board.n, board.avoider_pairs())

    @cached_property
    def adj(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {}
        for u, v in self.edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return adj

    @property
    def vertices(self) -> list[int]:
        """Non-isolated vertices, ascending."""
        return sorted(self.adj)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


def _components(g: PlayerGraph) -> int:
    """Number of connected components among non-isolated vertices."""
    seen = set()
    count = 0
    for s in g.adj:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return count


def forest_excess(g: PlayerGraph) -> int:
    """|E| - |V| + #components over non-isolated vertices (the cycle rank)."""
    return len(g.edges) - len(g.adj) + _components(g)


def _two_core(g: PlayerGraph) -> dict[int, set[int]]:
    adj = {v: set(ns) for v, ns in g.adj.items()}
    queue = deque(v for v, ns in adj.items() if len(ns) <= 1)
    while queue:
        v = queue.popleft()
        if v not in adj:
            continue
        for w in adj.pop(v):
            ns = adj[w]
            ns.discard(v)
            if len(ns) <= 1:
                queue.append(w)
    return adj


def girth(g: PlayerGraph) -> float:
    """Length of a shortest cycle, ``math.inf`` for forests."""
    adj = _two_core(g)
    best = math.inf
    for s in adj:
        # BFS from s; the first non-tree edge seen gives a cycle through s of
        # length <= dist(x) + dist(y) + 1, and the minimum over all s is exact.
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def isolated_count(board: Board, by: Owner = Owner.ENFORCER) -> int:
    """Vertices whose n-1 incident edges are all owned by ``by``."""
    if by == Owner.ENFORCER:
        return int(np.sum((board.unclaimed_at == 0) & (board.avoider_degree == 0)))
    if by == Owner.AVOIDER:
        return int(np.sum(board.avoider_degree == board.n - 1))
    raise ValueError("by must be a player")


def euler_nonplanarity_certificate(g: PlayerGraph, k: int) -> bool:
    """True when |E| >= k/(k-2) (|V|-2) proves a girth > k graph non-planar.

    |V| counts non-isolated vertices.  Acyclic graphs never certify: the face
    counting behind the bound needs at least one cycle.
    """
    if k < 3:
        raise InvalidCertificate("k must be at least 3")
    gth = girth(g)
    if gth <= k:
        raise InvalidCertificate(f"girth {gth} is not larger than k={k}")
    if gth == math.inf:
        return False
    return Fraction(len(g.edges)) >= Fraction(k, k - 2) * (len(g.adj) - 2)


def is_planar(g: PlayerGraph) -> bool:
    # Cycle rank <= 3 is always planar: K5 and K3,3 have rank 6 and 4.
    if forest_excess(g) <= 3:
        return True
    planar, _ = nx.check_planarity(g.to_networkx())
    return planar


def is_bipartite(g: PlayerGraph) -> bool:
    colour: dict[int, int] = {}
    for s in g.adj:
        if s in colour:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x]:
                    return False
    return True


@dataclass
class Colorability:
    """Answer of :func:`chromatic_at_most`.

    ``exact`` is False when the answer rests on a greedy colouring that used
    more than k colours (an upper-bound witness only, not a proof of
    non-colourability).
    """

    colorable: bool
    exact: bool
    coloring: dict[int, int] | None = None

    def __bool__(self) -> bool:
        return self.colorable


def _degeneracy_order(adj: dict[int, set[int]]) -> list[int]:
    """Smallest-last ordering."""
    degree = {v: len(ns) for v, ns in adj.items()}
    buckets: dict[int, set[int]] = {}
    for v, d in degree.items():
        buckets.setdefault(d, set()).add(v)
    removed = set()
    order = []
    for _ in range(len(adj)):
        d = 0
        while not buckets.get(d):
            d += 1
        v = buckets[d].pop()
        removed.add(v)
        order.append(v)
        for w in adj[v]:
            if w not in removed:
                buckets[degree[w]].discard(w)
                degree[w] -= 1
                buckets.setdefault(degree[w], set()).add(w)
    return order[::-1]


def _greedy(adj, order):
    colour = {}
    for v in order:
        used = {colour[w] for w in adj[v] if w in colour}
        c = 0
        while c in used:
            c += 1
        colour[v] = c
    return colour


def _backtrack_colour(adj, k):
    order = sorted(adj, key=lambda v: -len(adj[v]))
    colour: dict[int, int] = {}

    def pick():
        # DSatur: most distinct neighbour colours, then highest degree
        best, key = None, None
        for v in order:
            if v in colour:
                continue
            sat = len({colour[w] for w in adj[v] if w in colour})
            cand = (sat, len(adj[v]))
            if key is None or cand > key:
                best, key = v, cand
        return best

    def solve(used_max):
        v = pick()
        if v is None:
            return True
        blocked = {colour[w] for w in adj[v] if w in colour}
        for c in range(min(k, used_max + 2)):
            if c not in blocked:
                colour[v] = c
                if solve(max(used_max, c)):
                    return True
                del colour[v]
        return False

    return dict(colour) if solve(-1) else None


def chromatic_at_most(g: PlayerGraph, k: int) -> Colorability:
    """Decide whether g is k-colourable.

    Exact by backtracking up to 64 non-isolated vertices.  Beyond that the
    answer is exact when k <= 2 or a smallest-last greedy colouring fits into
    k colours; otherwise it is reported with ``exact=False``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    adj = g.adj
    if not g.edges:
        return Colorability(True, True, {v: 0 for v in adj})
    if k == 1:
        return Colorability(False, True)
    if k == 2:
        return Colorability(is_bipartite(g), True)
    greedy = _greedy(adj, _degeneracy_order(adj))
    if max(greedy.values()) < k:
        return Colorability(True, True, greedy)
    if len(adj) <= EXACT_COLORING_LIMIT:
        col = _backtrack_colour(adj, k)
        return Colorability(col is not None, True, col)
    return Colorability(False, False, greedy)


# -- minors -----------------------------------------------------------------------


def _reduce_low_degree(adj: dict[int, set[int]]) -> dict[int, set[int]]:
    """Delete vertices of degree <= 1 and suppress degree-2 vertices.

    Both operations preserve the existence of a K_t minor for t >= 4.
    """
    adj = {v: set(ns) for v, ns in adj.items()}
    queue = deque(adj)
    while queue:
        v = queue.popleft()
        if v not in adj:
            continue
        ns = adj[v]
        if len(ns) <= 1:
            for w in ns:
                adj[w].discard(v)
                queue.append(w)
            del adj[v]
        elif len(ns) == 2:
            a, b = ns
            adj[a].discard(v)
            adj[b].discard(v)
            adj[a].add(b)
            adj[b].add(a)
            del adj[v]
            queue.append(a)
            queue.append(b)
    return adj


def _has_clique(adj, t) -> bool:
    cands = [v for v in adj if len(adj[v]) >= t - 1]

    def extend(clique, pool):
        if len(clique) == t:
            return True
        for i, v in enumerate(pool):
            if extend(clique + [v], [w for w in pool[i + 1:] if w in adj[v]]):
                return True
        return False

    return extend([], sorted(cands))


def _contract(adj, u, v):
    """Contract edge uv into the smaller label."""
    keep, gone = min(u, v), max(u, v)
    new = {x: set(ns) for x, ns in adj.items() if x != gone}
    for w in adj[gone]:
        if w == keep:
            continue
        new[w].discard(gone)
        new[w].add(keep)
        new[keep].add(w)
    new[keep].discard(gone)
    return new


def _freeze(adj):
    return frozenset((u, v) for u, ns in adj.items() for v in ns if u < v)


def _minor_search(adj, t, memo) -> bool:
    adj = _reduce_low_degree(adj)
    key = _freeze(adj)
    if key in memo:
        return memo[key]
    if len(adj) < t or len(key) < t * (t - 1) // 2:
        memo[key] = False
        return False
    if _has_clique(adj, t):
        memo[key] = True
        return True
    result = False
    for u, v in sorted(key):
        if _minor_search(_contract(adj, u, v), t, memo):
            result = True
            break
    memo[key] = result
    return result


def has_kt_minor(g: PlayerGraph, t: int) -> bool:
    """Whether g has a K_t minor.

    Exact for every size when t <= 4 (cycle test for t = 3, series-parallel
    reduction for t = 4); for t >= 5 an exhaustive contraction search on at
    most 20 vertices after degree reductions, else :class:`Unsupported`.
    """
    if t <= 1:
        return g.n >= t
    if t == 2:
        return bool(g.edges)
    if t == 3:
        return forest_excess(g) > 0
    reduced = _reduce_low_degree(g.adj)
    if not reduced:
        return False
    if t == 4:
        # every graph of minimum degree >= 3 has a K4 minor
        return True
    if len(reduced) > EXACT_MINOR_LIMIT:
        raise Unsupported(
            f"K_{t} minor search limited to {EXACT_MINOR_LIMIT} vertices after reduction, "
            f"got {len(reduced)}"
        )
    return _minor_search(reduced, t, {})


def graph_report(g: PlayerGraph) -> dict:
    """One-line property summary used by the CLI and the experiment runner."""
    excess = forest_excess(g)
    report = {
        "edges": len(g.edges),
        "vertices": len(g.adj),
        "excess": excess,
        "girth": girth(g),
        "planar": is_planar(g),
        "colorable_2": chromatic_at_most(g, 2).colorable,
        "colorable_3": chromatic_at_most(g, 3).colorable,
        "k3_minor": has_kt_minor(g, 3),
        "k4_minor": has_kt_minor(g, 4),
    }
    return report
