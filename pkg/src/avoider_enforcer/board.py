"""Dense edge-state storage for K_n with component tracking for Avoider's graph.

Edges are numbered lexicographically: the edge ``(u, v)`` with ``u < v`` has
index ``u*n - u*(u+1)/2 + (v - u - 1)``.  Every transcript and test refers to
edges through this bijection.

Ownership is packed at two bits per edge (four edges per byte), so a board
with ``n = 5*10**4`` needs about 312 MB.
"""

from __future__ import annotations

import math
from collections import Counter
from enum import IntEnum

import numpy as np

from .errors import AlreadyClaimed, BoardExhausted, IllegalMove, InvalidConfig

__all__ = [
    "Owner",
    "Board",
    "ComponentCensus",
    "new_board",
    "num_edges",
    "edge_index",
    "edge_endpoints",
    "row_starts",
    "decode_edges",
]


class Owner(IntEnum):
    UNCLAIMED = 0
    AVOIDER = 1
    ENFORCER = 2

    @property
    def label(self) -> str:
        return self.name.lower()


_SHIFTS = np.array([0, 2, 4, 6], dtype=np.uint8)
# Bulk operations work on slices of this many edges to bound temporaries.
CHUNK = 1 << 22


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(n: int, u: int, v: int) -> int:
    if u > v:
        u, v = v, u
    if not 0 <= u < v < n:
        raise ValueError(f"({u}, {v}) is not an edge of K_{n}")
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def _row_start(n: int, u: int) -> int:
    return u * n - u * (u + 1) // 2


def edge_endpoints(n: int, index: int) -> tuple[int, int]:
    """Inverse of :func:`edge_index`."""
    m = num_edges(n)
    if not 0 <= index < m:
        raise ValueError(f"edge index {index} out of range for K_{n}")
    disc = (2 * n - 1) ** 2 - 8 * index
    u = max(0, (2 * n - 1 - math.isqrt(disc)) // 2)
    while u > 0 and _row_start(n, u) > index:
        u -= 1
    while _row_start(n, u + 1) <= index:
        u += 1
    return u, index - _row_start(n, u) + u + 1


def row_starts(n: int) -> np.ndarray:
    """``starts[u]`` is the index of edge ``(u, u+1)``; ``starts[n] == C(n, 2)``."""
    u = np.arange(n + 1, dtype=np.int64)
    starts = u * n - u * (u + 1) // 2
    starts[n] = num_edges(n)
    return starts


def decode_edges(starts: np.ndarray, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`edge_endpoints` given ``row_starts(n)``."""
    indices = np.asarray(indices, dtype=np.int64)
    u = np.searchsorted(starts, indices, side="right") - 1
    v = indices - starts[u] + u + 1
    return u, v


class ComponentCensus:
    """Union-find over Avoider's graph plus component-size bookkeeping.

    ``parent[v]`` always holds the root of v's component (union by size with
    eager relabelling of the smaller side), so lookups are O(1) and vectorise.
    ``created_count[k]`` counts every size-k component ever created;
    ``current_count[k]`` counts those alive now.
    """

    def __init__(self, n: int):
        self.n = n
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)
        self._members: dict[int, list[int]] = {}
        self.created_count: Counter[int] = Counter({1: n})
        self.current_count: Counter[int] = Counter({1: n})
        self.components = n
        # Avoider edges that joined two vertices of one component.
        self.cycle_edges = 0

    def find(self, v: int) -> int:
        return int(self.parent[v])

    def component_size(self, v: int) -> int:
        return int(self.size[self.parent[v]])

    def vertex_sizes(self) -> np.ndarray:
        return self.size[self.parent]

    def members(self, v: int) -> list[int]:
        root = self.find(v)
        return list(self._members.get(root, [root]))

    def union(self, u: int, v: int) -> bool:
        """Merge the components of u and v; False if they already coincide."""
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            self.cycle_edges += 1
            return False
        su, sv = int(self.size[ru]), int(self.size[rv])
        if su < sv or (su == sv and rv < ru):
            ru, rv, su, sv = rv, ru, sv, su
        moved = self._members.pop(rv, [rv])
        self.parent[moved] = ru
        self._members.setdefault(ru, [ru]).extend(moved)
        self.size[ru] = su + sv
        for k in (su, sv):
            self.current_count[k] -= 1
            if not self.current_count[k]:
                del self.current_count[k]
        self.current_count[su + sv] += 1
        self.created_count[su + sv] += 1
        self.components -= 1
        return True

    @property
    def excess(self) -> int:
        """Number of independent cycles in Avoider's graph."""
        return self.cycle_edges


class Board:
    """Ownership of every edge of K_n plus per-vertex counters."""

    def __init__(self, n: int):
        if n < 2:
            raise InvalidConfig(f"need at least 2 vertices, got {n}")
        self.n = n
        self.num_edges = num_edges(n)
        self.row_start = row_starts(n)
        self._packed = np.zeros((self.num_edges + 3) // 4, dtype=np.uint8)
        self.unclaimed_total = self.num_edges
        self.unclaimed_at = np.full(n, n - 1, dtype=np.int64)
        # unclaimed edges (u, v) with v > u, i.e. inside row u of the index space
        self.row_unclaimed = (n - 1 - np.arange(n)).astype(np.int64)
        self.touched_by_avoider = np.zeros(n, dtype=bool)
        self.avoider_degree = np.zeros(n, dtype=np.int64)
        self.avoider_adj: dict[int, set[int]] = {}
        self.avoider_edges: list[int] = []
        self.enforcer_count = 0
        self.census = ComponentCensus(n)
        self._first_unclaimed = 0
        self._blocks = None

    # -- reading -------------------------------------------------------

    @property
    def avoider_count(self) -> int:
        return len(self.avoider_edges)

    def edge(self, u: int, v: int) -> int:
        return edge_index(self.n, u, v)

    def endpoints(self, index: int) -> tuple[int, int]:
        return edge_endpoints(self.n, index)

    def owner(self, index: int) -> Owner:
        if not 0 <= index < self.num_edges:
            raise IllegalMove(f"edge index {index} out of range", edge=index)
        return Owner((int(self._packed[index >> 2]) >> ((index & 3) << 1)) & 3)

    def owners(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        out = np.empty(len(indices), dtype=np.uint8)
        for lo in range(0, len(indices), CHUNK):
            idx = indices[lo:lo + CHUNK]
            shift = ((idx & 3) << 1).astype(np.uint8)
            out[lo:lo + CHUNK] = (self._packed[idx >> 2] >> shift) & 3
        return out

    def states(self, lo: int, hi: int) -> np.ndarray:
        """Unpacked ownership codes of the edge-index range ``[lo, hi)``."""
        if hi <= lo:
            return np.empty(0, dtype=np.uint8)
        raw = self._packed[lo >> 2:(hi + 3) >> 2]
        vals = ((raw[:, None] >> _SHIFTS) & 3).reshape(-1)
        off = lo & 3
        return vals[off:off + hi - lo]

    def row_states(self, u: int) -> np.ndarray:
        return self.states(int(self.row_start[u]), int(self.row_start[u + 1]))

    def incident_edges(self, v: int) -> np.ndarray:
        """All n-1 edge indices at v in increasing order."""
        u = np.arange(v, dtype=np.int64)
        column = self.row_start[:v] + (v - u - 1)
        row = np.arange(self.row_start[v], self.row_start[v + 1], dtype=np.int64)
        return np.concatenate([column, row])

    def avoider_pairs(self) -> list[tuple[int, int]]:
        return [self.endpoints(e) for e in self.avoider_edges]

    # -- claiming -------------------------------------------------------

    def claim(self, index: int, player: Owner) -> None:
        index = int(index)
        if self.owner(index) != Owner.UNCLAIMED:
            raise AlreadyClaimed(f"edge {index} already claimed", edge=index)
        u, v = self.endpoints(index)
        self._packed[index >> 2] |= np.uint8(int(player) << ((index & 3) << 1))
        self.unclaimed_total -= 1
        self.unclaimed_at[u] -= 1
        self.unclaimed_at[v] -= 1
        self.row_unclaimed[u] -= 1
        if player == Owner.AVOIDER:
            self._record_avoider(index, u, v)
        else:
            self.enforcer_count += 1

    def _record_avoider(self, index: int, u: int, v: int) -> None:
        self.avoider_edges.append(index)
        self.touched_by_avoider[u] = True
        self.touched_by_avoider[v] = True
        self.avoider_degree[u] += 1
        self.avoider_degree[v] += 1
        self.avoider_adj.setdefault(u, set()).add(v)
        self.avoider_adj.setdefault(v, set()).add(u)
        self.census.union(u, v)

    def check_claimable(self, indices: np.ndarray) -> None:
        """Raise unless ``indices`` are distinct, in range and unclaimed."""
        if len(indices) == 0:
            return
        if indices.min() < 0 or indices.max() >= self.num_edges:
            bad = indices[(indices < 0) | (indices >= self.num_edges)][0]
            raise IllegalMove(f"edge index {int(bad)} out of range", edge=int(bad))
        if len(indices) > 1 and not np.all(indices[1:] > indices[:-1]):
            ordered = np.sort(indices)
            dup = np.flatnonzero(ordered[1:] == ordered[:-1])
            if len(dup):
                e = int(ordered[dup[0]])
                raise IllegalMove(f"edge {e} listed twice in one move", edge=e)
        codes = self.owners(indices)
        taken = np.flatnonzero(codes != Owner.UNCLAIMED)
        if len(taken):
            e = int(indices[taken[0]])
            raise AlreadyClaimed(f"edge {e} already claimed", edge=e)

    def claim_many(self, indices, player: Owner) -> None:
        """Claim a whole move at once; validated before anything is written."""
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        self.check_claimable(indices)
        if player == Owner.AVOIDER:
            for e in indices.tolist():
                self.claim(e, player)
            return
        code = np.uint8(int(player))
        n = self.n
        for lo in range(0, len(indices), CHUNK):
            idx = indices[lo:lo + CHUNK]
            np.bitwise_or.at(self._packed, idx >> 2, (code << ((idx & 3) << 1)).astype(np.uint8))
            u, v = decode_edges(self.row_start, idx)
            row_hits = np.bincount(u, minlength=n)
            self.row_unclaimed -= row_hits
            self.unclaimed_at -= row_hits + np.bincount(v, minlength=n)
        self.unclaimed_total -= len(indices)
        self.enforcer_count += len(indices)

    # -- searches ---------------------------------------------------------

    def lowest_unclaimed(self, count: int, exclude=None) -> np.ndarray:
        """The ``count`` lowest-index unclaimed edges not listed in ``exclude``."""
        if count <= 0 or self.unclaimed_total == 0:
            return np.empty(0, dtype=np.int64)
        exclude = None if exclude is None or len(exclude) == 0 else np.unique(np.asarray(exclude, dtype=np.int64))
        found = []
        have = 0
        lo = self._first_unclaimed
        step = max(4096, min(CHUNK, 2 * count))
        moved_pointer = False
        while have < count and lo < self.num_edges:
            hi = min(self.num_edges, lo + step)
            free = np.flatnonzero(self.states(lo, hi) == Owner.UNCLAIMED) + lo
            if not moved_pointer:
                if len(free):
                    self._first_unclaimed = int(free[0])
                    moved_pointer = True
                else:
                    self._first_unclaimed = hi
            if exclude is not None and len(free):
                free = free[~_sorted_contains(exclude, free)]
            found.append(free[:count - have])
            have += len(found[-1])
            lo = hi
            step = min(CHUNK, step * 2)
        return np.concatenate(found) if found else np.empty(0, dtype=np.int64)

    def lowest_unclaimed_incident(self, v: int, count: int, exclude=None) -> np.ndarray:
        """Up to ``count`` unclaimed edges at v, lowest index first."""
        if count <= 0 or self.unclaimed_at[v] == 0:
            return np.empty(0, dtype=np.int64)
        inc = self.incident_edges(v)
        free = inc[self.owners(inc) == Owner.UNCLAIMED]
        if exclude is not None and len(exclude):
            free = free[~np.isin(free, np.asarray(exclude, dtype=np.int64))]
        return free[:count]

    def find_merge_edge(self, target_sum: int) -> int | None:
        """Lowest-index unclaimed edge joining two Avoider components whose
        sizes add up to ``target_sum``; None if there is none."""
        census = self.census
        present = census.current_count
        sizes = [s for s in present if s < target_sum and (
            (target_sum - s in present and target_sum - s != s) or present[s] >= 2)]
        if not sizes:
            return None
        root = census.parent
        vsize = census.size[root]
        rows = np.flatnonzero(np.isin(vsize, sizes) & (self.row_unclaimed > 0))
        for u in rows.tolist():
            need = target_sum - int(vsize[u])
            lo = int(self.row_start[u])
            st = self.row_states(u)
            mask = (st == Owner.UNCLAIMED) & (vsize[u + 1:] == need) & (root[u + 1:] != root[u])
            j = int(mask.argmax())
            if mask[j]:
                return lo + j
        return None

    def find_inter_component_edge(self) -> int | None:
        """Lowest-index unclaimed edge between two different Avoider components."""
        root = self.census.parent
        for u in np.flatnonzero(self.row_unclaimed > 0).tolist():
            mask = (self.row_states(u) == Owner.UNCLAIMED) & (root[u + 1:] != root[u])
            j = int(mask.argmax())
            if mask[j]:
                return int(self.row_start[u]) + j
        return None

    def sample_unclaimed(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """A uniformly random k-subset of the unclaimed edges, sorted by index."""
        k = min(k, self.unclaimed_total)
        if k <= 0:
            return np.empty(0, dtype=np.int64)
        if k == self.unclaimed_total:
            return self.lowest_unclaimed(k)
        density = self.unclaimed_total / self.num_edges
        if density >= 0.25 and 8 * k <= self.unclaimed_total:
            return self._sample_by_rejection(rng, k, density)
        return self._sample_by_rows(rng, k)

    def _sample_by_rejection(self, rng, k, density):
        # First k distinct unclaimed values of an i.i.d. uniform stream form a
        # uniform k-subset.
        chosen = np.empty(0, dtype=np.int64)
        while len(chosen) < k:
            draw = rng.integers(0, self.num_edges, size=int((k - len(chosen)) / density * 1.1) + 16)
            draw = draw[self.owners(draw) == Owner.UNCLAIMED]
            stream = np.concatenate([chosen, draw])
            _, first = np.unique(stream, return_index=True)
            chosen = stream[np.sort(first)][:k]
        return np.sort(chosen)

    def _sample_by_rows(self, rng, k):
        # Split k across blocks of whole rows (multivariate hypergeometric),
        # then draw a uniform subset inside each block.
        bounds = self._row_blocks()
        counts = np.add.reduceat(self.row_unclaimed, bounds[:-1])
        per_block = rng.multivariate_hypergeometric(counts, k, method="marginals")
        parts = []
        for i in np.flatnonzero(per_block).tolist():
            lo, hi = int(self.row_start[bounds[i]]), int(self.row_start[bounds[i + 1]])
            free = np.flatnonzero(self.states(lo, hi) == Owner.UNCLAIMED)
            pick = rng.choice(len(free), size=int(per_block[i]), replace=False)
            pick.sort()
            parts.append(free[pick] + lo)
        return np.concatenate(parts)

    def _row_blocks(self) -> np.ndarray:
        """Row indices cutting E(K_n) into blocks of about CHUNK edges."""
        if self._blocks is None:
            cuts = np.searchsorted(self.row_start, np.arange(0, self.num_edges, CHUNK), side="right") - 1
            cuts = np.unique(np.clip(cuts, 0, self.n - 1))
            self._blocks = np.append(cuts, self.n)
        return self._blocks

    def random_unclaimed(self, rng: np.random.Generator) -> int:
        if self.unclaimed_total == 0:
            raise BoardExhausted("no unclaimed edge left")
        if self.unclaimed_total * 8 >= self.num_edges:
            for _ in range(64):
                e = int(rng.integers(0, self.num_edges))
                if self.owner(e) == Owner.UNCLAIMED:
                    return e
        j = int(rng.integers(0, self.unclaimed_total))
        cum = np.cumsum(self.row_unclaimed)
        u = int(np.searchsorted(cum, j, side="right"))
        offset = j - (int(cum[u - 1]) if u else 0)
        free = np.flatnonzero(self.row_states(u) == Owner.UNCLAIMED)
        return int(self.row_start[u] + free[offset])

    # -- full recomputation (tests and audits) ---------------------------

    def ownership_counts(self) -> dict[Owner, int]:
        totals = np.zeros(3, dtype=np.int64)
        for lo in range(0, self.num_edges, CHUNK):
            st = self.states(lo, min(self.num_edges, lo + CHUNK))
            totals += np.bincount(st, minlength=4)[:3]
        return {o: int(totals[o]) for o in Owner}

    def check_invariants(self) -> None:
        """Recompute every counter from the raw edge states (O(n^2))."""
        counts = self.ownership_counts()
        assert counts[Owner.UNCLAIMED] == self.unclaimed_total
        assert counts[Owner.AVOIDER] == self.avoider_count
        assert counts[Owner.ENFORCER] == self.enforcer_count
        for v in range(self.n):
            inc = self.incident_edges(v)
            codes = self.owners(inc)
            assert int(np.sum(codes == Owner.UNCLAIMED)) == self.unclaimed_at[v], v
            assert int(np.sum(codes == Owner.AVOIDER)) == self.avoider_degree[v], v
        for u in range(self.n):
            assert int(np.sum(self.row_states(u) == Owner.UNCLAIMED)) == self.row_unclaimed[u]


def _sorted_contains(haystack: np.ndarray, values: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(haystack, values)
    pos[pos == len(haystack)] = 0
    return haystack[pos] == values


def new_board(n: int) -> Board:
    return Board(n)
