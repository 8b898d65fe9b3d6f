"""Graphs on dense integer ids with bitset adjacency, and partition algebra.

Vertex sets are plain Python ints used as bitsets: bit ``v`` is set iff
vertex ``v`` belongs to the set.  Every public type here is immutable and
hashable so results can be cached on them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INF = math.inf


class BudgetExceeded(ValueError):
    """Raised when an exact computation would exceed its configured cap."""


def bits(mask: int) -> Iterator[int]:
    """Yield the members of a bitset in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def ball_mask(adj: Sequence[int], v: int, r: int) -> int:
    """Closed radius-``r`` ball around ``v`` in the graph with rows ``adj``."""
    seen = 1 << v
    frontier = seen
    for _ in range(r):
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= ~seen
        if not nxt:
            break
        seen |= nxt
        frontier = nxt
    return seen


def distances_from(adj: Sequence[int], v: int) -> list[float]:
    """BFS distances from ``v``; unreachable vertices get ``INF``."""
    dist: list[float] = [INF] * len(adj)
    dist[v] = 0
    seen = 1 << v
    frontier = seen
    d = 0
    while frontier:
        d += 1
        nxt = 0
        for u in bits(frontier):
            nxt |= adj[u]
        nxt &= ~seen
        for u in bits(nxt):
            dist[u] = d
        seen |= nxt
        frontier = nxt
    return dist


def eccentricity_within(adj: Sequence[int], v: int, within: int) -> float:
    """Eccentricity of ``v`` in the subgraph induced by ``within``."""
    seen = 1 << v
    frontier = seen
    d = 0
    while frontier:
        nxt = 0
        for u in bits(frontier):
            nxt |= adj[u]
        nxt &= within & ~seen
        if not nxt:
            break
        d += 1
        seen |= nxt
        frontier = nxt
    return d if seen == within else INF


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise ValueError("adjacency has wrong length")
        full = (1 << self.n) - 1
        for u, row in enumerate(self.adj):
            if row >> u & 1:
                raise ValueError(f"self-loop at {u}")
            if row & ~full:
                raise ValueError(f"row {u} references a missing vertex")
            for v in bits(row):
                if not self.adj[v] >> u & 1:
                    raise ValueError(f"asymmetric adjacency at {u},{v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} leaves the vertex range 0..{n - 1}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def _trusted(cls, n: int, adj: Sequence[int]) -> Graph:
        # Skips validation; callers guarantee a symmetric loopless row set.
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "adj", tuple(adj))
        return g

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def complement(self) -> Graph:
        full = self.full
        return Graph._trusted(self.n, [full & ~row & ~(1 << u) for u, row in enumerate(self.adj)])

    def induced_rows(self, within: int) -> list[int]:
        return [row & within for row in self.adj]

    def ball(self, v: int, r: int) -> int:
        return ball_mask(self.adj, v, r)

    def distances(self, v: int) -> list[float]:
        return distances_from(self.adj, v)

    def dist(self, u: int, v: int) -> float:
        return distances_from(self.adj, u)[v]

    def diameter(self, within: int | None = None) -> float:
        """Diameter of the subgraph induced by ``within`` (all of ``G`` by default)."""
        if within is None:
            within = self.full
        if within == 0:
            return 0
        return max(eccentricity_within(self.adj, v, within) for v in bits(within))


@dataclass(frozen=True)
class Partition:
    """Vertex partition with part ids numbered by increasing minimum vertex."""

    part_of: tuple[int, ...]
    parts: tuple[int, ...]

    @classmethod
    def from_keys(cls, keys: Sequence[object]) -> Partition:
        """Group vertices with equal keys; ids follow first occurrence."""
        ids: dict[object, int] = {}
        part_of = []
        parts: list[int] = []
        for v, key in enumerate(keys):
            pid = ids.get(key)
            if pid is None:
                pid = ids[key] = len(parts)
                parts.append(0)
            parts[pid] |= 1 << v
            part_of.append(pid)
        return cls(tuple(part_of), tuple(parts))

    @classmethod
    def from_parts(cls, n: int, parts: Iterable[Iterable[int]]) -> Partition:
        keys: list[int | None] = [None] * n
        for i, part in enumerate(parts):
            members = list(part)
            if not members:
                raise ValueError("empty part")
            for v in members:
                if keys[v] is not None:
                    raise ValueError(f"vertex {v} in two parts")
                keys[v] = i
        if any(k is None for k in keys):
            raise ValueError("parts do not cover all vertices")
        return cls.from_keys(keys)

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> Partition:
        return cls.from_parts(n, (list(bits(m)) for m in masks))

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(tuple(range(n)), tuple(1 << v for v in range(n)))

    @classmethod
    def whole(cls, n: int) -> Partition:
        return cls((0,) * n, ((1 << n) - 1,) if n else ())

    @property
    def n(self) -> int:
        return len(self.part_of)

    def __len__(self) -> int:
        return len(self.parts)

    def as_lists(self) -> list[list[int]]:
        return [list(bits(m)) for m in self.parts]

    def part_mask_of(self, v: int) -> int:
        return self.parts[self.part_of[v]]

    def is_singletons(self) -> bool:
        return len(self.parts) == self.n

    def refines(self, other: Partition) -> bool:
        """True iff every part of ``self`` lies inside a part of ``other``."""
        image: dict[int, int] = {}
        for v, p in enumerate(self.part_of):
            q = other.part_of[v]
            if image.setdefault(p, q) != q:
                return False
        return True

    def meet(self, other: Partition) -> Partition:
        """Common refinement."""
        return Partition.from_keys(list(zip(self.part_of, other.part_of)))

    def merged(self, i: int, j: int) -> Partition:
        """Partition obtained by merging parts ``i`` and ``j``."""
        keys = [i if p == j else p for p in self.part_of]
        return Partition.from_keys(keys)

    def transversal(self) -> int:
        """Minimum vertex of every part."""
        return to_mask((m & -m).bit_length() - 1 for m in self.parts)


def quotient_count(s: int, partition: Partition) -> int:
    """Number of parts of ``partition`` meeting the vertex set ``s``."""
    part_of = partition.part_of
    return len({part_of[v] for v in bits(s)})


@dataclass(frozen=True)
class PartitionChain:
    partitions: tuple[Partition, ...]

    def __post_init__(self) -> None:
        ps = self.partitions
        if not ps:
            raise ValueError("empty chain")
        n = ps[0].n
        if not ps[0].is_singletons():
            raise ValueError("chain must start with singletons")
        if len(ps[-1]) != min(n, 1):
            raise ValueError("chain must end with a single part")
        for a, b in zip(ps, ps[1:]):
            if b.n != n or len(b) >= len(a) or not a.refines(b):
                raise ValueError("chain is not strictly coarsening")

    def __len__(self) -> int:
        return len(self.partitions)

    def is_maximal(self) -> bool:
        return all(len(a) == len(b) + 1 for a, b in zip(self.partitions, self.partitions[1:]))


@dataclass(frozen=True)
class VertexOrder:
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("order is not a permutation")

    @property
    def position(self) -> tuple[int, ...]:
        pos = [0] * len(self.order)
        for i, v in enumerate(self.order):
            pos[v] = i
        return tuple(pos)

    def prefix(self, k: int) -> int:
        return to_mask(self.order[:k])


def atomic_types(g: Graph, s: int) -> Partition:
    """Vertices of ``s`` as singletons, the rest grouped by trace on ``s``."""
    if s < 0 or s & ~g.full:
        raise ValueError("vertex set leaves the vertex range")
    adj = g.adj
    keys: list[object] = []
    for v in range(g.n):
        if s >> v & 1:
            keys.append(("in", v))
        else:
            keys.append(adj[v] & s)
    return Partition.from_keys(keys)


def s_refinement(g: Graph, partition: Partition, s: int) -> Partition:
    """Split each part by the trace on ``s`` outside the part."""
    adj = g.adj
    parts = partition.parts
    keys = []
    for v, p in enumerate(partition.part_of):
        keys.append((p, adj[v] & s & ~parts[p]))
    return Partition.from_keys(keys)


def trace_count(g: Graph, a: int) -> int:
    """Number of distinct traces ``N(v) & a`` over all vertices."""
    return len({row & a for row in g.adj})


def neighbourhood_complexity(
    g: Graph, m: int, mode: str = "exact", max_subsets: int = math.comb(64, 4)
) -> int:
    """Largest number of distinct neighbourhood traces on a set of at most ``m`` vertices.

    The trace count only grows when the set grows, so exact mode checks the
    sets of size ``min(m, n)``.  ``greedy_lower`` builds one set greedily and
    returns a lower bound.
    """
    if g.n == 0:
        return 0
    size = min(m, g.n)
    if size <= 0:
        return 1
    if mode == "exact":
        if math.comb(g.n, size) > max_subsets:
            raise BudgetExceeded(f"exact neighbourhood complexity needs C({g.n},{size}) subsets")
        best = 0
        for combo in itertools.combinations(range(g.n), size):
            best = max(best, trace_count(g, to_mask(combo)))
            if best == min(1 << size, g.n):
                break
        return best
    if mode == "greedy_lower":
        chosen = 0
        for _ in range(size):
            chosen |= 1 << max(
                (v for v in range(g.n) if not chosen >> v & 1),
                key=lambda v: (trace_count(g, chosen | 1 << v), -v),
            )
        return trace_count(g, chosen)
    raise ValueError(f"unknown mode {mode!r}")


def is_shattered(g: Graph, a: int) -> bool:
    return trace_count(g, a) == 1 << a.bit_count()


def vc_dimension(g: Graph, mode: str = "exact", max_n: int = 16) -> int:
    """VC-dimension of the neighbourhood set system.

    Exact mode searches sizes upward; a set of size ``d`` can only be
    shattered if ``2**d <= n``, and subsets of shattered sets are
    shattered, so the search stops at the first size with no witness.
    """
    if mode == "exact" and g.n > max_n:
        raise BudgetExceeded(f"exact VC-dimension capped at n <= {max_n}")
    if mode not in ("exact", "greedy_lower"):
        raise ValueError(f"unknown mode {mode!r}")
    best = 0
    if mode == "greedy_lower":
        chosen = 0
        while True:
            ext = [v for v in range(g.n) if not chosen >> v & 1 and is_shattered(g, chosen | 1 << v)]
            if not ext:
                return best
            chosen |= 1 << ext[0]
            best += 1
    d = 1
    while (1 << d) <= g.n:
        if not any(is_shattered(g, to_mask(c)) for c in itertools.combinations(range(g.n), d)):
            break
        best = d
        d += 1
    return best
