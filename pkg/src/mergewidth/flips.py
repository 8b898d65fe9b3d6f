"""Partition flips, the flip metric and resolved-pair balls.

The exact flip ball of ``v`` is the intersection of the radius-``r`` balls
of ``v`` over every P-flip.  Instead of enumerating all flips it is
computed by a breadth-first search that only branches on a flip bit at the
moment that bit changes which vertices join the next layer.  Two flips that
agree on every bit the search inspected produce the same ball, so the
search visits every distinct ball.  Branches whose visited set already
covers the running intersection cannot shrink it and are cut.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .graph import INF, BudgetExceeded, Graph, Partition, ball_mask, bits


class Mode(str, Enum):
    EXACT = "EXACT"
    UPPER = "UPPER"
    LOWER = "LOWER"


@dataclass(frozen=True)
class FlipConfig:
    exact_cap: int = 6
    samples: int = 1024
    restarts: int = 8
    seed: int = 0


DEFAULT_CONFIG = FlipConfig()


@dataclass(frozen=True)
class FlipSpec:
    """Unordered part-id pairs to complement; ``(i, i)`` flips a part with itself."""

    pairs: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> FlipSpec:
        return cls(frozenset((min(a, b), max(a, b)) for a, b in pairs))

    def check(self, partition: Partition) -> None:
        p = len(partition)
        for a, b in self.pairs:
            if not (0 <= a < p and 0 <= b < p):
                raise ValueError(f"flip pair {(a, b)} references a missing part")


@dataclass(frozen=True)
class ResolvedSet:
    """Set of resolved vertex pairs, stored as adjacency rows of the graph (V, R)."""

    n: int
    rows: tuple[int, ...]

    @classmethod
    def empty(cls, n: int) -> ResolvedSet:
        return cls(n, (0,) * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> ResolvedSet:
        rows = [0] * n
        for u, v in pairs:
            if u == v:
                raise ValueError(f"self-pair at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_graph(cls, g: Graph) -> ResolvedSet:
        return cls(g.n, g.adj)

    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.rows[u] >> (u + 1) << (u + 1))]

    def __len__(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def __contains__(self, pair: tuple[int, int]) -> bool:
        u, v = pair
        return bool(self.rows[u] >> v & 1)

    def union(self, other: ResolvedSet) -> ResolvedSet:
        return ResolvedSet(self.n, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def issubset(self, other: ResolvedSet) -> bool:
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def ball(self, v: int, r: int) -> int:
        return ball_mask(self.rows, v, r)


def resolved_ball(resolved: ResolvedSet, v: int, r: int) -> frozenset[int]:
    return frozenset(bits(resolved.ball(v, r)))


def flip_rows(g: Graph, partition: Partition, spec: FlipSpec) -> list[int]:
    parts = partition.parts
    mask = [0] * len(parts)
    for a, b in spec.pairs:
        mask[a] |= parts[b]
        mask[b] |= parts[a]
    part_of = partition.part_of
    return [(row ^ mask[part_of[u]]) & ~(1 << u) for u, row in enumerate(g.adj)]


def apply_flip(g: Graph, partition: Partition, spec: FlipSpec) -> Graph:
    spec.check(partition)
    return Graph._trusted(g.n, flip_rows(g, partition, spec))


def effective_pairs(partition: Partition) -> list[tuple[int, int]]:
    """Part pairs whose flip changes the graph (a singleton flipped with itself does not)."""
    p = len(partition)
    parts = partition.parts
    return [
        (a, b)
        for a in range(p)
        for b in range(a, p)
        if a != b or parts[a].bit_count() > 1
    ]


def iter_flip_rows(g: Graph, partition: Partition) -> Iterator[list[int]]:
    """Every distinct P-flip by plain enumeration (used by the oracles)."""
    pairs = effective_pairs(partition)
    parts = partition.parts
    part_of = partition.part_of
    for code in range(1 << len(pairs)):
        mask = [0] * len(parts)
        for i, (a, b) in enumerate(pairs):
            if code >> i & 1:
                mask[a] |= parts[b]
                mask[b] |= parts[a]
        yield [(row ^ mask[part_of[u]]) & ~(1 << u) for u, row in enumerate(g.adj)]


def brute_force_flip_balls(g: Graph, partition: Partition, r: int) -> tuple[int, ...]:
    """Flip balls by enumerating all flips; exponential in the number of part pairs."""
    balls = [g.full] * g.n
    for rows in iter_flip_rows(g, partition):
        for v in range(g.n):
            balls[v] &= ball_mask(rows, v, r)
    return tuple(balls)


class _Search:
    """Lazy-branching search for exact flip balls of one (graph, partition)."""

    def __init__(self, g: Graph, partition: Partition) -> None:
        self.adj = g.adj
        self.n = g.n
        self.part_of = partition.part_of
        parts = partition.parts
        self.p = p = len(parts)
        # Per vertex u and part Y: neighbours of u in Y unflipped, and flipped.
        self.plain = [[row & parts[y] for y in range(p)] for row in g.adj]
        self.flipped = [
            [parts[y] & ~row & ~(1 << u) for y in range(p)] for u, row in enumerate(g.adj)
        ]

    def ball(self, v: int, r: int) -> int:
        if r <= 0:
            return 1 << v
        p = self.p
        part_of = self.part_of
        plain = self.plain
        flipped = self.flipped
        assign = [-1] * (p * p)
        best = [(1 << self.n) - 1]

        def layer(visited: int, frontier: int, depth: int) -> None:
            if depth == r or not frontier:
                best[0] &= visited
                return
            contrib: dict[int, list[int]] = {}
            for u in bits(frontier):
                x = part_of[u]
                pu = plain[u]
                fu = flipped[u]
                for y in range(p):
                    key = x * p + y if x <= y else y * p + x
                    c = contrib.get(key)
                    if c is None:
                        contrib[key] = [pu[y], fu[y]]
                    else:
                        c[0] |= pu[y]
                        c[1] |= fu[y]
            fixed = 0
            pending = []
            for key, (a0, a1) in contrib.items():
                b = assign[key]
                if b == 0 or a0 == a1:
                    fixed |= a0
                elif b == 1:
                    fixed |= a1
                else:
                    pending.append((key, a0, a1))
            branch(0, pending, visited, fixed & ~visited, depth)

        def branch(i: int, pending: list, visited: int, nxt: int, depth: int) -> None:
            seen = visited | nxt
            if best[0] & ~seen == 0:
                return
            if i == len(pending):
                layer(seen, nxt, depth + 1)
                return
            key, a0, a1 = pending[i]
            n0 = a0 & ~seen
            n1 = a1 & ~seen
            if n0 == n1:
                branch(i + 1, pending, visited, nxt | n0, depth)
                return
            options = ((0, n0), (1, n1)) if n0.bit_count() <= n1.bit_count() else ((1, n1), (0, n0))
            for b, new in options:
                assign[key] = b
                branch(i + 1, pending, visited, nxt | new, depth)
            assign[key] = -1

        layer(1 << v, 1 << v, 0)
        return best[0]


@functools.lru_cache(maxsize=1 << 14)
def _exact_balls(g: Graph, partition: Partition, r: int) -> tuple[int, ...]:
    search = _Search(g, partition)
    return tuple(search.ball(v, r) for v in range(g.n))


def _toggle(rows: list[int], parts: Sequence[int], a: int, b: int) -> None:
    for u in bits(parts[a]):
        rows[u] ^= parts[b] & ~(1 << u)
    if a != b:
        for u in bits(parts[b]):
            rows[u] ^= parts[a]


@functools.lru_cache(maxsize=1 << 12)
def _sampled_balls(g: Graph, partition: Partition, r: int, config: FlipConfig) -> tuple[int, ...]:
    """Intersection of balls over sampled and greedily chosen flips.

    Every flip visited contributes its balls, so the result contains the
    exact flip ball.
    """
    pairs = effective_pairs(partition)
    parts = partition.parts
    rng = random.Random(config.seed)
    balls = [g.full] * g.n
    for _ in range(config.samples):
        rows = list(g.adj)
        for a, b in pairs:
            if rng.random() < 0.5:
                _toggle(rows, parts, a, b)
        for v in range(g.n):
            balls[v] &= ball_mask(rows, v, r)
    for v in range(g.n):
        local = random.Random(config.seed * 1_000_003 + v + 1)
        for _ in range(config.restarts):
            rows = list(g.adj)
            for a, b in pairs:
                if local.random() < 0.5:
                    _toggle(rows, parts, a, b)
            current = ball_mask(rows, v, r)
            balls[v] &= current
            improved = True
            while improved:
                improved = False
                for a, b in pairs:
                    _toggle(rows, parts, a, b)
                    trial = ball_mask(rows, v, r)
                    balls[v] &= trial
                    if trial.bit_count() < current.bit_count():
                        current = trial
                        improved = True
                    else:
                        _toggle(rows, parts, a, b)
    return tuple(balls)


def flip_balls(
    g: Graph,
    partition: Partition,
    r: int,
    mode: str = "exact",
    config: FlipConfig = DEFAULT_CONFIG,
) -> tuple[tuple[int, ...], Mode]:
    """Flip balls of every vertex as bitsets, with the mode they were computed in.

    ``exact`` refuses partitions with more than ``config.exact_cap`` parts,
    ``sampled`` always samples, ``auto`` picks exact when allowed.
    """
    if mode == "auto":
        mode = "exact" if len(partition) <= config.exact_cap else "sampled"
    if mode == "exact":
        if len(partition) > config.exact_cap:
            raise BudgetExceeded(
                f"exact flip balls need at most {config.exact_cap} parts, got {len(partition)}"
            )
        return _exact_balls(g, partition, r), Mode.EXACT
    if mode == "sampled":
        return _sampled_balls(g, partition, r, config), Mode.UPPER
    raise ValueError(f"unknown mode {mode!r}")


def flip_ball(
    g: Graph,
    partition: Partition,
    v: int,
    r: int,
    mode: str = "exact",
    config: FlipConfig = DEFAULT_CONFIG,
) -> frozenset[int]:
    balls, _ = flip_balls(g, partition, r, mode, config)
    return frozenset(bits(balls[v]))


def flip_dist(
    g: Graph,
    partition: Partition,
    x: int,
    y: int,
    cap: int | None = None,
    mode: str = "exact",
    config: FlipConfig = DEFAULT_CONFIG,
) -> float:
    """Largest distance between ``x`` and ``y`` over all P-flips, ``INF`` beyond ``cap``.

    In sampled mode the balls are supersets, so the value is a lower bound.
    """
    if x == y:
        return 0
    if cap is None:
        cap = g.n
    for r in range(1, cap + 1):
        balls, _ = flip_balls(g, partition, r, mode, config)
        if balls[x] >> y & 1:
            return r
    return INF


def inhomogeneous_pairs(g: Graph, partition: Partition, resolved: ResolvedSet) -> list[tuple[int, int]]:
    """Part pairs whose unresolved pairs mix edges and non-edges."""
    return _homogeneity(g, partition, resolved)[1]


def _homogeneity(
    g: Graph, partition: Partition, resolved: ResolvedSet
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    parts = partition.parts
    p = len(parts)
    adj = g.adj
    rrows = resolved.rows
    to_flip = []
    bad = []
    for a in range(p):
        for b in range(a, p):
            has_edge = has_non = False
            for u in bits(parts[a]):
                open_pairs = parts[b] & ~rrows[u] & ~(1 << u)
                if adj[u] & open_pairs:
                    has_edge = True
                if open_pairs & ~adj[u]:
                    has_non = True
                if has_edge and has_non:
                    break
            if has_edge and has_non:
                bad.append((a, b))
            elif has_edge:
                to_flip.append((a, b))
    return to_flip, bad


def homogeneous_modulo(
    g: Graph, partition: Partition, resolved: ResolvedSet
) -> tuple[bool, FlipSpec | None]:
    """Whether every part pair is homogeneous outside ``resolved``.

    The witness flips exactly the pairs whose unresolved pairs are edges,
    so every edge of the flipped graph is a resolved pair.
    """
    to_flip, bad = _homogeneity(g, partition, resolved)
    if bad:
        return False, None
    return True, FlipSpec.of(to_flip)
