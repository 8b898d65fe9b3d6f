"""Partition and definable widths, and exhaustive oracles for tiny graphs.

The oracles deliberately use plain flip enumeration rather than the lazy
search in ``flips`` so the two can be checked against each other.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from .flips import (
    DEFAULT_CONFIG,
    FlipConfig,
    Mode,
    ResolvedSet,
    brute_force_flip_balls,
    flip_balls,
    inhomogeneous_pairs,
    iter_flip_rows,
)
from .graph import BudgetExceeded, Graph, Partition, PartitionChain, VertexOrder, atomic_types, ball_mask, bits
from .sequences import MergeSequence, TransientSequence, merge_step_width

VARIANTS = ("mw", "tmw", "pmw", "dmw")


@dataclass
class WidthReport:
    variant: str
    radius: int
    value: int
    mode: Mode
    witness: Any = None
    details: dict[str, Any] = field(default_factory=dict)


def _count_parts(ball: int, part_of: Sequence[int]) -> int:
    return len({part_of[u] for u in bits(ball)})


def ball_width(balls: Sequence[int], partition: Partition) -> int:
    part_of = partition.part_of
    return max((_count_parts(b, part_of) for b in balls), default=1)


def partition_width(
    g: Graph,
    chain: PartitionChain | Sequence[Partition],
    r: int,
    mode: str = "exact",
    config: FlipConfig = DEFAULT_CONFIG,
) -> WidthReport:
    """max over i, v of |flip_ball(P_{i+1}, v, r) / P_i|."""
    parts = chain.partitions if isinstance(chain, PartitionChain) else tuple(chain)
    value = 1
    modes = set()
    for fine, coarse in zip(parts, parts[1:]):
        balls, used = flip_balls(g, coarse, r, mode, config)
        modes.add(used)
        value = max(value, ball_width(balls, fine))
    tag = Mode.UPPER if Mode.UPPER in modes else Mode.EXACT
    return WidthReport("pmw", r, value, tag, witness=parts)


def definable_partitions(g: Graph, order: VertexOrder) -> list[Partition]:
    """P_i = atomic types over the first n - i vertices, for i = 1..n."""
    n = g.n
    return [atomic_types(g, order.prefix(n - i)) for i in range(1, n + 1)]


def definable_width(
    g: Graph,
    order: VertexOrder,
    r: int,
    mode: str = "exact",
    config: FlipConfig = DEFAULT_CONFIG,
) -> WidthReport:
    """max over i, v of |flip_ball(P_i, v, r) / P_i| for the prefix partitions."""
    value = 1
    modes = set()
    for p in definable_partitions(g, order):
        balls, used = flip_balls(g, p, r, mode, config)
        modes.add(used)
        value = max(value, ball_width(balls, p))
    tag = Mode.UPPER if Mode.UPPER in modes else Mode.EXACT
    return WidthReport("dmw", r, value, tag, witness=order)


# --- oracles -----------------------------------------------------------------


def _merges(p: Partition) -> Iterator[Partition]:
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            yield p.merged(i, j)


def _coarsenings(p: Partition) -> Iterator[Partition]:
    """Every strict coarsening of ``p``."""
    ids = list(range(len(p)))
    for blocks in _set_partitions(ids):
        if len(blocks) < len(p):
            keys = [0] * len(p)
            for b, block in enumerate(blocks):
                for i in block:
                    keys[i] = b
            yield Partition.from_keys([keys[q] for q in p.part_of])


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield [[first]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]


def _resolution_choices(g: Graph, p: Partition, resolved: ResolvedSet) -> Iterator[ResolvedSet]:
    """Minimal ways to make ``p`` homogeneous: per mixed pair resolve its edges or its non-edges."""
    bad = inhomogeneous_pairs(g, p, resolved)
    parts = p.parts
    for choice in itertools.product((0, 1), repeat=len(bad)):
        rows = list(resolved.rows)
        for (a, b), c in zip(bad, choice):
            for u in bits(parts[a]):
                open_pairs = parts[b] & ~rows[u] & ~(1 << u)
                new = open_pairs & (g.adj[u] if c == 0 else ~g.adj[u])
                rows[u] |= new
                for v in bits(new):
                    rows[v] |= 1 << u
        yield ResolvedSet(g.n, tuple(rows))


def _mw_oracle(g: Graph, r: int, maximal: bool = True) -> tuple[int, MergeSequence]:
    successors = _merges if maximal else _coarsenings

    @functools.lru_cache(maxsize=None)
    def value(p: Partition, resolved: ResolvedSet) -> tuple[int, Any]:
        if len(p) <= 1:
            return 0, None
        best: tuple[int, Any] = (g.n + 1, None)
        for q in successors(p):
            for nxt in _resolution_choices(g, q, resolved):
                cost = merge_step_width(p, nxt, r)
                if cost >= best[0]:
                    continue
                total = max(cost, value(q, nxt)[0])
                if total < best[0]:
                    best = (total, (q, nxt))
        return best

    start = (Partition.singletons(g.n), ResolvedSet.empty(g.n))
    steps = [start]
    while True:
        _, nxt = value(*steps[-1])
        if nxt is None:
            break
        steps.append(nxt)
    return max(value(*start)[0], 1), MergeSequence(tuple(steps))


def _step_dp(g: Graph, cost) -> tuple[int, list[Partition]]:
    """Bottleneck over maximal chains, where cost(P, Q) scores the step P -> Q."""

    @functools.lru_cache(maxsize=None)
    def value(p: Partition) -> tuple[int, Partition | None]:
        if len(p) <= 1:
            return 0, None
        best: tuple[int, Partition | None] = (g.n + 1, None)
        for q in _merges(p):
            c = cost(p, q)
            if c >= best[0]:
                continue
            total = max(c, value(q)[0])
            if total < best[0]:
                best = (total, q)
        return best

    chain = [Partition.singletons(g.n)]
    while True:
        nxt = value(chain[-1])[1]
        if nxt is None:
            break
        chain.append(nxt)
    return max(value(chain[0])[0], 1), chain


def _tmw_oracle(g: Graph, r: int) -> tuple[int, TransientSequence]:
    @functools.lru_cache(maxsize=None)
    def flip_options(q: Partition) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
        out = []
        for rows in iter_flip_rows(g, q):
            out.append((tuple(rows), tuple(ball_mask(rows, v, r) for v in range(g.n))))
        return tuple(out)

    @functools.lru_cache(maxsize=None)
    def step(p: Partition, q: Partition) -> tuple[int, tuple[int, ...]]:
        best = None
        for rows, balls in flip_options(q):
            c = ball_width(balls, p)
            if best is None or c < best[0]:
                best = (c, rows)
        assert best is not None
        return best

    value, chain = _step_dp(g, lambda p, q: step(p, q)[0])
    steps = [(chain[0], g)]
    for p, q in zip(chain, chain[1:]):
        steps.append((q, Graph._trusted(g.n, step(p, q)[1])))
    return value, TransientSequence(tuple(steps))


def _pmw_oracle(g: Graph, r: int) -> tuple[int, list[Partition]]:
    balls = functools.lru_cache(maxsize=None)(lambda q: brute_force_flip_balls(g, q, r))
    return _step_dp(g, lambda p, q: ball_width(balls(q), p))


def _definable_cost(g: Graph, s: int, r: int) -> int:
    p = atomic_types(g, s)
    return ball_width(brute_force_flip_balls(g, p, r), p)


def _dmw_oracle(g: Graph, r: int) -> tuple[int, VertexOrder]:
    """Bottleneck over prefix chains; equal to the minimum over all n! orders."""
    n = g.n
    if n == 0:
        return 1, VertexOrder(())
    full = g.full
    best: dict[int, tuple[int, int]] = {0: (_definable_cost(g, 0, r), -1)}
    for size in range(1, n):
        for combo in itertools.combinations(range(n), size):
            s = sum(1 << v for v in combo)
            choice = min((best[s & ~(1 << v)][0], v) for v in combo)
            best[s] = (max(choice[0], _definable_cost(g, s, r)), choice[1])
    value, last = min((best[full & ~(1 << v)][0], v) for v in range(n))
    order = [last]
    s = full & ~(1 << last)
    while s:
        v = best[s][1]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    return max(value, 1), VertexOrder(tuple(order))


def dmw_by_orders(g: Graph, r: int) -> int:
    """Reference value from all n! orders, for checking the subset DP."""
    n = g.n
    best = None
    cache: dict[int, int] = {}
    for perm in itertools.permutations(range(n)):
        worst = 1
        for i in range(1, n + 1):
            s = sum(1 << v for v in perm[: n - i])
            if s not in cache:
                cache[s] = _definable_cost(g, s, r)
            worst = max(worst, cache[s])
        best = worst if best is None else min(best, worst)
    return 1 if best is None else best


def exact_width(g: Graph, variant: str, r: int, max_n: int = 5) -> WidthReport:
    """Exhaustive optimum of a width variant at radius ``r``."""
    if g.n > max_n:
        raise BudgetExceeded(f"exact oracle capped at n <= {max_n}")
    if variant == "mw":
        value, seq = _mw_oracle(g, r)
        details = {}
        if g.n <= 4:
            details["unrestricted"] = _mw_oracle(g, r, maximal=False)[0]
        return WidthReport("mw", r, value, Mode.EXACT, seq, details)
    if variant == "tmw":
        value, tseq = _tmw_oracle(g, r)
        return WidthReport("tmw", r, value, Mode.EXACT, tseq)
    if variant == "pmw":
        value, chain = _pmw_oracle(g, r)
        return WidthReport("pmw", r, value, Mode.EXACT, PartitionChain(tuple(chain)))
    if variant == "dmw":
        value, order = _dmw_oracle(g, r)
        return WidthReport("dmw", r, value, Mode.EXACT, order)
    raise ValueError(f"unknown variant {variant!r}")


def infinite_radius(
    g: Graph,
    variant: str,
    mode: str = "exact",
    certificate: Any = None,
    config: FlipConfig = DEFAULT_CONFIG,
    max_n: int = 5,
) -> WidthReport:
    """Evaluate at radius n - 1, where every ball already spans its component."""
    from .sequences import transient_width, width_merge

    r = max(g.n - 1, 1)
    if certificate is None:
        return exact_width(g, variant, r, max_n)
    if variant == "mw":
        rep = WidthReport("mw", r, width_merge(g, certificate, r), Mode.EXACT, certificate)
    elif variant == "tmw":
        rep = WidthReport("tmw", r, transient_width(g, certificate, r), Mode.EXACT, certificate)
    elif variant == "pmw":
        rep = partition_width(g, certificate, r, mode, config)
    elif variant == "dmw":
        rep = definable_width(g, certificate, r, mode, config)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    # The value is exact for the certificate and an upper bound for the graph.
    rep.details["of"] = "certificate"
    return rep
