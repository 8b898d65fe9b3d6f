"""Constructive conversions between width certificates.

* ``local_flip`` builds, for a partition and a transversal, a flip of the
  refined partition whose edges all have flip distance at most 6.
* ``chain_to_merge`` turns a partition chain into a 6-firm merge sequence.
* ``build_sample_sets`` / ``build_definable_order`` turn a merge sequence
  into a vertex order through witnesses and dual sets.
* ``approx_merge_width`` is the subset dynamic program over all vertex sets.

Ties are always broken towards the smallest vertex id.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .flips import ResolvedSet
from .graph import (
    INF,
    BudgetExceeded,
    Graph,
    Partition,
    PartitionChain,
    VertexOrder,
    atomic_types,
    ball_mask,
    bits,
    eccentricity_within,
    s_refinement,
)
from .sequences import MergeSequence, TransientSequence, canonicalize

FAR = 6


# --- diameter dichotomy and bipartite flips ----------------------------------


def _diameter(rows: Sequence[int], within: int, limit: float = INF) -> float:
    """Diameter of the graph ``rows`` induced on ``within``; stops early once above ``limit``."""
    best: float = 0
    for v in bits(within):
        e = eccentricity_within(rows, v, within)
        if e > best:
            best = e
            if best > limit:
                return best
    return best


def _complement_rows(adj: Sequence[int], within: int) -> list[int]:
    rows = [0] * len(adj)
    for u in bits(within):
        rows[u] = within & ~adj[u] & ~(1 << u)
    return rows


def diameter_side(g: Graph, within: int | None = None) -> tuple[str, float]:
    """Pick the side (``"G"`` or ``"complement"``) of diameter at most 3, preferring ``G``."""
    if within is None:
        within = g.full
    d = _diameter(g.adj, within, 3)
    if d <= 3:
        return "G", d
    dc = _diameter(_complement_rows(g.adj, within), within, 3)
    if dc > 3:
        raise AssertionError("neither the graph nor its complement has diameter at most 3")
    return "complement", dc


@dataclass(frozen=True)
class BipartiteFlip:
    case: int
    blocks: tuple[tuple[int, int], ...]
    rows: dict[int, int]


def _bipartite_rows(adj: Sequence[int], xs: int, ys: int, flip: bool) -> list[int]:
    rows = [0] * len(adj)
    for u in bits(xs):
        rows[u] = (ys & ~adj[u]) if flip else (adj[u] & ys)
    for u in bits(ys):
        rows[u] = (xs & ~adj[u]) if flip else (adj[u] & xs)
    return rows


def _is_union_of_bicliques(adj: Sequence[int], xs: int, ys: int, x1: int, y1: int) -> bool:
    """B consists exactly of the bicliques (x1, y1) and (xs - x1, ys - y1), all sides nonempty."""
    x2, y2 = xs & ~x1, ys & ~y1
    if not (x1 and x2 and y1 and y2):
        return False
    return all(adj[u] & ys == y1 for u in bits(x1)) and all(adj[u] & ys == y2 for u in bits(x2))


def bipartite_flip_case(g: Graph, xs: int, ys: int, x: int, y: int) -> BipartiteFlip:
    """Flip the bipartite graph between ``xs`` and ``ys`` using blocks X^±, Y^±.

    X^+ are the neighbours of ``y`` in ``xs``, Y^+ the neighbours of ``x``
    in ``ys``.  The four cases are tried in order; the result is verified:
    every edge of the flipped graph is within distance 6 both in B and in
    its bipartite complement.
    """
    adj = g.adj
    xp, yp = adj[y] & xs, adj[x] & ys
    xm, ym = xs & ~xp, ys & ~yp
    both = xs | ys
    b_rows = _bipartite_rows(adj, xs, ys, False)
    c_rows = _bipartite_rows(adj, xs, ys, True)
    blocks: list[tuple[int, int]]
    if _diameter(b_rows, both, FAR) <= FAR:
        case, blocks = 1, [(xs, ys)]
    elif _diameter(c_rows, both, FAR) <= FAR:
        case, blocks = 2, []
    elif _is_union_of_bicliques(adj, xs, ys, xp, yp):
        case, blocks = 3, [(xp, yp), (xm, ym)]
    elif _is_union_of_bicliques(adj, xs, ys, xp, ym):
        case, blocks = 3, [(xp, ym), (xm, yp)]
    elif any(adj[u] & ys == ys for u in bits(xs)) and any(adj[u] & ys == 0 for u in bits(xs)):
        case, blocks = 4, [(xp, ys)]
    elif any(adj[u] & xs == xs for u in bits(ys)) and any(adj[u] & xs == 0 for u in bits(ys)):
        case, blocks = 4, [(xs, yp)]
    else:
        raise AssertionError("bipartite graph matches none of the four flip cases")
    rows = {u: b_rows[u] for u in bits(both)}
    for a, b in blocks:
        for u in bits(a):
            rows[u] ^= b
        for u in bits(b):
            rows[u] ^= a
    _check_bipartite(rows, b_rows, c_rows, xs)
    return BipartiteFlip(case, tuple(blocks), rows)


def _check_bipartite(rows: dict[int, int], b_rows: list[int], c_rows: list[int], xs: int) -> None:
    for u in bits(xs):
        if not rows[u]:
            continue
        near = ball_mask(b_rows, u, FAR) & ball_mask(c_rows, u, FAR)
        if rows[u] & ~near:
            raise AssertionError(f"flipped bipartite edge at {u} is farther than {FAR}")


def local_flip(g: Graph, partition: Partition, s: int) -> tuple[Partition, Graph]:
    """A (P ∧ S)-flip of ``g`` whose every edge has P-flip distance at most 6.

    ``s`` must be a transversal of ``partition``.
    """
    parts = partition.parts
    reps = []
    for mask in parts:
        inside = mask & s
        if inside.bit_count() != 1:
            raise ValueError("S is not a transversal of P")
        reps.append(inside.bit_length() - 1)
    refined = s_refinement(g, partition, s)
    adj = g.adj
    rows = [0] * g.n
    for mask in parts:
        if mask & (mask - 1) == 0:
            continue
        side, _ = diameter_side(g, mask)
        for u in bits(mask):
            inner = adj[u] & mask
            rows[u] |= (mask & ~inner & ~(1 << u)) if side == "G" else inner
    p = len(parts)
    for a in range(p):
        xs = parts[a]
        for b in range(a + 1, p):
            ys = parts[b]
            if xs & (xs - 1) == 0 and ys & (ys - 1) == 0:
                # A single pair is always flipped to a non-edge.
                continue
            res = bipartite_flip_case(g, xs, ys, reps[a], reps[b])
            for u, row in res.rows.items():
                rows[u] |= row
    return refined, Graph._trusted(g.n, rows)


# --- partition chain to merge sequence ----------------------------------------


def chain_to_merge(g: Graph, chain: PartitionChain | Sequence[Partition]) -> MergeSequence:
    """6-firm merge sequence along the refined chain P_i ∧ S_i.

    S_i takes the smallest vertex of every part of P_i, so the transversals
    are nested.  R_i collects the edges of the local flips G_1..G_i.
    """
    partitions = chain.partitions if isinstance(chain, PartitionChain) else tuple(chain)
    resolved = [0] * g.n
    steps = []
    for p in partitions:
        refined, flipped = local_flip(g, p, p.transversal())
        for u, row in enumerate(flipped.adj):
            resolved[u] |= row
        steps.append((refined, ResolvedSet(g.n, tuple(resolved))))
    return MergeSequence(tuple(steps))


def chain_local_flips(g: Graph, chain: Sequence[Partition]) -> list[tuple[Partition, Graph]]:
    return [local_flip(g, p, p.transversal()) for p in chain]


# --- witnesses, duals and sample sets -----------------------------------------


def classify_part(resolved: ResolvedSet, xs: int, s: int, t: int) -> tuple[str, tuple[int, ...]]:
    """Greedy witnesses: ``small`` (within t of one point), ``medium`` or ``large``.

    x1 is the smallest vertex, x2 the smallest vertex farther than t from
    x1, x3 the smallest vertex farther than s from both.
    """
    if not xs:
        raise ValueError("empty part")
    rows = resolved.rows
    x1 = (xs & -xs).bit_length() - 1
    rest = xs & ~ball_mask(rows, x1, t)
    if not rest:
        return "small", (x1,)
    x2 = (rest & -rest).bit_length() - 1
    rest = xs & ~ball_mask(rows, x1, s) & ~ball_mask(rows, x2, s)
    if not rest:
        return "medium", (x1, x2)
    x3 = (rest & -rest).bit_length() - 1
    return "large", (x1, x2, x3)


def _greedy_cover(universe: int, options: dict[int, int], base: int) -> int | None:
    """Vertices added to ``base`` so that the option sets cover ``universe``; None if impossible."""
    left = universe
    for v in bits(base):
        left &= ~options.get(v, 0)
    added = 0
    while left:
        best_v, best_gain = -1, 0
        for v, cov in options.items():
            gain = (cov & left).bit_count()
            if gain > best_gain:
                best_v, best_gain = v, gain
        if best_v < 0:
            return None
        added |= 1 << best_v
        left &= ~options[best_v]
    # Reverse deletion keeps the batch inclusion-minimal.
    for v in sorted(bits(added), reverse=True):
        trial = added & ~(1 << v)
        cover = 0
        for w in bits(trial | base):
            cover |= options.get(w, 0)
        if universe & ~cover == 0:
            added = trial
    return added


def _dual_options(g: Graph, xs: int, ys: int, base: int) -> tuple[int | None, int | None]:
    adj = g.adj
    dominate = {u: adj[u] & ys for u in bits(xs)}
    anti = {u: xs & ~adj[u] & ~(1 << u) for u in bits(ys)}
    return _greedy_cover(ys, dominate, base & xs), _greedy_cover(xs, anti, base & ys)


def greedy_dual(g: Graph, xs: int, ys: int, base: int = 0) -> int:
    """Smallest greedy batch completing ``base`` to a dual of (X, Y).

    A dual is a subset of X dominating Y or a subset of Y anti-dominating X.
    The dominating batch wins ties.
    """
    if not xs or not ys:
        return 0
    dom, anti = _dual_options(g, xs, ys, base)
    if dom is None and anti is None:
        raise ValueError("no dual exists for this pair")
    if anti is None or (dom is not None and dom.bit_count() <= anti.bit_count()):
        return dom  # type: ignore[return-value]
    return anti


def has_dual(g: Graph, xs: int, ys: int, s: int) -> bool:
    dom, anti = _dual_options(g, xs, ys, s)
    return dom == 0 or anti == 0


@dataclass
class SampleSets:
    sets: list[int]
    split: list[Partition]
    resolved: list[ResolvedSet]
    witnesses: list[dict[int, tuple[str, tuple[int, ...]]]]
    dual_sizes: list[int] = field(default_factory=list)


def _has_no_dual(xs: int, ys: int) -> bool:
    # A single vertex paired with itself can be neither dominated nor anti-dominated.
    return xs == ys and xs & (xs - 1) == 0


def build_sample_sets(g: Graph, seq: MergeSequence) -> SampleSets:
    """Nested sets S_0 = V ⊇ S_1 ⊇ ... ⊇ S_{m-1}, each a (2,8)-sample set.

    The sequence is canonicalized first.  For step i the witnesses are
    picked greedily at pairwise R_{i+1}-distance more than 2, starting from
    the witnesses of step i+1; medium parts are split into two halves, and
    dual batches are added per ordered pair of split parts.
    """
    seq = canonicalize(seq)
    m = len(seq)
    parts_seq = seq.partitions
    res_seq = seq.resolved
    witness_sets = [0] * (m + 1)
    dual_sets = [0] * (m + 1)
    split: list[Partition | None] = [None] * m
    tags: list[dict[int, tuple[str, tuple[int, ...]]]] = [dict() for _ in range(m)]
    sizes = [0] * m
    # Python index i stands for step i+1; step m has no sample set.
    for i in range(m - 2, -1, -1):
        p = parts_seq[i]
        rows = res_seq[i + 1].rows
        near2 = {}
        chosen_all = 0
        split_keys = list(p.part_of)
        halves: dict[int, tuple[str, tuple[int, ...]]] = {}
        for pid, xs in enumerate(p.parts):
            chosen = list(bits(xs & witness_sets[i + 1]))
            for v in chosen:
                near2[v] = ball_mask(rows, v, 2)
            for v in bits(xs):
                if len(chosen) >= 3:
                    break
                if v in chosen or any(near2[w] >> v & 1 for w in chosen):
                    continue
                chosen.append(v)
                near2[v] = ball_mask(rows, v, 2)
            chosen.sort()
            for v in chosen:
                chosen_all |= 1 << v
            if len(chosen) == 3:
                halves[pid] = ("large", tuple(chosen))
            elif len(chosen) == 1:
                halves[pid] = ("small", tuple(chosen))
            else:
                x1, x2 = chosen
                if ball_mask(rows, x1, 6) >> x2 & 1:
                    halves[pid] = ("small", (x1,))
                else:
                    first = near2[x1] & xs
                    second = xs & ~first
                    if second & ~near2[x2]:
                        raise AssertionError("medium part not covered by its witness balls")
                    for v in bits(second):
                        split_keys[v] = ("half", pid)
                    halves[pid] = ("medium", (x1, x2))
        refined = Partition.from_keys(split_keys)
        split[i] = refined
        for pid, xs in enumerate(refined.parts):
            lead = (xs & -xs).bit_length() - 1
            tag, wit = halves[p.part_of[lead]]
            if tag == "medium":
                tag, wit = "small", tuple(w for w in wit if xs >> w & 1)
            tags[i][pid] = (tag, wit)
        witness_sets[i] = chosen_all
        duals = dual_sets[i + 1]
        for a, xs in enumerate(refined.parts):
            for b, ys in enumerate(refined.parts):
                if _has_no_dual(xs, ys):
                    continue
                duals |= greedy_dual(g, xs, ys, duals | chosen_all)
        dual_sets[i] = duals
        sizes[i] = duals.bit_count()
    # sets[k] is S_k for k = 0..m-1; step k (1-based) sits at Python index k-1.
    sets = [g.full] + [witness_sets[k - 1] | dual_sets[k - 1] for k in range(1, m)]
    return SampleSets(
        sets=sets,
        split=[split[k - 1] for k in range(1, m)],  # type: ignore[misc]
        resolved=[res_seq[k] for k in range(1, m)],
        witnesses=[tags[k - 1] for k in range(1, m)],
        dual_sizes=[sizes[k - 1] for k in range(1, m)],
    )


def is_sample_set(
    g: Graph, partition: Partition, resolved: ResolvedSet, s: int, small: int = 8, far: int = 2
) -> list[str]:
    """Problems preventing ``s`` from being a (far, small)-sample set; empty if none."""
    problems = []
    rows = resolved.rows
    for pid, xs in enumerate(partition.parts):
        inside = list(bits(xs & s))
        if any(xs & ~ball_mask(rows, x, small) == 0 for x in inside):
            continue
        large = any(
            all(not ball_mask(rows, a, far) >> b & 1 for a, b in itertools.combinations(trio, 2))
            for trio in itertools.combinations(inside, 3)
        )
        if not large:
            problems.append(f"part {pid} has no small or large witness in S")
    for a, xs in enumerate(partition.parts):
        for b, ys in enumerate(partition.parts):
            if _has_no_dual(xs, ys):
                continue
            if not has_dual(g, xs, ys, s):
                problems.append(f"pair ({a},{b}) has no dual inside S")
    return problems


def build_definable_order(g: Graph, seq: MergeSequence) -> VertexOrder:
    """Blocks S_{m-1}, S_{m-2} - S_{m-1}, ..., S_0 - S_1, each in increasing vertex order."""
    sets = build_sample_sets(g, seq).sets
    order: list[int] = []
    taken = 0
    for s in reversed(sets):
        block = s & ~taken
        order.extend(bits(block))
        taken |= block
    return VertexOrder(tuple(order))


def incremental_flip(g: Graph, s: int, resolved: ResolvedSet, t: int) -> Graph:
    """Flip every atomic-type pair over ``s`` whose far pairs are edges.

    A pair uv is far when its R-distance exceeds 2t + 1.  For a
    (2,t)-sample set the far pairs of each part pair are all edges or all
    non-edges; flipping the edge case leaves only near pairs as edges.
    """
    p = atomic_types(g, s)
    limit = 2 * t + 1
    near = [ball_mask(resolved.rows, v, limit) for v in range(g.n)]
    parts = p.parts
    flip_mask = [0] * len(parts)
    for a in range(len(parts)):
        for b in range(a, len(parts)):
            has_edge = False
            for u in bits(parts[a]):
                far = parts[b] & ~near[u]
                if g.adj[u] & far:
                    has_edge = True
                    break
            if has_edge:
                flip_mask[a] |= parts[b]
                flip_mask[b] |= parts[a]
    rows = [(row ^ flip_mask[p.part_of[u]]) & ~(1 << u) for u, row in enumerate(g.adj)]
    return Graph._trusted(g.n, rows)


# --- subset dynamic program -----------------------------------------------------


@dataclass
class ApproxResult:
    transient: TransientSequence
    merge: MergeSequence
    bottleneck: int
    path: list[int]


def _subset_flip(g: Graph, s: int, r: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Balls in the local flip over atomic types of ``s``, and the refined part labels."""
    p = atomic_types(g, s)
    refined, flipped = local_flip(g, p, p.transversal())
    rows = flipped.adj
    return tuple(ball_mask(rows, v, r) for v in range(g.n)), refined.part_of


def approx_merge_width(g: Graph, r: int, max_n: int = 16) -> ApproxResult:
    """Bottleneck-optimal chain of vertex sets under f(S, T) = max_v |Ball_{G_S}(v) / N'_T|."""
    n = g.n
    if n > max_n:
        raise BudgetExceeded(f"subset dynamic program capped at n <= {max_n}")
    full = g.full
    data = [_subset_flip(g, s, r) for s in range(1 << n)]
    best = [0] * (1 << n)
    pred = [-1] * (1 << n)
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            t = 0
            for v in combo:
                t |= 1 << v
            labels = data[t][1]
            choice = None
            for v in combo:
                s = t & ~(1 << v)
                balls = data[s][0]
                weight = max(len({labels[u] for u in bits(b)}) for b in balls)
                cand = max(best[s], weight)
                if choice is None or cand < choice[0]:
                    choice = (cand, v)
            assert choice is not None
            best[t], pred[t] = choice
    path = [full]
    while path[-1]:
        path.append(path[-1] & ~(1 << pred[path[-1]]))
    path.reverse()
    # path[k] has k vertices; step i of the sequences uses S_{n-i} = path[n-i].
    steps = []
    refined_chain: list[Partition] = []
    for i in range(n + 1):
        s = path[n - i]
        atoms = atomic_types(g, s)
        refined, flipped = local_flip(g, atoms, atoms.transversal())
        steps.append((refined, flipped))
        if not refined_chain or refined_chain[-1] != refined:
            refined_chain.append(refined)
    transient = TransientSequence(tuple(steps))
    merge = chain_to_merge(g, refined_chain)
    return ApproxResult(transient, merge, max(best[full], 1), path)


def bottleneck_by_paths(g: Graph, r: int) -> int:
    """Reference bottleneck over all n! vertex-set chains (tiny n only)."""
    n = g.n
    data = {s: _subset_flip(g, s, r) for s in range(1 << n)}
    best = None
    for perm in itertools.permutations(range(n)):
        s = 0
        worst = 1
        for v in perm:
            t = s | 1 << v
            labels = data[t][1]
            worst = max(worst, max(len({labels[u] for u in bits(b)}) for b in data[s][0]))
            s = t
        best = worst if best is None else min(best, worst)
    return 1 if best is None else best


def chain_distance_audit(g: Graph, seq_chain: Sequence[Partition]) -> list[tuple[int, int, int]]:
    """Resolved pairs uv of the chain_to_merge output with dist_{P_i}(u, v) > 6.

    Uses exact flip balls of the unrefined P_i; returns (step, u, v) triples.
    """
    from .flips import FlipConfig, flip_balls

    out = []
    seq = chain_to_merge(g, seq_chain)
    config = FlipConfig(exact_cap=g.n)
    for i, (p, (_, resolved)) in enumerate(zip(seq_chain, seq.steps), 1):
        balls, _ = flip_balls(g, p, FAR, "exact", config)
        for u in range(g.n):
            bad = resolved.rows[u] & ~balls[u]
            for v in bits(bad):
                if u < v:
                    out.append((i, u, v))
    return out


__all__ = [
    "ApproxResult",
    "BipartiteFlip",
    "SampleSets",
    "approx_merge_width",
    "bipartite_flip_case",
    "bottleneck_by_paths",
    "build_definable_order",
    "build_sample_sets",
    "chain_distance_audit",
    "chain_local_flips",
    "chain_to_merge",
    "classify_part",
    "diameter_side",
    "greedy_dual",
    "has_dual",
    "incremental_flip",
    "is_sample_set",
    "local_flip",
]
