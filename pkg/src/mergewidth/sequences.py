"""Merge sequences and transient sequences: validation, widths and shape metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .flips import FlipSpec, ResolvedSet, apply_flip, homogeneous_modulo, inhomogeneous_pairs
from .graph import INF, Graph, Partition, ball_mask, bits, distances_from, quotient_count


@dataclass(frozen=True)
class MergeSequence:
    steps: tuple[tuple[Partition, ResolvedSet], ...]

    @classmethod
    def of(cls, steps: Sequence[tuple[Partition, ResolvedSet]]) -> MergeSequence:
        return cls(tuple((p, r) for p, r in steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def partitions(self) -> list[Partition]:
        return [p for p, _ in self.steps]

    @property
    def resolved(self) -> list[ResolvedSet]:
        return [r for _, r in self.steps]


@dataclass(frozen=True)
class TransientSequence:
    """Pairs (P_t, G_t) where each G_t is a P_t-flip of the base graph."""

    steps: tuple[tuple[Partition, Graph], ...]

    @classmethod
    def from_flips(cls, g: Graph, steps: Sequence[tuple[Partition, FlipSpec]]) -> TransientSequence:
        return cls(tuple((p, apply_flip(g, p, f)) for p, f in steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def partitions(self) -> list[Partition]:
        return [p for p, _ in self.steps]


@dataclass(frozen=True)
class Violation:
    step: int
    clause: str
    detail: str


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, step: int, clause: str, detail: str) -> None:
        self.violations.append(Violation(step, clause, detail))

    def sorted(self) -> list[Violation]:
        return sorted(self.violations, key=lambda x: (x.step, x.clause, x.detail))


def _check_chain(partitions: Sequence[Partition], n: int, report: Report) -> None:
    if not partitions:
        report.add(0, "endpoints", "empty sequence")
        return
    for t, p in enumerate(partitions, 1):
        if p.n != n:
            report.add(t, "shape", f"partition on {p.n} vertices, graph has {n}")
            return
    if not partitions[0].is_singletons():
        report.add(1, "endpoints", "first partition is not all singletons")
    if len(partitions[-1]) > 1:
        report.add(len(partitions), "endpoints", "last partition has more than one part")
    for t in range(1, len(partitions)):
        if not partitions[t - 1].refines(partitions[t]):
            report.add(t + 1, "refinement", f"P_{t} does not refine P_{t + 1}")


def verify_merge(g: Graph, seq: MergeSequence) -> Report:
    """Check every defining clause and collect all violations."""
    report = Report()
    _check_chain(seq.partitions, g.n, report)
    if any(v.clause == "shape" for v in report.violations):
        return report
    prev: ResolvedSet | None = None
    for t, (p, r) in enumerate(seq.steps, 1):
        if r.n != g.n:
            report.add(t, "shape", "resolved set on the wrong vertex count")
            continue
        if prev is not None and not prev.issubset(r):
            report.add(t, "monotonicity", f"R_{t - 1} is not contained in R_{t}")
        for a, b in inhomogeneous_pairs(g, p, r):
            report.add(t, "homogeneity", f"parts {a} and {b} mix unresolved edges and non-edges")
        prev = r
    return report


def merge_step_width(p: Partition, r: ResolvedSet, radius: int) -> int:
    """max over v of |Ball^radius_R(v) / P|."""
    part_of = p.part_of
    best = 0
    for v in range(p.n):
        ball = ball_mask(r.rows, v, radius)
        best = max(best, len({part_of[u] for u in bits(ball)}))
    return best


def width_merge(g: Graph, seq: MergeSequence, r: int) -> int:
    """Radius-r width: P_t is measured against balls in R_{t+1}.

    A one-step sequence has no terms; its width is reported as 1, the value
    every nonempty term takes at least.
    """
    steps = seq.steps
    return max(
        (merge_step_width(steps[t][0], steps[t + 1][1], r) for t in range(len(steps) - 1)),
        default=1,
    )


def _pairwise_merges(fine: Partition, coarse: Partition) -> list[Partition]:
    """Maximal chain of partitions strictly between ``fine`` and ``coarse``."""
    out = []
    current = fine
    while len(current) > len(coarse) + 1:
        seen: dict[int, int] = {}
        for pid, mask in enumerate(current.parts):
            target = coarse.part_of[(mask & -mask).bit_length() - 1]
            if target in seen:
                current = current.merged(seen[target], pid)
                break
            seen[target] = pid
        out.append(current)
    return out


def canonicalize(seq: MergeSequence) -> MergeSequence:
    """Drop repeated partitions and refine the chain to a maximal one.

    A repeat (P, R_{i+1}) after (P, R_i) is dropped; intermediate
    partitions inserted between P_i and P_{i+1} carry R_{i+1}.  Neither
    operation increases any width term.
    """
    steps = list(seq.steps)
    if not steps:
        return seq
    out = [steps[0]]
    for p, r in steps[1:]:
        last_p = out[-1][0]
        if p == last_p:
            continue
        for mid in _pairwise_merges(last_p, p):
            out.append((mid, r))
        out.append((p, r))
    return MergeSequence(tuple(out))


def is_flip_of(g: Graph, p: Partition, h: Graph) -> FlipSpec | None:
    """The FlipSpec turning ``g`` into ``h``, or None if ``h`` is no P-flip of ``g``."""
    if h.n != g.n:
        return None
    parts = p.parts
    pairs = []
    for a in range(len(parts)):
        for b in range(a, len(parts)):
            state = None
            for u in bits(parts[a]):
                block = parts[b] & ~(1 << u)
                if not block:
                    continue
                diff = (g.adj[u] ^ h.adj[u]) & block
                if diff == 0:
                    cur = False
                elif diff == block:
                    cur = True
                else:
                    return None
                if state is None:
                    state = cur
                elif state != cur:
                    return None
            if state:
                pairs.append((a, b))
    return FlipSpec.of(pairs)


def verify_transient(g: Graph, seq: TransientSequence) -> Report:
    report = Report()
    _check_chain(seq.partitions, g.n, report)
    for t, (p, h) in enumerate(seq.steps, 1):
        if h.n != g.n or p.n != g.n:
            report.add(t, "shape", "wrong vertex count")
        elif is_flip_of(g, p, h) is None:
            report.add(t, "flip", f"G_{t} is not a P_{t}-flip of G")
    return report


def transient_width(g: Graph, seq: TransientSequence, r: int) -> int:
    steps = seq.steps
    best = 1 if len(steps) < 2 else 0
    for t in range(len(steps) - 1):
        part_of = steps[t][0].part_of
        rows = steps[t + 1][1].adj
        for v in range(g.n):
            ball = ball_mask(rows, v, r)
            best = max(best, len({part_of[u] for u in bits(ball)}))
    return best


def merge_to_transient(g: Graph, seq: MergeSequence) -> TransientSequence:
    """Use each step's homogeneity witness flip, whose edges all lie in R_t."""
    steps = []
    for p, r in seq.steps:
        ok, spec = homogeneous_modulo(g, p, r)
        if not ok or spec is None:
            raise ValueError("sequence is not homogeneous modulo its resolved sets")
        steps.append((p, spec))
    return TransientSequence.from_flips(g, steps)


def firmness(g: Graph, seq: MergeSequence) -> float:
    """Largest max(dist_G, dist_complement) over the finally resolved pairs."""
    if not seq.steps:
        return 0
    final = seq.steps[-1][1]
    comp = g.complement()
    best: float = 0
    for u in range(g.n):
        later = final.rows[u] >> (u + 1) << (u + 1)
        if not later:
            continue
        dg = distances_from(g.adj, u)
        dc = distances_from(comp.adj, u)
        for v in bits(later):
            best = max(best, dg[v], dc[v])
    return best


def valency(seq: MergeSequence) -> int:
    """Most parts of P_t merged into a single part of P_{t+1}."""
    best = 1
    parts = seq.partitions
    for a, b in zip(parts, parts[1:]):
        for mask in b.parts:
            best = max(best, quotient_count(mask, a))
    return best


def is_positive(g: Graph, seq: MergeSequence) -> bool:
    if not seq.steps:
        return True
    final = seq.steps[-1][1]
    return all(row & ~adj == 0 for row, adj in zip(final.rows, g.adj))


@dataclass(frozen=True)
class ShapeMetrics:
    positive: bool
    length: int
    valency: int
    universal_profile: dict[int, int]


def shape_metrics(g: Graph, seq: MergeSequence, r_max: int = 3) -> ShapeMetrics:
    profile = {r: width_merge(g, seq, r) for r in range(1, r_max + 1)}
    return ShapeMetrics(is_positive(g, seq), len(seq), valency(seq), profile)


def positive_sequence(g: Graph, partitions: Sequence[Partition]) -> MergeSequence:
    """Merge sequence along ``partitions`` that resolves only edges.

    Each step resolves the remaining edges of every part pair that still
    mixes edges and non-edges, so all unresolved pairs end up non-edges.
    """
    resolved = ResolvedSet.empty(g.n)
    steps = []
    for p in partitions:
        rows = list(resolved.rows)
        for a, b in inhomogeneous_pairs(g, p, resolved):
            pa, pb = p.parts[a], p.parts[b]
            for u in bits(pa):
                new = g.adj[u] & pb & ~rows[u]
                rows[u] |= new
                for v in bits(new):
                    rows[v] |= 1 << u
            if a != b:
                for u in bits(pb):
                    new = g.adj[u] & pa & ~rows[u]
                    rows[u] |= new
                    for v in bits(new):
                        rows[v] |= 1 << u
        resolved = ResolvedSet(g.n, tuple(rows))
        steps.append((p, resolved))
    return MergeSequence(tuple(steps))


__all__ = [
    "INF",
    "MergeSequence",
    "Report",
    "ShapeMetrics",
    "TransientSequence",
    "Violation",
    "canonicalize",
    "firmness",
    "is_flip_of",
    "is_positive",
    "merge_step_width",
    "merge_to_transient",
    "positive_sequence",
    "shape_metrics",
    "transient_width",
    "valency",
    "verify_merge",
    "verify_transient",
    "width_merge",
]
