"""Sparse quotients, colouring numbers, quasi-isometries and neighbourhood covers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import INF, Graph, Partition, PartitionChain, VertexOrder, ball_mask, bits, distances_from
from .sequences import MergeSequence, canonicalize, firmness, is_positive, verify_merge, width_merge


@dataclass
class ColouringNumbers:
    scol: int
    wcol: int
    sreach: list[int]
    wreach: list[int]


def colouring_numbers(g: Graph, order: VertexOrder, r: int) -> ColouringNumbers:
    """Strong and weak r-reachability; every vertex reaches itself."""
    n = g.n
    if len(order.order) != n:
        raise ValueError("order does not match the graph")
    above = [0] * n  # vertices strictly later in the order
    acc = 0
    for v in reversed(order.order):
        above[v] = acc
        acc |= 1 << v
    adj = g.adj
    wreach = [1 << v for v in range(n)]
    for u in range(n):
        allowed = above[u]
        rows = [row & allowed for row in adj]
        reached = ball_mask(rows, u, r) & ~(1 << u)
        for v in bits(reached):
            wreach[v] |= 1 << u
    sreach = [0] * n
    for v in range(n):
        allowed = above[v] | 1 << v
        rows = [row & allowed for row in adj]
        inner = ball_mask(rows, v, r - 1) if r >= 1 else 1 << v
        out = 0
        for w in bits(inner):
            out |= adj[w]
        sreach[v] = (out & ~allowed) | 1 << v if r >= 1 else 1 << v
    return ColouringNumbers(
        max((s.bit_count() for s in sreach), default=0),
        max((w.bit_count() for w in wreach), default=0),
        sreach,
        wreach,
    )


def quotient_graph(g: Graph, partition: Partition) -> Graph:
    """Vertices are part ids; parts are adjacent when some edge joins them."""
    p = len(partition)
    rows = [0] * p
    part_of = partition.part_of
    for pid, mask in enumerate(partition.parts):
        nb = 0
        for u in bits(mask):
            nb |= g.adj[u]
        for v in bits(nb & ~mask):
            rows[pid] |= 1 << part_of[v]
    return Graph._trusted(p, rows)


def all_distances(g: Graph) -> list[list[float]]:
    return [distances_from(g.adj, v) for v in range(g.n)]


def weak_diameter(dist: Sequence[Sequence[float]], mask: int) -> float:
    members = list(bits(mask))
    return max((dist[a][b] for a in members for b in members), default=0)


def verify_quasi_isometry(
    g: Graph, partition: Partition, a: float, b: float
) -> tuple[bool, tuple[int, int] | None]:
    """Check d_H(x/P, y/P) <= d_G(x, y) <= a * d_H + b for every pair.

    Returns the first violating pair, or the pair closest to the upper
    bound when all pairs pass.
    """
    h = quotient_graph(g, partition)
    dg = all_distances(g)
    dh = all_distances(h)
    part_of = partition.part_of
    worst = None
    worst_slack = -INF
    for x in range(g.n):
        for y in range(x + 1, g.n):
            d = dg[x][y]
            q = dh[part_of[x]][part_of[y]]
            if d == INF or q == INF:
                if d != q:
                    return False, (x, y)
                continue
            if q > d or d > a * q + b:
                return False, (x, y)
            slack = d - (a * q + b)
            if slack > worst_slack:
                worst, worst_slack = (x, y), slack
    return True, worst


@dataclass
class QuotientCertificate:
    partition: Partition
    order: VertexOrder
    quotient: Graph
    weak_diameters: list[float]
    colouring: dict[int, tuple[int, int]]
    index: list[int]
    checks: dict[str, bool] = field(default_factory=dict)

    def assert_checks(self) -> None:
        failed = [name for name, ok in self.checks.items() if not ok]
        if failed:
            raise AssertionError(f"quotient checks failed: {', '.join(failed)}")


def _ordered_parts(n: int, labels: list[tuple[int, int]]) -> tuple[Partition, VertexOrder, list[int]]:
    """Build the partition from (index, key) labels and order parts by decreasing index."""
    p = Partition.from_keys(labels)
    index = [labels[(m & -m).bit_length() - 1][0] for m in p.parts]
    ranked = sorted(range(len(p)), key=lambda pid: (-index[pid], pid))
    return p, VertexOrder(tuple(ranked)), index


def _certificate(
    g: Graph, p: Partition, order: VertexOrder, index: list[int], radii: Sequence[int]
) -> QuotientCertificate:
    h = quotient_graph(g, p)
    dist = all_distances(g)
    diam = [weak_diameter(dist, m) for m in p.parts]
    colouring = {}
    for r in radii:
        c = colouring_numbers(h, order, r)
        colouring[r] = (c.scol, c.wcol)
    return QuotientCertificate(p, order, h, diam, colouring, index)


def sparse_quotient(
    g: Graph, seq: MergeSequence, radii: Sequence[int] = (1, 2, 3), strict: bool = True
) -> QuotientCertificate:
    """Partition into maximally unresolved parts of a 6-firm sequence.

    A part of P_t is unresolved when some edge leaving one of its vertices
    is not in R_t.  Each vertex goes to the unresolved part of largest
    index containing it; isolated vertices stay singletons, and if the
    whole vertex set is still unresolved at the end the partition is {V}.
    """
    report = verify_merge(g, seq)
    if not report.ok:
        raise ValueError(f"invalid merge sequence: {report.sorted()[0]}")
    seq = canonicalize(seq)
    if seq.steps and any(seq.steps[0][1].rows):
        raise ValueError("sequence must start with an empty resolved set")
    # Without 6-firmness the bounds need not hold; report them without asserting.
    firm = firmness(g, seq) <= 6
    n = g.n
    adj = g.adj
    steps = seq.steps
    m = len(steps)
    top = steps[-1][1].rows if steps else (0,) * n
    if any(adj[u] & ~top[u] for u in range(n)):
        labels = [(m, 0)] * n
    else:
        labels = []
        for v in range(n):
            if not adj[v]:
                labels.append((0, v))
                continue
            found = None
            for t in range(m - 1, -1, -1):
                p, r = steps[t]
                mask = p.part_mask_of(v)
                if any(adj[u] & ~r.rows[u] for u in bits(mask)):
                    found = (t + 1, p.part_of[v])
                    break
            assert found is not None, "non-isolated vertex is never unresolved"
            labels.append(found)
    p, order, index = _ordered_parts(n, labels)
    cert = _certificate(g, p, order, index, radii)
    cert.checks["weak diameter <= 12"] = all(d <= 12 for d in cert.weak_diameters)
    cert.checks["(13,12)-quasi-isometry"] = verify_quasi_isometry(g, p, 13, 12)[0]
    for r in radii:
        cert.checks[f"scol_{r} <= width at radius {3 * r}"] = cert.colouring[r][0] <= width_merge(g, seq, 3 * r)
    cert.checks["6-firm"] = firm
    if strict and firm:
        cert.assert_checks()
    return cert


@dataclass
class Cover:
    clusters: list[int]
    centers: list[int]
    quotient: Cover | None = None


def build_cover(g: Graph, partition: Partition, order: VertexOrder) -> Cover:
    """Cluster C_u = {w : u in WReach_2(w)} on the quotient, lifted through the parts.

    Each closed quotient neighbourhood N[v] lies in C_m with m its
    order-minimum, so only those clusters are kept.
    """
    h = quotient_graph(g, partition)
    pos = order.position
    wreach = colouring_numbers(h, order, 2).wreach
    members = [0] * h.n
    for w in range(h.n):
        for u in bits(wreach[w]):
            members[u] |= 1 << w
    used = sorted({min(bits(h.adj[v] | 1 << v), key=lambda x: pos[x]) for v in range(h.n)}, key=lambda x: pos[x])
    q_clusters = [members[u] for u in used]
    lifted = []
    centers = []
    for u, cluster in zip(used, q_clusters):
        mask = 0
        for pid in bits(cluster):
            mask |= partition.parts[pid]
        lifted.append(mask)
        part = partition.parts[u]
        centers.append((part & -part).bit_length() - 1)
    return Cover(lifted, centers, Cover(q_clusters, list(used)))


@dataclass
class CoverReport:
    uncovered: list[int]
    wide: list[int]
    overloaded: list[int]
    overlap: int
    radius: float

    @property
    def ok(self) -> bool:
        return not (self.uncovered or self.wide or self.overloaded)


def verify_cover(g: Graph, cover: Cover, t: float, k: int) -> CoverReport:
    """Check neighbourhood coverage, cluster radius at most t, and overlap at most k."""
    n = g.n
    clusters = cover.clusters
    uncovered = [v for v in range(n) if not any(g.adj[v] & ~c == 0 for c in clusters)]
    dist = all_distances(g)
    radius: float = 0
    wide = []
    for i, c in enumerate(clusters):
        if not c:
            wide.append(i)
            continue
        rad = min(max(dist[v][u] for u in bits(c)) for v in range(n))
        radius = max(radius, rad)
        if rad > t:
            wide.append(i)
    load = [sum(1 for c in clusters if c >> v & 1) for v in range(n)]
    overlap = max(load, default=0)
    overloaded = [v for v in range(n) if load[v] > k]
    return CoverReport(uncovered, wide, overloaded, overlap, radius)


# --- twin-width ------------------------------------------------------------------


def _mixed(adj: Sequence[int], a: int, b: int) -> bool:
    full_seen = zero_seen = False
    for u in bits(a):
        block = b & ~(1 << u)
        if not block:
            continue
        row = adj[u] & block
        if row != block:
            zero_seen = True
        if row:
            full_seen = True
        if full_seen and zero_seen:
            return True
    return False


def contraction_width(g: Graph, chain: PartitionChain | Sequence[Partition]) -> int:
    """Largest number of other parts a part is non-homogeneous to, over a maximal chain."""
    if not isinstance(chain, PartitionChain):
        chain = PartitionChain(tuple(chain))
    if not chain.is_maximal():
        raise ValueError("contraction width needs a maximal chain")
    best = 0
    for p in chain.partitions:
        parts = p.parts
        count = [0] * len(parts)
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if _mixed(g.adj, parts[i], parts[j]):
                    count[i] += 1
                    count[j] += 1
        best = max(best, max(count, default=0))
    return best


def scol_bound(k: int, r: int) -> int:
    """1 + (k+1) + ... + (k+1)^r, which is ((k+1)^(r+1) - 1) / k for k >= 1."""
    return sum((k + 1) ** j for j in range(r + 1))


def tww_quotient_and_cover(
    g: Graph, chain: PartitionChain | Sequence[Partition], radii: Sequence[int] = (1, 2, 3), strict: bool = True
) -> tuple[QuotientCertificate, Cover]:
    """Quotient by maximally dominated parts of a contraction sequence, with its cover.

    A part is dominated when it lies in the closed neighbourhood of one vertex.
    """
    if not isinstance(chain, PartitionChain):
        chain = PartitionChain(tuple(chain))
    k = contraction_width(g, chain)
    closed = [row | 1 << u for u, row in enumerate(g.adj)]
    partitions = chain.partitions
    labels = []
    for v in range(g.n):
        for t in range(len(partitions) - 1, -1, -1):
            p = partitions[t]
            mask = p.part_mask_of(v)
            if any(mask & ~c == 0 for c in closed):
                labels.append((t + 1, p.part_of[v]))
                break
    p, order, index = _ordered_parts(g.n, labels)
    cert = _certificate(g, p, order, index, radii)
    cert.checks["weak diameter <= 2"] = all(d <= 2 for d in cert.weak_diameters)
    for r in radii:
        cert.checks[f"scol_{r} <= {scol_bound(k, r)}"] = cert.colouring[r][0] <= scol_bound(k, r)
    cert.checks["(3,2)-quasi-isometry"] = verify_quasi_isometry(g, p, 3, 2)[0]
    cover = build_cover(g, p, order)
    wcol2 = colouring_numbers(cert.quotient, order, 2).wcol
    cert.checks["cover radius <= 8"] = verify_cover(g, cover, 8, wcol2).ok
    if strict:
        cert.assert_checks()
    return cert, cover


def max_non_degree(g: Graph) -> int:
    return max((g.n - 1 - row.bit_count() for row in g.adj), default=0)


def positive_to_contraction(g: Graph, seq: MergeSequence) -> int:
    """Contraction width of the canonical chain of a positive merge sequence.

    Each part A is non-homogeneous only to parts met by the radius-1
    resolved ball of a fixed a in A, or to parts holding a non-neighbour
    of a.  Hence the width is at most width_1 + (max non-degree), which is
    width_1 + 3 for complements of cubic graphs.
    """
    if not is_positive(g, seq):
        raise ValueError("sequence resolves a non-edge")
    canon = canonicalize(seq)
    cw = contraction_width(g, canon.partitions)
    bound = width_merge(g, canon, 1) + max_non_degree(g)
    if cw > bound:
        raise AssertionError(f"contraction width {cw} exceeds {bound}")
    return cw
