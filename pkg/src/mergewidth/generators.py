"""Graph families: universal cographs, inner-product graphs and standard corpora."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any

from .flips import FlipSpec, ResolvedSet
from .graph import Graph, Partition, PartitionChain, VertexOrder
from .sequences import MergeSequence, TransientSequence, verify_merge, verify_transient


@dataclass
class CertifiedInstance:
    graph: Graph
    name: str
    seq: MergeSequence | None = None
    transient: TransientSequence | None = None
    chain: PartitionChain | None = None
    order: VertexOrder | None = None
    # variant -> (value, relation, provenance) where relation is "=" or "<="
    claims: dict[str, tuple[int, str, str]] = field(default_factory=dict)

    def problems(self) -> list[str]:
        """Clauses of the attached certificates that fail to verify."""
        out = []
        if self.seq is not None:
            out += [f"merge: {v}" for v in verify_merge(self.graph, self.seq).sorted()]
        if self.transient is not None:
            out += [f"transient: {v}" for v in verify_transient(self.graph, self.transient).sorted()]
        if self.order is not None and sorted(self.order.order) != list(range(self.graph.n)):
            out.append("order: not a permutation of the vertices")
        return out


def _cograph_adjacent(u: int, v: int, m: int) -> bool:
    # leaves are m-bit words with the first branching bit as the most significant
    common = m - (u ^ v).bit_length()
    return common % 2 == 1


def _bit_reverse(x: int, m: int) -> int:
    return int(format(x, f"0{m}b")[::-1], 2) if m else 0


def universal_cograph(m: int) -> CertifiedInstance:
    """Leaves of the depth-m binary tree, adjacent when their deepest common ancestor has odd depth."""
    if not 0 <= m <= 12:
        raise ValueError("universal_cograph needs 0 <= m <= 12")
    n = 1 << m
    g = Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if _cograph_adjacent(u, v, m)])
    # P_i groups leaves by their ancestor at depth m + 1 - i
    partitions = [Partition.from_keys([v >> (i - 1) for v in range(n)]) for i in range(1, m + 2)]
    steps = []
    for i, p in enumerate(partitions):
        if i == 0:
            resolved = ResolvedSet.empty(n)
        else:
            prev = partitions[i - 1]
            resolved = ResolvedSet(n, tuple(prev.part_mask_of(v) & ~(1 << v) for v in range(n)))
        steps.append((p, resolved))
    seq = MergeSequence(tuple(steps))
    flips = []
    for i, p in enumerate(partitions, 1):
        # parts of P_i are depth-d nodes whose ids are their d-bit prefixes;
        # flip every pair whose deepest common ancestor has odd depth
        depth = m + 1 - i
        pairs = [
            (a, b)
            for a in range(len(p))
            for b in range(a, len(p))
            if (depth - (a ^ b).bit_length()) % 2 == 1
        ]
        flips.append((p, FlipSpec.of(pairs)))
    transient = TransientSequence.from_flips(g, flips)
    order = VertexOrder(tuple(_bit_reverse(k, m) for k in range(n)))
    inst = CertifiedInstance(g, f"cograph:{m}", seq, transient, PartitionChain(tuple(partitions)), order)
    for variant in ("mw", "tmw", "pmw"):
        inst.claims[variant] = (1, "=", "certificate")
    inst.claims["dmw"] = (2, "<=", "certificate")
    return inst


def dot(u: int, v: int) -> int:
    return (u & v).bit_count() & 1


def vector_fibers(m: int, rows: list[int]) -> dict[tuple[int, ...], int]:
    """Sizes of W_b = {v in Z_2^m : rows[j] . v = b_j for all j}."""
    counts: dict[tuple[int, ...], int] = {}
    for v in range(1 << m):
        key = tuple(dot(r, v) for r in rows)
        counts[key] = counts.get(key, 0) + 1
    return counts


def is_independent(rows: list[int]) -> bool:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r == 0:
            return False
        basis.append(r)
    return True


def vector_bipartite(m: int) -> Graph:
    """Two copies of Z_2^m; u on the left meets v on the right when u . v = 0."""
    if not 1 <= m <= 8:
        raise ValueError("vector_bipartite needs 1 <= m <= 8")
    if m >= 4:
        fibers = vector_fibers(m, [1 << j for j in range(4)])
        if len(fibers) != 16 or set(fibers.values()) != {1 << (m - 4)}:
            raise AssertionError("fiber sizes differ from 2^(m-4)")
    size = 1 << m
    return Graph.from_edges(2 * size, [(u, size + v) for u in range(size) for v in range(size) if not dot(u, v)])


# --- standard families -------------------------------------------------------------


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def edgeless(n: int) -> Graph:
    return Graph.from_edges(n, [])


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def cubic(n: int, seed: int = 0, attempts: int = 10_000) -> Graph:
    """Random 3-regular graph by the pairing model, rejecting loops and multi-edges."""
    if n < 4 or n % 2:
        raise ValueError("cubic graphs need an even n >= 4")
    rng = random.Random(seed)
    points = [v for v in range(n) for _ in range(3)]
    for _ in range(attempts):
        rng.shuffle(points)
        pairs = {tuple(sorted(points[i : i + 2])) for i in range(0, len(points), 2)}
        if len(pairs) == len(points) // 2 and all(a != b for a, b in pairs):
            return Graph.from_edges(n, pairs)
    raise RuntimeError("pairing model kept producing loops or multi-edges")


def cocubic(n: int, seed: int = 0) -> Graph:
    return cubic(n, seed).complement()


def canonical_form(g: Graph) -> tuple[int, ...]:
    """Lexicographically least adjacency rows over all relabellings (small n only)."""
    best = None
    for perm in itertools.permutations(range(g.n)):
        inv = [0] * g.n
        for i, v in enumerate(perm):
            inv[v] = i
        rows = []
        for v in perm:
            row = 0
            for u in range(g.n):
                if g.adj[v] >> u & 1:
                    row |= 1 << inv[u]
            rows.append(row)
        key = tuple(rows)
        if best is None or key < best:
            best = key
    return best or ()


def all_graphs(n: int) -> list[Graph]:
    """One graph per isomorphism class on n vertices."""
    if n > 6:
        raise ValueError("all_graphs enumerates up to n = 6")
    pairs = list(itertools.combinations(range(n), 2))
    seen: dict[tuple[int, ...], Graph] = {}
    for mask in range(1 << len(pairs)):
        g = Graph.from_edges(n, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])
        key = canonical_form(g)
        if key not in seen:
            seen[key] = g
    return list(seen.values())


FAMILIES: dict[str, Any] = {
    "path": path,
    "cycle": cycle,
    "grid": grid,
    "complete": complete,
    "edgeless": edgeless,
    "gnp": gnp,
    "cubic": cubic,
    "cocubic": cocubic,
    "cograph": lambda m: universal_cograph(m).graph,
    "vector": vector_bipartite,
}


def _number(text: str) -> int | float:
    return float(text) if "." in text else int(text)


def parse_family(spec: str) -> list[Graph]:
    """``name:arg:arg``; grid sizes may be written ``3x4``; ``all:n`` lists every graph on n vertices."""
    name, _, rest = spec.partition(":")
    args = [_number(a) for a in rest.replace("x", ":").split(":") if a] if rest else []
    if name == "all":
        return all_graphs(*args)
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}")
    return [FAMILIES[name](*args)]


def corpus(specs: list[str] | str) -> list[Graph]:
    if isinstance(specs, str):
        specs = [specs]
    out: list[Graph] = []
    for s in specs:
        out += parse_family(s)
    return out
