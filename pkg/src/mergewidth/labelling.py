"""Adjacency labels from merge sequences, built on a codec for thin trees.

Bit layout of one label (big-endian throughout):

    m, delta, h                 16 bits each
    identifier w(u)             h fields of ceil(log2 delta) bits, storing i - 1
    tree length in bytes        32 bits
    encoded touched tree        zero-padded to the byte length above
    decision bits b(u, w)       one per node of the touched tree, in preorder
    zero padding                up to a byte boundary

A graph with a single vertex gets a header-only label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Graph, bits
from .sequences import MergeSequence, valency, width_merge

Word = tuple[int, ...]

HEADER_FIELD = 16
LENGTH_FIELD = 32
# header fields, the length field, and at most 7 padding bits after the tree and at the end
LABEL_OVERHEAD = 3 * HEADER_FIELD + LENGTH_FIELD + 7 + 7


class LabelError(ValueError):
    """Raised for malformed tree codes or labels."""


def count_width(delta: int) -> int:
    """Bits for a child count in 0..delta."""
    return delta.bit_length()


def index_width(delta: int) -> int:
    """Bits for a child index in 1..delta, stored as index - 1."""
    return (delta - 1).bit_length()


@dataclass(frozen=True)
class ThinTree:
    nodes: frozenset[Word]
    delta: int
    height: int

    def __post_init__(self) -> None:
        if self.delta < 1:
            raise ValueError("delta must be positive")
        if () not in self.nodes:
            raise ValueError("tree must contain the root")
        for w in self.nodes:
            if len(w) > self.height:
                raise ValueError(f"node {w} deeper than height {self.height}")
            if any(not 1 <= c <= self.delta for c in w):
                raise ValueError(f"node {w} uses a symbol outside 1..{self.delta}")
            if w and w[:-1] not in self.nodes:
                raise ValueError(f"node {w} has no parent")

    def level(self, j: int) -> list[Word]:
        return sorted(w for w in self.nodes if len(w) == j)

    @property
    def widths(self) -> list[int]:
        counts = [0] * (self.height + 1)
        for w in self.nodes:
            counts[len(w)] += 1
        return counts

    @property
    def q(self) -> int:
        return max(self.widths)

    def preorder(self) -> list[Word]:
        return sorted(self.nodes)


class _Writer:
    def __init__(self) -> None:
        self.chunks: list[str] = []

    def put(self, value: int, width: int) -> None:
        if width == 0:
            if value:
                raise LabelError("nonzero value in a zero-width field")
            return
        if not 0 <= value < 1 << width:
            raise LabelError(f"value {value} does not fit in {width} bits")
        self.chunks.append(format(value, f"0{width}b"))

    def raw(self, s: str) -> None:
        self.chunks.append(s)

    def pad(self) -> None:
        extra = -len(self.text()) % 8
        self.chunks.append("0" * extra)

    def text(self) -> str:
        joined = "".join(self.chunks)
        self.chunks = [joined]
        return joined


class _Reader:
    def __init__(self, s: str) -> None:
        self.s = s
        self.pos = 0

    def get(self, width: int) -> int:
        if width == 0:
            return 0
        if self.pos + width > len(self.s):
            raise LabelError("truncated bit stream")
        value = int(self.s[self.pos : self.pos + width], 2)
        self.pos += width
        return value

    def take(self, width: int) -> str:
        if self.pos + width > len(self.s):
            raise LabelError("truncated bit stream")
        out = self.s[self.pos : self.pos + width]
        self.pos += width
        return out

    @property
    def remaining(self) -> int:
        return len(self.s) - self.pos


def encode_tree(tree: ThinTree) -> str:
    """Level by level: child counts, then (below the root) child indices."""
    wc, wi = count_width(tree.delta), index_width(tree.delta)
    out = _Writer()
    children: dict[Word, int] = {}
    for w in tree.nodes:
        if w:
            children[w[:-1]] = children.get(w[:-1], 0) + 1
    for j in range(tree.height + 1):
        level = tree.level(j)
        for w in level:
            out.put(children.get(w, 0), wc)
        if j:
            for w in level:
                out.put(w[-1] - 1, wi)
    return out.text()


def _decode_levels(reader: _Reader, delta: int, height: int) -> frozenset[Word]:
    wc, wi = count_width(delta), index_width(delta)
    nodes: set[Word] = set()
    parents: list[Word] = []  # parent of each node on the current level, in order
    for j in range(height + 1):
        size = 1 if j == 0 else len(parents)
        counts = [reader.get(wc) for _ in range(size)]
        if j == 0:
            level: list[Word] = [()]
        else:
            indices = [reader.get(wi) + 1 for _ in range(size)]
            if any(i > delta for i in indices):
                raise LabelError("child index out of range")
            level = [parent + (i,) for parent, i in zip(parents, indices)]
            for a, b in zip(level, level[1:]):
                if a[:-1] == b[:-1] and a[-1] >= b[-1]:
                    raise LabelError("child indices not ascending")
        if any(c > delta for c in counts):
            raise LabelError("child count exceeds delta")
        nodes.update(level)
        parents = [w for w, c in zip(level, counts) for _ in range(c)]
    if parents:
        raise LabelError("children below the maximum height")
    return frozenset(nodes)


def decode_tree(code: str, delta: int, height: int) -> ThinTree:
    reader = _Reader(code)
    nodes = _decode_levels(reader, delta, height)
    if reader.remaining:
        raise LabelError("trailing bits after tree code")
    return ThinTree(nodes, delta, height)


def encoded_length_bound(tree: ThinTree) -> int:
    return (tree.height + 1) * tree.q * (count_width(tree.delta) + index_width(tree.delta))


# --- labels ----------------------------------------------------------------------


@dataclass(frozen=True)
class PartTree:
    """The tree whose level j lists the parts of P_{m-j}, children ordered by minimum vertex."""

    words: tuple[dict[int, Word], ...]  # per sequence index t (0-based), part id -> node
    identifier: tuple[Word, ...]
    delta: int
    height: int


def part_tree(seq: MergeSequence) -> PartTree:
    parts = seq.partitions
    m = len(parts)
    delta = valency(seq)
    words: list[dict[int, Word]] = [dict() for _ in range(m)]
    words[m - 1] = {pid: () for pid in range(len(parts[m - 1]))}
    for t in range(m - 2, -1, -1):
        fine, coarse = parts[t], parts[t + 1]
        used: dict[int, int] = {}
        for pid, mask in enumerate(fine.parts):
            parent = coarse.part_of[(mask & -mask).bit_length() - 1]
            used[parent] = used.get(parent, 0) + 1
            words[t][pid] = words[t + 1][parent] + (used[parent],)
    ident = tuple(words[0][parts[0].part_of[v]] for v in range(parts[0].n))
    return PartTree(tuple(words), ident, delta, m - 1)


def _check_start(seq: MergeSequence) -> None:
    if not seq.steps:
        raise ValueError("empty sequence")
    if any(seq.steps[0][1].rows):
        raise ValueError("R_1 must be empty; canonicalize first")


def touched_tree(g: Graph, seq: MergeSequence, u: int, tree: PartTree | None = None) -> tuple[ThinTree, dict[Word, int]]:
    """Nodes whose parts u touches, with the decision bit of each."""
    _check_start(seq)
    tree = tree or part_tree(seq)
    steps = seq.steps
    m = len(steps)
    nodes: dict[Word, int] = {}
    for t in range(m):
        p, r_here = steps[t]
        r_next = steps[min(t + 1, m - 1)][1]
        reach = r_next.rows[u] | 1 << u
        for pid in sorted({p.part_of[v] for v in bits(reach)}):
            open_pairs = p.parts[pid] & ~r_here.rows[u] & ~(1 << u)
            nodes[tree.words[t][pid]] = _decision(g, u, open_pairs)
    return ThinTree(frozenset(nodes), tree.delta, tree.height), nodes


def _decision(g: Graph, u: int, open_pairs: int) -> int:
    if not open_pairs:
        return 0
    seen = g.adj[u] & open_pairs
    if seen and seen != open_pairs:
        raise ValueError(f"vertex {u} sees a part inhomogeneously; sequence invalid")
    return int(bool(seen))


@dataclass(frozen=True)
class Label:
    m: int
    delta: int
    height: int
    identifier: Word
    tree: ThinTree | None
    decisions: tuple[int, ...]

    def to_bytes(self) -> bytes:
        out = _Writer()
        for value in (self.m, self.delta, self.height):
            out.put(value, HEADER_FIELD)
        if self.tree is not None:
            wi = index_width(self.delta)
            for i in self.identifier:
                out.put(i - 1, wi)
            code = encode_tree(self.tree)
            nbytes = (len(code) + 7) // 8
            out.put(nbytes, LENGTH_FIELD)
            out.raw(code.ljust(8 * nbytes, "0"))
            out.raw("".join(map(str, self.decisions)))
        out.pad()
        s = out.text()
        return int(s, 2).to_bytes(len(s) // 8, "big") if s else b""

    @classmethod
    def from_bytes(cls, data: bytes) -> Label:
        reader = _Reader("".join(format(b, "08b") for b in data))
        m, delta, height = (reader.get(HEADER_FIELD) for _ in range(3))
        if m == 0 or delta == 0 or height != m - 1:
            raise LabelError("inconsistent header")
        if m == 1:
            if reader.remaining >= 8:
                raise LabelError("trailing bytes after header-only label")
            return cls(m, delta, height, (), None, ())
        wi = index_width(delta)
        ident = tuple(reader.get(wi) + 1 for _ in range(height))
        if any(i > delta for i in ident):
            raise LabelError("identifier symbol out of range")
        nbytes = reader.get(LENGTH_FIELD)
        start = reader.pos
        nodes = _decode_levels(reader, delta, height)
        if reader.pos > start + 8 * nbytes:
            raise LabelError("tree code overruns its length field")
        if reader.s[reader.pos : start + 8 * nbytes].strip("0"):
            raise LabelError("nonzero tree padding")
        reader.pos = start + 8 * nbytes
        tree = ThinTree(nodes, delta, height)
        decisions = tuple(int(c) for c in reader.take(len(nodes)))
        if reader.remaining >= 8 or reader.s[reader.pos :].strip("0"):
            raise LabelError("trailing bits after decisions")
        return cls(m, delta, height, ident, tree, decisions)


def build_labels(g: Graph, seq: MergeSequence) -> list[Label]:
    _check_start(seq)
    m = len(seq)
    tree = part_tree(seq)
    labels = []
    for u in range(g.n):
        if m == 1:
            labels.append(Label(1, tree.delta, 0, (), None, ()))
            continue
        t_u, bits_u = touched_tree(g, seq, u, tree)
        order = t_u.preorder()
        labels.append(Label(m, tree.delta, tree.height, tree.identifier[u], t_u, tuple(bits_u[w] for w in order)))
    return labels


def decode_adjacency(label_u: Label | bytes, label_v: Label | bytes) -> bool:
    lu = label_u if isinstance(label_u, Label) else Label.from_bytes(label_u)
    lv = label_v if isinstance(label_v, Label) else Label.from_bytes(label_v)
    if (lu.m, lu.delta) != (lv.m, lv.delta):
        raise LabelError("labels come from different sequences")
    if lu.tree is None or lu.identifier == lv.identifier:
        return False
    target = lv.identifier
    for depth in range(len(target), -1, -1):
        if target[:depth] in lu.tree.nodes:
            w = target[:depth]
            break
    index = lu.tree.preorder().index(w)
    return bool(lu.decisions[index])


def label_budget(m: int, k: int, delta: int) -> int:
    """Largest label length the format can produce for these parameters."""
    return m * (3 * (k + 1)) * (count_width(delta) + index_width(delta)) + LABEL_OVERHEAD


def manifest(g: Graph, seq: MergeSequence) -> dict[str, int]:
    return {"n": g.n, "m": len(seq), "delta": valency(seq), "k": width_merge(g, seq, 1)}


def random_thin_tree(rng, delta: int, height: int, q: int) -> ThinTree:
    """A random q-thin tree; used by tests and the benchmark."""
    nodes: set[Word] = {()}
    level: list[Word] = [()]
    for _ in range(height):
        options = [w + (i,) for w in level for i in range(1, delta + 1)]
        size = rng.randint(0, min(q, len(options)))
        level = rng.sample(options, size)
        if not level:
            break
        nodes.update(level)
    return ThinTree(frozenset(nodes), delta, height)


def labels_agree(g: Graph, labels: Sequence[Label | bytes]) -> Iterable[tuple[int, int]]:
    """Pairs where the decoded adjacency disagrees with the graph."""
    for u in range(g.n):
        for v in range(g.n):
            if u != v and decode_adjacency(labels[u], labels[v]) != g.has_edge(u, v):
                yield (u, v)
