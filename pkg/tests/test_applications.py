from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import graphs, left_to_right_chain, random_chain, random_graph
from mergewidth.applications import (
    build_cover,
    colouring_numbers,
    contraction_width,
    max_non_degree,
    positive_to_contraction,
    quotient_graph,
    scol_bound,
    sparse_quotient,
    tww_quotient_and_cover,
    verify_cover,
    verify_quasi_isometry,
)
from mergewidth.conversions import chain_to_merge
from mergewidth.flips import ResolvedSet
from mergewidth.generators import cocubic, complete, edgeless, grid, path, universal_cograph
from mergewidth.graph import Graph, Partition, PartitionChain, VertexOrder
from mergewidth.sequences import MergeSequence, canonicalize, positive_sequence, width_merge


def _nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def brute_reach(g: Graph, order: VertexOrder, r: int) -> tuple[list[set[int]], list[set[int]]]:
    """Reachability sets by enumerating simple paths of length at most r."""
    pos = order.position
    h = _nx(g)
    weak = [{v} for v in range(g.n)]
    strong = [{v} for v in range(g.n)]
    for v in range(g.n):
        for u in range(g.n):
            if u == v or pos[u] > pos[v]:
                continue
            for p in nx.all_simple_paths(h, v, u, cutoff=r):
                if min(pos[x] for x in p) == pos[u]:
                    weak[v].add(u)
                if all(pos[x] > pos[v] for x in p[1:-1]):
                    strong[v].add(u)
    return strong, weak


@settings(max_examples=40)
@given(graphs(1, 7), st.randoms(use_true_random=False), st.integers(1, 3))
def test_colouring_numbers_match_path_enumeration(g, rnd, r):
    order = VertexOrder(tuple(rnd.sample(range(g.n), g.n)))
    c = colouring_numbers(g, order, r)
    strong, weak = brute_reach(g, order, r)
    assert [set(b for b in range(g.n) if m >> b & 1) for m in c.sreach] == strong
    assert [set(b for b in range(g.n) if m >> b & 1) for m in c.wreach] == weak
    assert c.scol == max(map(len, strong)) and c.wcol == max(map(len, weak))
    assert c.scol <= c.wcol


def test_colouring_numbers_examples():
    order = VertexOrder(tuple(range(5)))
    c = colouring_numbers(path(5), order, 1)
    assert (c.scol, c.wcol) == (2, 2)
    with pytest.raises(ValueError):
        colouring_numbers(complete(4), order, 2)
    c = colouring_numbers(complete(4), VertexOrder((3, 1, 0, 2)), 2)
    assert (c.scol, c.wcol) == (4, 4)
    assert colouring_numbers(edgeless(3), VertexOrder((2, 0, 1)), 3).wcol == 1


def test_quotient_and_quasi_isometry_examples():
    g = path(6)
    p = Partition.from_parts(6, [[0, 1], [2, 3], [4, 5]])
    assert quotient_graph(g, p).edges() == [(0, 1), (1, 2)]
    ok, worst = verify_quasi_isometry(g, p, 2, 1)
    assert ok and worst is not None
    assert not verify_quasi_isometry(g, p, 1, 0)[0]
    # distances to a disconnected part must stay infinite on both sides
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert verify_quasi_isometry(two, Partition.from_parts(4, [[0, 1], [2, 3]]), 1, 1)[0]


def test_sparse_quotient_examples():
    c = universal_cograph(3)
    cert = sparse_quotient(c.graph, chain_to_merge(c.graph, c.chain))
    assert all(cert.checks.values())
    # an edgeless graph keeps every vertex apart
    e = edgeless(4)
    seq = chain_to_merge(e, left_to_right_chain(4))
    cert = sparse_quotient(e, seq)
    assert cert.partition.is_singletons() and cert.quotient.edge_count() == 0
    k = complete(5)
    seq = chain_to_merge(k, left_to_right_chain(5))
    cert = sparse_quotient(k, seq)
    assert len(cert.partition) == 1


def test_sparse_quotient_rejects_invalid_sequences():
    g = path(3)
    bad = MergeSequence.of([(Partition.singletons(3), ResolvedSet.empty(3)), (Partition.whole(3), ResolvedSet.empty(3))])
    with pytest.raises(ValueError):
        sparse_quotient(g, bad)
    late = MergeSequence.of([(Partition.singletons(3), ResolvedSet.from_pairs(3, [(0, 1)]))])
    with pytest.raises(ValueError):
        sparse_quotient(g, late)


def test_sparse_quotient_and_cover_on_random_conversions():
    rng = random.Random(31)
    for _ in range(20):
        n = rng.randint(3, 10)
        g = random_graph(rng, n, rng.choice([0.2, 0.4, 0.6]))
        seq = chain_to_merge(g, random_chain(rng, n))
        cert = sparse_quotient(g, seq)
        assert all(cert.checks.values())
        for r, (scol, _) in cert.colouring.items():
            assert scol <= width_merge(g, seq, 3 * r)
        cover = build_cover(g, cert.partition, cert.order)
        wcol2 = colouring_numbers(cert.quotient, cert.order, 2).wcol
        assert verify_cover(g, cover, 38, wcol2).ok
        assert verify_cover(cert.quotient, cover.quotient, 2, wcol2).ok


def test_verify_cover_reports_failures():
    g = path(4)
    report = verify_cover(g, build_cover(g, Partition.singletons(4), VertexOrder((0, 1, 2, 3))), 1, 1)
    assert report.overlap >= 2 and report.overloaded
    from mergewidth.applications import Cover

    assert verify_cover(g, Cover([0b0011], [0]), 5, 5).uncovered == [1, 2, 3]


def brute_contraction_width(g: Graph, chain) -> int:
    best = 0
    for p in chain:
        parts = p.as_lists()
        for a in parts:
            red = 0
            for b in parts:
                if a is b:
                    continue
                kinds = {g.has_edge(x, y) for x in a for y in b}
                red += len(kinds) == 2
            best = max(best, red)
    return best


def test_contraction_width_matches_definition():
    rng = random.Random(41)
    for _ in range(30):
        n = rng.randint(2, 8)
        g = random_graph(rng, n)
        chain = random_chain(rng, n)
        assert contraction_width(g, chain) == brute_contraction_width(g, chain.partitions)
    with pytest.raises(ValueError):
        contraction_width(path(3), [Partition.singletons(3), Partition.whole(3)])


def test_scol_bound_closed_form():
    for k in range(1, 6):
        for r in range(1, 5):
            assert scol_bound(k, r) == ((k + 1) ** (r + 1) - 1) // k


def twin_width_instances():
    yield "path", path(8), left_to_right_chain(8).partitions
    yield "grid", grid(3, 4), left_to_right_chain(12).partitions
    for m in (2, 3, 4):
        c = universal_cograph(m)
        yield f"cograph{m}", c.graph, canonicalize(c.seq).partitions


@pytest.mark.parametrize("name,g,chain", list(twin_width_instances()))
def test_twin_width_quotient_and_cover(name, g, chain):
    cert, cover = tww_quotient_and_cover(g, chain)
    assert all(cert.checks.values())
    assert all(d <= 2 for d in cert.weak_diameters)
    k = contraction_width(g, chain)
    for r, (scol, _) in cert.colouring.items():
        assert scol <= scol_bound(k, r)


def matching(d: int) -> Graph:
    return Graph.from_edges(2 * d, [(i, d + i) for i in range(d)])


def test_positive_bridge_on_cocubic_graphs():
    rng = random.Random(51)
    for n in (4, 6, 8, 10):
        g = cocubic(n, seed=n)
        assert max_non_degree(g) == 3
        for _ in range(5):
            seq = positive_sequence(g, random_chain(rng, n).partitions)
            cw = positive_to_contraction(g, seq)
            assert cw <= width_merge(g, canonicalize(seq), 1) + 3


def test_positive_bridge_examples():
    for g in (complete(5), edgeless(5), path(6)):
        seq = positive_sequence(g, left_to_right_chain(g.n).partitions)
        assert positive_to_contraction(g, seq) <= width_merge(g, canonicalize(seq), 1) + 3
    with pytest.raises(ValueError):
        positive_to_contraction(path(3), chain_to_merge(path(3), left_to_right_chain(3)))


def test_plus_three_needs_small_non_degree():
    # A perfect matching merged one side first: every a-part is mixed to every b.
    g = matching(6)
    chain = left_to_right_chain(12).partitions
    seq = positive_sequence(g, chain)
    k = width_merge(g, canonicalize(seq), 1)
    cw = positive_to_contraction(g, seq)
    assert (cw, k) == (6, 2)
    assert cw > k + 3
    assert cw <= k + max_non_degree(g)


def test_quotient_index_orders_parts():
    g = path(5)
    seq = chain_to_merge(g, PartitionChain((Partition.singletons(5), Partition.whole(5))))
    cert = sparse_quotient(g, seq)
    idx = cert.index
    assert [idx[p] for p in cert.order.order] == sorted(idx, reverse=True)
    assert len(set(itertools.chain.from_iterable(cert.partition.as_lists()))) == 5


def test_path_weak_colouring_left_to_right():
    g = path(9)
    order = VertexOrder(tuple(range(9)))
    for r in (1, 2, 3, 4):
        assert colouring_numbers(g, order, r).wcol == r + 1
