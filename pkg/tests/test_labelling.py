from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import graph_and_chain, random_chain, random_graph
from mergewidth.conversions import chain_to_merge
from mergewidth.flips import ResolvedSet
from mergewidth.generators import complete, edgeless, universal_cograph
from mergewidth.graph import Graph, Partition
from mergewidth.labelling import (
    Label,
    LabelError,
    ThinTree,
    build_labels,
    decode_adjacency,
    decode_tree,
    encode_tree,
    encoded_length_bound,
    label_budget,
    labels_agree,
    manifest,
    part_tree,
    random_thin_tree,
    touched_tree,
)
from mergewidth.sequences import MergeSequence, canonicalize, positive_sequence, width_merge


def tree(words, delta, height) -> ThinTree:
    return ThinTree(frozenset(tuple(w) for w in words), delta, height)


PATH_TREE = tree([(), (2,), (2, 1)], 2, 2)


def test_encode_examples():
    assert encode_tree(tree([()], 3, 0)) == "00"
    # counts in 2-bit fields, indices (minus one) in 1-bit fields
    assert encode_tree(PATH_TREE) == "01" + "01" + "1" + "00" + "0"


def test_decode_examples():
    assert decode_tree("00", 3, 0) == tree([()], 3, 0)
    assert decode_tree(encode_tree(PATH_TREE), 2, 2) == PATH_TREE


@pytest.mark.parametrize(
    "code",
    [
        "0101100",  # truncated
        "010110000",  # trailing bit
        "11",  # child count above delta
        "01" + "01" + "1" + "01" + "0",  # children below the last level
        "01" + "10" + "1" + "1" + "0" + "00",  # sibling indices not ascending
    ],
)
def test_decode_rejects_corrupted_streams(code):
    with pytest.raises(LabelError):
        decode_tree(code, 2, 2)


def test_thin_tree_validation():
    with pytest.raises(ValueError):
        tree([(), (3,)], 2, 1)
    with pytest.raises(ValueError):
        tree([(), (1, 1)], 2, 2)  # missing parent


def test_random_tree_round_trips():
    rng = random.Random(0)
    for _ in range(300):
        delta = rng.randint(1, 9)
        height = rng.randint(0, 6)
        t = random_thin_tree(rng, delta, height, rng.randint(1, 5))
        code = encode_tree(t)
        assert decode_tree(code, delta, height) == t
        assert len(code) <= encoded_length_bound(t)


@settings(max_examples=40)
@given(st.integers(1, 6), st.integers(0, 5), st.integers(1, 4), st.randoms(use_true_random=False))
def test_tree_codec_property(delta, height, q, rnd):
    t = random_thin_tree(rnd, delta, height, q)
    assert max(t.widths) <= q
    assert decode_tree(encode_tree(t), delta, height) == t


def test_touched_tree_examples():
    e = edgeless(4)
    seq = canonicalize(chain_to_merge(e, random_chain(random.Random(1), 4)))
    pt = part_tree(seq)
    for u in range(4):
        t, bits_ = touched_tree(e, seq, u, pt)
        # only the parts containing u
        assert t.widths == [1] * (t.height + 1)
        leaf = pt.identifier[u]
        assert all(w == leaf[: len(w)] for w in t.nodes)
        assert set(bits_.values()) <= {0}

    k2 = complete(2)
    seq = canonicalize(chain_to_merge(k2, [Partition.singletons(2), Partition.whole(2)]))
    for u in range(2):
        t, bits_ = touched_tree(k2, seq, u)
        assert () in t.nodes

    c = universal_cograph(3)
    for u in range(c.graph.n):
        t, _ = touched_tree(c.graph, c.seq, u)
        assert max(t.widths) <= 1


def test_touched_tree_requires_empty_start():
    g = complete(2)
    seq = MergeSequence.of([(Partition.singletons(2), ResolvedSet.from_pairs(2, [(0, 1)]))])
    with pytest.raises(ValueError):
        touched_tree(g, seq, 0)


def test_label_examples():
    one = Graph.from_edges(1, [])
    labels = build_labels(one, chain_to_merge(one, [Partition.singletons(1)]))
    assert labels[0].tree is None and len(labels[0].to_bytes()) == 6

    k2 = complete(2)
    labels = build_labels(k2, chain_to_merge(k2, [Partition.singletons(2), Partition.whole(2)]))
    assert decode_adjacency(labels[0], labels[1]) and decode_adjacency(labels[1].to_bytes(), labels[0].to_bytes())

    e = edgeless(5)
    labels = build_labels(e, chain_to_merge(e, random_chain(random.Random(3), 5)))
    assert not any(decode_adjacency(a, b) for a in labels for b in labels if a is not b)


def test_cograph_label_size_is_frozen():
    c = universal_cograph(3)
    labels = build_labels(c.graph, c.seq)
    info = manifest(c.graph, c.seq)
    assert (info["m"], info["delta"], info["k"]) == (4, 2, 1)
    bits_ = max(8 * len(lab.to_bytes()) for lab in labels)
    assert bits_ == 104
    assert bits_ <= label_budget(info["m"], info["k"], info["delta"])
    assert list(labels_agree(c.graph, labels)) == []


def test_label_bytes_round_trip():
    c = universal_cograph(2)
    for lab in build_labels(c.graph, c.seq):
        assert Label.from_bytes(lab.to_bytes()) == lab
    with pytest.raises(LabelError):
        Label.from_bytes(b"\x00\x01")
    data = build_labels(c.graph, c.seq)[1].to_bytes()
    with pytest.raises(LabelError):
        Label.from_bytes(data[:-2])


@settings(max_examples=40)
@given(graph_and_chain(1, 8))
def test_labels_decode_adjacency(gc):
    g, chain = gc
    for seq in (chain_to_merge(g, chain), positive_sequence(g, chain.partitions)):
        seq = canonicalize(seq)
        labels = build_labels(g, seq)
        assert list(labels_agree(g, labels)) == []
        info = manifest(g, seq)
        assert max(8 * len(lab.to_bytes()) for lab in labels) <= label_budget(info["m"], info["k"], info["delta"])


def test_touched_trees_are_width_thin():
    rng = random.Random(61)
    for _ in range(20):
        n = rng.randint(2, 10)
        g = random_graph(rng, n)
        seq = canonicalize(chain_to_merge(g, random_chain(rng, n)))
        k = width_merge(g, seq, 1)
        pt = part_tree(seq)
        for u in range(n):
            t, _ = touched_tree(g, seq, u, pt)
            assert max(t.widths) <= k
