"""Random instances and hypothesis strategies shared by the tests."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from mergewidth.graph import Graph, Partition, PartitionChain


def random_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    p = rng.random() if p is None else p
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def random_partition(rng: random.Random, n: int, parts: int) -> Partition:
    return Partition.from_keys([rng.randrange(parts) for _ in range(n)])


def random_chain(rng: random.Random, n: int) -> PartitionChain:
    p = Partition.singletons(n)
    chain = [p]
    while len(p) > 1:
        i, j = sorted(rng.sample(range(len(p)), 2))
        p = p.merged(i, j)
        chain.append(p)
    return PartitionChain(tuple(chain))


def left_to_right_chain(n: int) -> PartitionChain:
    p = Partition.singletons(n)
    chain = [p]
    while len(p) > 1:
        p = p.merged(0, 1)
        chain.append(p)
    return PartitionChain(tuple(chain))


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 7) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, chosen) if keep])


@st.composite
def graph_and_partition(draw, min_n: int = 1, max_n: int = 7, max_parts: int = 4):
    g = draw(graphs(min_n, max_n))
    keys = draw(st.lists(st.integers(0, max_parts - 1), min_size=g.n, max_size=g.n))
    return g, Partition.from_keys(keys)


@st.composite
def graph_and_chain(draw, min_n: int = 2, max_n: int = 7):
    g = draw(graphs(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return g, random_chain(random.Random(seed), g.n)


@st.composite
def vertex_sets(draw, n: int) -> int:
    return draw(st.integers(0, (1 << n) - 1))
