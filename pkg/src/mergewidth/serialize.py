"""Graph file formats and JSON certificates."""

from __future__ import annotations

import hashlib
from typing import Any

import networkx as nx

from .flips import FlipSpec, ResolvedSet
from .graph import Graph, Partition, PartitionChain, VertexOrder, bits
from .sequences import MergeSequence, TransientSequence, is_flip_of

SCHEMA = 1


class FormatError(ValueError):
    pass


def graph_hash(g: Graph) -> str:
    text = f"{g.n};" + ",".join(f"{u}-{v}" for u, v in g.edges())
    return hashlib.sha256(text.encode()).hexdigest()


def parse_edge_list(text: str) -> Graph:
    """``n m`` on the first line, then ``m`` lines ``u v`` with 0-based vertices."""
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise FormatError("edge list must start with 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
        if len(edges) != m:
            raise ValueError(f"header announces {m} edges, found {len(edges)}")
        return Graph.from_edges(n, edges)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad edge list: {exc}") from None


def format_edge_list(g: Graph) -> str:
    edges = g.edges()
    return "\n".join([f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]) + "\n"


def parse_graph6(text: str) -> Graph:
    data = text.strip().encode()
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<") :]
    try:
        nxg = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError) as exc:
        raise FormatError(f"bad graph6: {exc}") from None
    return Graph.from_edges(nxg.number_of_nodes(), nxg.edges())


def format_graph6(g: Graph) -> str:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    return nx.to_graph6_bytes(nxg, header=False).decode().strip()


# --- certificates ------------------------------------------------------------------


def partition_json(p: Partition) -> list[list[int]]:
    return [list(bits(mask)) for mask in p.parts]


def partition_from_json(n: int, parts: list[list[int]]) -> Partition:
    try:
        return Partition.from_parts(n, parts)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad partition: {exc}") from None


def certificate_json(g: Graph, cert: Any) -> dict[str, Any]:
    if isinstance(cert, MergeSequence):
        return {
            "kind": "merge",
            "steps": [{"parts": partition_json(p), "resolved": [list(e) for e in r.pairs()]} for p, r in cert.steps],
        }
    if isinstance(cert, TransientSequence):
        steps = []
        for p, h in cert.steps:
            spec = is_flip_of(g, p, h)
            if spec is None:
                raise ValueError("transient step is not a flip of the graph")
            steps.append({"parts": partition_json(p), "flips": [list(e) for e in sorted(spec.pairs)]})
        return {"kind": "transient", "steps": steps}
    if isinstance(cert, PartitionChain):
        return {"kind": "chain", "partitions": [partition_json(p) for p in cert.partitions]}
    if isinstance(cert, VertexOrder):
        return {"kind": "order", "order": list(cert.order)}
    raise TypeError(f"cannot serialise {type(cert).__name__}")


def certificate_from_json(g: Graph, data: dict[str, Any]) -> Any:
    kind = data.get("kind")
    n = g.n
    try:
        if kind == "merge":
            return MergeSequence(
                tuple(
                    (partition_from_json(n, s["parts"]), ResolvedSet.from_pairs(n, [tuple(e) for e in s["resolved"]]))
                    for s in data["steps"]
                )
            )
        if kind == "transient":
            steps = []
            for s in data["steps"]:
                p = partition_from_json(n, s["parts"])
                spec = FlipSpec.of(tuple(e) for e in s["flips"])
                spec.check(p)
                steps.append((p, spec))
            return TransientSequence.from_flips(g, steps)
        if kind == "chain":
            return PartitionChain(tuple(partition_from_json(n, p) for p in data["partitions"]))
        if kind == "order":
            return VertexOrder(tuple(data["order"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"bad {kind} certificate: {exc}") from None
    raise FormatError(f"unknown certificate kind {kind!r}")


def instance_json(g: Graph, certificates: list[Any] = (), **extra: Any) -> dict[str, Any]:
    out: dict[str, Any] = {
        "schema": SCHEMA,
        "graph": {"n": g.n, "edges": [list(e) for e in g.edges()]},
        "hash": graph_hash(g),
        "certificates": [certificate_json(g, c) for c in certificates],
    }
    out.update(extra)
    return out


def instance_from_json(data: dict[str, Any]) -> tuple[Graph, list[Any]]:
    if data.get("schema") != SCHEMA:
        raise FormatError(f"unsupported schema {data.get('schema')!r}")
    try:
        g = Graph.from_edges(data["graph"]["n"], [tuple(e) for e in data["graph"]["edges"]])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"bad graph: {exc}") from None
    if "hash" in data and data["hash"] != graph_hash(g):
        raise FormatError("certificate is bound to a different graph (hash mismatch)")
    return g, [certificate_from_json(g, c) for c in data.get("certificates", [])]
