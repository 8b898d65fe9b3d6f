"""Command-line interface: ``mergewidth <command> ...``; JSON on stdout, diagnostics on stderr."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Sequence

from . import applications, conversions, generators, labelling, serialize, widths
from .flips import FlipConfig, flip_balls
from .graph import BudgetExceeded, Graph, PartitionChain, VertexOrder, bits
from .sequences import (
    MergeSequence,
    TransientSequence,
    canonicalize,
    transient_width,
    verify_merge,
    verify_transient,
    width_merge,
)

CONFIG_ENV = "MERGEWIDTH_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    exact_cap: int = 6  # most parts for exact flip balls
    oracle_n: int = 5  # most vertices for exhaustive oracles
    dp_cap: int = 16  # most vertices for the subset DP
    samples: int = 1024
    restarts: int = 8
    seed: int = 0
    radii: tuple[int, ...] = (1, 2, 3)
    output: str | None = None

    def __post_init__(self) -> None:
        for name in ("exact_cap", "oracle_n", "dp_cap", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def flips(self) -> FlipConfig:
        return FlipConfig(self.exact_cap, self.samples, self.restarts, self.seed)


def load_config(path: str | None = None) -> RunConfig:
    """Defaults, overridden by the JSON file named in MERGEWIDTH_CONFIG (or ``path``)."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    data = json.loads(Path(path).read_text())
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "radii" in data:
        data["radii"] = tuple(data["radii"])
    return RunConfig(**data)


class CliError(Exception):
    def __init__(self, message: str, code: int = 2) -> None:
        super().__init__(message)
        self.code = code


# --- input / output ----------------------------------------------------------------


def _detect(path: str, text: str, fmt: str) -> str:
    if fmt != "auto":
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        return "json"
    if suffix in (".g6", ".graph6"):
        return "graph6"
    if suffix in (".el", ".edges", ".txt"):
        return "edges"
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return "json"
    first = stripped.splitlines()[0].split() if stripped else []
    if len(first) == 2 and all(t.isdigit() for t in first):
        return "edges"
    return "graph6"


def read_instance(path: str, fmt: str = "auto") -> tuple[Graph, list[Any]]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    kind = _detect(path, text, fmt)
    if kind == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise serialize.FormatError(f"bad JSON: {exc}") from None
        return serialize.instance_from_json(data)
    if kind == "graph6":
        return serialize.parse_graph6(text), []
    return serialize.parse_edge_list(text), []


def _clean(value: Any) -> Any:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return int(value) if value.is_integer() else value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def emit(obj: Any, config: RunConfig) -> None:
    text = json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)


def _find(certs: list[Any], kind: type) -> Any:
    for c in certs:
        if isinstance(c, kind):
            return c
    return None


def _radius(text: str) -> int | None:
    if text in ("inf", "infinity"):
        return None
    r = int(text)
    if r < 0:
        raise CliError("radius must be non-negative")
    return r


# --- commands -----------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace, config: RunConfig) -> int:
    if args.family == "cograph":
        inst = generators.universal_cograph(int(args.args[0]))
        g = inst.graph
        certs: list[Any] = [inst.seq, inst.transient, inst.chain, inst.order]
    else:
        spec = ":".join([args.family, *args.args])
        graphs = generators.corpus(spec)
        if len(graphs) != 1:
            emit({"schema": serialize.SCHEMA, "graph6": [serialize.format_graph6(h) for h in graphs]}, config)
            return 0
        g, certs = graphs[0], []
    if args.format == "graph6":
        sys.stdout.write(serialize.format_graph6(g) + "\n")
    elif args.format == "edges":
        sys.stdout.write(serialize.format_edge_list(g))
    else:
        emit(serialize.instance_json(g, certs), config)
    return 0


def _violations(report) -> list[dict[str, Any]]:
    return [{"step": v.step, "clause": v.clause, "detail": v.detail} for v in report.sorted()]


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    if not certs:
        raise CliError("no certificate to verify")
    results = []
    for c in certs:
        entry: dict[str, Any] = {"kind": serialize.certificate_json(g, c)["kind"]}
        if isinstance(c, MergeSequence):
            entry["violations"] = _violations(verify_merge(g, c))
        elif isinstance(c, TransientSequence):
            entry["violations"] = _violations(verify_transient(g, c))
        else:
            # chains and orders are validated while parsing
            entry["violations"] = []
        entry["valid"] = not entry["violations"]
        results.append(entry)
    ok = all(e["valid"] for e in results)
    emit({"schema": serialize.SCHEMA, "valid": ok, "certificates": results}, config)
    if not ok:
        for e in results:
            for v in e["violations"]:
                print(f"{e['kind']} step {v['step']}: {v['clause']}: {v['detail']}", file=sys.stderr)
    return 0 if ok else 1


def cmd_width(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    variant = args.variant
    r = _radius(args.radius)
    kinds = {"mw": MergeSequence, "tmw": TransientSequence, "pmw": PartitionChain, "dmw": VertexOrder}
    cert = _find(certs, kinds[variant])
    if cert is None and variant == "pmw":
        seq = _find(certs, MergeSequence)
        if seq is not None:
            cert = PartitionChain(tuple(canonicalize(seq).partitions))
    if isinstance(cert, MergeSequence) and not verify_merge(g, cert).ok:
        raise CliError("merge certificate does not verify; run 'verify' for the clause list", 1)
    if isinstance(cert, TransientSequence) and not verify_transient(g, cert).ok:
        raise CliError("transient certificate does not verify; run 'verify' for the clause list", 1)
    if cert is None:
        rep = widths.exact_width(g, variant, r if r is not None else max(g.n - 1, 1), config.oracle_n)
        rep.details["of"] = "oracle"
        rep.witness = None
    elif r is None:
        rep = widths.infinite_radius(g, variant, args.mode, cert, config.flips)
    elif variant == "mw":
        rep = widths.WidthReport("mw", r, width_merge(g, cert, r), widths.Mode.EXACT, details={"of": "certificate"})
    elif variant == "tmw":
        rep = widths.WidthReport("tmw", r, transient_width(g, cert, r), widths.Mode.EXACT, details={"of": "certificate"})
    elif variant == "pmw":
        rep = widths.partition_width(g, cert, r, args.mode, config.flips)
        rep.details["of"] = "certificate"
    else:
        rep = widths.definable_width(g, cert, r, args.mode, config.flips)
        rep.details["of"] = "certificate"
    out = {
        "schema": serialize.SCHEMA,
        "hash": serialize.graph_hash(g),
        "variant": rep.variant,
        "radius": "inf" if r is None else r,
        "value": rep.value,
        "mode": rep.mode,
        "details": rep.details,
    }
    emit(out, config)
    return 0


def cmd_approx(args: argparse.Namespace, config: RunConfig) -> int:
    g, _ = read_instance(args.input, args.format)
    r = int(args.radius)
    res = conversions.approx_merge_width(g, r, max_n=config.dp_cap)
    emit(
        serialize.instance_json(
            g,
            [res.transient, res.merge],
            radius=r,
            bottleneck=res.bottleneck,
            transient_width=transient_width(g, res.transient, r),
        ),
        config,
    )
    return 0


def cmd_convert(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    if args.to == "merge":
        chain = _find(certs, PartitionChain)
        if chain is None:
            raise CliError("convert --to merge needs a chain certificate")
        out = [conversions.chain_to_merge(g, chain)]
    else:
        seq = _find(certs, MergeSequence)
        if seq is None:
            raise CliError("convert --to order needs a merge certificate")
        out = [conversions.build_definable_order(g, seq)]
    emit(serialize.instance_json(g, out), config)
    return 0


def _certificate_json(cert: applications.QuotientCertificate) -> dict[str, Any]:
    return {
        "parts": serialize.partition_json(cert.partition),
        "order": list(cert.order.order),
        "quotient_edges": [list(e) for e in cert.quotient.edges()],
        "weak_diameters": cert.weak_diameters,
        "colouring": {str(r): {"scol": s, "wcol": w} for r, (s, w) in sorted(cert.colouring.items())},
        "index": cert.index,
        "checks": cert.checks,
    }


def _quotient(g: Graph, certs: list[Any], twin: bool, config: RunConfig):
    if twin:
        chain = _find(certs, PartitionChain)
        if chain is None:
            raise CliError("--twin-width needs a chain certificate")
        return applications.tww_quotient_and_cover(g, chain, config.radii, strict=False)
    seq = _find(certs, MergeSequence)
    if seq is None:
        raise CliError("quotient needs a merge certificate")
    cert = applications.sparse_quotient(g, seq, config.radii, strict=False)
    return cert, applications.build_cover(g, cert.partition, cert.order)


def cmd_quotient(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    cert, _ = _quotient(g, certs, args.twin_width, config)
    emit({"schema": serialize.SCHEMA, "quotient": _certificate_json(cert)}, config)
    return 0 if all(cert.checks.values()) else 1


def cmd_cover(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    cert, cover = _quotient(g, certs, args.twin_width, config)
    wcol2 = applications.colouring_numbers(cert.quotient, cert.order, 2).wcol
    radius = 8 if args.twin_width else 38
    rep = applications.verify_cover(g, cover, radius, wcol2)
    emit(
        {
            "schema": serialize.SCHEMA,
            "clusters": [list(bits(c)) for c in cover.clusters],
            "centers": cover.centers,
            "report": {
                "ok": rep.ok,
                "radius": rep.radius,
                "radius_bound": radius,
                "overlap": rep.overlap,
                "overlap_bound": wcol2,
                "uncovered": rep.uncovered,
                "wide": rep.wide,
                "overloaded": rep.overloaded,
            },
        },
        config,
    )
    return 0 if rep.ok else 1


def cmd_label(args: argparse.Namespace, config: RunConfig) -> int:
    g, certs = read_instance(args.input, args.format)
    seq = _find(certs, MergeSequence)
    if seq is None:
        raise CliError("label needs a merge certificate")
    labels = [lab.to_bytes().hex() for lab in labelling.build_labels(g, seq)]
    emit({"schema": serialize.SCHEMA, "manifest": labelling.manifest(g, seq), "labels": labels}, config)
    return 0


def cmd_query(args: argparse.Namespace, config: RunConfig) -> int:
    data = json.loads(Path(args.labels).read_text() if args.labels != "-" else sys.stdin.read())
    labels = data["labels"]
    try:
        lu, lv = bytes.fromhex(labels[args.u]), bytes.fromhex(labels[args.v])
    except IndexError:
        raise CliError("vertex out of range") from None
    emit({"schema": serialize.SCHEMA, "u": args.u, "v": args.v, "adjacent": labelling.decode_adjacency(lu, lv)}, config)
    return 0


def cmd_oracle(args: argparse.Namespace, config: RunConfig) -> int:
    if args.n > config.oracle_n:
        raise BudgetExceeded(f"oracle_n cap {config.oracle_n} < n = {args.n}")
    rows = []
    for g in generators.all_graphs(args.n):
        row: dict[str, Any] = {"graph6": serialize.format_graph6(g), "edges": g.edge_count()}
        for variant in widths.VARIANTS:
            row[variant] = widths.exact_width(g, variant, args.radius, config.oracle_n).value
        rows.append(row)
    rows.sort(key=lambda row: (row["edges"], row["graph6"]))
    emit({"schema": serialize.SCHEMA, "n": args.n, "radius": args.radius, "table": rows}, config)
    return 0


def cmd_bench(args: argparse.Namespace, config: RunConfig) -> int:
    timings = []
    for n in args.sizes:
        g = generators.gnp(n, 0.3, config.seed)
        start = time.perf_counter()
        res = conversions.approx_merge_width(g, 1, max_n=config.dp_cap)
        timings.append({"task": "approx", "n": n, "seconds": round(time.perf_counter() - start, 4), "bottleneck": res.bottleneck})
        chain = PartitionChain(tuple(res.merge.partitions))
        start = time.perf_counter()
        for p in chain.partitions:
            flip_balls(g, p, 2, "auto", config.flips)
        timings.append({"task": "flip_balls", "n": n, "seconds": round(time.perf_counter() - start, 4)})
    emit({"schema": serialize.SCHEMA, "timings": timings}, config)
    return 0


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--exact-cap", type=int, help="most parts for exact flip balls")
    common.add_argument("--dp-cap", type=int, help="most vertices for the subset DP")
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--format", default="auto", choices=["auto", "json", "graph6", "edges"])

    parser = argparse.ArgumentParser(prog="mergewidth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, needs_input: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        if needs_input:
            p.add_argument("input", nargs="?", default="-", help="graph file, or - for stdin")
        p.set_defaults(func=func)
        return p

    p = add("generate", cmd_generate, "emit a graph family member", needs_input=False)
    p.add_argument("family", choices=sorted(generators.FAMILIES) + ["all"])
    p.add_argument("args", nargs="*")

    add("verify", cmd_verify, "check the certificates of an instance")

    p = add("width", cmd_width, "evaluate a width variant")
    p.add_argument("--variant", choices=widths.VARIANTS, default="mw")
    p.add_argument("--radius", "--r", default="1", help="integer or inf")
    p.add_argument("--mode", choices=["exact", "sampled", "auto"], default="exact")

    p = add("approx", cmd_approx, "subset DP approximation of merge-width")
    p.add_argument("--radius", "--r", default="1")

    p = add("convert", cmd_convert, "chain to merge sequence, or merge sequence to vertex order")
    p.add_argument("--to", choices=["merge", "order"], required=True)

    for name, func, text in (("quotient", cmd_quotient, "sparse quotient certificate"), ("cover", cmd_cover, "neighbourhood cover")):
        p = add(name, func, text)
        p.add_argument("--twin-width", action="store_true", help="use a contraction chain instead")

    add("label", cmd_label, "adjacency labels from a merge sequence")

    p = add("query", cmd_query, "decode adjacency from two labels", needs_input=False)
    p.add_argument("labels")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)

    p = add("oracle", cmd_oracle, "exhaustive width table over all graphs on n vertices", needs_input=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", "--r", type=int, default=1)

    p = add("bench", cmd_bench, "time the heavier routines", needs_input=False)
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12])
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        overrides = {
            "seed": args.seed,
            "exact_cap": args.exact_cap,
            "dp_cap": args.dp_cap,
            "output": args.output,
        }
        config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
        return args.func(args, config)
    except BudgetExceeded as exc:
        print(json.dumps({"error": "budget exceeded", "cap": str(exc)}), file=sys.stderr)
        return 3
    except CliError as exc:
        print(f"mergewidth: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"mergewidth: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


__all__ = ["RunConfig", "build_parser", "load_config", "main", "run"]
