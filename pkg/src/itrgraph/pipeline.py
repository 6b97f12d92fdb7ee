"""End-to-end compression and decompression shared by the CLI and the service."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import codec, digrams, ingestion, model, query
from .dictionary import Dictionary, apply_plus, strip_plus
from .ingestion import FORMAT_EDGELIST, FORMAT_NTRIPLES, InputFormat, ParsedGraph


@dataclass
class CompressionReport:
    input_nodes: int
    input_edges: int
    working_edges: int  # after label edges were attached in plus mode
    start_edges: int
    rules: int
    iterations: int
    skipped_digrams: int
    replaced_pairs: int
    pruned_rules: int
    output_bytes: int
    section_bytes: dict[str, int] = field(default_factory=dict)
    input_bytes: Optional[int] = None

    @property
    def ratio(self) -> Optional[float]:
        if self.input_bytes:
            return self.output_bytes / self.input_bytes
        return None

    def lines(self) -> list[str]:
        out = [
            f"nodes:            {self.input_nodes}",
            f"edges in:         {self.input_edges}",
        ]
        if self.working_edges != self.input_edges:
            out.append(f"edges with labels: {self.working_edges}")
        out += [
            f"start edges:      {self.start_edges}",
            f"rules:            {self.rules} ({self.pruned_rules} pruned)",
            f"iterations:       {self.iterations} ({self.skipped_digrams} skipped)",
            f"replaced pairs:   {self.replaced_pairs}",
            f"output bytes:     {self.output_bytes}",
        ]
        for name, size in self.section_bytes.items():
            out.append(f"  section {name}: {size}")
        if self.ratio is not None:
            out.append(f"ratio:            {self.ratio:.2%}")
        return out


def compress_parsed(
    parsed: ParsedGraph,
    plus: bool = False,
    max_rank: int = digrams.DEFAULT_MAX_RANK,
    k: int = 2,
    max_steps: Optional[int] = None,
) -> tuple[bytes, CompressionReport]:
    """Run the digram loop, prune, and serialize one parsed input graph."""
    graph = parsed.graph
    dictionary = parsed.dictionary
    labels = parsed.labels
    stored_node_labels: Optional[dict[int, str]] = None

    if plus:
        if not parsed.numeric_nodes:
            raise ValueError("label edges require edge-list input with a node-label file")
        graph = apply_plus(graph, parsed.node_labels or {}, dictionary, labels)
    elif parsed.node_labels:
        stored_node_labels = parsed.node_labels

    comp = digrams.Compressor(graph, labels.copy(), max_rank=max_rank)
    comp.run(max_steps=max_steps)
    grammar = comp.finish()
    rules_before = len(grammar.rules)
    grammar = digrams.prune(grammar)

    data = codec.serialize(
        grammar,
        dictionary,
        node_labels=stored_node_labels,
        plus=plus,
        numeric_nodes=parsed.numeric_nodes,
        k=k,
    )
    view = codec.deserialize(data)
    report = CompressionReport(
        input_nodes=parsed.graph.node_count,
        input_edges=len(parsed.graph.edges),
        working_edges=len(graph.edges),
        start_edges=len(grammar.start_graph.edges),
        rules=len(grammar.rules),
        iterations=comp.stats.iterations,
        skipped_digrams=comp.stats.skipped,
        replaced_pairs=comp.stats.replaced_pairs,
        pruned_rules=rules_before - len(grammar.rules),
        output_bytes=len(data),
        section_bytes=view.section_sizes,
    )
    return data, report


def compress_file(
    input_path: Path,
    fmt: InputFormat,
    output_path: Path,
    plus: bool = False,
    max_rank: int = digrams.DEFAULT_MAX_RANK,
    k: int = 2,
) -> CompressionReport:
    text = input_path.read_text(encoding="utf-8")
    label_text = None
    if fmt.node_label_file is not None:
        if fmt.tag != FORMAT_EDGELIST:
            raise ValueError("node-label files apply to edge-list input only")
        label_text = Path(fmt.node_label_file).read_text(encoding="utf-8")
    parsed = ingestion.parse(text, fmt, label_text)
    data, report = compress_parsed(parsed, plus=plus, max_rank=max_rank, k=k)
    output_path.write_bytes(data)
    report.input_bytes = input_path.stat().st_size + (
        Path(fmt.node_label_file).stat().st_size if fmt.node_label_file else 0
    )
    return report


@dataclass
class DecompressedGraph:
    graph: model.Hypergraph
    dictionary: Dictionary
    node_labels: Optional[dict[int, str]]
    numeric_nodes: bool


def decompress_view(view: codec.ContainerView) -> DecompressedGraph:
    graph = view.decompress()
    node_labels: Optional[dict[int, str]] = None
    if view.plus_mode:
        graph, node_labels = strip_plus(graph, view.dictionary, view.labels)
    elif view.stored_node_labels:
        node_labels = dict(view.stored_node_labels)
    return DecompressedGraph(graph, view.dictionary, node_labels, view.numeric_nodes)


def decompress_file(container_path: Path, output_path: Path, fmt: InputFormat) -> int:
    """Write the fully expanded graph back out; returns the edge count."""
    view = load_view(container_path)
    result = decompress_view(view)
    if fmt.tag == FORMAT_NTRIPLES:
        if result.numeric_nodes:
            raise codec.ContainerError("container has numeric nodes; decompress with -f el")
        output_path.write_text(ingestion.emit_ntriples(result.graph, result.dictionary), encoding="utf-8")
    else:
        if not result.numeric_nodes:
            raise codec.ContainerError("container has term-named nodes; decompress with -f nt")
        body, label_body = ingestion.emit_edge_list(result.graph, result.dictionary, result.node_labels)
        output_path.write_text(body, encoding="utf-8")
        if label_body is not None:
            label_path = fmt.node_label_file or output_path.with_suffix(output_path.suffix + ".labels")
            Path(label_path).write_text(label_body, encoding="utf-8")
    return len(result.graph.edges)


def load_view(path: Path) -> codec.ContainerView:
    return codec.deserialize(Path(path).read_bytes())


UNBOUND = "?"


def resolve_term(view: codec.ContainerView, term: str, role: str) -> tuple[Optional[int], bool]:
    """Map one query term to an ID; (None, True) means unbound, (None, False) a miss."""
    if term == UNBOUND:
        return None, True
    if term.startswith("#") and term[1:].isdigit():
        return int(term[1:]), True
    if role == "p":
        lid = view.dictionary.edge_label_id(term)
        return (lid, True) if lid is not None else (None, False)
    if view.numeric_nodes:
        try:
            node = int(term)
        except ValueError:
            return None, False
        return (node, True) if 0 <= node < view.node_count else (None, False)
    nid = view.dictionary.node_id(term)
    return (nid, True) if nid is not None else (None, False)


def resolve_pattern(view: codec.ContainerView, s: str, p: str, o: str) -> Optional[query.TriplePattern]:
    """None when a bound term is not in the dictionary (empty result, not an error)."""
    sid, ok_s = resolve_term(view, s, "s")
    pid, ok_p = resolve_term(view, p, "p")
    oid, ok_o = resolve_term(view, o, "o")
    if not (ok_s and ok_p and ok_o):
        return None
    return query.TriplePattern(sid, pid, oid)


def format_node(view: codec.ContainerView, node: int) -> str:
    if view.numeric_nodes:
        return str(node)
    return view.dictionary.node_term(node)


def format_triple(view: codec.ContainerView, edge: model.Edge) -> str:
    s, o = edge.nodes
    return f"{format_node(view, s)} {view.dictionary.edge_label_term(edge.label)} {format_node(view, o)}"
