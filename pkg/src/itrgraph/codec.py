"""On-disk container: succinct start graph, rule streams, reachability matrix.

Layout: magic "ITR1", one flags byte, five little-endian u64 section
lengths, then the sections (dictionary, terminal ranks, rules, start
graph, reachability matrix), each byte-padded. All integer streams are
delta codes with a +1 shift; bit order is MSB-first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterator, Optional

from .dictionary import Dictionary
from .model import Edge, Grammar, Hypergraph, LabelTable, Rule, decompress as _decompress
from .succinct import BitReader, BitWriter, EliasFanoSeq, K2Tree, TruncatedStreamError, delta

MAGIC = b"ITR1"
FLAG_PLUS = 0x01
FLAG_NUMERIC_NODES = 0x02

SECTIONS = ("dictionary", "label_table", "rules", "start_graph", "nt_matrix")


class ContainerError(ValueError):
    """Malformed or corrupt container data."""


def compute_index_function(edge: Edge) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Duplicate-free sorted node list and the position->index mapping.

    nodes[m] == zeta[pi[m]] for every position m, so the column of the
    incidence matrix plus pi reconstructs the edge exactly.
    """
    zeta = tuple(sorted(set(edge.nodes)))
    index = {v: i for i, v in enumerate(zeta)}
    pi = tuple(index[v] for v in edge.nodes)
    return zeta, pi


def encode_index_function(w: BitWriter, pi: tuple[int, ...]) -> None:
    delta.write_value(w, len(pi) - 1)
    for p in pi:
        delta.write_value(w, p)


def decode_index_function(r: BitReader) -> tuple[int, ...]:
    rank = delta.read_value(r) + 1
    return tuple(delta.read_value(r) for _ in range(rank))


@dataclass
class CompressedStartGraph:
    """Edges sorted by label: Elias-Fano label IDs, k2-tree incidence, index functions."""

    node_count: int
    label_seq: EliasFanoSeq
    incidence: K2Tree
    fn_table: list[tuple[int, ...]]
    fn_ids: list[int]

    def __len__(self) -> int:
        return len(self.fn_ids)


def encode_start_graph(graph: Hypergraph, num_labels: int, k: int = 2) -> CompressedStartGraph:
    order = sorted(range(len(graph.edges)), key=lambda i: graph.edges[i].label)
    labels = [graph.edges[i].label for i in order]
    points: list[tuple[int, int]] = []
    fn_table: list[tuple[int, ...]] = []
    fn_index: dict[tuple[int, ...], int] = {}
    fn_ids: list[int] = []
    for col, i in enumerate(order):
        e = graph.edges[i]
        zeta, pi = compute_index_function(e)
        points.extend((v, col) for v in zeta)
        fid = fn_index.get(pi)
        if fid is None:
            fid = fn_index[pi] = len(fn_table)
            fn_table.append(pi)
        fn_ids.append(fid)
    return CompressedStartGraph(
        node_count=graph.node_count,
        label_seq=EliasFanoSeq.from_values(labels, num_labels),
        incidence=K2Tree.build(points, rows=max(graph.node_count, 1), cols=max(len(order), 1), k=k),
        fn_table=fn_table,
        fn_ids=fn_ids,
    )


def decode_edge(sg: CompressedStartGraph, col: int) -> Edge:
    """Rebuild edge `col` from its incidence column, label, and index function."""
    zeta = sg.incidence.col_ones(col)
    label = sg.label_seq.access(col)
    pi = sg.fn_table[sg.fn_ids[col]]
    if not zeta or max(pi) != len(zeta) - 1 or len(set(pi)) != len(zeta):
        raise ContainerError(
            f"column {col} has {len(zeta)} nodes but index function {pi} needs "
            f"{len(set(pi))} distinct indices"
        )
    return Edge(label, tuple(zeta[p] for p in pi))


def encode_rule(w: BitWriter, rule: Rule) -> None:
    """One rule body: edge count, then label and node list per edge."""
    delta.write_value(w, len(rule.rhs.edges))
    for e in rule.rhs.edges:
        if e.label >= rule.head:
            raise ContainerError(
                f"rule for label {rule.head} references label {e.label} not created earlier"
            )
        delta.write_value(w, e.label)
        for v in e.nodes:
            delta.write_value(w, v)


def encode_rules(w: BitWriter, rules: list[Rule], labels: LabelTable) -> None:
    """All rule bodies in creation order.

    Rule order determines the nonterminal, so heads are not written;
    nonterminal ranks are recovered from the body's node set.
    """
    delta.write_value(w, len(rules))
    for rule in rules:
        encode_rule(w, rule)


def decode_rules(r: BitReader, labels: LabelTable) -> list[Rule]:
    """Inverse of encode_rules; extends `labels` with one nonterminal per rule."""
    count = delta.read_value(r)
    rules: list[Rule] = []
    for _ in range(count):
        num_edges = delta.read_value(r)
        if num_edges == 0:
            raise ContainerError("rule with empty body")
        edges: list[Edge] = []
        max_node = -1
        seen: set[int] = set()
        for _ in range(num_edges):
            label = delta.read_value(r)
            if label >= len(labels):
                raise ContainerError(f"rule references label {label} before its definition")
            rank = labels.rank(label)
            nodes = tuple(delta.read_value(r) for _ in range(rank))
            seen.update(nodes)
            max_node = max(max_node, *nodes)
            edges.append(Edge(label, nodes))
        head_rank = max_node + 1
        if seen != set(range(head_rank)):
            raise ContainerError("rule body nodes must be exactly 0..rank-1")
        head = labels.add_nonterminal(head_rank)
        rules.append(Rule(head, Hypergraph(head_rank, edges)))
    return rules


def build_nt_matrix(grammar: Grammar, k: int = 2) -> K2Tree:
    """Reachability: row A, column a is set iff expanding A ever yields label a."""
    labels = grammar.labels
    num_t = labels.num_terminals
    reach: list[set[int]] = []
    index = {rule.head: i for i, rule in enumerate(grammar.rules)}
    for rule in grammar.rules:
        s: set[int] = set()
        for e in rule.rhs.edges:
            if labels.is_terminal(e.label):
                s.add(e.label)
            else:
                s |= reach[index[e.label]]
        reach.append(s)
    points = [(i, t) for i, s in enumerate(reach) for t in s]
    return K2Tree.build(points, rows=max(len(grammar.rules), 1), cols=max(num_t, 1), k=k)


def _write_terms(w: BitWriter, terms: list[str]) -> None:
    delta.write_value(w, len(terms))
    for term in terms:
        raw = term.encode("utf-8")
        delta.write_value(w, len(raw))
        w.write_bytes(raw)


def _read_terms(r: BitReader) -> list[str]:
    count = delta.read_value(r)
    out = []
    for _ in range(count):
        n = delta.read_value(r)
        out.append(r.read_bytes(n).decode("utf-8"))
    return out


def _encode_dictionary(dictionary: Dictionary, node_labels: Optional[dict[int, str]]) -> bytes:
    w = BitWriter()
    _write_terms(w, dictionary.node_terms)
    _write_terms(w, dictionary.edge_label_terms)
    items = sorted(node_labels.items()) if node_labels else []
    delta.write_value(w, len(items))
    for node, term in items:
        delta.write_value(w, node)
        raw = term.encode("utf-8")
        delta.write_value(w, len(raw))
        w.write_bytes(raw)
    return w.getvalue()


def _decode_dictionary(data: bytes) -> tuple[Dictionary, dict[int, str]]:
    r = BitReader(data)
    node_terms = _read_terms(r)
    edge_terms = _read_terms(r)
    count = delta.read_value(r)
    node_labels: dict[int, str] = {}
    for _ in range(count):
        node = delta.read_value(r)
        n = delta.read_value(r)
        node_labels[node] = r.read_bytes(n).decode("utf-8")
    return Dictionary(node_terms, edge_terms), node_labels


def _encode_start_section(sg: CompressedStartGraph) -> bytes:
    w = BitWriter()
    delta.write_value(w, sg.node_count)
    delta.write_value(w, len(sg.fn_ids))
    sg.label_seq.write_to(w)
    sg.incidence.write_to(w)
    delta.write_value(w, len(sg.fn_table))
    for pi in sg.fn_table:
        encode_index_function(w, pi)
    for fid in sg.fn_ids:
        delta.write_value(w, fid)
    return w.getvalue()


def _decode_start_section(data: bytes) -> CompressedStartGraph:
    r = BitReader(data)
    node_count = delta.read_value(r)
    num_edges = delta.read_value(r)
    label_seq = EliasFanoSeq.read_from(r)
    incidence = K2Tree.read_from(r)
    fn_count = delta.read_value(r)
    fn_table = [decode_index_function(r) for _ in range(fn_count)]
    fn_ids = [delta.read_value(r) for _ in range(num_edges)]
    return CompressedStartGraph(node_count, label_seq, incidence, fn_table, fn_ids)


def serialize(
    grammar: Grammar,
    dictionary: Dictionary,
    node_labels: Optional[dict[int, str]] = None,
    plus: bool = False,
    numeric_nodes: bool = False,
    k: int = 2,
) -> bytes:
    labels = grammar.labels
    flags = (FLAG_PLUS if plus else 0) | (FLAG_NUMERIC_NODES if numeric_nodes else 0)

    dict_sec = _encode_dictionary(dictionary, node_labels)

    w = BitWriter()
    for rank in labels.terminal_ranks():
        delta.write_value(w, rank)
    ranks_sec = w.getvalue()

    w = BitWriter()
    encode_rules(w, grammar.rules, labels)
    rules_sec = w.getvalue()

    sg = encode_start_graph(grammar.start_graph, len(labels), k=k)
    start_sec = _encode_start_section(sg)

    w = BitWriter()
    build_nt_matrix(grammar, k=k).write_to(w)
    nt_sec = w.getvalue()

    sections = (dict_sec, ranks_sec, rules_sec, start_sec, nt_sec)
    header = MAGIC + bytes([flags]) + struct.pack("<5Q", *(len(s) for s in sections))
    return header + b"".join(sections)


class ContainerView:
    """Deserialized container with lazy edge decoding and query accessors."""

    def __init__(
        self,
        dictionary: Dictionary,
        labels: LabelTable,
        rules: list[Rule],
        start: CompressedStartGraph,
        nt_matrix: K2Tree,
        node_labels: dict[int, str],
        flags: int,
        section_sizes: dict[str, int],
    ):
        self.dictionary = dictionary
        self.labels = labels
        self.rules = rules
        self.start = start
        self.nt_matrix = nt_matrix
        self.stored_node_labels = node_labels
        self.flags = flags
        self.section_sizes = section_sizes
        self._by_head = {r.head: r for r in rules}

    @property
    def plus_mode(self) -> bool:
        return bool(self.flags & FLAG_PLUS)

    @property
    def numeric_nodes(self) -> bool:
        return bool(self.flags & FLAG_NUMERIC_NODES)

    @property
    def node_count(self) -> int:
        return self.start.node_count

    @property
    def num_start_edges(self) -> int:
        return len(self.start.fn_ids)

    def decode_edge(self, col: int) -> Edge:
        return decode_edge(self.start, col)

    def iter_start_edges(self) -> Iterator[Edge]:
        return (self.decode_edge(j) for j in range(self.num_start_edges))

    def rule_for(self, label: int) -> Rule:
        return self._by_head[label]

    def expand(self, edge: Edge) -> list[Edge]:
        rule = self._by_head[edge.label]
        actual = edge.nodes
        return [Edge(e.label, tuple(actual[i] for i in e.nodes)) for e in rule.rhs.edges]

    def nt_generates(self, label: int, terminal: int) -> bool:
        row = label - self.labels.num_terminals
        return bool(self.nt_matrix.cell(row, terminal))

    def to_grammar(self) -> Grammar:
        start = Hypergraph(self.node_count, list(self.iter_start_edges()))
        return Grammar(self.labels, self.rules, start)

    def decompress(self) -> Hypergraph:
        return _decompress(self.to_grammar())


def deserialize(data: bytes) -> ContainerView:
    header_len = len(MAGIC) + 1 + 8 * len(SECTIONS)
    if len(data) < header_len:
        raise ContainerError("container shorter than its header")
    if data[:4] != MAGIC:
        raise ContainerError(f"bad magic {data[:4]!r}")
    flags = data[4]
    lengths = struct.unpack("<5Q", data[5:header_len])
    if header_len + sum(lengths) != len(data):
        raise ContainerError(
            f"section lengths sum to {sum(lengths)} but payload has {len(data) - header_len} bytes"
        )
    offsets = []
    pos = header_len
    for n in lengths:
        offsets.append((pos, pos + n))
        pos += n
    secs = {name: data[a:b] for name, (a, b) in zip(SECTIONS, offsets)}

    try:
        dictionary, node_labels = _decode_dictionary(secs["dictionary"])
        labels = LabelTable()
        r = BitReader(secs["label_table"])
        for _ in range(len(dictionary.edge_label_terms)):
            labels.add_terminal(delta.read_value(r))
        rules = decode_rules(BitReader(secs["rules"]), labels)
        start = _decode_start_section(secs["start_graph"])
        nt_matrix = K2Tree.read_from(BitReader(secs["nt_matrix"]))
    except TruncatedStreamError as exc:
        raise ContainerError(f"truncated section: {exc}") from exc

    return ContainerView(
        dictionary,
        labels,
        rules,
        start,
        nt_matrix,
        node_labels,
        flags,
        {name: len(secs[name]) for name in SECTIONS},
    )
