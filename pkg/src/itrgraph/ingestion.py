"""Parsers and emitters for the two supported input formats.

N-Triples subset: one `<s> <p> <o> .` statement per line; IRIs, blank nodes
and literals are interned by surface syntax (no datatype or language
semantics). Edge lists: UTF-8 lines `src<TAB>label<TAB>dst` with numeric
node IDs, plus an optional node-label file of `node<TAB>label` lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .dictionary import EDGE_LABEL, NODE, Dictionary
from .model import Edge, Hypergraph, LabelTable

FORMAT_NTRIPLES = "nt"
FORMAT_EDGELIST = "el"


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmitError(ValueError):
    """An ID in the graph cannot be resolved through the dictionary."""


@dataclass(frozen=True)
class InputFormat:
    tag: str  # FORMAT_NTRIPLES | FORMAT_EDGELIST
    node_label_file: Optional[Path] = None

    def __post_init__(self):
        if self.tag not in (FORMAT_NTRIPLES, FORMAT_EDGELIST):
            raise ValueError(f"unknown format tag: {self.tag!r}")


@dataclass
class ParsedGraph:
    graph: Hypergraph
    dictionary: Dictionary
    labels: LabelTable
    node_labels: Optional[dict[int, str]]  # edge-list inputs only
    numeric_nodes: bool


def _scan_term(line: str, pos: int, line_no: int) -> tuple[str, int]:
    """Return (surface term, next position) starting at a non-space character."""
    ch = line[pos]
    if ch == "<":
        end = line.find(">", pos)
        if end < 0:
            raise ParseError(line_no, "unterminated IRI")
        return line[pos : end + 1], end + 1
    if ch == "_":
        end = pos
        while end < len(line) and not line[end].isspace():
            end += 1
        term = line[pos:end]
        if not term.startswith("_:") or len(term) == 2:
            raise ParseError(line_no, f"malformed blank node {term!r}")
        return term, end
    if ch == '"':
        end = pos + 1
        while end < len(line):
            if line[end] == "\\":
                end += 2
                continue
            if line[end] == '"':
                break
            end += 1
        if end >= len(line):
            raise ParseError(line_no, "unterminated literal")
        end += 1
        # Keep any @lang / ^^<type> suffix as part of the surface form.
        if end < len(line) and line[end] == "@":
            while end < len(line) and not line[end].isspace():
                end += 1
        elif line.startswith("^^", end):
            end += 2
            if end < len(line) and line[end] == "<":
                close = line.find(">", end)
                if close < 0:
                    raise ParseError(line_no, "unterminated datatype IRI")
                end = close + 1
            else:
                raise ParseError(line_no, "malformed datatype suffix")
        return line[pos:end], end
    raise ParseError(line_no, f"unexpected character {ch!r}")


def _skip_ws(line: str, pos: int) -> int:
    while pos < len(line) and line[pos].isspace():
        pos += 1
    return pos


def parse_ntriples(text: str) -> ParsedGraph:
    dictionary = Dictionary()
    labels = LabelTable()
    edges: list[Edge] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        pos = 0
        terms: list[str] = []
        for _ in range(3):
            pos = _skip_ws(line, pos)
            if pos >= len(line):
                raise ParseError(line_no, "statement has fewer than three terms")
            term, pos = _scan_term(line, pos, line_no)
            terms.append(term)
        pos = _skip_ws(line, pos)
        if pos >= len(line) or line[pos] != ".":
            raise ParseError(line_no, "statement must end with '.'")
        if line[pos + 1 :].strip():
            raise ParseError(line_no, "trailing content after '.'")
        subj, pred, obj = terms
        if not pred.startswith("<"):
            raise ParseError(line_no, "predicate must be an IRI")
        if subj.startswith('"'):
            raise ParseError(line_no, "subject must be an IRI or blank node")
        s = dictionary.intern(subj, NODE)
        o = dictionary.intern(obj, NODE)
        before = len(dictionary.edge_label_terms)
        p = dictionary.intern(pred, EDGE_LABEL)
        if len(dictionary.edge_label_terms) != before:
            labels.add_terminal(2)
        edges.append(Edge(p, (s, o)))
    graph = Hypergraph(len(dictionary.node_terms), edges)
    return ParsedGraph(graph, dictionary, labels, None, numeric_nodes=False)


def parse_edge_list(text: str, label_text: Optional[str] = None) -> ParsedGraph:
    dictionary = Dictionary()
    labels = LabelTable()
    edges: list[Edge] = []
    max_node = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(line_no, f"expected 3 tab-separated fields, got {len(parts)}")
        src_s, label_term, dst_s = parts
        try:
            src, dst = int(src_s), int(dst_s)
        except ValueError:
            raise ParseError(line_no, "node IDs must be integers") from None
        if src < 0 or dst < 0:
            raise ParseError(line_no, "node IDs must be non-negative")
        if not label_term:
            raise ParseError(line_no, "empty edge label")
        before = len(dictionary.edge_label_terms)
        p = dictionary.intern(label_term, EDGE_LABEL)
        if len(dictionary.edge_label_terms) != before:
            labels.add_terminal(2)
        edges.append(Edge(p, (src, dst)))
        max_node = max(max_node, src, dst)

    node_labels: dict[int, str] = {}
    if label_text is not None:
        for line_no, raw in enumerate(label_text.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(line_no, f"expected 2 tab-separated fields, got {len(parts)}")
            node_s, term = parts
            try:
                node = int(node_s)
            except ValueError:
                raise ParseError(line_no, "node ID must be an integer") from None
            if node < 0:
                raise ParseError(line_no, "node ID must be non-negative")
            if not term:
                raise ParseError(line_no, "empty node label")
            if node in node_labels and node_labels[node] != term:
                raise ParseError(line_no, f"node {node} labeled twice with different labels")
            node_labels[node] = term
            max_node = max(max_node, node)

    graph = Hypergraph(max_node + 1, edges)
    return ParsedGraph(graph, dictionary, labels, node_labels or None, numeric_nodes=True)


def parse(text: str, fmt: InputFormat, label_text: Optional[str] = None) -> ParsedGraph:
    if fmt.tag == FORMAT_NTRIPLES:
        return parse_ntriples(text)
    return parse_edge_list(text, label_text)


def emit_ntriples(graph: Hypergraph, dictionary: Dictionary) -> str:
    lines = []
    node_terms = dictionary.node_terms
    label_terms = dictionary.edge_label_terms
    for e in graph.edges:
        if len(e.nodes) != 2:
            raise EmitError(f"cannot emit rank-{len(e.nodes)} edge as a triple")
        s, o = e.nodes
        if s >= len(node_terms) or o >= len(node_terms) or e.label >= len(label_terms):
            raise EmitError(f"edge {e} has IDs outside the dictionary")
        lines.append(f"{node_terms[s]} {label_terms[e.label]} {node_terms[o]} .")
    return "\n".join(lines) + ("\n" if lines else "")


def emit_edge_list(
    graph: Hypergraph,
    dictionary: Dictionary,
    node_labels: Optional[dict[int, str]] = None,
) -> tuple[str, Optional[str]]:
    label_terms = dictionary.edge_label_terms
    lines = []
    for e in graph.edges:
        if len(e.nodes) != 2:
            raise EmitError(f"cannot emit rank-{len(e.nodes)} edge as an edge-list line")
        if e.label >= len(label_terms):
            raise EmitError(f"edge {e} has an unknown label ID")
        lines.append(f"{e.nodes[0]}\t{label_terms[e.label]}\t{e.nodes[1]}")
    body = "\n".join(lines) + ("\n" if lines else "")
    if not node_labels:
        return body, None
    label_lines = [f"{v}\t{node_labels[v]}" for v in sorted(node_labels)]
    return body, "\n".join(label_lines) + "\n"
