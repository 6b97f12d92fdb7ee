"""Hypergraph and straight-line replacement-grammar data model.

Edges connect an ordered node sequence whose length is the rank of their
label. Nonterminal edges stand for the right-hand side of exactly one rule;
rule nodes are always the formal parameters 0..rank-1, so expansion is pure
index substitution.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional


class Edge(NamedTuple):
    label: int
    nodes: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class LabelInfo:
    id: int
    rank: int
    terminal: bool


class UnknownNonterminalError(KeyError):
    """A nonterminal edge has no rule."""


class LabelTable:
    """Dense label registry: terminals first, nonterminals in creation order."""

    def __init__(self) -> None:
        self._infos: list[LabelInfo] = []
        self._num_terminals = 0

    def add_terminal(self, rank: int) -> int:
        if self._num_terminals != len(self._infos):
            raise ValueError("terminals must be registered before nonterminals")
        if rank < 1:
            raise ValueError("rank must be at least 1")
        lid = len(self._infos)
        self._infos.append(LabelInfo(lid, rank, True))
        self._num_terminals += 1
        return lid

    def add_nonterminal(self, rank: int) -> int:
        if rank < 1:
            raise ValueError("rank must be at least 1")
        lid = len(self._infos)
        self._infos.append(LabelInfo(lid, rank, False))
        return lid

    def rank(self, label: int) -> int:
        return self._infos[label].rank

    def is_terminal(self, label: int) -> bool:
        return self._infos[label].terminal

    @property
    def num_terminals(self) -> int:
        return self._num_terminals

    @property
    def num_nonterminals(self) -> int:
        return len(self._infos) - self._num_terminals

    def __len__(self) -> int:
        return len(self._infos)

    def __iter__(self):
        return iter(self._infos)

    def __getitem__(self, label: int) -> LabelInfo:
        return self._infos[label]

    def copy(self) -> "LabelTable":
        dup = LabelTable()
        dup._infos = list(self._infos)
        dup._num_terminals = self._num_terminals
        return dup

    def terminal_ranks(self) -> list[int]:
        return [info.rank for info in self._infos[: self._num_terminals]]


@dataclass
class Hypergraph:
    node_count: int
    edges: list[Edge]

    def validate(self) -> None:
        for e in self.edges:
            for v in e.nodes:
                if not 0 <= v < self.node_count:
                    raise ValueError(f"edge {e} references node {v} outside 0..{self.node_count - 1}")


@dataclass
class Rule:
    head: int
    rhs: Hypergraph


@dataclass
class Grammar:
    labels: LabelTable
    rules: list[Rule]
    start_graph: Hypergraph
    _by_head: dict[int, Rule] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_head = {r.head: r for r in self.rules}

    def rule_for(self, label: int) -> Rule:
        try:
            return self._by_head[label]
        except KeyError:
            raise UnknownNonterminalError(label) from None


def expand_edge(grammar: Grammar, edge: Edge) -> list[Edge]:
    """Substitute the edge's actual nodes into its rule's right-hand side."""
    rule = grammar.rule_for(edge.label)
    if rule.rhs.node_count != len(edge.nodes):
        raise ValueError(
            f"edge rank {len(edge.nodes)} does not match rule rank {rule.rhs.node_count}"
        )
    actual = edge.nodes
    return [Edge(e.label, tuple(actual[i] for i in e.nodes)) for e in rule.rhs.edges]


def decompress(grammar: Grammar) -> Hypergraph:
    """Expand every nonterminal edge of the start graph until only terminals remain."""
    labels = grammar.labels
    out: list[Edge] = []
    stack = list(reversed(grammar.start_graph.edges))
    while stack:
        e = stack.pop()
        if labels.is_terminal(e.label):
            out.append(e)
        else:
            stack.extend(reversed(expand_edge(grammar, e)))
    return Hypergraph(grammar.start_graph.node_count, out)


def graphs_equal(g1: Hypergraph, g2: Hypergraph) -> bool:
    """Same node count and same edge multiset (order-insensitive)."""
    return g1.node_count == g2.node_count and Counter(g1.edges) == Counter(g2.edges)


@dataclass(frozen=True)
class Violation:
    kind: str  # duplicate-rule | missing-rule | recursive
    detail: str


def validate_straight_line(grammar: Grammar) -> Optional[Violation]:
    """Check one-rule-per-nonterminal and acyclicity of rule references.

    Returns None when the grammar is straight-line, else the first violation.
    """
    labels = grammar.labels
    seen: set[int] = set()
    for rule in grammar.rules:
        if rule.head in seen:
            return Violation("duplicate-rule", f"nonterminal {rule.head} has more than one rule")
        seen.add(rule.head)

    by_head = {r.head: r for r in grammar.rules}
    for info in labels:
        if not info.terminal and info.id not in by_head:
            return Violation("missing-rule", f"nonterminal {info.id} has no rule")

    def referenced(graph: Hypergraph):
        for e in graph.edges:
            if not labels.is_terminal(e.label):
                yield e.label

    for graph in [grammar.start_graph] + [r.rhs for r in grammar.rules]:
        for nt in referenced(graph):
            if nt not in by_head:
                return Violation("missing-rule", f"nonterminal {nt} has no rule")

    # Iterative DFS over the rule reference graph; 1 = on stack, 2 = done.
    state: dict[int, int] = {}
    for root in by_head:
        if state.get(root) == 2:
            continue
        stack: list[tuple[int, list[int], int]] = [(root, sorted(set(referenced(by_head[root].rhs))), 0)]
        state[root] = 1
        while stack:
            head, refs, idx = stack.pop()
            if idx < len(refs):
                stack.append((head, refs, idx + 1))
                nxt = refs[idx]
                st = state.get(nxt)
                if st == 1:
                    return Violation("recursive", f"rule cycle through nonterminal {nxt}")
                if st is None:
                    state[nxt] = 1
                    stack.append((nxt, sorted(set(referenced(by_head[nxt].rhs))), 0))
            else:
                state[head] = 2
    return None
