"""Term dictionary and the node-label-to-rank-1-edge transform.

The graph structure holds only dense integer IDs; this module owns the
mapping back to external text. In plus mode, node labels are materialised
as rank-1 terminal edges so each distinct label string is stored once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .model import Edge, Hypergraph, LabelTable

log = logging.getLogger("itrgraph")

NODE = "node"
EDGE_LABEL = "edge_label"


class ConflictingLabelsError(ValueError):
    """A node carries two distinct rank-1 label edges."""


class LabelRankConflictError(ValueError):
    """A term is already interned with an incompatible rank."""


@dataclass
class Dictionary:
    """Bidirectional term <-> dense ID mapping for nodes and edge labels."""

    node_terms: list[str] = field(default_factory=list)
    edge_label_terms: list[str] = field(default_factory=list)
    _node_ids: dict[str, int] = field(default_factory=dict, repr=False)
    _edge_ids: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._node_ids:
            self._node_ids = {t: i for i, t in enumerate(self.node_terms)}
        if not self._edge_ids:
            self._edge_ids = {t: i for i, t in enumerate(self.edge_label_terms)}

    def intern(self, term: str, kind: str) -> int:
        """Return the existing ID for term, or append it and return the new ID."""
        if kind == NODE:
            terms, ids = self.node_terms, self._node_ids
        elif kind == EDGE_LABEL:
            terms, ids = self.edge_label_terms, self._edge_ids
        else:
            raise ValueError(f"unknown dictionary kind: {kind!r}")
        existing = ids.get(term)
        if existing is not None:
            return existing
        new_id = len(terms)
        terms.append(term)
        ids[term] = new_id
        return new_id

    def node_id(self, term: str) -> int | None:
        return self._node_ids.get(term)

    def edge_label_id(self, term: str) -> int | None:
        return self._edge_ids.get(term)

    def node_term(self, node_id: int) -> str:
        return self.node_terms[node_id]

    def edge_label_term(self, label_id: int) -> str:
        return self.edge_label_terms[label_id]


def apply_plus(
    graph: Hypergraph,
    node_labels: dict[int, str],
    dictionary: Dictionary,
    labels: LabelTable,
) -> Hypergraph:
    """Append one rank-1 terminal edge per labeled node.

    Label strings are interned as edge-label terms, so k distinct strings
    cost k dictionary entries no matter how many nodes carry them.
    """
    new_edges = list(graph.edges)
    for v in sorted(node_labels):
        term = node_labels[v]
        lid = dictionary.edge_label_id(term)
        if lid is None:
            lid = dictionary.intern(term, EDGE_LABEL)
            labels.add_terminal(1)
        elif labels.rank(lid) != 1:
            raise LabelRankConflictError(
                f"term {term!r} already names a rank-{labels.rank(lid)} edge label"
            )
        new_edges.append(Edge(lid, (v,)))
    return Hypergraph(graph.node_count, new_edges)


def strip_plus(
    graph: Hypergraph, dictionary: Dictionary, labels: LabelTable
) -> tuple[Hypergraph, dict[int, str]]:
    """Split rank-1 terminal edges back into a node-label map.

    Inverse of apply_plus. Duplicate identical label edges on one node are
    tolerated (deduplicated with a warning); distinct labels are an error.
    """
    kept: list[Edge] = []
    found: dict[int, int] = {}
    for e in graph.edges:
        if len(e.nodes) == 1 and labels.is_terminal(e.label):
            v = e.nodes[0]
            prior = found.get(v)
            if prior is None:
                found[v] = e.label
            elif prior == e.label:
                log.warning("duplicate label edge %s on node %d dropped",
                            dictionary.edge_label_term(e.label), v)
            else:
                raise ConflictingLabelsError(
                    f"node {v} carries labels "
                    f"{dictionary.edge_label_term(prior)!r} and "
                    f"{dictionary.edge_label_term(e.label)!r}"
                )
        else:
            kept.append(e)
    node_labels = {v: dictionary.edge_label_term(lid) for v, lid in found.items()}
    return Hypergraph(graph.node_count, kept), node_labels
