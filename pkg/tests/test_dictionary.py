"""Dictionary interning and the node-label edge transform."""

import logging
import random

import pytest

from itrgraph.dictionary import (
    EDGE_LABEL,
    NODE,
    ConflictingLabelsError,
    Dictionary,
    LabelRankConflictError,
    apply_plus,
    strip_plus,
)
from itrgraph.model import Edge, Hypergraph, LabelTable


class TestIntern:
    def test_idempotent(self):
        d = Dictionary()
        assert d.intern("f", EDGE_LABEL) == d.intern("f", EDGE_LABEL)

    def test_dense_ids(self):
        d = Dictionary()
        assert [d.intern(t, EDGE_LABEL) for t in ("a", "b", "c")] == [0, 1, 2]

    def test_kinds_are_separate(self):
        d = Dictionary()
        assert d.intern("x", NODE) == 0
        assert d.intern("x", EDGE_LABEL) == 0
        assert d.node_terms == ["x"] and d.edge_label_terms == ["x"]

    def test_round_trip(self):
        d = Dictionary()
        terms = ["<http://a>", "_:b1", '"café"']
        ids = [d.intern(t, NODE) for t in terms]
        assert [d.node_term(i) for i in ids] == terms

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Dictionary().intern("x", "bogus")


def labeled_graph():
    labels = LabelTable()
    e = labels.add_terminal(2)
    graph = Hypergraph(4, [Edge(e, (0, 1)), Edge(e, (1, 2)), Edge(e, (2, 3))])
    d = Dictionary()
    d.intern("n", EDGE_LABEL)
    node_labels = {0: "x", 1: "x", 2: "o", 3: "b"}
    return graph, node_labels, d, labels


class TestApplyPlus:
    def test_appends_rank_one_edges(self):
        graph, node_labels, d, labels = labeled_graph()
        out = apply_plus(graph, node_labels, d, labels)
        assert len(out.edges) == len(graph.edges) + len(node_labels)
        appended = out.edges[len(graph.edges) :]
        assert all(len(e.nodes) == 1 for e in appended)
        x = d.edge_label_id("x")
        assert Edge(x, (0,)) in appended and Edge(x, (1,)) in appended

    def test_distinct_strings_cost_one_entry_each(self):
        graph, node_labels, d, labels = labeled_graph()
        before = len(d.edge_label_terms)
        apply_plus(graph, node_labels, d, labels)
        assert len(d.edge_label_terms) - before == 3  # x, o, b

    def test_no_labels_is_identity(self):
        graph, _, d, labels = labeled_graph()
        out = apply_plus(graph, {}, d, labels)
        assert out.edges == graph.edges

    def test_rank_conflict(self):
        graph, _, d, labels = labeled_graph()
        with pytest.raises(LabelRankConflictError):
            apply_plus(graph, {0: "n"}, d, labels)  # "n" is already a rank-2 label


class TestStripPlus:
    def test_inverse_of_apply(self):
        graph, node_labels, d, labels = labeled_graph()
        plussed = apply_plus(graph, node_labels, d, labels)
        stripped, recovered = strip_plus(plussed, d, labels)
        assert stripped.edges == graph.edges
        assert recovered == node_labels

    def test_duplicate_identical_label_deduplicated(self, caplog):
        labels = LabelTable()
        x = labels.add_terminal(1)
        d = Dictionary()
        d.intern("x", EDGE_LABEL)
        graph = Hypergraph(2, [Edge(x, (1,)), Edge(x, (1,))])
        with caplog.at_level(logging.WARNING, logger="itrgraph"):
            stripped, recovered = strip_plus(graph, d, labels)
        assert recovered == {1: "x"}
        assert stripped.edges == []
        assert any("duplicate" in rec.message for rec in caplog.records)

    def test_conflicting_labels_error(self):
        labels = LabelTable()
        x = labels.add_terminal(1)
        o = labels.add_terminal(1)
        d = Dictionary()
        d.intern("x", EDGE_LABEL)
        d.intern("o", EDGE_LABEL)
        graph = Hypergraph(2, [Edge(x, (1,)), Edge(o, (1,))])
        with pytest.raises(ConflictingLabelsError):
            strip_plus(graph, d, labels)

    def test_round_trip_random(self):
        rng = random.Random(29)
        for _ in range(50):
            labels = LabelTable()
            e = labels.add_terminal(2)
            nodes = rng.randrange(1, 10)
            graph = Hypergraph(
                nodes,
                [Edge(e, (rng.randrange(nodes), rng.randrange(nodes))) for _ in range(rng.randrange(0, 10))],
            )
            node_labels = {
                v: rng.choice("xob") for v in range(nodes) if rng.random() < 0.6
            }
            d = Dictionary()
            d.intern("n", EDGE_LABEL)
            plussed = apply_plus(graph, node_labels, d, labels)
            stripped, recovered = strip_plus(plussed, d, labels)
            assert stripped.edges == graph.edges
            assert recovered == node_labels
