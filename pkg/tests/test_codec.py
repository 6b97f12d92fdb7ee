"""Index functions, start-graph encoding, rule streams, container round trips."""

import random

import pytest

from itrgraph import codec
from itrgraph.codec import (
    ContainerError,
    CompressedStartGraph,
    build_nt_matrix,
    compute_index_function,
    decode_edge,
    decode_index_function,
    decode_rules,
    deserialize,
    encode_index_function,
    encode_rule,
    encode_rules,
    encode_start_graph,
    serialize,
)
from itrgraph.dictionary import Dictionary
from itrgraph.digrams import replace_digrams
from itrgraph.model import Edge, Grammar, Hypergraph, LabelTable, Rule, decompress, graphs_equal
from itrgraph.succinct import BitReader, BitWriter

from conftest import F, G, example_grammar, random_graph


def bit_string(w: BitWriter) -> str:
    data, n = w.getvalue(), w.bit_length
    return "".join(str((data[i >> 3] >> (7 - (i & 7))) & 1) for i in range(n))


class TestIndexFunction:
    def test_loop_edge_example(self):
        zeta, pi = compute_index_function(Edge(2, (10, 10, 11)))
        assert zeta == (10, 11)
        assert pi == (0, 0, 1)

    def test_plain_rank_two(self):
        assert compute_index_function(Edge(0, (3, 7)))[1] == (0, 1)
        assert compute_index_function(Edge(0, (7, 3)))[1] == (1, 0)

    def test_golden_encoding(self):
        # delta codes with +1 shift: rank-1=2 -> "0101", 0 -> "1", 1 -> "0100".
        w = BitWriter()
        encode_index_function(w, (0, 0, 1))
        assert bit_string(w) == "0101" + "1" + "1" + "0100"

    def test_minimal_edge_encoding(self):
        w = BitWriter()
        encode_index_function(w, (0,))
        assert bit_string(w) == "1" + "1"

    def test_round_trip_random(self):
        rng = random.Random(43)
        for _ in range(300):
            rank = rng.randrange(1, 9)
            edge = Edge(0, tuple(rng.randrange(5) for _ in range(rank)))
            _, pi = compute_index_function(edge)
            w = BitWriter()
            encode_index_function(w, pi)
            r = BitReader(w.getvalue(), w.bit_length)
            assert decode_index_function(r) == pi


class TestStartGraph:
    def test_example_column_layout(self, fig_grammar):
        sg = encode_start_graph(fig_grammar.start_graph, len(fig_grammar.labels))
        # Stable sort by label: f(10,12) first, then the two rank-3 edges.
        assert list(sg.label_seq) == [F, 2, 2]
        assert sg.incidence.col_ones(2) == [10, 11]
        assert sg.fn_table[sg.fn_ids[2]] == (0, 0, 1)

    def test_example_edge_reconstruction(self, fig_grammar):
        sg = encode_start_graph(fig_grammar.start_graph, len(fig_grammar.labels))
        assert decode_edge(sg, 2) == Edge(2, (10, 10, 11))
        assert decode_edge(sg, 0) == Edge(F, (10, 12))
        assert decode_edge(sg, 1) == Edge(2, (12, 11, 13))

    def test_single_edge(self):
        g = Hypergraph(2, [Edge(0, (0, 1))])
        sg = encode_start_graph(g, 1)
        assert list(sg.label_seq) == [0]
        assert sg.incidence.col_ones(0) == [0, 1]
        assert sg.fn_table == [(0, 1)]

    def test_fn_table_deduplicated(self):
        g = Hypergraph(4, [Edge(0, (0, 1)), Edge(0, (2, 3)), Edge(0, (3, 2))])
        sg = encode_start_graph(g, 1)
        assert len(sg.fn_table) == 2  # (0,1) shared, (1,0) separate
        assert len(set(sg.fn_table)) == len(sg.fn_table)

    def test_round_trip_random_graphs(self):
        rng = random.Random(47)
        for _ in range(40):
            graph, labels = random_graph(rng, max_edges=30, max_labels=3, max_nodes=9)
            sg = encode_start_graph(graph, len(labels))
            decoded = [decode_edge(sg, j) for j in range(len(sg))]
            assert sorted(decoded) == sorted(graph.edges)

    def test_heavy_loops_round_trip(self):
        g = Hypergraph(3, [Edge(0, (1, 1)), Edge(0, (2, 2)), Edge(0, (1, 2))])
        labels = LabelTable()
        labels.add_terminal(2)
        sg = encode_start_graph(g, 1)
        assert sorted(decode_edge(sg, j) for j in range(3)) == sorted(g.edges)

    def test_corrupt_fn_id_detected(self, fig_grammar):
        # Column 2 holds two distinct nodes; an index function over three
        # distinct indices cannot belong to it.
        sg = encode_start_graph(fig_grammar.start_graph, len(fig_grammar.labels))
        broken = CompressedStartGraph(
            sg.node_count, sg.label_seq, sg.incidence, [(0, 1, 2)], [0, 0, 0]
        )
        with pytest.raises(ContainerError):
            decode_edge(broken, 2)


class TestRuleStream:
    def _labels(self):
        labels = LabelTable()
        labels.add_terminal(2)  # d = 0
        return labels

    def test_golden_rule_encoding(self):
        # Body d(0,1), B(1,2,0) with d=0 and B=1:
        # count 2 -> 0101, then 1 | 1 | 0100, then 0100 | 0100 | 0101 | 1.
        head = 2
        rule = Rule(head, Hypergraph(3, [Edge(0, (0, 1)), Edge(1, (1, 2, 0))]))
        w = BitWriter()
        encode_rule(w, rule)
        assert bit_string(w) == "0101" + "1" + "1" + "0100" + "0100" + "0100" + "0101" + "1"

    def test_example_rule_encoding(self, fig_grammar):
        # g(1,0), f(0,2) with g=0, f=1: 0101 | 1 0100 1 | 0100 1 0101.
        w = BitWriter()
        encode_rule(w, fig_grammar.rules[0])
        assert bit_string(w) == "0101" + "1" + "0100" + "1" + "0100" + "1" + "0101"

    def test_round_trip_with_derived_ranks(self):
        labels = self._labels()
        b = labels.add_nonterminal(3)
        c = labels.add_nonterminal(3)
        rules = [
            Rule(b, Hypergraph(3, [Edge(0, (0, 1)), Edge(0, (0, 2))])),
            Rule(c, Hypergraph(3, [Edge(0, (0, 1)), Edge(b, (1, 2, 0))])),
        ]
        w = BitWriter()
        encode_rules(w, rules, labels)
        fresh = self._labels()
        decoded = decode_rules(BitReader(w.getvalue(), w.bit_length), fresh)
        assert decoded == rules
        assert fresh.rank(b) == 3 and fresh.rank(c) == 3

    def test_empty_rule_list(self):
        w = BitWriter()
        encode_rules(w, [], self._labels())
        assert decode_rules(BitReader(w.getvalue(), w.bit_length), self._labels()) == []

    def test_forward_reference_rejected_on_encode(self):
        labels = self._labels()
        b = labels.add_nonterminal(2)
        rule = Rule(b, Hypergraph(2, [Edge(b + 1, (0, 1))]))
        with pytest.raises(ContainerError):
            w = BitWriter()
            encode_rules(w, [rule], labels)

    def test_internal_nodes_rejected_on_decode(self):
        # A body over nodes {0, 2} is not surjective onto 0..rank-1.
        labels = self._labels()
        b = labels.add_nonterminal(3)
        rule = Rule(b, Hypergraph(3, [Edge(0, (0, 2))]))
        w = BitWriter()
        encode_rules(w, [rule], labels)
        with pytest.raises(ContainerError):
            decode_rules(BitReader(w.getvalue(), w.bit_length), self._labels())


class TestNTMatrix:
    def test_direct_generation(self, fig_grammar):
        nt = build_nt_matrix(fig_grammar)
        assert nt.cell(0, G) == 1
        assert nt.cell(0, F) == 1

    def test_transitive_generation(self):
        labels = LabelTable()
        g = labels.add_terminal(2)
        f = labels.add_terminal(2)
        x = labels.add_terminal(2)
        b = labels.add_nonterminal(3)
        c = labels.add_nonterminal(2)
        rules = [
            Rule(b, Hypergraph(3, [Edge(g, (1, 0)), Edge(f, (0, 2))])),
            Rule(c, Hypergraph(2, [Edge(b, (0, 0, 1))])),
        ]
        grammar = Grammar(labels, rules, Hypergraph(2, [Edge(c, (0, 1))]))
        nt = build_nt_matrix(grammar)
        assert nt.cell(1, g) == 1  # via rule b
        assert nt.cell(1, f) == 1
        assert nt.cell(1, x) == 0

    def test_matches_full_expansion(self):
        rng = random.Random(53)
        for _ in range(25):
            graph, labels = random_graph(rng, max_edges=24, max_labels=2, max_nodes=5)
            grammar = replace_digrams(Grammar(labels, [], graph))
            if not grammar.rules:
                continue
            nt = build_nt_matrix(grammar)
            for i, rule in enumerate(grammar.rules):
                sub = Grammar(
                    grammar.labels,
                    grammar.rules,
                    Hypergraph(rule.rhs.node_count, [Edge(rule.head, tuple(range(rule.rhs.node_count)))]),
                )
                produced = {e.label for e in decompress(sub).edges}
                for t in range(grammar.labels.num_terminals):
                    assert nt.cell(i, t) == int(t in produced)


class TestContainer:
    def _compressed_example(self):
        grammar = example_grammar()
        d = Dictionary()
        for t in ("g", "f"):
            d.intern(t, "edge_label")
        return grammar, d

    def test_round_trip_view(self):
        grammar, d = self._compressed_example()
        data = serialize(grammar, d, numeric_nodes=True)
        view = deserialize(data)
        assert view.numeric_nodes and not view.plus_mode
        assert view.node_count == 14
        assert view.num_start_edges == 3
        assert graphs_equal(view.decompress(), decompress(grammar))
        assert view.dictionary.edge_label_terms == ["g", "f"]

    def test_serialize_is_deterministic_through_a_view(self):
        grammar, d = self._compressed_example()
        data = serialize(grammar, d, numeric_nodes=True)
        view = deserialize(data)
        again = serialize(view.to_grammar(), view.dictionary, numeric_nodes=view.numeric_nodes)
        assert again == data

    def test_bad_magic(self):
        grammar, d = self._compressed_example()
        data = bytearray(serialize(grammar, d))
        data[:4] = b"JUNK"
        with pytest.raises(ContainerError, match="magic"):
            deserialize(bytes(data))

    def test_truncated(self):
        grammar, d = self._compressed_example()
        data = serialize(grammar, d)
        with pytest.raises(ContainerError):
            deserialize(data[:-3])

    def test_section_length_mismatch(self):
        grammar, d = self._compressed_example()
        data = serialize(grammar, d)
        with pytest.raises(ContainerError):
            deserialize(data + b"\x00")

    def test_stored_node_labels_survive(self):
        grammar, d = self._compressed_example()
        labels_map = {0: "x", 5: "o"}
        data = serialize(grammar, d, node_labels=labels_map, numeric_nodes=True)
        view = deserialize(data)
        assert view.stored_node_labels == labels_map

    def test_end_to_end_random(self):
        rng = random.Random(59)
        for _ in range(20):
            graph, labels = random_graph(rng, max_edges=26, max_labels=3, max_nodes=6)
            d = Dictionary()
            for i in range(labels.num_terminals):
                d.intern(f"l{i}", "edge_label")
            grammar = replace_digrams(Grammar(labels, [], graph))
            data = serialize(grammar, d, numeric_nodes=True)
            view = deserialize(data)
            assert graphs_equal(view.decompress(), graph)
