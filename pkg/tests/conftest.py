"""Shared fixtures: worked-example graphs and random graph generators."""

import random

import pytest

from itrgraph.model import Edge, Grammar, Hypergraph, LabelTable, Rule

# Worked example: two labels g (id 0) and f (id 1), five edges, two of which
# form replaceable ((g,1),(f,0)) occurrences at nodes 12 and 10. The loop
# g(10,10) blocks the third candidate pair.
G, F = 0, 1


def example_labels() -> LabelTable:
    labels = LabelTable()
    assert labels.add_terminal(2) == G
    assert labels.add_terminal(2) == F
    return labels


def example_graph() -> Hypergraph:
    return Hypergraph(
        14,
        [
            Edge(G, (11, 12)),
            Edge(F, (12, 13)),
            Edge(G, (10, 10)),
            Edge(F, (10, 11)),
            Edge(F, (10, 12)),
        ],
    )


def example_grammar() -> Grammar:
    """The compressed form: rule B -> {g(1,0), f(0,2)} and a 3-edge start graph."""
    labels = example_labels()
    b = labels.add_nonterminal(3)
    rule = Rule(b, Hypergraph(3, [Edge(G, (1, 0)), Edge(F, (0, 2))]))
    start = Hypergraph(14, [Edge(b, (12, 11, 13)), Edge(b, (10, 10, 11)), Edge(F, (10, 12))])
    return Grammar(labels, [rule], start)


@pytest.fixture
def fig_graph():
    return example_graph()


@pytest.fixture
def fig_labels():
    return example_labels()


@pytest.fixture
def fig_grammar():
    return example_grammar()


def random_graph(rng: random.Random, max_edges=12, max_labels=3, max_nodes=8, min_rank=2, max_rank=2):
    """Small random hypergraph with loops allowed; labels all terminals."""
    labels = LabelTable()
    num_labels = rng.randrange(1, max_labels + 1)
    ranks = [rng.randrange(min_rank, max_rank + 1) for _ in range(num_labels)]
    for r in ranks:
        labels.add_terminal(r)
    nodes = rng.randrange(1, max_nodes + 1)
    edges = [
        Edge(
            (lid := rng.randrange(num_labels)),
            tuple(rng.randrange(nodes) for _ in range(ranks[lid])),
        )
        for _ in range(rng.randrange(0, max_edges + 1))
    ]
    return Hypergraph(nodes, edges), labels
