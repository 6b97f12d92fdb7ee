"""Incidence-type digram counting and the greedy replacement loop.

A digram is a canonical pair of incidence-types (label, position). Its
occurrence count is estimated per node as min(c(v,i1), c(v,i2)) for
distinct types and floor(c(v,i)/2) for equal ones, summed over nodes; the
estimate is an upper bound on the true maximum set of edge-disjoint
occurrences and is maintained incrementally while edges are replaced.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .model import Edge, Grammar, Hypergraph, LabelTable, Rule

IncidenceType = tuple[int, int]  # (label, position)
Digram = tuple[IncidenceType, IncidenceType]  # canonical: first <= second

DEFAULT_MAX_RANK = 8

# Cheapest possible rule body is two rank-1 edges (cost 4), so estimates
# below 3 can never yield a positive gain.
_MIN_USEFUL_COUNT = 3


class OracleSizeError(ValueError):
    """Brute-force occurrence search refused a graph above its size limit."""


def canonical_digram(i1: IncidenceType, i2: IncidenceType) -> Digram:
    return (i1, i2) if i1 <= i2 else (i2, i1)


def count_incidence(graph: Hypergraph) -> dict[int, dict[IncidenceType, int]]:
    """One pass over edges: c[v][(label, m)] counts (edge, position) pairs at v."""
    table: dict[int, dict[IncidenceType, int]] = {}
    for e in graph.edges:
        label = e.label
        for m, v in enumerate(e.nodes):
            cv = table.get(v)
            if cv is None:
                cv = table[v] = {}
            it = (label, m)
            cv[it] = cv.get(it, 0) + 1
    return table


def node_digram_counts(cv: dict[IncidenceType, int]) -> dict[Digram, int]:
    """Per-node digram estimates from the incidence-type counts of one node."""
    out: dict[Digram, int] = {}
    its = sorted(cv)
    for idx, i1 in enumerate(its):
        x = cv[i1]
        half = x // 2
        if half:
            out[(i1, i1)] = half
        for i2 in its[idx + 1 :]:
            out[(i1, i2)] = min(x, cv[i2])
    return out


def count_digrams(table: dict[int, dict[IncidenceType, int]]) -> dict[Digram, int]:
    counts: dict[Digram, int] = {}
    for cv in table.values():
        its = sorted(cv)
        n = len(its)
        for idx in range(n):
            i1 = its[idx]
            x = cv[i1]
            half = x // 2
            if half:
                d = (i1, i1)
                counts[d] = counts.get(d, 0) + half
            for j in range(idx + 1, n):
                i2 = its[j]
                m = x if x < cv[i2] else cv[i2]
                d = (i1, i2)
                counts[d] = counts.get(d, 0) + m
    return counts


def most_frequent(counts: dict[Digram, int]) -> tuple[Digram, int]:
    """Maximal-count digram; ties break toward the canonically smallest digram."""
    if not counts:
        raise ValueError("no digram counts")
    best_d, best_n = None, -1
    for d, n in counts.items():
        if n > best_n or (n == best_n and d < best_d):
            best_d, best_n = d, n
    return best_d, best_n


def size_gain(digram: Digram, n: int, labels: LabelTable) -> int:
    """Size delta of replacing n occurrences, under size(edge) = 1 + rank(edge).

    Each replacement saves 2 units; the new rule costs its two body edges.
    """
    (a1, _), (a2, _) = digram
    return 2 * n - (2 + labels.rank(a1) + labels.rank(a2))


def replacement_rank(digram: Digram, labels: LabelTable) -> int:
    (a1, _), (a2, _) = digram
    return labels.rank(a1) + labels.rank(a2) - 1


def make_replacement_edge(digram: Digram, e1: Edge, e2: Edge, new_label: int) -> Edge:
    """Shared node first, then e1's remaining nodes in order, then e2's."""
    (_, m1), (_, m2) = digram
    v = e1.nodes[m1]
    rest1 = e1.nodes[:m1] + e1.nodes[m1 + 1 :]
    rest2 = e2.nodes[:m2] + e2.nodes[m2 + 1 :]
    return Edge(new_label, (v,) + rest1 + rest2)


def make_rule(digram: Digram, head: int, labels: LabelTable) -> Rule:
    """Rule body for a digram: formal 0 is the shared node."""
    (a1, m1), (a2, m2) = digram
    r1, r2 = labels.rank(a1), labels.rank(a2)
    nodes1 = []
    nxt = 1
    for m in range(r1):
        if m == m1:
            nodes1.append(0)
        else:
            nodes1.append(nxt)
            nxt += 1
    nodes2 = []
    for m in range(r2):
        if m == m2:
            nodes2.append(0)
        else:
            nodes2.append(nxt)
            nxt += 1
    rhs = Hypergraph(r1 + r2 - 1, [Edge(a1, tuple(nodes1)), Edge(a2, tuple(nodes2))])
    return Rule(head, rhs)


def _scan_pairs(edges, candidates, digram: Digram) -> list[tuple[int, int]]:
    """Greedy left-to-right occurrence scan.

    Keeps per-node handles to half-matched edges; each edge joins at most
    one occurrence and an edge never pairs with itself. Returns role-ordered
    (e1 index, e2 index) pairs.
    """
    (a1, m1), (a2, m2) = digram
    same = (a1, m1) == (a2, m2)
    pend1: dict[int, deque] = {}
    pend2: dict[int, deque] = {}
    consumed: set[int] = set()
    pairs: list[tuple[int, int]] = []

    def pop_live(dq: deque) -> int | None:
        while dq:
            idx = dq.popleft()
            if idx not in consumed:
                return idx
        return None

    for idx in candidates:
        # Stale label-index entries can repeat an index; a consumed edge must not rematch.
        if idx in consumed:
            continue
        e = edges[idx]
        if e is None:
            continue
        label = e.label
        if same:
            if label != a1:
                continue
            v = e.nodes[m1]
            dq = pend1.get(v)
            partner = pop_live(dq) if dq else None
            if partner is not None:
                pairs.append((partner, idx))  # earlier edge takes the e1 role
                consumed.add(partner)
                consumed.add(idx)
            else:
                pend1.setdefault(v, deque()).append(idx)
            continue
        matched = False
        if label == a1:
            v = e.nodes[m1]
            dq = pend2.get(v)
            partner = pop_live(dq) if dq else None
            if partner is not None:
                pairs.append((idx, partner))
                consumed.add(partner)
                consumed.add(idx)
                matched = True
        if not matched and label == a2:
            v = e.nodes[m2]
            dq = pend1.get(v)
            partner = pop_live(dq) if dq else None
            if partner is not None:
                pairs.append((partner, idx))
                consumed.add(partner)
                consumed.add(idx)
                matched = True
        if not matched:
            if label == a1:
                pend1.setdefault(e.nodes[m1], deque()).append(idx)
            if label == a2:
                pend2.setdefault(e.nodes[m2], deque()).append(idx)
    return pairs


def find_occurrences(edges: list[Edge | None], digram: Digram) -> list[tuple[int, int]]:
    return _scan_pairs(edges, range(len(edges)), digram)


def replace_occurrences(
    graph: Hypergraph, digram: Digram, new_label: int, labels: LabelTable
) -> tuple[Hypergraph, int]:
    """Replace all disjoint occurrences of digram; the new edge sits in e1's slot."""
    if labels.rank(new_label) != replacement_rank(digram, labels):
        raise ValueError(
            f"label {new_label} has rank {labels.rank(new_label)}, "
            f"digram needs {replacement_rank(digram, labels)}"
        )
    edges: list[Edge | None] = list(graph.edges)
    pairs = find_occurrences(edges, digram)
    for i1, i2 in pairs:
        edges[i1] = make_replacement_edge(digram, edges[i1], edges[i2], new_label)
        edges[i2] = None
    return Hypergraph(graph.node_count, [e for e in edges if e is not None]), len(pairs)


class DigramCounts:
    """Digram frequency map with lazy-heap extraction of the most frequent one.

    Heap entries are (-count, digram); stale entries are detected against
    the live map and re-pushed with their current value, so the top valid
    entry is always a true maximum with canonical tie-breaking.
    """

    def __init__(self, counts: dict[Digram, int], labels: LabelTable, max_rank: int):
        self._counts = counts
        self._labels = labels
        self._max_rank = max_rank
        self.retired: set[Digram] = set()
        self._heap = [
            (-n, d)
            for d, n in counts.items()
            if n >= _MIN_USEFUL_COUNT and replacement_rank(d, labels) <= max_rank
        ]
        heapq.heapify(self._heap)

    def get(self, digram: Digram) -> int:
        return self._counts.get(digram, 0)

    def snapshot(self) -> dict[Digram, int]:
        return {d: n for d, n in self._counts.items() if n > 0}

    def adjust(self, digram: Digram, delta: int) -> None:
        if digram in self.retired:
            return
        n = self._counts.get(digram, 0) + delta
        if n < 0:
            raise AssertionError(f"digram count underflow for {digram}")
        self._counts[digram] = n
        if delta > 0 and n >= _MIN_USEFUL_COUNT and replacement_rank(digram, self._labels) <= self._max_rank:
            heapq.heappush(self._heap, (-n, digram))

    def retire(self, digram: Digram) -> None:
        self.retired.add(digram)
        self._counts.pop(digram, None)

    def pop_most_frequent(self) -> tuple[Digram, int] | None:
        while self._heap:
            negn, d = heapq.heappop(self._heap)
            if d in self.retired:
                continue
            cur = self._counts.get(d, 0)
            if cur != -negn:
                if cur >= _MIN_USEFUL_COUNT:
                    heapq.heappush(self._heap, (-cur, d))
                continue
            return d, cur
        return None


def update_counts_for_removed(
    table: dict[int, dict[IncidenceType, int]], counts: DigramCounts, edge: Edge
) -> None:
    """Adjust c and the digram estimates after removing one edge."""
    for m, v in enumerate(edge.nodes):
        _remove_incidence(table, counts, v, (edge.label, m))


def update_counts_for_added(
    table: dict[int, dict[IncidenceType, int]], counts: DigramCounts, edge: Edge
) -> None:
    for m, v in enumerate(edge.nodes):
        _add_incidence(table, counts, v, (edge.label, m))


def _remove_incidence(table, counts: DigramCounts, v: int, i1: IncidenceType) -> None:
    cv = table[v]
    x = cv[i1]  # value before the decrement
    for i2, y in cv.items():
        if i2 == i1 or y <= 0:
            continue
        # min(x, y) drops by one exactly when x <= y.
        if x <= y:
            counts.adjust(canonical_digram(i1, i2), -1)
    # floor(x/2) drops exactly when x was even.
    if x % 2 == 0:
        counts.adjust((i1, i1), -1)
    if x == 1:
        del cv[i1]
        if not cv:
            del table[v]
    else:
        cv[i1] = x - 1


def _add_incidence(table, counts: DigramCounts, v: int, i1: IncidenceType) -> None:
    cv = table.get(v)
    if cv is None:
        cv = table[v] = {}
    x = cv.get(i1, 0)  # value before the increment
    for i2, y in cv.items():
        if i2 == i1 or y <= 0:
            continue
        # min(x, y) grows by one exactly when x < y.
        if x < y:
            counts.adjust(canonical_digram(i1, i2), 1)
    # floor(x/2) grows exactly when x was odd.
    if x % 2 == 1:
        counts.adjust((i1, i1), 1)
    cv[i1] = x + 1


@dataclass
class ReplacementStep:
    digram: Digram
    head: int | None  # None when the step was skipped without a commit
    estimate: int
    replaced: int
    gain: int


@dataclass
class CompressionStats:
    iterations: int = 0
    skipped: int = 0
    replaced_pairs: int = 0
    steps: list[ReplacementStep] = field(default_factory=list)


class Compressor:
    """Stepwise digram replacement over a working edge list.

    The estimate picks candidates; a candidate is only committed when the
    actually replaceable occurrences still shrink the grammar, so the
    cost-model size strictly decreases with every committed step.
    """

    def __init__(self, graph: Hypergraph, labels: LabelTable, max_rank: int = DEFAULT_MAX_RANK):
        self.labels = labels
        self.max_rank = max_rank
        self.node_count = graph.node_count
        self.edges: list[Edge | None] = list(graph.edges)
        self.rules: list[Rule] = []
        self.table = count_incidence(graph)
        self.counts = DigramCounts(count_digrams(self.table), labels, max_rank)
        self.stats = CompressionStats()
        self.size = sum(1 + len(e.nodes) for e in graph.edges)
        self._label_index: dict[int, list[int]] = {}
        for idx, e in enumerate(self.edges):
            self._label_index.setdefault(e.label, []).append(idx)

    def _candidates(self, digram: Digram):
        a1 = digram[0][0]
        a2 = digram[1][0]
        first = self._label_index.get(a1, [])
        if a1 == a2:
            return first
        second = self._label_index.get(a2, [])
        return heapq.merge(first, second)

    def step(self, digram: Digram | None = None, force: bool = False) -> ReplacementStep | None:
        """Run one loop iteration; returns None when no digram is worth replacing.

        With an explicit digram and force=True the rule is created and all
        found occurrences replaced regardless of the gain check.
        """
        if digram is None:
            sel = self.counts.pop_most_frequent()
            if sel is None:
                return None
            digram, estimate = sel
            if size_gain(digram, estimate, self.labels) <= 0:
                return None
        else:
            estimate = self.counts.get(digram)

        pairs = _scan_pairs(self.edges, self._candidates(digram), digram)
        (a1, _), (a2, _) = digram
        rule_cost = 2 + self.labels.rank(a1) + self.labels.rank(a2)
        gain = 2 * len(pairs) - rule_cost
        if not force and gain <= 0:
            # Overestimated digram: retire it without a rule and keep looping.
            self.counts.retire(digram)
            step = ReplacementStep(digram, None, estimate, 0, 0)
            self.stats.skipped += 1
            self.stats.steps.append(step)
            return step

        head = self.labels.add_nonterminal(replacement_rank(digram, self.labels))
        self.rules.append(make_rule(digram, head, self.labels))
        new_slots: list[int] = []
        for i1, i2 in pairs:
            e1, e2 = self.edges[i1], self.edges[i2]
            new_edge = make_replacement_edge(digram, e1, e2, head)
            self.edges[i1] = new_edge
            self.edges[i2] = None
            new_slots.append(i1)
            update_counts_for_removed(self.table, self.counts, e1)
            update_counts_for_removed(self.table, self.counts, e2)
            update_counts_for_added(self.table, self.counts, new_edge)
        new_slots.sort()
        self._label_index[head] = new_slots
        self.counts.retire(digram)
        self.size -= gain  # gain is the savings; a forced rule with no pairs grows size
        step = ReplacementStep(digram, head, estimate, len(pairs), gain)
        self.stats.iterations += 1
        self.stats.replaced_pairs += len(pairs)
        self.stats.steps.append(step)
        return step

    def run(self, max_steps: int | None = None) -> None:
        done = 0
        while max_steps is None or done < max_steps:
            step = self.step()
            if step is None:
                break
            if step.head is not None:
                done += 1

    def finish(self) -> Grammar:
        start = Hypergraph(self.node_count, [e for e in self.edges if e is not None])
        return Grammar(self.labels, self.rules, start)

    def counts_consistent(self) -> bool:
        """Incremental estimates equal a from-scratch recount, minus retired digrams."""
        live = Hypergraph(self.node_count, [e for e in self.edges if e is not None])
        fresh_table = count_incidence(live)
        if fresh_table != self.table:
            return False
        fresh = {
            d: n
            for d, n in count_digrams(fresh_table).items()
            if d not in self.counts.retired and n > 0
        }
        return fresh == self.counts.snapshot()


def replace_digrams(
    grammar: Grammar, max_rank: int = DEFAULT_MAX_RANK, max_steps: int | None = None
) -> Grammar:
    """Greedy most-frequent-digram replacement until no positive size gain remains."""
    comp = Compressor(grammar.start_graph, grammar.labels.copy(), max_rank=max_rank)
    comp.rules = list(grammar.rules)
    comp.run(max_steps=max_steps)
    return comp.finish()


def _rhs_cost(edges) -> int:
    return sum(1 + len(e.nodes) for e in edges)


def prune(grammar: Grammar) -> Grammar:
    """Inline rules whose removal shrinks the grammar; renumber the survivors.

    A rule with u uses, rank r and body cost s is inlined when
    s*(u-1) < u*(1+r); u <= 1 always qualifies. Expansion output is
    unchanged.
    """
    labels = grammar.labels
    num_t = labels.num_terminals
    rules: list[Rule] = [Rule(r.head, Hypergraph(r.rhs.node_count, list(r.rhs.edges))) for r in grammar.rules]
    start: list[Edge] = list(grammar.start_graph.edges)

    def inline_into(edges: list[Edge], victim: Rule) -> list[Edge]:
        out: list[Edge] = []
        for e in edges:
            if e.label == victim.head:
                out.extend(
                    Edge(x.label, tuple(e.nodes[i] for i in x.nodes)) for x in victim.rhs.edges
                )
            else:
                out.append(e)
        return out

    changed = True
    while changed:
        changed = False
        uses: dict[int, int] = {}
        for e in start:
            if e.label >= num_t:
                uses[e.label] = uses.get(e.label, 0) + 1
        for rule in rules:
            for e in rule.rhs.edges:
                if e.label >= num_t:
                    uses[e.label] = uses.get(e.label, 0) + 1
        for pos, rule in enumerate(rules):
            u = uses.get(rule.head, 0)
            s_rhs = _rhs_cost(rule.rhs.edges)
            rank = rule.rhs.node_count
            if s_rhs * (u - 1) < u * (1 + rank):
                start = inline_into(start, rule)
                for other in rules:
                    if other is not rule:
                        other.rhs.edges = inline_into(other.rhs.edges, rule)
                del rules[pos]
                changed = True
                break

    remap = {rule.head: num_t + i for i, rule in enumerate(rules)}

    def relabel(e: Edge) -> Edge:
        return Edge(remap.get(e.label, e.label), e.nodes)

    new_labels = LabelTable()
    for r in labels.terminal_ranks():
        new_labels.add_terminal(r)
    new_rules = []
    for rule in rules:
        new_labels.add_nonterminal(rule.rhs.node_count)
        new_rules.append(
            Rule(remap[rule.head], Hypergraph(rule.rhs.node_count, [relabel(e) for e in rule.rhs.edges]))
        )
    new_start = Hypergraph(grammar.start_graph.node_count, [relabel(e) for e in start])
    return Grammar(new_labels, new_rules, new_start)


def brute_force_max_occurrences(graph: Hypergraph, digram: Digram, limit: int = 20) -> int:
    """Exact maximum number of pairwise edge-disjoint occurrences (test oracle).

    Exhaustive matching over the edges carrying the digram's labels;
    intended for small graphs only.
    """
    (a1, m1), (a2, m2) = digram
    relevant = [e for e in graph.edges if e.label in (a1, a2)]
    if len(relevant) > limit:
        raise OracleSizeError(f"{len(relevant)} candidate edges exceed limit {limit}")
    pairs: set[frozenset[int]] = set()
    for i, e1 in enumerate(relevant):
        if e1.label != a1:
            continue
        for j, e2 in enumerate(relevant):
            if i == j or e2.label != a2:
                continue
            if e1.nodes[m1] == e2.nodes[m2]:
                pairs.add(frozenset((i, j)))
    partners: dict[int, list[int]] = {i: [] for i in range(len(relevant))}
    for pair in pairs:
        i, j = sorted(pair)
        partners[i].append(j)
        partners[j].append(i)

    @lru_cache(maxsize=None)
    def best(mask: int) -> int:
        while mask:
            i = (mask & -mask).bit_length() - 1
            rest = mask & ~(1 << i)
            usable = [j for j in partners[i] if rest >> j & 1]
            if not usable:
                mask = rest
                continue
            score = best(rest)  # leave edge i unmatched
            for j in usable:
                score = max(score, 1 + best(rest & ~(1 << j)))
            return score
        return 0

    result = best((1 << len(relevant)) - 1)
    best.cache_clear()
    return result
