"""Triple-pattern and neighborhood queries answered on the compressed form.

Seeding never touches more of the incidence matrix than the bound node's
row (or the bound label's range); the worklist then expands only
nonterminal edges whose expansion can still contain a match, checked via
node membership and the nonterminal-to-terminal reachability matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .codec import ContainerView
from .model import Edge


class NotPlusModeError(ValueError):
    """Node labels were requested from a container without label edges."""


class ConflictingNodeLabelsError(ValueError):
    """Expansion produced two distinct rank-1 label edges for one node."""


@dataclass(frozen=True)
class TriplePattern:
    s: Optional[int] = None
    p: Optional[int] = None
    o: Optional[int] = None

    @property
    def shape(self) -> str:
        return ("S" if self.s is not None else "?") + \
               ("P" if self.p is not None else "?") + \
               ("O" if self.o is not None else "?")


@dataclass
class QueryStats:
    """Instrumentation for tests: which edges were expanded or filtered."""

    expanded: list[Edge] = field(default_factory=list)
    filtered: int = 0
    emitted: int = 0


def _seed_columns(view: ContainerView, q: TriplePattern) -> Iterator[int]:
    if q.s is not None or q.o is not None:
        r = q.s if q.s is not None else q.o
        if not 0 <= r < view.node_count:
            return iter(())
        return iter(view.start.incidence.row_ones(r))
    if q.p is not None:
        num_t = view.labels.num_terminals
        if not 0 <= q.p < num_t:
            return iter(())
        ranges = [view.start.label_seq.range_of_value(q.p)]
        if view.rules:
            for row in view.nt_matrix.col_ones(q.p):
                ranges.append(view.start.label_seq.range_of_value(num_t + row))
        ranges.sort()
        return (j for lo, hi in ranges for j in range(lo, hi))
    return iter(range(view.num_start_edges))


def answer(view: ContainerView, q: TriplePattern, stats: QueryStats | None = None) -> Iterator[Edge]:
    """Stream matching terminal rank-2 edges in column order, depth-first.

    Duplicates in the underlying multigraph are emitted with multiplicity.
    """
    s, p, o = q.s, q.p, q.o
    num_t = view.labels.num_terminals
    for col in _seed_columns(view, q):
        stack = [view.decode_edge(col)]
        while stack:
            e = stack.pop()
            if e.label < num_t:
                if (
                    len(e.nodes) == 2
                    and (s is None or e.nodes[0] == s)
                    and (p is None or e.label == p)
                    and (o is None or e.nodes[1] == o)
                ):
                    if stats is not None:
                        stats.emitted += 1
                    yield e
                continue
            if (s is not None and s not in e.nodes) or (o is not None and o not in e.nodes):
                if stats is not None:
                    stats.filtered += 1
                continue
            if p is not None and not view.nt_generates(e.label, p):
                if stats is not None:
                    stats.filtered += 1
                continue
            if stats is not None:
                stats.expanded.append(e)
            stack.extend(reversed(view.expand(e)))


def neighborhood(view: ContainerView, v: int, direction: str = "both") -> Iterator[Edge]:
    """Edges incident to v: out = (v,?,?), in = (?,?,v), both = out then in.

    A loop at v matches both directions and is emitted once per pattern.
    """
    if direction not in ("out", "in", "both"):
        raise ValueError(f"unknown direction {direction!r}")
    if direction in ("out", "both"):
        yield from answer(view, TriplePattern(s=v))
    if direction in ("in", "both"):
        yield from answer(view, TriplePattern(o=v))


def node_label(view: ContainerView, v: int) -> Optional[str]:
    """Label term of node v, recovered from its rank-1 edge (plus mode only)."""
    if not view.plus_mode:
        raise NotPlusModeError("container was not built with label edges")
    if not 0 <= v < view.node_count:
        return None
    num_t = view.labels.num_terminals
    found: set[int] = set()
    for col in view.start.incidence.row_ones(v):
        stack = [view.decode_edge(col)]
        while stack:
            e = stack.pop()
            if e.label < num_t:
                if len(e.nodes) == 1 and e.nodes[0] == v:
                    found.add(e.label)
                continue
            if v in e.nodes:
                stack.extend(reversed(view.expand(e)))
    if len(found) > 1:
        terms = sorted(view.dictionary.edge_label_term(l) for l in found)
        raise ConflictingNodeLabelsError(f"node {v} carries labels {terms}")
    if found:
        return view.dictionary.edge_label_term(found.pop())
    return None
