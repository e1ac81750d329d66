"""Undirected graph snapshots and their cut structure.

The central objects:

* :class:`CommGraph` -- an immutable n-vertex unit-weight undirected graph.
* :func:`enumerate_cuts` -- every vertex bipartition, streamed by
  non-decreasing crossing weight (branch-and-bound over side assignments with
  max-flow lower bounds, organized as a priority queue of subproblems).
* :func:`edge_expansion` -- the exact unscaled expansion ratio
  min over S, |S| <= n/2, of |edges(S, ~S)| / |S|.
* :func:`alpha_d_partition` -- intersect the sides of every cut of weight at
  most alpha; on graphs of minimum degree >= n/c - 1 this yields at most c
  disjoint classes, each of size >= n/c, such that every low-weight cut is a
  union of classes.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from ._mincut import constrained_mincut
from .wire import canonical_json

logger = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 20


class PartitionPreconditionError(ValueError):
    def __init__(self, vertex: int, degree: int, required: float):
        self.vertex = vertex
        super().__init__(
            f"vertex {vertex} has degree {degree} < required {required:.2f}"
        )


@dataclass(frozen=True)
class CommGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def from_edges(n: int, edges) -> "CommGraph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) outside [0,{n})")
            norm.add((min(u, v), max(u, v)))
        return CommGraph(n=n, edges=frozenset(norm))

    @staticmethod
    def complete(n: int) -> "CommGraph":
        return CommGraph.from_edges(n, itertools.combinations(range(n), 2))

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def neighbors(self, v: int) -> set[int]:
        return {u + w - v for u, w in self.edges if v in (u, w)}

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def with_edge(self, u: int, v: int) -> "CommGraph":
        return CommGraph.from_edges(self.n, set(self.edges) | {(u, v)})

    def without_vertex(self, v: int) -> tuple["CommGraph", list[int]]:
        """Remove v; returns the smaller graph and old-index map (new -> old)."""
        keep = [u for u in range(self.n) if u != v]
        pos = {old: new for new, old in enumerate(keep)}
        edges = [(pos[a], pos[b]) for a, b in self.edges if v not in (a, b)]
        return CommGraph.from_edges(self.n - 1, edges), keep

    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)


@dataclass(frozen=True, order=True)
class Cut:
    """Vertex bipartition; ``side`` is the sorted side containing vertex 0."""

    weight: int
    side: tuple[int, ...]

    def other_side(self, n: int) -> tuple[int, ...]:
        inside = set(self.side)
        return tuple(v for v in range(n) if v not in inside)


@dataclass(frozen=True)
class ExpansionRatio:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be >= 1")

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @staticmethod
    def from_fraction(f: Fraction) -> "ExpansionRatio":
        return ExpansionRatio(f.numerator, f.denominator)


@dataclass(frozen=True)
class Partition:
    parts: tuple[tuple[int, ...], ...]
    alpha: int
    d: Fraction

    def part_of(self, v: int) -> int:
        for i, part in enumerate(self.parts):
            if v in part:
                return i
        raise KeyError(v)


def edges_between(g: CommGraph, u1, u2) -> int:
    """Number of edges with one endpoint in u1 and the other in u2."""
    s1, s2 = set(u1), set(u2)
    if s1 & s2:
        raise ValueError(f"vertex sets overlap: {sorted(s1 & s2)}")
    for v in s1 | s2:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} outside [0,{g.n})")
    return sum(1 for a, b in g.edges if (a in s1 and b in s2) or (a in s2 and b in s1))


def boundary_weight(g: CommGraph, side) -> int:
    s = set(side)
    return sum(1 for a, b in g.edges if (a in s) != (b in s))


def min_degree(g: CommGraph) -> int:
    if g.n < 1:
        raise ValueError("empty graph")
    deg = [0] * g.n
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    return min(deg)


def _canonical_cut(g: CommGraph, zero_side_flags: np.ndarray) -> Cut:
    side = tuple(int(v) for v in range(g.n) if zero_side_flags[v])
    weight = boundary_weight(g, side)
    return Cut(weight=weight, side=side)


def enumerate_cuts(g: CommGraph) -> Iterator[Cut]:
    """Yield every cut exactly once, by non-decreasing weight.

    Ties break on the lexicographically smallest sorted zero-side. The stream
    has 2**(n-1) - 1 entries; callers bound their consumption.

    Branch and bound: a subproblem pins some vertices to vertex 0's side and
    some to the complement; its minimum is a max-flow between the contracted
    groups. Popping an exact subproblem emits its optimum and splits the
    remainder of its solution space into one child per free vertex, each
    inheriting the emitted weight as a lower bound (lazily tightened on pop).
    """
    n = g.n
    if n < 2:
        return
    edges = g.edge_array()
    counter = itertools.count()
    heap: list[tuple] = []
    # stages: 0 = subproblem awaiting its max-flow, 1 = solved subproblem
    # awaiting split, 2 = cut awaiting emission. A solved subproblem splits
    # before its cut is emitted so that equal-weight cuts hiding in the
    # children get exactified first; stage-2 entries then emit in canonical
    # (weight, side) order.
    EXACTIFY, SPLIT, EMIT = 0, 1, 2

    def push_subproblem(labels: np.ndarray, bound: int) -> None:
        heapq.heappush(heap, (bound, EXACTIFY, (next(counter),), labels))

    for j in range(1, n):
        labels = np.full(n, 2, dtype=np.int8)
        labels[0] = 0
        labels[1:j] = 0
        labels[j] = 1
        push_subproblem(labels, 0)

    while heap:
        _bound, stage, key, payload = heapq.heappop(heap)
        if stage == EXACTIFY:
            labels = payload
            weight, flags = constrained_mincut(n, edges, labels)
            cut = _canonical_cut(g, flags)
            heapq.heappush(heap, (cut.weight, SPLIT, cut.side, (labels, flags)))
        elif stage == SPLIT:
            labels, flags = payload
            cut = _canonical_cut(g, flags)
            heapq.heappush(heap, (cut.weight, EMIT, cut.side, cut))
            free = [v for v in range(n) if labels[v] == 2]
            for k, v in enumerate(free):
                child = labels.copy()
                for prev in free[:k]:
                    child[prev] = 0 if flags[prev] else 1
                child[v] = 1 if flags[v] else 0
                push_subproblem(child, cut.weight)
        else:
            yield payload


def find_alpha_cuts(g: CommGraph, alpha: int, max_cuts: int | None = None) -> list[Cut]:
    """All cuts of weight <= alpha, in enumeration order.

    Consumes :func:`enumerate_cuts` until the first heavier cut appears.
    ``max_cuts`` aborts pathological graphs (sparse graphs can have
    exponentially many low-weight cuts); exceeding it raises ValueError.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    out: list[Cut] = []
    for cut in enumerate_cuts(g):
        if cut.weight > alpha:
            break
        out.append(cut)
        if max_cuts is not None and len(out) > max_cuts:
            raise ValueError(f"more than {max_cuts} cuts of weight <= {alpha}")
    return out


def _mask_weights(g: CommGraph) -> np.ndarray:
    """Crossing weight of every side-mask in [0, 2**n)."""
    masks = np.arange(1 << g.n, dtype=np.int64)
    weights = np.zeros(1 << g.n, dtype=np.int64)
    for a, b in g.edges:
        weights += ((masks >> a) ^ (masks >> b)) & 1
    return weights


def edge_expansion(
    g: CommGraph,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
    weight_bound: int | None = None,
    cut_cap: int = 256,
) -> ExpansionRatio:
    """Unscaled edge expansion h(G) as an exact rational.

    Exhaustive minimization over every side with |S| <= n/2 when
    n <= exhaustive_cap. Beyond the cap the minimization is restricted to the
    cuts streamed by :func:`enumerate_cuts` up to ``weight_bound`` (default:
    the minimum degree, so the best singleton is always a candidate) and at
    most ``cut_cap`` of them; in that regime the result is an upper bound on
    h(G).
    """
    n = g.n
    if n < 2:
        raise ValueError("edge expansion needs n >= 2")
    if n <= exhaustive_cap:
        weights = _mask_weights(g)
        masks = np.arange(1 << n, dtype=np.int64)
        sizes = np.zeros(1 << n, dtype=np.int64)
        for v in range(n):
            sizes += (masks >> v) & 1
        ok = (sizes >= 1) & (2 * sizes <= n)
        ratio = np.where(ok, weights / np.maximum(sizes, 1), np.inf)
        best = float(ratio.min())
        cand = np.nonzero(ratio <= best + 1e-9)[0]
        frac = min(Fraction(int(weights[m]), int(sizes[m])) for m in cand)
        return ExpansionRatio.from_fraction(frac)
    bound = weight_bound if weight_bound is not None else min_degree(g)
    best_frac = None
    for v in range(n):  # singletons are always candidates
        f = Fraction(g.degree(v), 1)
        best_frac = f if best_frac is None or f < best_frac else best_frac
    for seen, cut in enumerate(enumerate_cuts(g)):
        if cut.weight > bound or seen >= cut_cap:
            break
        size = min(len(cut.side), n - len(cut.side))
        if size >= 1:
            side = cut.side if len(cut.side) <= n - len(cut.side) else cut.other_side(n)
            f = Fraction(cut.weight, len(side))
            if best_frac is None or f < best_frac:
                best_frac = f
    assert best_frac is not None
    return ExpansionRatio.from_fraction(best_frac)


def alpha_d_partition(
    g: CommGraph,
    alpha: int,
    c: int,
    max_cuts: int | None = None,
) -> Partition:
    """Partition the vertices so every weight-<=alpha cut is a union of parts.

    Requires every vertex degree >= n/c - 1 (raises
    :class:`PartitionPreconditionError` naming the first offender). Each part
    is a nonempty intersection of cut sides, one side chosen per low-weight
    cut; with the degree precondition the parts number at most c and have
    size at least n/c, which is logged as a diagnostic when it fails (small
    instances can violate the asymptotic guarantee).
    """
    if c < 2:
        raise ValueError("c must be >= 2")
    n = g.n
    required = n / c - 1
    for v in range(n):
        d = g.degree(v)
        if d < required:
            raise PartitionPreconditionError(v, d, required)
    cuts = find_alpha_cuts(g, alpha, max_cuts=max_cuts)
    d = Fraction(n, c)
    if not cuts:
        return Partition(parts=(tuple(range(n)),), alpha=alpha, d=d)
    label_of: dict[tuple[bool, ...], list[int]] = {}
    for v in range(n):
        key = tuple(v in set(cut.side) for cut in cuts)
        label_of.setdefault(key, []).append(v)
    parts = tuple(sorted((tuple(sorted(vs)) for vs in label_of.values()), key=lambda p: p[0]))
    if len(parts) > c:
        logger.warning("low-weight-cut partition has %d > c=%d parts (n=%d)", len(parts), c, n)
    for part in parts:
        if Fraction(len(part), 1) < d:
            logger.warning("partition part %s smaller than n/c = %s", part, d)
    return Partition(parts=parts, alpha=alpha, d=d)


def verify_partition(
    g: CommGraph,
    p: Partition,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
    max_cuts: int | None = None,
) -> bool:
    """Check the three partition conditions.

    1. every part has size >= d;
    2. every pair of parts is joined by at most alpha edges;
    3. every cut of weight <= alpha splits along part boundaries
       (exhaustive side scan when n <= exhaustive_cap, streamed otherwise).
    """
    n = g.n
    flat = [v for part in p.parts for v in part]
    if sorted(flat) != list(range(n)):
        return False
    if any(Fraction(len(part), 1) < p.d for part in p.parts):
        return False
    for i in range(len(p.parts)):
        for j in range(i + 1, len(p.parts)):
            if edges_between(g, p.parts[i], p.parts[j]) > p.alpha:
                return False
    part_index = {}
    for i, part in enumerate(p.parts):
        for v in part:
            part_index[v] = i

    def is_union_of_parts(side: set[int]) -> bool:
        hit = {part_index[v] for v in side}
        return all(set(p.parts[i]) <= side for i in hit)

    if n <= exhaustive_cap:
        weights = _mask_weights(g)
        light = np.nonzero(weights <= p.alpha)[0]
        for mask in light:
            mask = int(mask)
            if mask == 0 or mask == (1 << n) - 1 or not (mask & 1):
                continue  # skip non-cuts and non-canonical sides
            side = {v for v in range(n) if (mask >> v) & 1}
            if not is_union_of_parts(side) or not is_union_of_parts(set(range(n)) - side):
                return False
        return True
    try:
        cuts = find_alpha_cuts(g, p.alpha, max_cuts=max_cuts)
    except ValueError:
        return False
    for cut in cuts:
        side = set(cut.side)
        if not is_union_of_parts(side) or not is_union_of_parts(set(range(n)) - side):
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def graph_to_edgelist(g: CommGraph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{a} {b}" for a, b in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def graph_from_edgelist(text: str) -> CommGraph:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    n, m = (int(tok) for tok in lines[0].split())
    edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1 : m + 1]]
    if len(edges) != m:
        raise ValueError(f"edge list header claims {m} edges, found {len(edges)}")
    return CommGraph.from_edges(n, edges)


def graph_to_dot(
    g: CommGraph,
    corrupted: set[int] | None = None,
    highlight: set[tuple[int, int]] | None = None,
    name: str = "commgraph",
) -> str:
    corrupted = corrupted or set()
    highlight = {(min(a, b), max(a, b)) for a, b in (highlight or set())}
    out = [f"graph {name} {{"]
    for v in range(g.n):
        style = ' [style=filled, fillcolor="indianred"]' if v in corrupted else ""
        out.append(f"  {v}{style};")
    for a, b in sorted(g.edges):
        style = ' [color="crimson", penwidth=2]' if (a, b) in highlight else ""
        out.append(f"  {a} -- {b}{style};")
    out.append("}")
    return "\n".join(out) + "\n"


def graph_from_dot(text: str) -> CommGraph:
    """Parse the subset of DOT emitted by :func:`graph_to_dot`."""
    nodes: set[int] = set()
    edges: list[tuple[int, int]] = []
    for raw in text.splitlines():
        line = raw.strip().rstrip(";")
        if not line or line.startswith(("graph", "}")):
            continue
        if "[" in line:
            line = line[: line.index("[")].strip()
        if "--" in line:
            a, b = (int(tok.strip()) for tok in line.split("--"))
            edges.append((a, b))
            nodes.update((a, b))
        else:
            nodes.add(int(line))
    n = max(nodes) + 1 if nodes else 0
    return CommGraph.from_edges(n, edges)


def partition_to_json(p: Partition) -> str:
    return canonical_json([list(part) for part in p.parts])


def partition_from_json(text: str, alpha: int, d: Fraction) -> Partition:
    import json

    parts = tuple(tuple(part) for part in json.loads(text))
    return Partition(parts=parts, alpha=alpha, d=d)
