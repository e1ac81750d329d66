"""Graph metrics and cut machinery, checked against mask-scan oracles.

The brute-force oracle below enumerates side masks directly and never touches
the branch-and-bound enumerator it validates.
"""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commlab.graphs import (
    CommGraph,
    Cut,
    PartitionPreconditionError,
    alpha_d_partition,
    boundary_weight,
    edge_expansion,
    edges_between,
    enumerate_cuts,
    find_alpha_cuts,
    graph_from_dot,
    graph_from_edgelist,
    graph_to_dot,
    graph_to_edgelist,
    min_degree,
    partition_from_json,
    partition_to_json,
    verify_partition,
)


# --- oracles ---------------------------------------------------------------

def oracle_all_cuts(g: CommGraph) -> list[Cut]:
    """Every bipartition via direct mask scan, sorted by (weight, side)."""
    cuts = []
    for mask in range(1, 1 << g.n):
        if not (mask & 1) or mask == (1 << g.n) - 1:
            continue
        side = tuple(v for v in range(g.n) if (mask >> v) & 1)
        w = sum(1 for a, b in g.edges if ((mask >> a) ^ (mask >> b)) & 1)
        cuts.append(Cut(weight=w, side=side))
    return sorted(cuts, key=lambda c: (c.weight, c.side))


def oracle_expansion(g: CommGraph) -> Fraction:
    best = None
    for mask in range(1, 1 << g.n):
        size = bin(mask).count("1")
        if 2 * size > g.n:
            continue
        w = sum(1 for a, b in g.edges if ((mask >> a) ^ (mask >> b)) & 1)
        f = Fraction(w, size)
        best = f if best is None or f < best else best
    return best


def random_graph(rng: random.Random, n: int, p: float) -> CommGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return CommGraph.from_edges(n, edges)


def two_cliques_bridge(k: int, bridges: int = 1) -> CommGraph:
    edges = list(itertools.combinations(range(k), 2))
    edges += [(a + k, b + k) for a, b in itertools.combinations(range(k), 2)]
    edges += [(i, k + i) for i in range(bridges)]
    return CommGraph.from_edges(2 * k, edges)


# --- basic metrics ----------------------------------------------------------

class TestEdgesBetween:
    def test_complete_graph_star(self):
        g = CommGraph.complete(4)
        assert edges_between(g, {0}, {1, 2, 3}) == 3

    def test_empty_set(self):
        g = CommGraph.complete(5)
        assert edges_between(g, {0}, set()) == 0

    def test_two_cliques_one_bridge(self):
        g = two_cliques_bridge(5)
        assert edges_between(g, set(range(5)), set(range(5, 10))) == 1

    def test_overlap_rejected(self):
        g = CommGraph.complete(4)
        with pytest.raises(ValueError):
            edges_between(g, {0, 1}, {1, 2})


class TestMinDegree:
    def test_values(self):
        assert min_degree(CommGraph.complete(4)) == 3
        star = CommGraph.from_edges(5, [(0, i) for i in range(1, 5)])
        assert min_degree(star) == 1
        assert min_degree(CommGraph.from_edges(3, [])) == 0


class TestGraphValidation:
    def test_no_self_loops(self):
        with pytest.raises(ValueError):
            CommGraph.from_edges(3, [(1, 1)])

    def test_range_check(self):
        with pytest.raises(ValueError):
            CommGraph.from_edges(3, [(0, 3)])

    def test_duplicate_edges_collapse(self):
        g = CommGraph.from_edges(3, [(0, 1), (1, 0)])
        assert len(g.edges) == 1


# --- expansion ---------------------------------------------------------------

class TestEdgeExpansion:
    def test_complete_four(self):
        assert edge_expansion(CommGraph.complete(4)).as_fraction() == 2

    def test_isolated_vertex(self):
        g = CommGraph.from_edges(4, [(0, 1), (1, 2), (0, 2)])
        assert edge_expansion(g).as_fraction() == 0

    def test_two_k4_bridge(self):
        g = two_cliques_bridge(4)
        assert edge_expansion(g).as_fraction() == Fraction(1, 4)

    def test_matches_oracle_randoms(self):
        rng = random.Random(5)
        for trial in range(25):
            n = rng.randrange(2, 9)
            g = random_graph(rng, n, rng.choice([0.2, 0.5, 0.8]))
            assert edge_expansion(g).as_fraction() == oracle_expansion(g)

    def test_upper_bound_beyond_cap(self):
        g = two_cliques_bridge(12)  # n = 24 > cap 20
        h = edge_expansion(g).as_fraction()
        assert h == Fraction(1, 12)

    def test_needs_two_vertices(self):
        with pytest.raises(ValueError):
            edge_expansion(CommGraph.from_edges(1, []))

    def test_monotone_under_edge_addition(self):
        rng = random.Random(9)
        for trial in range(15):
            n = rng.randrange(3, 9)
            g = random_graph(rng, n, 0.4)
            missing = [(i, j) for i in range(n) for j in range(i + 1, n)
                       if not g.has_edge(i, j)]
            if not missing:
                continue
            g2 = g.with_edge(*rng.choice(missing))
            assert edge_expansion(g2).as_fraction() >= edge_expansion(g).as_fraction()


# --- cut enumeration ---------------------------------------------------------

class TestEnumerateCuts:
    def test_triangle(self):
        cuts = list(enumerate_cuts(CommGraph.complete(3)))
        assert len(cuts) == 3
        assert all(c.weight == 2 for c in cuts)
        assert {c.side for c in cuts} == {(0,), (0, 1), (0, 2)}

    def test_path_order(self):
        # path 0-1-2: the endpoint splits weigh 1, isolating the middle
        # vertex weighs 2; ties break on the lexicographically smaller side
        g = CommGraph.from_edges(3, [(0, 1), (1, 2)])
        cuts = list(enumerate_cuts(g))
        assert [(c.weight, c.side) for c in cuts] == [
            (1, (0,)), (1, (0, 1)), (2, (0, 2)),
        ]
        assert cuts == oracle_all_cuts(g)

    def test_single_edge(self):
        g = CommGraph.from_edges(2, [(0, 1)])
        assert list(enumerate_cuts(g)) == [Cut(weight=1, side=(0,))]

    def test_disconnected_zero_first(self):
        g = CommGraph.from_edges(4, [(0, 1), (2, 3)])
        cuts = list(enumerate_cuts(g))
        assert cuts[0].weight == 0
        assert cuts == oracle_all_cuts(g)

    def test_matches_oracle_many_random_graphs(self):
        rng = random.Random(1234)
        for trial in range(40):
            n = rng.randrange(2, 11)
            g = random_graph(rng, n, rng.choice([0.15, 0.4, 0.7, 1.0]))
            got = list(enumerate_cuts(g))
            want = oracle_all_cuts(g)
            assert got == want, f"mismatch on trial {trial} (n={n})"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 8), st.data())
    def test_stream_properties(self, n, data):
        p = data.draw(st.floats(0.1, 0.95))
        seed = data.draw(st.integers(0, 10**6))
        g = random_graph(random.Random(seed), n, p)
        cuts = list(enumerate_cuts(g))
        assert len(cuts) == 2 ** (n - 1) - 1
        assert all(cuts[i].weight <= cuts[i + 1].weight for i in range(len(cuts) - 1))
        assert len({c.side for c in cuts}) == len(cuts)
        assert all(c.side[0] == 0 for c in cuts)
        assert all(boundary_weight(g, c.side) == c.weight for c in cuts)


class TestFindAlphaCuts:
    def test_two_cliques_bridge_alpha1(self):
        g = two_cliques_bridge(5)
        cuts = find_alpha_cuts(g, 1)
        assert len(cuts) == 1
        assert cuts[0].weight == 1
        assert cuts[0].side == tuple(range(5))

    def test_k4_alpha1_empty(self):
        assert find_alpha_cuts(CommGraph.complete(4), 1) == []

    def test_island_bound(self):
        # c = 2 islands: at most 2**(c-1) = 2 low cuts
        g = two_cliques_bridge(6)
        assert len(find_alpha_cuts(g, 1)) <= 2

    def test_cap_guard(self):
        g = CommGraph.from_edges(10, [])
        with pytest.raises(ValueError):
            find_alpha_cuts(g, 0, max_cuts=16)


# --- partitions ---------------------------------------------------------------

def islands_graph(sizes: list[int], pair_edges: int, rng: random.Random) -> CommGraph:
    """Disjoint cliques joined by `pair_edges` edges per island pair."""
    offs = [sum(sizes[:i]) for i in range(len(sizes))]
    n = sum(sizes)
    edges = []
    for off, s in zip(offs, sizes):
        edges += [(off + a, off + b) for a, b in itertools.combinations(range(s), 2)]
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            picks = set()
            while len(picks) < pair_edges:
                picks.add((offs[i] + rng.randrange(sizes[i]),
                           offs[j] + rng.randrange(sizes[j])))
            edges += sorted(picks)
    return CommGraph.from_edges(n, edges)


class TestAlphaDPartition:
    def test_two_cliques_bridge(self):
        g = two_cliques_bridge(5)
        part = alpha_d_partition(g, alpha=1, c=2)
        assert part.parts == (tuple(range(5)), tuple(range(5, 10)))
        assert verify_partition(g, part)

    def test_no_low_cut_trivial(self):
        g = CommGraph.complete(6)
        part = alpha_d_partition(g, alpha=1, c=2)
        assert part.parts == (tuple(range(6)),)
        assert verify_partition(g, part)

    def test_three_islands(self):
        rng = random.Random(3)
        g = islands_graph([4, 4, 4], pair_edges=1, rng=rng)
        part = alpha_d_partition(g, alpha=2, c=3)
        assert len(part.parts) == 3
        assert verify_partition(g, part)
        # every low cut is a union of parts, from the oracle scan
        for cut in oracle_all_cuts(g):
            if cut.weight <= 2:
                side = set(cut.side)
                union = set()
                for p in part.parts:
                    if set(p) <= side:
                        union |= set(p)
                assert union == side

    def test_degree_precondition(self):
        g = CommGraph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
        with pytest.raises(PartitionPreconditionError) as exc:
            alpha_d_partition(g, alpha=1, c=2)
        assert exc.value.vertex == 0

    def test_partition_soundness_randomized_islands(self):
        rng = random.Random(77)
        for trial in range(20):
            c = rng.choice([2, 3, 4])
            alpha = c - 1
            size = rng.randrange(alpha + 2, alpha + 5)  # intra-island cuts stay heavy
            g = islands_graph([size] * c, pair_edges=1, rng=rng)
            part = alpha_d_partition(g, alpha=alpha, c=c)
            assert verify_partition(g, part)
            assert len(part.parts) == c
            assert len(find_alpha_cuts(g, alpha)) <= 2 ** (c - 1)
            assert all(len(p) * c >= g.n for p in part.parts)


class TestVerifyPartition:
    def test_small_part_rejected(self):
        from commlab.graphs import Partition

        g = two_cliques_bridge(5)
        bad = Partition(parts=((0,), tuple(range(1, 10))), alpha=1, d=Fraction(5))
        assert not verify_partition(g, bad)

    def test_island_split_rejected(self):
        from commlab.graphs import Partition

        g = two_cliques_bridge(5)
        bad = Partition(
            parts=(tuple(range(3)), tuple(range(3, 5)), tuple(range(5, 10))),
            alpha=1,
            d=Fraction(2),
        )
        assert not verify_partition(g, bad)


class TestBoundaryLowerBound:
    def test_small_sets_have_large_boundary(self):
        """min degree >= n/c - 1 forces |edges(S)| >= n/c - 1 for small S."""
        rng = random.Random(21)
        checked = 0
        for trial in range(60):
            n = rng.randrange(6, 13)
            c = rng.choice([2, 3])
            g = random_graph(rng, n, 0.7)
            req = n / c - 1
            if min_degree(g) < req:
                continue
            checked += 1
            kmax = int(n / c - 1)
            for size in range(1, kmax + 1):
                for side in itertools.combinations(range(n), size):
                    assert boundary_weight(g, side) >= req
        assert checked >= 10


# --- serialization -----------------------------------------------------------

class TestIO:
    def test_edgelist_roundtrip(self):
        g = two_cliques_bridge(4)
        assert graph_from_edgelist(graph_to_edgelist(g)) == g

    def test_dot_roundtrip(self):
        g = two_cliques_bridge(3)
        assert graph_from_dot(graph_to_dot(g, corrupted={1}, highlight={(0, 3)})) == g

    def test_partition_json_roundtrip(self):
        g = two_cliques_bridge(5)
        part = alpha_d_partition(g, alpha=1, c=2)
        back = partition_from_json(partition_to_json(part), alpha=1, d=part.d)
        assert back.parts == part.parts
