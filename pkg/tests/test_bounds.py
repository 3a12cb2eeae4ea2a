from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given

from vmulab.bounds import (
    _ceil_tau_bound,
    bounds_report,
    cor4_consistent,
    counting_inequality,
    local_min_degree,
    local_set,
    vertex_cover_number,
    vmu_counting_bound,
)
from vmulab.graph import Graph, GraphError, complete_graph, cycle_graph, delete_vertex, local_complement, make_named

from conftest import graphs, random_graph


def brute_local_min(g: Graph) -> int:
    """Smallest |D | Odd(D)| over all nonempty D, by plain enumeration."""
    verts = g.vertices()
    best = len(verts) + 1
    for r in range(1, len(verts) + 1):
        for d in combinations(verts, r):
            odd = set()
            for v in d:
                odd ^= set(g.neighbors(v))
            best = min(best, len(set(d) | odd))
    return best


def brute_orbit(g: Graph) -> set:
    seen = {g}
    todo = [g]
    while todo:
        h = todo.pop()
        for u in h.vertices():
            x = local_complement(h, u)
            if x not in seen:
                seen.add(x)
                todo.append(x)
    return seen


def brute_cover(g: Graph) -> int:
    edges = g.edges()
    verts = g.vertices()
    for r in range(len(verts) + 1):
        for c in combinations(verts, r):
            s = set(c)
            if all(a in s or b in s for a, b in edges):
                return r
    raise AssertionError


class TestLocalMinDegree:
    # frozen from the brute-force orbit oracle below
    @pytest.mark.parametrize("name,value", [("k2", 1), ("k3", 1), ("cycle:5", 2), ("cycle:6", 2), ("path:4", 1)])
    def test_small_named(self, name, value):
        assert local_min_degree(make_named(name)).delta_loc == value

    def test_k3_hand_derivation(self):
        # LC at any vertex of K3 gives a path whose leaves have degree 1,
        # and D = {0, 1} has Odd(D) = {0, 1}, a local set of size 2
        g = complete_graph(3)
        assert local_set(g, 0b011) == 0b011
        assert min(h.min_degree() for h in brute_orbit(g)) == 1

    @pytest.mark.parametrize("name,value", [("wheel10", 3), ("petersen", 3), ("paley:13", 4), ("paley:17", 4)])
    def test_published_values(self, name, value):
        assert local_min_degree(make_named(name)).delta_loc == value

    def test_witness_is_a_local_set_of_reported_size(self):
        g = make_named("petersen")
        rep = local_min_degree(g)
        assert bin(local_set(g, rep.witness_d)).count("1") == rep.min_size

    @given(graphs(min_n=1, max_n=7))
    def test_matches_plain_enumeration(self, g):
        assert local_min_degree(g).min_size == brute_local_min(g)

    def test_equals_orbit_min_degree(self, rng):
        for _ in range(40):
            g = random_graph(rng, int(rng.integers(2, 8)))
            assert local_min_degree(g).delta_loc == min(h.min_degree() for h in brute_orbit(g))

    def test_cycles_five_and_six_by_orbit(self):
        for n in (5, 6):
            g = cycle_graph(n)
            assert local_min_degree(g).delta_loc == min(h.min_degree() for h in brute_orbit(g))

    @given(graphs(min_n=2, max_n=8))
    def test_lc_invariant(self, g):
        base = local_min_degree(g).delta_loc
        for u in g.vertices():
            assert local_min_degree(local_complement(g, u)).delta_loc == base

    def test_high_block_path(self, monkeypatch):
        # force the Gray-code loop to run on a small graph
        import vmulab.bounds as b

        monkeypatch.setattr(b, "LOW_BITS", 3)
        rng = np.random.default_rng(5)
        for _ in range(20):
            g = random_graph(rng, 8)
            assert local_min_degree(g).min_size == brute_local_min(g)

    def test_inactive_vertices_ignored(self):
        g = delete_vertex(make_named("petersen"), 4)
        assert local_min_degree(g).min_size == brute_local_min(g)

    def test_empty_graph_rejected(self):
        with pytest.raises(GraphError):
            local_min_degree(Graph.empty(0))


class TestVertexCover:
    @given(graphs(min_n=1, max_n=9))
    def test_matches_brute_force(self, g):
        assert vertex_cover_number(g) == brute_cover(g)

    @pytest.mark.parametrize("name,tau", [("cycle:6", 3), ("wheel10", 5), ("petersen", 6), ("paley:13", 10)])
    def test_named(self, name, tau):
        assert vertex_cover_number(make_named(name)) == tau


class TestPairabilityBounds:
    @pytest.mark.parametrize("tau,q", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 2), (6, 2), (10, 4), (14, 5)])
    def test_ceil_tau_bound(self, tau, q):
        assert _ceil_tau_bound(tau) == math.ceil((tau + math.log2(tau)) / 4)

    def test_zero_cover(self):
        assert _ceil_tau_bound(0) == 0

    @given(graphs(min_n=1, max_n=8))
    def test_deltaloc_vs_cover_consistent(self, g):
        rep = bounds_report(g)
        assert cor4_consistent(rep.delta_loc, rep.tau)

    def test_report_c6(self):
        rep = bounds_report(cycle_graph(6))
        assert rep.pairability_max_deltaloc == 1
        assert rep.excludes_pairable(2) == "delta_loc"
        assert rep.excludes_vmu(4) == "delta_loc"
        assert rep.excludes_vmu(3) is None


class TestCountingBound:
    @pytest.mark.parametrize("n", range(1, 40))
    def test_against_float_logs(self, n):
        exact, closed = vmu_counting_bound(n)
        float_best = max(k for k in range(n + 1) if (n - k) * math.log2(3) >= (k * k - 5 * k) / 2 - 1 - 1e-9)
        assert exact == float_best
        assert exact < closed

    def test_ten_vertices(self):
        assert vmu_counting_bound(10)[0] == 6
        assert counting_inequality(10, 6) and not counting_inequality(10, 7)
