from __future__ import annotations

import json
import math
import warnings
from fractions import Fraction
from itertools import combinations

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vmulab.construct import (
    appendix_functions,
    binary_entropy,
    chernoff_tail,
    closed_bound,
    construction_params,
    dp_exact,
    dp_table,
    erdos_renyi,
    f_peak,
    feasibility_report,
    greedy_failure_rate,
    greedy_toggle_plan,
    lemma12_holds,
    multipartite,
    probaS_bounds,
    sample_random_graph,
    stream_multipartite,
)
from vmulab.graph import Graph, GraphError, complete_graph, cycle_graph, induced_subgraph, local_complement, mask_of

from conftest import graphs


class TestSamplers:
    def test_extremes(self):
        assert erdos_renyi(7, 0.0, seed=1).num_edges() == 0
        assert erdos_renyi(7, 1.0, seed=1) == complete_graph(7)

    def test_complete_multipartite(self):
        g = multipartite(3, 4, 1.0, seed=0)
        assert g.num_edges() == 3 * 16
        for v in range(12):
            assert all(w // 4 != v // 4 for w in g.neighbors(v))

    def test_bad_p(self):
        with pytest.raises(GraphError):
            erdos_renyi(4, 1.5)
        with pytest.raises(GraphError):
            sample_random_graph({"kind": "multipartite", "parts": 2, "m": 2, "p": -0.1}, 0)

    def test_dispatch_and_determinism(self):
        spec = {"kind": "erdos_renyi", "n": 20, "p": 0.3}
        assert sample_random_graph(spec, 5) == sample_random_graph(spec, 5)
        assert sample_random_graph(spec, 5) != sample_random_graph(spec, 6)
        with pytest.raises(GraphError):
            sample_random_graph({"kind": "regular"}, 0)

    def test_multipartite_density(self):
        parts, m, p = 4, 25, 0.3
        g = multipartite(parts, m, p, seed=11)
        eligible = math.comb(parts * m, 2) - parts * math.comb(m, 2)
        sigma = math.sqrt(eligible * p * (1 - p))
        assert abs(g.num_edges() - eligible * p) < 3 * sigma
        for b in range(parts):
            assert induced_subgraph(g, range(b * m, (b + 1) * m)).num_edges() == 0

    def test_stream(self):
        parts, m, p = 3, 10, 0.4
        rows = list(stream_multipartite(parts, m, p, seed=2))
        assert [v for v, _ in rows] == list(range(parts * m))
        total = 0
        for v, nb in rows:
            assert np.all(nb // m > v // m)
            total += nb.size
        eligible = 3 * m * m
        assert abs(total - eligible * p) < 3 * math.sqrt(eligible * p * (1 - p))
        again = list(stream_multipartite(parts, m, p, seed=2))
        assert all(np.array_equal(a[1], b[1]) for a, b in zip(rows, again))


class TestConstructionParams:
    def test_vmu_k10(self):
        pr = construction_params("vmu", 10, c=5.6)
        assert (pr.m, pr.n, pr.p) == (11722, 128942, Fraction(1, 5))

    def test_pairable_k10(self):
        with pytest.warns(UserWarning, match="c2"):
            pr = construction_params("pairable", 10, c1=5.1, c2=232)
        assert pr.t == 117 and pr.p == Fraction(2, 137)
        assert pr.n == 2832272 and pr.m == pr.n - 20

    def test_formulas_match_float(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for k in range(2, 40):
                lk = math.log(k)
                pr = construction_params("pairable", k, c1=5.1, c2=300)
                assert pr.t == math.floor(5.1 * k * lk)
                assert pr.n == math.floor(300 * k**3 * lk**3)
                assert pr.p == Fraction(2, 2 * k + pr.t)
                v = construction_params("vmu", k, c=6)
                assert v.m == math.floor(6 * k**4 / (k + 1) * lk)

    def test_low_constants_warn(self):
        with pytest.warns(UserWarning):
            construction_params("vmu", 5, c=5.0)
        with pytest.warns(UserWarning):
            construction_params("pairable", 5, c1=4.0)

    def test_rejects(self):
        with pytest.raises(GraphError):
            construction_params("vmu", 1)
        with pytest.raises(GraphError):
            construction_params("planar", 4)


def replay_greedy(g: Graph, K: list[int], h: Graph, pool: list[int]):
    """Straight-line restatement of the scan on explicit sets."""
    R = [(a, b) for a, b in combinations(sorted(K), 2) if g.has_edge(a, b) != h.has_edge(a, b)]
    S: list[int] = []
    chosen = {}
    for u in sorted(pool):
        seen = {w for w in g.neighbors(u) if w in K or w in S}
        for pair in R:
            if seen == set(pair):
                chosen[pair] = u
                R.remove(pair)
                S.append(u)
                break
    return chosen, R


class TestGreedy:
    def test_c6_triangle(self):
        K = [0, 2, 4]
        h = Graph.from_edges(6, [(0, 2), (2, 4), (0, 4)], active=K)
        plan = greedy_toggle_plan(cycle_graph(6), K, h)
        assert plan.success
        assert plan.selected == {(0, 2): 1, (2, 4): 3, (0, 4): 5}
        assert replay_greedy(cycle_graph(6), K, h, [1, 3, 5]) == (plan.selected, [])

    def test_already_induced(self):
        g = cycle_graph(6)
        plan = greedy_toggle_plan(g, [0, 1], induced_subgraph(g, [0, 1]))
        assert plan.success and plan.selected == {}

    def test_single_pair(self):
        g = Graph.from_edges(3, [(0, 2), (1, 2)])
        plan = greedy_toggle_plan(g, [0, 1], Graph.from_edges(3, [(0, 1)], active=[0, 1]))
        assert plan.selected == {(0, 1): 2}

    def test_leftover(self):
        g = Graph.from_edges(4, [(0, 2), (1, 3)])
        plan = greedy_toggle_plan(g, [0, 1], Graph.from_edges(4, [(0, 1)], active=[0, 1]))
        assert not plan.success and plan.leftover == [(0, 1)]

    def test_bad_arguments(self):
        g = cycle_graph(6)
        h = Graph.from_edges(6, [], active=[0, 1])
        with pytest.raises(GraphError):
            greedy_toggle_plan(g, [0, 1], h, pool=[1, 2])
        with pytest.raises(GraphError):
            greedy_toggle_plan(g, [0, 1, 2], h)

    @given(graphs(min_n=4, max_n=12), st.data())
    def test_soundness_and_replay(self, g, data):
        n = g.order
        K = sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=2, max_size=min(4, n - 1))))
        target_edges = [e for e in combinations(K, 2) if data.draw(st.booleans())]
        h = Graph.from_edges(n, target_edges, active=K)
        pool = [v for v in range(n) if v not in K]
        plan = greedy_toggle_plan(g, K, h)
        chosen, left = replay_greedy(g, K, h, pool)
        assert plan.selected == chosen and plan.leftover == sorted(left)
        if plan.success:
            s = plan.lc_sequence()
            assert all(not g.has_edge(a, b) for a, b in combinations(s, 2))
            for order in (s, s[::-1]):
                out = g
                for u in order:
                    out = local_complement(out, u)
                assert induced_subgraph(out, K) == h


class TestFailureProbability:
    def test_base_cases(self):
        for m in range(0, 20):
            for s in range(4):
                assert dp_exact(m, 0, s, 5, 0.3) == 0.0
                assert dp_exact(m, m + 1, s, 5, 0.3) == 1.0

    def test_pinned(self):
        b = probaS_bounds(50, 3, 0, 6, 0.2)
        assert b["dp_exact"] == pytest.approx(0.8971532303460621, rel=1e-12)
        assert b["closed_bound"] == pytest.approx(2.0225269858263775, rel=1e-12)
        assert b["dp_exact"] <= b["closed_bound"]

    def test_recursion_oracle(self):
        from functools import lru_cache

        k, p = 5, 0.35

        @lru_cache(None)
        def rec(m, r, s):
            if r == 0:
                return 0.0
            if r > m:
                return 1.0
            q = r * p * p * (1 - p) ** (k + s - 2)
            return q * rec(m - 1, r - 1, s + 1) + (1 - q) * rec(m - 1, r, s)

        for m in range(0, 60, 7):
            for r in range(0, 6):
                for s in range(0, 3):
                    assert dp_exact(m, r, s, k, p) == pytest.approx(rec(m, r, s), abs=1e-12)
        table = dp_table(k, p, 59, 5)
        assert table.shape == (60, 6)
        assert table[40, 3] == pytest.approx(rec(40, 3, 0), abs=1e-12)

    def test_monte_carlo_matches_dp(self):
        for m, r, k, p in [(30, 2, 4, 0.3), (60, 3, 5, 0.25)]:
            rate, se = greedy_failure_rate(m, r, k, p, trials=20_000, seed=4)
            assert abs(rate - dp_exact(m, r, 0, k, p)) < 4 * se

    def test_graph_level_monte_carlo(self):
        # sample whole graphs and run the planner itself
        k, m, r, p, trials = 4, 30, 2, 0.3, 3000
        rng = np.random.default_rng(9)
        pairs = list(combinations(range(k), 2))[:r]
        K = list(range(k))
        fails = 0
        for _ in range(trials):
            g = erdos_renyi(k + m, p, seed=rng)
            base = induced_subgraph(g, K)
            edges = {e for e in base.edges()} ^ set(pairs)
            h = Graph.from_edges(k + m, sorted(edges), active=K)
            fails += not greedy_toggle_plan(g, K, h).success
        want = dp_exact(m, r, 0, k, p)
        se = math.sqrt(want * (1 - want) / trials)
        assert abs(fails / trials - want) < 4 * se

    def test_failure_rate_arguments(self):
        with pytest.raises(ValueError):
            greedy_failure_rate(10, 7, 4, 0.3, trials=10)
        rate, _ = greedy_failure_rate(10, 0, 4, 0.3, trials=10)
        assert rate == 0.0


class TestAppendix:
    def test_endpoints(self):
        for c in (1, 2, 5):
            assert appendix_functions(c, 0.0)["f"] == 0.0
            assert appendix_functions(c, 1.0)["f"] == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            appendix_functions(0, 0.5)
        with pytest.raises(ValueError):
            appendix_functions(1, 1.5)

    @given(st.floats(0.1, 50), st.floats(0, 1))
    def test_argmax(self, c, x):
        vals = appendix_functions(c, x)
        assert f_peak(c) >= vals["f"] - 1e-15
        # the peak value sits above the cap term, since (1 - 2/(c+2))^c >= e^-2
        assert f_peak(c) >= vals["cap"]

    def test_lemma12_grid(self):
        for k in range(2, 12):
            for m in range(math.comb(k, 2) + 1, math.comb(k, 2) + 10):
                assert lemma12_holds(k, m)

    def test_lemma12_fails_small_m(self):
        # the inequality needs m large compared with C(k, 2)
        assert not lemma12_holds(6, 1)


class TestFeasibility:
    def test_helpers(self):
        assert chernoff_tail(0, 17) == 1
        assert binary_entropy(0.5) == pytest.approx(1.0)
        assert binary_entropy(1e-12) < 1e-10
        assert binary_entropy(0.0) == 0.0
        assert float(binary_entropy(mpmath.mpf("0.25"))) == pytest.approx(binary_entropy(0.25))

    def test_vmu_entropy_chain(self):
        for k in range(2, 30, 3):
            for c in (5.6, 8.0):
                r = feasibility_report(construction_params("vmu", k, c=c))
                if r.terms["m_exceeds_pairs"]:
                    assert r.terms["entropy_chain_holds"]
                    assert r.log_d <= r.terms["log_entropy_bound"] * (1 + 1e-12)

    def test_vmu_count_exact(self):
        # small parameters: d computed from integers
        pr = construction_params("vmu", 3, c=5.6)
        r = feasibility_report(pr)
        exact = math.log(math.comb(pr.n, 3) * 3)
        assert float(r.log_d) == pytest.approx(exact, rel=1e-12)

    def test_pairable_count_exact(self):
        pr = construction_params("pairable", 3, c1=5.1)
        r = feasibility_report(pr)
        n, k = pr.n, 3
        exact = math.log(math.factorial(n) // (math.factorial(k) * math.factorial(n - 2 * k) * 2**k))
        assert float(r.log_d) == pytest.approx(exact, rel=1e-12)

    def test_small_k_infeasible_and_json(self):
        for kind, const in (("vmu", {"c": 5.6}), ("pairable", {"c1": 5.1})):
            r = feasibility_report(construction_params(kind, 10, **const))
            assert not r.feasible
            json.dumps(r.to_json())

    def test_huge_parameters_serialize(self):
        r = feasibility_report(construction_params("pairable", 10**400, c1=5.1))
        data = r.to_json()
        text = json.dumps(data)
        assert isinstance(data["log_d"], str) and "e+" in data["log_d"]
        assert len(text) < 5000
