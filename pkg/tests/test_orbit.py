from __future__ import annotations

import csv
import io
import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given

from vmulab.graph import (
    Graph,
    GraphError,
    complete_graph,
    cycle_graph,
    local_complement,
    make_named,
    path_graph,
)
from vmulab.orbit import (
    Certificate,
    TargetSet,
    all_codes,
    certificate_problem,
    check_pairable_clocc,
    check_vmu,
    is_vertex_minor,
    lc_batch,
    matching_codes,
    orbit_explore,
    robust_certificate,
    verify_certificate,
)

from conftest import graphs, random_graph


def closure(g: Graph) -> set:
    """Independent orbit oracle: plain set closure, no parent links."""
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


class TestOrbitSizes:
    @pytest.mark.parametrize("name,size", [("k2", 1), ("k3", 4), ("cycle:5", 132)])
    def test_known(self, name, size):
        orbit = orbit_explore(make_named(name))
        assert len(orbit) == size and orbit.complete

    def test_k3_members(self):
        orbit = orbit_explore(complete_graph(3))
        members = {orbit.graph(i) for i in range(len(orbit))}
        paths = {Graph.from_edges(3, [(a, c), (c, b)]) for a, b, c in [(0, 1, 2), (0, 2, 1), (1, 2, 0)]}
        assert members == {complete_graph(3)} | paths

    @given(graphs(min_n=1, max_n=6))
    def test_matches_closure(self, g):
        orbit = orbit_explore(g)
        members = {orbit.graph(i) for i in range(len(orbit))}
        assert members == closure(g)
        assert orbit.complete

    def test_closed_under_lc(self):
        g = cycle_graph(6)
        orbit = orbit_explore(g)
        for i in range(len(orbit)):
            h = orbit.graph(i)
            for u in h.vertices():
                assert local_complement(h, u) in orbit

    def test_limit_flags_partial(self):
        orbit = orbit_explore(make_named("petersen"), limit=500)
        assert not orbit.complete
        assert 500 <= len(orbit) <= 501 + 10

    def test_parent_links_replay(self):
        orbit = orbit_explore(cycle_graph(5))
        for i in range(0, len(orbit), 7):
            h = cycle_graph(5)
            for u in orbit.lc_path(i):
                h = local_complement(h, u)
            assert h == orbit.graph(i)
            assert np.array_equal(orbit.matrices(np.array([i]))[0], h.to_matrix())

    def test_random_walk_members_are_in_orbit(self):
        g = cycle_graph(6)
        full = closure(g)
        walk = orbit_explore(g, mode="random_walk", steps=300, seed=3)
        assert not walk.complete
        for i in range(len(walk)):
            assert walk.graph(i) in full

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            orbit_explore(cycle_graph(4), mode="dfs")


class TestKernels:
    @given(graphs(min_n=2, max_n=8))
    def test_lc_batch_matches_graph_lc(self, g):
        a = np.repeat(g.to_matrix()[None].astype(np.uint8), g.order, axis=0)
        lc_batch(a, np.arange(g.order))
        for u in range(g.order):
            assert np.array_equal(a[u], local_complement(g, u).to_matrix())

    def test_target_ids_roundtrip(self):
        g = make_named("petersen")
        ts = TargetSet(g.vertices(), 3, all_codes(3))
        ids = ts.target_ids(g.to_matrix()[None].astype(np.uint8))[0]
        for s, tid in enumerate(ids):
            h = ts.target(int(tid), g.order)
            assert h == g.induced(h.active)
            assert ts.target_id(h) == tid

    def test_matching_codes(self):
        assert len(matching_codes(4)) == 3
        assert len(matching_codes(6)) == 15


class TestCertificates:
    def test_empty_certificate(self):
        g = make_named("petersen")
        cert = Certificate.build(g, [], g)
        assert cert.delete == () and verify_certificate(g, cert)

    def test_path_center(self):
        g = path_graph(3)
        cert = Certificate((1,), (), (0, 1, 2), ((0, 1), (0, 2), (1, 2)))
        assert verify_certificate(g, cert)

    def test_json_roundtrip(self):
        cert = Certificate((2, 1), (1, 2, 4, 5), (0, 3), ((0, 3),))
        data = json.loads(json.dumps(cert.to_json()))
        assert set(data) == {"lc", "delete", "target_vertices", "target_edges"}
        assert Certificate.from_json(data) == cert

    def test_malformed_json(self):
        with pytest.raises(GraphError):
            Certificate.from_json({"lc": [1]})

    def test_problems_reported(self):
        g = path_graph(3)
        good = Certificate((1,), (), (0, 1, 2), ((0, 1), (0, 2), (1, 2)))
        assert certificate_problem(g, Certificate((), (), (0, 1, 2), good.target_edges)) is not None
        assert "partition" in certificate_problem(g, Certificate((1,), (), (0, 1), ((0, 1),)))
        assert "inactive" in certificate_problem(g.delete(0), Certificate((0,), (), (1, 2), ((1, 2),)))
        assert "universe" in certificate_problem(g, Certificate((), (7,), (0, 1, 2), ()))


class TestVertexMinor:
    def test_self(self):
        g = make_named("wheel10")
        out = is_vertex_minor(g, g)
        assert out.verdict == "found" and out.certificate.lc == ()

    def test_independent_triple_in_c6(self):
        g = cycle_graph(6)
        h = Graph.from_edges(6, [], active=[0, 2, 4])
        out = is_vertex_minor(g, h)
        assert out.verdict == "found" and verify_certificate(g, out.certificate)

    def test_no_independent_triple_in_c5(self):
        g = cycle_graph(5)
        for triple in combinations(range(5), 3):
            out = is_vertex_minor(g, Graph.from_edges(5, [], active=triple))
            assert out.verdict == "exhausted_no"
            assert out.budget_spent == 132

    def test_randomized_and_greedy_modes(self):
        g = cycle_graph(6)
        h = Graph.from_edges(6, [(0, 3)], active=[0, 3])
        for mode in ("randomized", "greedy"):
            out = is_vertex_minor(g, h, mode=mode, budget=5000, seed=1)
            assert out.verdict in ("found", "unknown")
            if out.certificate:
                assert verify_certificate(g, out.certificate)
        assert is_vertex_minor(g, h, mode="randomized", budget=5000, seed=1).verdict == "found"

    def test_target_outside_active(self):
        g = cycle_graph(4).delete(0)
        with pytest.raises(GraphError):
            is_vertex_minor(g, Graph.from_edges(4, [], active=[0, 1]))

    def test_lc_restriction(self):
        g = make_named("petersen")
        h = Graph.from_edges(10, [(2, 3)], active=[0, 1, 2, 3])
        out = is_vertex_minor(g, h, lc_vertices=g.active & ~0b11)
        if out.certificate:
            assert not {0, 1} & set(out.certificate.lc)

    def test_completeness_small(self, rng):
        """Exhaustive verdicts agree with the closure oracle on every 2-vertex target."""
        for _ in range(15):
            g = random_graph(rng, int(rng.integers(3, 7)))
            members = closure(g)
            for a, b in combinations(g.vertices(), 2):
                for edge in (False, True):
                    h = Graph.from_edges(g.order, [(a, b)] if edge else [], active=[a, b])
                    expect = any(m.induced(h.active) == h for m in members)
                    out = is_vertex_minor(g, h)
                    assert (out.verdict == "found") == expect
                    assert out.verdict in ("found", "exhausted_no")


class TestSweeps:
    def test_k3_two_vmu(self):
        rep = check_vmu(complete_graph(3), 2)
        assert rep.verdict == "yes" and rep.total == 6

    def test_k2_two_vmu_refuted(self):
        rep = check_vmu(complete_graph(2), 2)
        assert rep.verdict == "no" and rep.failed == 1 and rep.certified == 1

    def test_c6_three_vmu(self):
        g = cycle_graph(6)
        rep = check_vmu(g, 3)
        assert (rep.verdict, rep.certified, rep.total) == ("yes", 160, 160)
        assert all(verify_certificate(g, c) for c in rep.certificates())

    def test_counts_add_up(self):
        rep = check_vmu(cycle_graph(5), 3)
        assert rep.certified + rep.failed + rep.unknown == rep.total
        assert rep.verdict == "no" and rep.failed == 10

    def test_connected_one_pairable(self):
        assert check_pairable_clocc(make_named("petersen"), 1).verdict == "yes"

    def test_disconnected_not_one_pairable(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        assert check_pairable_clocc(g, 1, use_bounds=False).verdict == "no"

    def test_c6_pairable_excluded(self):
        rep = check_pairable_clocc(cycle_graph(6), 2)
        assert rep.verdict == "no" and rep.excluded_by == "delta_loc" and rep.unknown == rep.total == 45

    def test_exclusion_can_be_disabled(self):
        rep = check_pairable_clocc(cycle_graph(6), 2, use_bounds=False)
        assert rep.excluded_by is None and rep.verdict == "no" and rep.failed > 0

    def test_bad_k(self):
        with pytest.raises(GraphError):
            check_vmu(cycle_graph(4), 5)
        with pytest.raises(GraphError):
            check_pairable_clocc(cycle_graph(5), 3)

    def test_budget_exhaustion_is_unknown(self):
        rep = check_vmu(make_named("petersen"), 4, mode="randomized", budget=64 * 4, seed=0)
        assert rep.verdict == "unknown" and rep.failed == 0 and rep.unknown > 0

    def test_randomized_independent_of_batch_and_threads(self):
        g = make_named("wheel10")
        kw = dict(mode="randomized", budget=64 * 40, seed=11)
        a = check_vmu(g, 3, batch=7, threads=1, **kw)
        b = check_vmu(g, 3, batch=40, threads=3, **kw)
        assert [o.certificate for o in a.outcomes] == [o.certificate for o in b.outcomes]
        assert a.certified > 0

    def test_vmu_implies_pairability(self, rng):
        for _ in range(10):
            g = random_graph(rng, int(rng.integers(4, 8)))
            for k in (2, 3, 4):
                if check_vmu(g, k, use_bounds=False).verdict == "yes":
                    assert check_pairable_clocc(g, k // 2, use_bounds=False).verdict == "yes"

    def test_report_serialization(self):
        rep = check_vmu(complete_graph(3), 2)
        data = json.loads(json.dumps(rep.to_json()))
        assert data["verdict"] == "yes" and len(data["outcomes"]) == 6
        rows = list(csv.reader(io.StringIO(rep.to_csv())))
        assert rows[0][0] == "target_vertices" and len(rows) == 7
        assert "outcomes" not in rep.to_json(with_outcomes=False)


class TestRobustCertificate:
    def test_prefers_m_avoiding(self):
        g = make_named("petersen")
        cert, avoids = robust_certificate(g, [0, 1], [(2, 3)])
        assert cert is not None and verify_certificate(g, cert)
        if avoids:
            assert not {0, 1} & set(cert.lc)
        assert set(cert.target_vertices) == {0, 1, 2, 3}
        assert cert.target_edges == ((2, 3),)
