import itertools
import math
import random

import numpy as np
import pytest

from pinrefine import ConvergenceError, build_graph, compute, compute_local, compute_path, compute_walk
from pinrefine.centrality import ALL_METHODS, CentralityParams, rank_from_scores
from pinrefine.ingest import EdgeList
from conftest import graph_of, random_graph
import oracles


def cycle(n):
    names = [f"C{i:02d}" for i in range(n)]
    return graph_of((names[i], names[(i + 1) % n]) for i in range(n))


def complete(n):
    names = [f"K{i:02d}" for i in range(n)]
    return graph_of(itertools.combinations(names, 2))


def star(leaves=4):
    return graph_of(("HUB", f"L{i}") for i in range(leaves))


def scores_of(ranking):
    return dict(ranking.entries)


class TestLocalMeasures:
    def test_dc_star(self):
        s = scores_of(compute_local(star(), "DC"))
        assert s["HUB"] == 4.0
        assert all(s[f"L{i}"] == 1.0 for i in range(4))

    def test_lac_k4(self):
        assert set(scores_of(compute_local(complete(4), "LAC")).values()) == {2.0}

    def test_lac_star_and_isolated(self):
        g = graph_of([("HUB", "L0"), ("HUB", "L1")], universe={"Z"})
        s = scores_of(compute_local(g, "LAC"))
        assert s["HUB"] == 0.0  # leaves are not adjacent to each other
        assert s["Z"] == 0.0

    def test_nc_triangle(self):
        g = graph_of([("A", "B"), ("B", "C"), ("A", "C")])
        assert set(scores_of(compute_local(g, "NC")).values()) == {2.0}

    def test_nc_zero_denominator_term_dropped(self):
        s = scores_of(compute_local(star(), "NC"))
        assert s["HUB"] == 0.0

    def test_dmnc_triangle(self):
        g = graph_of([("A", "B"), ("B", "C"), ("A", "C")])
        assert scores_of(compute_local(g, "DMNC"))["A"] == pytest.approx(1.0 / 2 ** 1.7)

    def test_dmnc_picks_largest_neighborhood_component(self):
        # HUB's neighborhood has components {A,B,C} (a path) and {D}
        g = graph_of([("HUB", "A"), ("HUB", "B"), ("HUB", "C"), ("HUB", "D"),
                      ("A", "B"), ("B", "C")])
        assert scores_of(compute_local(g, "DMNC"))["HUB"] == pytest.approx(2.0 / 3 ** 1.7)

    def test_dmnc_exponent_configurable(self):
        g = graph_of([("A", "B"), ("B", "C"), ("A", "C")])
        s = scores_of(compute_local(g, "DMNC", CentralityParams(dmnc_exponent=2.0)))
        assert s["A"] == pytest.approx(0.25)

    def test_lid_k4(self):
        assert set(scores_of(compute_local(complete(4), "LID")).values()) == {2.0}

    def test_lid_isolated_node(self):
        g = graph_of([("A", "B")], universe={"Z"})
        assert scores_of(compute_local(g, "LID"))["Z"] == 0.0

    def test_two_hop_locality(self):
        rng = random.Random(53)
        for _ in range(20):
            g = random_graph(rng, 16, 0.15)
            v = g.ids[rng.randrange(g.n)]
            vi = g.index[v]
            dist = {vi: 0}
            frontier = [vi]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in g.adj[u]:
                        if w not in dist:
                            dist[w] = dist[u] + 1
                            nxt.append(w)
                frontier = nxt
            far = [i for i in range(g.n) if dist.get(i, 99) >= 3]
            if len(far) < 2:
                continue
            before = {m: scores_of(compute_local(g, m))[v] for m in ("DC", "LAC", "NC", "DMNC", "LID")}
            pairs = set(g.edge_id_pairs())
            a, b = rng.sample(far, 2)
            pair = tuple(sorted((g.ids[a], g.ids[b])))
            mutated = pairs ^ {pair}
            g2 = build_graph(EdgeList.from_pairs(mutated), universe=g.ids)
            after = {m: scores_of(compute_local(g2, m))[v] for m in ("DC", "LAC", "NC", "DMNC", "LID")}
            assert before == after


class TestPathMeasures:
    def test_bc_path(self):
        g = graph_of([("A", "B"), ("B", "C")])
        s = scores_of(compute_path(g, "BC"))
        assert s == {"B": 1.0, "A": 0.0, "C": 0.0}

    def test_cc_cycle_symmetry(self):
        assert len(set(scores_of(compute_path(cycle(4), "CC")).values())) == 1

    def test_cc_isolated_zero(self):
        g = graph_of([("A", "B")], universe={"Z"})
        assert scores_of(compute_path(g, "CC"))["Z"] == 0.0

    def test_cc_component_scaling(self):
        # star within a 6-node universe: hub closeness (4/4) * (4/5)
        g = star(4)
        g = build_graph(g.to_edge_list(), universe=list(g.ids) + ["ZZ"])
        s = scores_of(compute_path(g, "CC"))
        assert s["HUB"] == pytest.approx(4.0 / 4.0 * 4.0 / 5.0)

    def test_tp_star_kernel(self):
        s = scores_of(compute_path(star(4), "TP"))
        assert s["HUB"] == pytest.approx(4.0 * math.exp(-1.0), abs=1e-12)
        assert s["L0"] == pytest.approx(math.exp(-1.0) + 3.0 * math.exp(-4.0), abs=1e-12)

    def test_tp_range_cutoff(self):
        # path of 5: with sigma=1 the horizon is ceil(3/sqrt(2)) = 3 hops
        names = [f"P{i}" for i in range(5)]
        g = graph_of((names[i], names[i + 1]) for i in range(4))
        s = scores_of(compute_path(g, "TP"))
        expected = math.exp(-1) + math.exp(-4) + math.exp(-9)  # d=4 is out of range
        assert s["P0"] == pytest.approx(expected, abs=1e-12)

    def test_bc_matches_brute_force_on_random_graphs(self):
        rng = random.Random(59)
        for _ in range(40):
            g = random_graph(rng, rng.randint(2, 8), rng.uniform(0.2, 0.9))
            expected = oracles.betweenness_brute(g.n, list(g.edges()))
            got = [scores_of(compute_path(g, "BC"))[pid] for pid in g.ids]
            assert got == pytest.approx(expected, abs=1e-9)

    def test_cc_matches_brute_force_on_random_graphs(self):
        rng = random.Random(61)
        for _ in range(40):
            g = random_graph(rng, rng.randint(2, 8), rng.uniform(0.2, 0.9))
            expected = oracles.closeness_brute(g.n, list(g.edges()))
            got = [scores_of(compute_path(g, "CC"))[pid] for pid in g.ids]
            assert got == pytest.approx(expected, abs=1e-9)

    def test_bc_tree_closed_form(self):
        rng = random.Random(67)
        for _ in range(15):
            n = rng.randint(2, 30)
            # random tree from a parent array
            pairs = [(f"T{i:02d}", f"T{rng.randrange(i):02d}") for i in range(1, n)]
            g = graph_of(pairs, universe=[f"T{i:02d}" for i in range(n)])
            got = scores_of(compute_path(g, "BC"))
            for v in range(g.n):
                # remove v; branch sizes multiply pairwise
                seen = {v}
                sizes = []
                for w in g.adj[v]:
                    if w in seen:
                        continue
                    stack = [w]
                    seen.add(w)
                    size = 0
                    while stack:
                        u = stack.pop()
                        size += 1
                        for x in g.adj[u]:
                            if x not in seen:
                                seen.add(x)
                                stack.append(x)
                    sizes.append(size)
                expected = sum(a * b for a, b in itertools.combinations(sizes, 2))
                assert got[g.ids[v]] == pytest.approx(expected, abs=1e-9)

    def test_parallel_equals_sequential(self):
        rng = random.Random(71)
        g = random_graph(rng, 40, 0.1)
        for method in ("BC", "CC", "TP"):
            seq = compute_path(g, method, workers=1)
            par = compute_path(g, method, workers=4)
            assert seq == par


class TestWalkMeasures:
    def test_pr_uniform_on_cycle(self):
        s = scores_of(compute_walk(cycle(5), "PR"))
        assert all(v == pytest.approx(0.2, abs=1e-12) for v in s.values())

    def test_pr_sums_to_one_with_dangling_nodes(self):
        g = graph_of([("A", "B"), ("B", "C")], universe={"X", "Y"})
        s = scores_of(compute_walk(g, "PR"))
        assert sum(s.values()) == pytest.approx(1.0, abs=1e-8)

    def test_pr_matches_dense_solve(self):
        rng = random.Random(73)
        for _ in range(30):
            g = random_graph(rng, rng.randint(2, 6), rng.uniform(0.2, 0.9))
            expected = oracles.pagerank_solve(g.n, list(g.edges()))
            got = np.array([scores_of(compute_walk(g, "PR"))[pid] for pid in g.ids])
            assert np.abs(got - expected).max() < 1e-8

    def test_lr_symmetric_on_k3(self):
        s = scores_of(compute_walk(complete(3), "LR"))
        assert len(set(round(v, 12) for v in s.values())) == 1

    def test_lr_prefers_connected_nodes(self):
        g = graph_of([("A", "B"), ("B", "C")], universe={"Z"})
        s = scores_of(compute_walk(g, "LR"))
        assert s["B"] > s["A"] > s["Z"]

    def test_lr_errors_on_edgeless_graph(self):
        g = build_graph(EdgeList(()), universe={"A", "B"})
        with pytest.raises(ConvergenceError, match="LR"):
            compute_walk(g, "LR")

    def test_iteration_cap_respected(self):
        path = graph_of([("A", "B"), ("B", "C"), ("C", "D")])
        with pytest.raises(ConvergenceError, match="PR"):
            compute_walk(path, "PR", CentralityParams(tolerance=1e-30, max_iter=3))


class TestRanking:
    def test_ties_broken_by_ascending_id(self):
        g = graph_of([("B", "C")], universe={"A"})
        r = compute(g, "DC")
        assert r.ids() == ["B", "C", "A"]

    def test_covers_all_nodes_once(self):
        rng = random.Random(79)
        g = random_graph(rng, 15, 0.3)
        for method in ALL_METHODS:
            r = compute(g, method)
            assert sorted(r.ids()) == sorted(g.ids)

    def test_affine_rescaling_preserves_order_exactly(self):
        rng = random.Random(83)
        g = random_graph(rng, 30, 0.0)
        for _ in range(20):
            scores = [rng.randrange(-32, 32) / 8.0 for _ in range(g.n)]
            a = rng.choice([0.5, 1.0, 2.0, 4.0])
            b = rng.randrange(-8, 8) / 4.0
            base = rank_from_scores(g, "DC", scores)
            scaled = rank_from_scores(g, "DC", [a * s + b for s in scores])
            assert base.ids() == scaled.ids()

    def test_non_finite_scores_rejected(self):
        g = graph_of([("A", "B")])
        with pytest.raises(ValueError):
            rank_from_scores(g, "DC", [float("nan"), 1.0])

    def test_tsv_format(self):
        g = graph_of([("A", "B")])
        lines = compute(g, "DC").to_tsv().splitlines()
        assert lines[0] == "1\tA\t1"
        assert lines[1] == "2\tB\t1"

    def test_unknown_method_rejected(self):
        g = graph_of([("A", "B")])
        with pytest.raises(ValueError):
            compute(g, "EIGEN")
        with pytest.raises(ValueError):
            compute_local(g, "BC")
        with pytest.raises(ValueError):
            compute_path(g, "DC")
        with pytest.raises(ValueError):
            compute_walk(g, "DC")


class TestVertexTransitivity:
    @pytest.mark.parametrize("maker,size", [(cycle, 3), (cycle, 5), (cycle, 8),
                                            (complete, 2), (complete, 4), (complete, 7)])
    def test_all_methods_constant(self, maker, size):
        g = maker(size)
        for method in ALL_METHODS:
            values = list(scores_of(compute(g, method)).values())
            assert max(values) - min(values) < 1e-10, method
