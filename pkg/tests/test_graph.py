import itertools
import random

import pytest
from hypothesis import given, strategies as st

from pinrefine import (
    EdgeList,
    GraphStats,
    build_graph,
    connected_components,
    graph_stats,
    maximal_component_edges,
    parse_edge_list,
)
from conftest import graph_of, random_graph

ids = st.text(alphabet="ABCDEFGH", min_size=1, max_size=3)


def complete_graph(n):
    names = [f"K{i:02d}" for i in range(n)]
    return graph_of(itertools.combinations(names, 2))


class TestBuildGraph:
    def test_universe_adds_isolated_nodes(self):
        g = graph_of([("A", "B")], universe={"A", "B", "C"})
        assert g.n == 3 and g.m == 1
        assert g.degree(g.index["C"]) == 0

    def test_empty(self):
        g = build_graph(EdgeList(()))
        assert g.n == 0 and g.m == 0

    def test_index_order_is_sorted_id_order(self):
        g = graph_of([("Z", "A"), ("M", "Z")])
        assert g.ids == ("A", "M", "Z")

    def test_neighbor_lists_sorted_and_symmetric(self):
        g = graph_of([("C", "A"), ("C", "B"), ("A", "B")])
        for i in range(g.n):
            assert list(g.adj[i]) == sorted(g.adj[i])
            for j in g.adj[i]:
                assert i in g.adj[j]

    @given(st.lists(st.tuples(ids, ids), max_size=40))
    def test_adjacency_symmetry_fuzzed(self, pairs):
        g = build_graph(EdgeList.from_pairs(pairs))
        for i in range(g.n):
            for j in g.adj[i]:
                assert i in g.adj[j]
        assert sum(len(g.adj[i]) for i in range(g.n)) == 2 * g.m


class TestComponents:
    def test_triangle_is_one_component(self):
        g = graph_of([("A", "B"), ("B", "C"), ("A", "C")])
        assert connected_components(g) == [{"A", "B", "C"}]

    def test_tie_broken_by_smallest_id(self):
        g = graph_of([("A", "B"), ("C", "D")])
        assert connected_components(g) == [{"A", "B"}, {"C", "D"}]

    def test_isolated_node_is_singleton(self):
        g = graph_of([("A", "B")], universe={"Z"})
        assert connected_components(g) == [{"A", "B"}, {"Z"}]

    def test_component_edges_sum_to_m(self):
        rng = random.Random(11)
        for _ in range(20):
            g = random_graph(rng, rng.randint(2, 25), 0.15)
            total = 0
            for comp in connected_components(g):
                keep = {g.index[pid] for pid in comp}
                total += sum(1 for i, j in g.edges() if i in keep and j in keep)
            assert total == g.m


class TestMaximalComponent:
    def test_connected_graph_keeps_all_edges(self):
        g = graph_of([("A", "B"), ("B", "C")])
        assert len(maximal_component_edges(g)) == g.m

    def test_only_largest_component_edges_survive(self):
        g = graph_of([("A", "B"), ("B", "C"), ("X", "Y")])
        assert maximal_component_edges(g).pairs == (("A", "B"), ("B", "C"))

    def test_empty_graph_errors(self):
        with pytest.raises(ValueError):
            maximal_component_edges(build_graph(EdgeList(())))


class TestStats:
    def test_k4(self):
        s = graph_stats(complete_graph(4))
        assert s == graph_stats(complete_graph(4))
        assert s.edge_count == 6
        assert s.avg_degree == 3.0
        assert s.avg_clustering == 1.0
        assert s.density == 1.0

    def test_path_has_zero_clustering(self):
        s = graph_stats(graph_of([("A", "B"), ("B", "C")]))
        assert s.avg_clustering == 0.0

    @pytest.mark.parametrize("n", range(3, 13))
    def test_complete_graph_closed_form(self, n):
        s = graph_stats(complete_graph(n))
        assert s.edge_count == n * (n - 1) // 2
        assert s.avg_degree == pytest.approx(n - 1)
        assert s.avg_clustering == pytest.approx(1.0)
        assert s.density == pytest.approx(1.0)

    def test_k2_clustering_follows_degree_convention(self):
        # degree-1 nodes contribute 0 to the clustering mean, so K2 scores 0
        s = graph_stats(complete_graph(2))
        assert s == GraphStats(1, 1.0, 0.0, 1.0)

    def test_single_node_density_zero(self):
        g = build_graph(EdgeList(()), universe={"A"})
        assert graph_stats(g).density == 0.0

    def test_bounds_on_random_graphs(self):
        rng = random.Random(5)
        for _ in range(25):
            s = graph_stats(random_graph(rng, rng.randint(1, 20), rng.random()))
            assert 0.0 <= s.avg_clustering <= 1.0
            assert 0.0 <= s.density <= 1.0


class TestSerialization:
    def test_edge_list_round_trip(self):
        g = graph_of([("B", "A"), ("C", "B")])
        dumped = g.to_edge_list().to_tsv()
        assert dumped == "A\tB\nB\tC\n"
        again = build_graph(parse_edge_list(dumped.splitlines()), universe=g.ids)
        assert again == g
