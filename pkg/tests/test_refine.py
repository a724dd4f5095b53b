import math
import statistics

import pytest
from hypothesis import given, strategies as st

from pinrefine import activity_threshold, build_dpin, build_rdpin
from pinrefine.ingest import ExpressionTable
from conftest import graph_of

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestActivityThreshold:
    def test_constant_vector_never_active(self):
        tau, active = activity_threshold((3.0, 3.0, 3.0))
        assert tau == 3.0
        assert active == (False, False, False)

    def test_two_point_arithmetic(self):
        tau, active = activity_threshold((0.0, 2.0))
        assert tau == 2.0  # mean 1, population stddev 1
        assert active == (False, False)

    def test_hand_checked_against_independent_stddev(self):
        values = (0.0, 0.0, 3.0, 3.0)
        tau, active = activity_threshold(values)
        expected = statistics.fmean(values) + statistics.pstdev(values)
        assert tau == pytest.approx(expected, abs=1e-12)
        assert tau == pytest.approx(3.0, abs=1e-12)
        assert active == (False, False, False, False)

    def test_spike_is_active(self):
        tau, active = activity_threshold((9.0, 0.0, 0.0, 0.0))
        assert active == (True, False, False, False)

    @given(st.lists(finite, min_size=1, max_size=20))
    def test_matches_population_statistics(self, values):
        tau, active = activity_threshold(values)
        expected = statistics.fmean(values) + statistics.pstdev(values)
        assert math.isclose(tau, expected, rel_tol=1e-9, abs_tol=1e-6)
        for v, flag in zip(values, active):
            assert flag == (v > tau)

    def test_empty_vector_rejected(self):
        with pytest.raises(ValueError):
            activity_threshold(())


def expr_of(rows: dict[str, tuple[float, ...]], t: int) -> ExpressionTable:
    return ExpressionTable(t, {pid: tuple(map(float, v)) for pid, v in rows.items()})


SPIKE_T0 = (9.0, 0.0, 0.0, 0.0)
SPIKE_T1 = (0.0, 9.0, 0.0, 0.0)
SPIKE_T2 = (0.0, 0.0, 9.0, 0.0)


class TestBuildDpin:
    def test_co_active_edge_kept(self):
        s = graph_of([("A", "B")])
        # A active at t0 and t2, B active at t1 and t2; shared point t2
        expr = expr_of({"A": (9, 0, 9, 0, 0, 0), "B": (0, 9, 9, 0, 0, 0)}, 6)
        _, active_a = activity_threshold((9, 0, 9, 0, 0, 0))
        assert active_a == (True, False, True, False, False, False)
        assert build_dpin(s, expr).m == 1

    def test_never_active_endpoint_loses_all_edges(self):
        s = graph_of([("A", "B"), ("A", "C")])
        expr = expr_of({"A": (5, 5, 5, 5), "B": SPIKE_T0, "C": SPIKE_T0}, 4)
        d = build_dpin(s, expr)
        assert d.m == 0
        assert d.ids == s.ids

    def test_disjoint_activity_removes_edge(self):
        s = graph_of([("A", "B")])
        expr = expr_of({"A": SPIKE_T0, "B": SPIKE_T1}, 4)
        assert build_dpin(s, expr).m == 0

    def test_missing_expression_removes_edge(self):
        s = graph_of([("A", "B"), ("B", "C")])
        expr = expr_of({"A": SPIKE_T0, "B": SPIKE_T0}, 4)
        d = build_dpin(s, expr)
        assert sorted(d.edge_id_pairs()) == [("A", "B")]

    def test_shared_activity_everywhere_is_identity(self):
        # every protein spikes at t0, so every edge is co-active there
        s = graph_of([("A", "B"), ("B", "C"), ("C", "D")])
        expr = expr_of({pid: SPIKE_T0 for pid in s.ids}, 4)
        d = build_dpin(s, expr)
        assert sorted(d.edge_id_pairs()) == sorted(s.edge_id_pairs())

    def test_vertex_set_preserved(self):
        s = graph_of([("A", "B")], universe={"Z"})
        d = build_dpin(s, expr_of({"A": SPIKE_T0, "B": SPIKE_T0}, 4))
        assert d.ids == s.ids

    def test_time_point_mismatch_rejected(self):
        s = graph_of([("A", "B")])
        with pytest.raises(ValueError):
            build_dpin(s, expr_of({"A": SPIKE_T0}, 4), t=36)


class TestBuildRdpin:
    def test_shared_compartment_kept(self):
        d = graph_of([("A", "B")])
        loc = {"A": frozenset({"nucleus"}), "B": frozenset({"nucleus", "cytosol"})}
        assert build_rdpin(d, loc).m == 1

    def test_disjoint_compartments_removed(self):
        d = graph_of([("A", "B")])
        loc = {"A": frozenset({"nucleus"}), "B": frozenset({"cytosol"})}
        assert build_rdpin(d, loc).m == 0

    def test_missing_annotation_removed(self):
        d = graph_of([("A", "B")])
        assert build_rdpin(d, {"A": frozenset({"nucleus"})}).m == 0

    def test_shared_compartment_everywhere_is_identity(self):
        d = graph_of([("A", "B"), ("B", "C"), ("A", "C")])
        loc = {pid: frozenset({"cytosol"}) for pid in d.ids}
        rd = build_rdpin(d, loc)
        assert sorted(rd.edge_id_pairs()) == sorted(d.edge_id_pairs())

    def test_vertex_set_preserved(self):
        d = graph_of([("A", "B")], universe={"Q"})
        rd = build_rdpin(d, {})
        assert rd.ids == d.ids


class TestTierMonotonicity:
    def test_edges_shrink_and_nodes_stay(self):
        s = graph_of(
            [("A", "B"), ("B", "C"), ("C", "D"), ("D", "E"), ("E", "A")],
            universe={"X"},
        )
        expr = expr_of(
            {"A": SPIKE_T0, "B": SPIKE_T0, "C": SPIKE_T1, "D": SPIKE_T1, "E": SPIKE_T0}, 4
        )
        loc = {
            "A": frozenset({"nucleus"}),
            "B": frozenset({"cytosol"}),
            "C": frozenset({"nucleus"}),
            "D": frozenset({"nucleus"}),
            "E": frozenset({"nucleus"}),
        }
        d = build_dpin(s, expr)
        rd = build_rdpin(d, loc)
        assert set(rd.edge_id_pairs()) <= set(d.edge_id_pairs()) <= set(s.edge_id_pairs())
        assert s.ids == d.ids == rd.ids
