import io

import pytest
from hypothesis import given, strategies as st

from pinrefine import ingest
from pinrefine.ingest import (
    DEFAULT_COMPARTMENTS,
    EdgeList,
    ParseError,
    parse_edge_list,
    parse_essential_list,
    parse_expression,
    parse_homology,
    parse_localization,
)

ids = st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", min_size=1, max_size=6)


class TestEdgeList:
    def test_empty_file(self):
        edges = parse_edge_list([])
        assert len(edges) == 0
        assert edges.node_set() == set()

    def test_normalization_drops_loops_and_duplicates(self):
        edges = parse_edge_list(["A\tB", "B\tA", "C\tC"])
        assert edges.pairs == (("A", "B"),)
        assert edges.duplicates_dropped == 1
        assert edges.self_loops_dropped == 1

    def test_comments_blanks_and_space_separation(self):
        edges = parse_edge_list(["# header", "", "A B", "  ", "B\tC"])
        assert edges.pairs == (("A", "B"), ("B", "C"))

    def test_malformed_row_reports_line_number(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list(["A B", "A B C"])
        with pytest.raises(ParseError):
            parse_edge_list(["lonely"])

    def test_drop_counts_add_up(self):
        rows = ["A B", "B A", "C C", "A C", "C A", "D D"]
        edges = parse_edge_list(rows)
        assert len(edges) + edges.self_loops_dropped + edges.duplicates_dropped == len(rows)

    @given(st.lists(st.tuples(ids, ids), max_size=30), st.randoms())
    def test_row_order_is_irrelevant(self, pairs, rng):
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        assert EdgeList.from_pairs(pairs).pairs == EdgeList.from_pairs(shuffled).pairs

    @given(st.lists(st.tuples(ids, ids), max_size=30))
    def test_round_trip(self, pairs):
        edges = EdgeList.from_pairs(pairs)
        assert parse_edge_list(io.StringIO(edges.to_tsv())).pairs == edges.pairs


class TestExpression:
    def test_basic_row(self):
        table = parse_expression(["P1\t1\t1\t1"], t=3)
        assert table.values["P1"] == (1.0, 1.0, 1.0)

    def test_wrong_column_count_errors_with_line(self):
        rows = ["P1\t" + "\t".join(["1"] * 36), "P2\t" + "\t".join(["1"] * 35)]
        with pytest.raises(ParseError, match="line 2"):
            parse_expression(rows, t=36)

    def test_non_numeric_cell(self):
        with pytest.raises(ParseError, match="non-numeric"):
            parse_expression(["P1\t1\tx\t3"], t=3)

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError, match="non-finite"):
            parse_expression(["P1\t1\tinf\t3"], t=3)

    def test_duplicate_id_last_write_wins(self, caplog):
        with caplog.at_level("WARNING"):
            table = parse_expression(["P1\t1\t2", "P1\t3\t4"], t=2)
        assert table.values["P1"] == (3.0, 4.0)
        assert table.duplicates_replaced == 1
        assert "replaces" in caplog.text

    def test_round_trip(self):
        table = parse_expression(["P1\t0.1\t2.5", "P2\t-1\t0.3333333333333333"], t=2)
        again = parse_expression(io.StringIO(ingest.dump_expression(table)), t=2)
        assert again.values == table.values


class TestLocalization:
    def test_accumulates_compartments(self):
        loc = parse_localization(["P1\tnucleus", "P1\tcytosol"])
        assert loc["P1"] == frozenset({"nucleus", "cytosol"})

    def test_unknown_compartment_rejected(self):
        with pytest.raises(ParseError, match="ribosome"):
            parse_localization(["P1\tribosome"])

    def test_default_vocabulary_has_the_eleven_names(self):
        assert len(DEFAULT_COMPARTMENTS) == 11
        assert {"cytoskeleton", "golgiapparatus", "cytosol", "nucleus",
                "plasma membrane", "endoplasmic reticulum"} <= DEFAULT_COMPARTMENTS

    def test_multiword_compartments_survive_tabs(self):
        loc = parse_localization(["P1\tplasma membrane"])
        assert loc["P1"] == frozenset({"plasma membrane"})

    def test_round_trip(self):
        loc = parse_localization(["P2\tnucleus", "P1\tcytosol", "P1\tvacuole"])
        assert parse_localization(io.StringIO(ingest.dump_localization(loc))) == loc


class TestHomology:
    def test_basic(self):
        assert parse_homology(["P1\t7"]) == {"P1": 7.0}

    def test_negative_rejected(self):
        with pytest.raises(ParseError):
            parse_homology(["P1\t-1"])

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError):
            parse_homology(["P1\tnan"])

    def test_absent_protein_defaults_to_zero(self):
        store = ingest.AnnotationStore({}, parse_homology(["P1\t7"]), frozenset())
        assert store.homology_score("P1") == 7.0
        assert store.homology_score("P2") == 0.0

    def test_round_trip(self):
        scores = parse_homology(["P1\t7", "P2\t0.123456789012345"])
        assert parse_homology(io.StringIO(ingest.dump_homology(scores))) == scores


class TestEssential:
    def test_deduplicates(self):
        assert parse_essential_list(["P1", "P2", "P1"]) == {"P1", "P2"}

    def test_skips_blank_lines(self):
        assert parse_essential_list(["P1", "", "  ", "P2"]) == {"P1", "P2"}

    def test_round_trip(self):
        essential = {"P3", "P1"}
        assert parse_essential_list(io.StringIO(ingest.dump_essential(essential))) == essential
