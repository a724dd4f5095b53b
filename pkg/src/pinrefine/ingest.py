"""Parsers and serializers for the five tab-separated input stores.

All parsers accept any iterable of text lines (an open file works), skip
blank lines and full-line ``#`` comments, and report format violations
with the 1-based line number of the offending row.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

# The 11 compartment names accepted by default in localization files.
DEFAULT_COMPARTMENTS = frozenset({
    "cytoskeleton",
    "golgiapparatus",
    "cytosol",
    "endosome",
    "mitochondrion",
    "plasma membrane",
    "nucleus",
    "extracellular space",
    "vacuole",
    "endoplasmic reticulum",
    "peroxisome",
})

NUCLEUS = "nucleus"


class ParseError(ValueError):
    """An input row violated its format contract."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _data_rows(source: Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yield (line_no, content) for rows that carry data."""
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line_no, line


def _check_id(token: str, line_no: int) -> str:
    if not token:
        raise ParseError(line_no, "empty protein identifier")
    if any(c.isspace() for c in token):
        raise ParseError(line_no, f"identifier contains whitespace: {token!r}")
    return token


@dataclass(frozen=True)
class EdgeList:
    """Normalized list of unordered protein pairs.

    Pairs are stored with the lexicographically smaller id first and the
    list itself sorted, so two edge lists with the same edge set compare
    equal regardless of input row order.
    """

    pairs: tuple[tuple[str, str], ...]
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "EdgeList":
        seen: set[tuple[str, str]] = set()
        self_loops = 0
        duplicates = 0
        for a, b in pairs:
            if a == b:
                self_loops += 1
                continue
            pair = (a, b) if a < b else (b, a)
            if pair in seen:
                duplicates += 1
                continue
            seen.add(pair)
        return cls(tuple(sorted(seen)), self_loops, duplicates)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self.pairs)

    def node_set(self) -> set[str]:
        nodes: set[str] = set()
        for a, b in self.pairs:
            nodes.add(a)
            nodes.add(b)
        return nodes

    def to_tsv(self) -> str:
        return "".join(f"{a}\t{b}\n" for a, b in self.pairs)


@dataclass(frozen=True)
class ExpressionTable:
    """Per-protein expression vectors, all of length ``t``."""

    t: int
    values: dict[str, tuple[float, ...]]
    duplicates_replaced: int = 0

    def __contains__(self, pid: str) -> bool:
        return pid in self.values

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AnnotationStore:
    """Bundled per-protein annotations used by the refinement stages."""

    localization: dict[str, frozenset[str]]
    homology: dict[str, float]
    essential: frozenset[str]

    def homology_score(self, pid: str) -> float:
        """Score for ``pid``; proteins absent from the input score 0."""
        return self.homology.get(pid, 0.0)


def parse_edge_list(source: Iterable[str]) -> EdgeList:
    """Parse whitespace-separated interaction pairs into a normalized EdgeList.

    Self-loops are dropped and duplicate pairs ({a,b} == {b,a}) merged;
    the drop counts are recorded on the result so that
    kept + dropped == number of data rows.
    """
    raw_pairs: list[tuple[str, str]] = []
    for line_no, line in _data_rows(source):
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(line_no, f"expected 2 columns, found {len(fields)}")
        a = _check_id(fields[0], line_no)
        b = _check_id(fields[1], line_no)
        raw_pairs.append((a, b))
    edges = EdgeList.from_pairs(raw_pairs)
    if edges.self_loops_dropped or edges.duplicates_dropped:
        logger.info(
            "edge list: kept %d pairs, dropped %d self-loops and %d duplicates",
            len(edges), edges.self_loops_dropped, edges.duplicates_dropped,
        )
    return edges


def parse_expression(source: Iterable[str], t: int = 36) -> ExpressionTable:
    """Parse rows of ``id \\t v1 ... vT`` into an ExpressionTable.

    Duplicate ids are resolved last-write-wins and logged.
    """
    if t < 1:
        raise ValueError(f"time-point count must be >= 1, got {t}")
    values: dict[str, tuple[float, ...]] = {}
    duplicates = 0
    for line_no, line in _data_rows(source):
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != t + 1:
            raise ParseError(
                line_no, f"expected {t + 1} columns (id + {t} values), found {len(fields)}"
            )
        pid = _check_id(fields[0], line_no)
        try:
            vector = tuple(float(f) for f in fields[1:])
        except ValueError:
            raise ParseError(line_no, f"non-numeric expression value in row for {pid}") from None
        if not all(math.isfinite(v) for v in vector):
            raise ParseError(line_no, f"non-finite expression value in row for {pid}")
        if pid in values:
            duplicates += 1
            logger.warning("expression row for %s at line %d replaces an earlier row", pid, line_no)
        values[pid] = vector
    return ExpressionTable(t, values, duplicates)


def parse_localization(
    source: Iterable[str],
    vocabulary: frozenset[str] = DEFAULT_COMPARTMENTS,
) -> dict[str, frozenset[str]]:
    """Parse rows of ``id \\t compartment`` into per-protein compartment sets.

    Compartment names outside ``vocabulary`` are rejected.
    """
    sets: dict[str, set[str]] = {}
    for line_no, line in _data_rows(source):
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != 2:
            raise ParseError(line_no, f"expected 2 columns, found {len(fields)}")
        pid = _check_id(fields[0], line_no)
        compartment = fields[1]
        if compartment not in vocabulary:
            raise ParseError(line_no, f"unknown compartment name: {compartment!r}")
        sets.setdefault(pid, set()).add(compartment)
    return {pid: frozenset(s) for pid, s in sets.items()}


def parse_homology(source: Iterable[str]) -> dict[str, float]:
    """Parse rows of ``id \\t score`` with nonnegative finite scores."""
    scores: dict[str, float] = {}
    for line_no, line in _data_rows(source):
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != 2:
            raise ParseError(line_no, f"expected 2 columns, found {len(fields)}")
        pid = _check_id(fields[0], line_no)
        try:
            score = float(fields[1])
        except ValueError:
            raise ParseError(line_no, f"non-numeric homology score for {pid}") from None
        if not math.isfinite(score) or score < 0:
            raise ParseError(line_no, f"homology score must be finite and >= 0, got {fields[1]}")
        scores[pid] = score
    return scores


def parse_essential_list(source: Iterable[str]) -> set[str]:
    """Parse one protein id per line into a de-duplicated set."""
    essential: set[str] = set()
    for line_no, line in _data_rows(source):
        pid = _check_id(line.split()[0], line_no)
        essential.add(pid)
    return essential


# Serializers. Each emits the canonical form its parser reproduces exactly
# (round-trip identity); floats use repr so no precision is lost.

def dump_expression(table: ExpressionTable) -> str:
    lines = []
    for pid in sorted(table.values):
        vector = table.values[pid]
        lines.append(pid + "\t" + "\t".join(repr(v) for v in vector) + "\n")
    return "".join(lines)


def dump_localization(localization: dict[str, frozenset[str]]) -> str:
    lines = []
    for pid in sorted(localization):
        for compartment in sorted(localization[pid]):
            lines.append(f"{pid}\t{compartment}\n")
    return "".join(lines)


def dump_homology(homology: dict[str, float]) -> str:
    return "".join(f"{pid}\t{homology[pid]!r}\n" for pid in sorted(homology))


def dump_essential(essential: set[str]) -> str:
    return "".join(f"{pid}\n" for pid in sorted(essential))
