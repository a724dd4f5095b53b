from __future__ import annotations

import random
from pathlib import Path

import pytest

from pinrefine import EdgeList, Graph, build_graph
from pinrefine.pipeline import PipelineConfig, make_config

TOY_DIR = Path(__file__).parent / "data" / "toy"


def graph_of(pairs, universe=()) -> Graph:
    """Small-graph builder for tests; accepts any iterable of id pairs."""
    return build_graph(EdgeList.from_pairs(list(pairs)), universe=universe)


def random_graph(rng: random.Random, n: int, p: float, prefix: str = "N") -> Graph:
    ids = [f"{prefix}{i:03d}" for i in range(n)]
    pairs = [
        (ids[i], ids[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return build_graph(EdgeList.from_pairs(pairs), universe=ids)


def index_edges(g: Graph) -> list[tuple[int, int]]:
    return list(g.edges())


@pytest.fixture
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture
def toy_config(tmp_path) -> PipelineConfig:
    return make_config({
        "out": str(tmp_path / "out"),
        "edges": str(TOY_DIR / "edges.tsv"),
        "expression": str(TOY_DIR / "expression.tsv"),
        "localization": str(TOY_DIR / "localization.tsv"),
        "homology": str(TOY_DIR / "homology.tsv"),
        "essential": str(TOY_DIR / "essential.tsv"),
        "t": "4",
        "th1": "0.5",
        "th2": "0.7",
        "th3": "0.5",
        "topk": "1,2,3,5",
    })
