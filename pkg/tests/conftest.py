"""Shared helpers: seeded random graphs and fixture paths."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from tfmnet.graphs import Graph

TESTS_DIR = Path(__file__).resolve().parent
REPO_DIR = TESTS_DIR.parent
FIXTURES_DIR = REPO_DIR / "fixtures"
DATA_DIR = TESTS_DIR / "data"


def random_graph(rng: np.random.Generator, max_nodes: int = 12) -> Graph:
    """A random labelled graph whose largest component has an edge.

    Node labels are strings so that the tests exercise the same label
    type the pipeline uses. Degenerate draws (no edges) are resampled.
    """
    while True:
        n = int(rng.integers(2, max_nodes + 1))
        p = float(rng.uniform(0.15, 0.75))
        g = Graph(nodes=[f"w{i}" for i in range(n)])
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    g.add_edge(f"w{i}", f"w{j}")
        if g.n_edges >= 1:
            return g


def graph_lists(g: Graph):
    """(nodes, edges) lists for handing a Graph to the oracle functions."""
    return g.nodes(), g.edges()


@pytest.fixture(scope="session")
def fixture_bundle():
    if not (FIXTURES_DIR / "config.toml").is_file():
        pytest.skip("fixture bundle missing; run tools/make_fixtures.py")
    return FIXTURES_DIR
