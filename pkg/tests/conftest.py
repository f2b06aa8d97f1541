"""Shared fixtures: fixture graphs, the small-graph collection used by the
exactness suites, and session-scoped forest-fire graphs for the heavier
acceptance runs."""
from __future__ import annotations

import numpy as np
import pytest

from layersample import AccessSession, load_edge_list
from layersample.generators import forest_fire, path, star

TWO_TRIANGLES = "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3\n"
# x-u, u-a, u-b, a-b: the smallest graph where the direct-periphery edge
# exclusion matters
DIAMOND_TAIL = "0 1\n1 2\n1 3\n2 3\n"


@pytest.fixture
def star5():
    return star(5)


@pytest.fixture
def path4():
    return path(4)


@pytest.fixture
def two_triangles():
    return load_edge_list(TWO_TRIANGLES)


@pytest.fixture
def diamond_tail():
    return load_edge_list(DIAMOND_TAIL)


def small_graph_collection():
    """Named small graphs with a start node and a base-layer budget."""
    cases = [
        ("star5", star(5), 1, 1),
        ("path4", path(4), 0, 1),
        ("two_triangles", load_edge_list(TWO_TRIANGLES), 0, 1),
        ("diamond_tail", load_edge_list(DIAMOND_TAIL), 0, 1),
    ]
    sizes = np.random.default_rng(20240917).integers(30, 201, size=20)
    for i, n in enumerate(sizes):
        g = forest_fire(int(n), 0.37, 0.3, seed=1000 + i)
        cases.append((f"ff{i}-n{int(n)}", g, 0, max(2, int(n) // 15)))
    return cases


@pytest.fixture(scope="session")
def small_collection():
    return small_graph_collection()


def build_layering(graph, v0, l0_size, model, seed=0):
    from layersample.layering import generate_l0
    session = AccessSession(graph, model=model, seed=seed)
    layering = generate_l0(session, v0, l0_size, allow_partial=True)
    return session, layering


@pytest.fixture(scope="session")
def ff10k():
    return forest_fire(10_000, 0.37, 0.3, seed=42)


@pytest.fixture(scope="session")
def ff100k():
    return forest_fire(100_000, 0.37, 0.3, seed=42)


def pytest_addoption(parser):
    parser.addoption("--skip-slow", action="store_true", default=False,
                     help="skip the minutes-long acceptance runs")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--skip-slow"):
        return
    marker = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(marker)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: minutes-long acceptance runs")
