import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from netseal.graph import Graph, karate_club  # noqa: E402

# Pipeline-computed fingerprint of the bundled karate fixture, frozen at first build.
KARATE_GOLDEN = "23c3a13318de066603cbdba5e8eec385228b0b89"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def karate() -> Graph:
    return karate_club()


@pytest.fixture
def karate_file(tmp_path, karate):
    from netseal.graph import canonical_edge_list
    path = tmp_path / "karate.edges"
    path.write_text(canonical_edge_list(karate) + "\n", encoding="utf-8")
    return path


def path_graph(n: int) -> Graph:
    return Graph.from_edges([(i, i + 1) for i in range(1, n)])


def star(leaves: int) -> Graph:
    return Graph.from_edges([(0, i) for i in range(1, leaves + 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges([(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])
