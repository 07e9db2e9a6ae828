import os
from pathlib import Path

import pytest

from lcskernel import Dataset, Graph

REPO = Path(__file__).resolve().parents[1]


def triangle(labels=(1, 1, 1), id=0):
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], labels, id=id)


def path_graph(n, labels=None, edge_labels=None, id=0):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], labels, edge_labels, id=id)


def cycle(n, id=0):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], id=id)


def write_tu(directory, name, files):
    """Write ``{suffix: text}`` as ``<name>_<suffix>.txt`` files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for suffix, text in files.items():
        (directory / f"{name}_{suffix}.txt").write_text(text)
    return directory


TWO_GRAPHS = {
    "A": "1, 2\n2, 1\n3, 4\n4, 3\n",
    "graph_indicator": "1\n1\n2\n2\n",
    "graph_labels": "1\n-1\n",
    "node_labels": "0\n0\n1\n1\n",
}


@pytest.fixture
def tu_fixture(tmp_path):
    return write_tu(tmp_path / "TOY", "TOY", TWO_GRAPHS)


@pytest.fixture
def toy_dataset():
    graphs = [
        triangle(id=0),
        path_graph(3, id=1),
        cycle(4, id=2),
        Graph.from_edges(4, [(0, 1), (1, 2), (1, 3)], (1, 2, 1, 1), id=3),
        path_graph(5, (1, 2, 1, 2, 1), id=4),
    ]
    return Dataset(graphs, (0, 0, 1, 1, 1), "toy")


def mutag_dir():
    """Directory holding MUTAG in TU format, or None."""
    env = os.environ.get("LCSKERNEL_MUTAG")
    for cand in ([Path(env)] if env else []) + [REPO / "data" / "MUTAG"]:
        if (cand / "MUTAG_A.txt").is_file():
            return cand
    return None


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, (ok, detail) in sorted(results.items(), key=lambda kv: (len(kv[0]), kv[0])):
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}")
