"""Labeled undirected graphs, datasets, and the TU benchmark text format.

The TU format (used by MUTAG, PTC, ...) stores a whole dataset as a handful of
flat text files sharing a prefix ``<name>_``:

``_A.txt``                one ``i, j`` record per direction of every edge (1-based global ids)
``_graph_indicator.txt``  graph id (1-based) of vertex ``k`` on line ``k``
``_graph_labels.txt``     one class label per graph
``_node_labels.txt``      optional, one categorical label per vertex
``_edge_labels.txt``      optional, one categorical label per line of ``_A.txt``

Attribute files (``_node_attributes.txt`` etc.) are never read.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InconsistentEdgeLabels, InvalidGraph, MalformedLine, MissingFile

__all__ = [
    "Graph",
    "Dataset",
    "edge_key",
    "degree_labeling",
    "load_tudataset",
    "save_tudataset",
]


def edge_key(i: int, j: int) -> tuple[int, int]:
    """Canonical key of the undirected edge ``{i, j}``."""
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with positive integer labels.

    Parameters
    ----------
    adjacency : sequence of sequences of int
        Neighbor list per vertex. Stored sorted; must be symmetric and
        free of self-loops.
    vertex_labels : sequence of int
        One label ``>= 1`` per vertex.
    edge_labels : mapping or None
        ``{(i, j): label}`` with ``i < j``; when given every edge needs a label.
    id : int
        Position of the graph in its dataset.
    """

    adjacency: tuple[tuple[int, ...], ...]
    vertex_labels: tuple[int, ...]
    edge_labels: Mapping[tuple[int, int], int] | None = None
    id: int = 0

    def __post_init__(self):
        adj = tuple(tuple(sorted(int(v) for v in nbrs)) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "vertex_labels", tuple(int(x) for x in self.vertex_labels))
        if self.edge_labels is not None:
            object.__setattr__(
                self,
                "edge_labels",
                {edge_key(int(i), int(j)): int(w) for (i, j), w in self.edge_labels.items()},
            )
        self.validate()

    @classmethod
    def from_edges(
        cls,
        n_vertices: int,
        edges: Sequence[tuple[int, int]],
        vertex_labels: Sequence[int] | None = None,
        edge_labels: Sequence[int] | None = None,
        id: int = 0,
    ) -> "Graph":
        """Build a graph from an undirected edge list (0-based vertex ids).

        Duplicate edges are collapsed; ``vertex_labels`` defaults to all ones.
        """
        nbrs: list[set[int]] = [set() for _ in range(n_vertices)]
        labels: dict[tuple[int, int], int] | None = {} if edge_labels is not None else None
        for k, (i, j) in enumerate(edges):
            nbrs[i].add(j)
            nbrs[j].add(i)
            if labels is not None:
                labels[edge_key(i, j)] = edge_labels[k]
        if vertex_labels is None:
            vertex_labels = [1] * n_vertices
        return cls(tuple(tuple(s) for s in nbrs), tuple(vertex_labels), labels, id)

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def n_edges(self) -> int:
        return sum(len(n) for n in self.adjacency) // 2

    @property
    def has_edge_labels(self) -> bool:
        return self.edge_labels is not None

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(i, j)`` with ``i < j``, sorted."""
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def edge_label(self, i: int, j: int) -> int:
        return self.edge_labels[edge_key(i, j)]

    def validate(self) -> None:
        n = len(self.adjacency)
        if len(self.vertex_labels) != n:
            raise InvalidGraph(f"{len(self.vertex_labels)} vertex labels for {n} vertices")
        for i, nbrs in enumerate(self.adjacency):
            if len(set(nbrs)) != len(nbrs):
                raise InvalidGraph(f"duplicate neighbor of vertex {i}")
            for j in nbrs:
                if not 0 <= j < n:
                    raise InvalidGraph(f"neighbor {j} of vertex {i} out of range")
                if j == i:
                    raise InvalidGraph(f"self-loop at vertex {i}")
                if i not in self.adjacency[j]:
                    raise InvalidGraph(f"asymmetric adjacency between {i} and {j}")
        if any(x < 1 for x in self.vertex_labels):
            raise InvalidGraph("vertex labels must be >= 1")
        if self.edge_labels is not None:
            keys = set(self.edge_labels)
            if keys != set(self.edges()):
                raise InvalidGraph("edge labels must cover exactly the edge set")
            if any(w < 1 for w in self.edge_labels.values()):
                raise InvalidGraph("edge labels must be >= 1")

    def relabel(self, vertex_labels: Sequence[int]) -> "Graph":
        return Graph(self.adjacency, tuple(vertex_labels), self.edge_labels, self.id)

    def permute(self, perm: Sequence[int]) -> "Graph":
        """Return the isomorphic graph in which old vertex ``i`` becomes ``perm[i]``."""
        n = self.n_vertices
        adj: list[tuple[int, ...]] = [()] * n
        labels = [0] * n
        for i in range(n):
            adj[perm[i]] = tuple(perm[j] for j in self.adjacency[i])
            labels[perm[i]] = self.vertex_labels[i]
        elabels = None
        if self.edge_labels is not None:
            elabels = {edge_key(perm[i], perm[j]): w for (i, j), w in self.edge_labels.items()}
        return Graph(tuple(adj), tuple(labels), elabels, self.id)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.adjacency == other.adjacency
            and self.vertex_labels == other.vertex_labels
            and self.edge_labels == other.edge_labels
        )

    def __hash__(self):
        return hash((self.adjacency, self.vertex_labels))


@dataclass(frozen=True)
class Dataset:
    graphs: tuple[Graph, ...]
    class_labels: tuple[int, ...]
    name: str = ""
    has_edge_labels: bool = False
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        object.__setattr__(self, "class_labels", tuple(int(c) for c in self.class_labels))
        if len(self.graphs) != len(self.class_labels):
            raise InvalidGraph(
                f"{len(self.graphs)} graphs but {len(self.class_labels)} class labels"
            )
        for k, g in enumerate(self.graphs):
            if g.id != k:
                raise InvalidGraph(f"graph at position {k} has id {g.id}")
            if g.has_edge_labels != self.has_edge_labels:
                raise InvalidGraph(f"graph {k} disagrees with the dataset on edge labels")

    def __len__(self) -> int:
        return len(self.graphs)

    def __getitem__(self, k: int) -> Graph:
        return self.graphs[k]


def degree_labeling(graph: Graph) -> Graph:
    """Replace vertex labels by ``degree + 1`` (isolated vertices get 1)."""
    return graph.relabel([len(n) + 1 for n in graph.adjacency])


# --- TU text format --------------------------------------------------------

def _read_ints(path: Path, width: int) -> list[tuple[int, ...]]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            tokens = [t for t in line.replace(",", " ").split()]
            if len(tokens) != width:
                raise MalformedLine(path, lineno, f"expected {width} value(s), got {len(tokens)}")
            try:
                # labels are sometimes written as "1.0"
                rows.append(tuple(_to_int(t) for t in tokens))
            except ValueError:
                raise MalformedLine(path, lineno, f"non-integer token in {line!r}") from None
    return rows


def _to_int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        x = float(token)
        if not x.is_integer():
            raise
        return int(x)


def _required(directory: Path, name: str, suffix: str) -> Path:
    path = directory / f"{name}_{suffix}.txt"
    if not path.is_file():
        raise MissingFile(f"missing required file {path}")
    return path


def load_tudataset(directory: str | os.PathLike, name: str, require_class_labels: bool = True) -> Dataset:
    """Load a dataset stored in the TU benchmark text format.

    Labels of each family (vertex, edge) are shifted so that their global
    minimum becomes 1, which keeps negated edge labels disjoint from vertex
    labels. Self-loop and duplicate edge records are dropped. Without a
    node-label file, vertices are labeled by ``degree + 1``.

    With ``require_class_labels=False`` a missing ``_graph_labels`` file is
    tolerated (enough for Gram matrices): every class label is 0 and
    ``notes["class_labels"]`` is False.

    Raises
    ------
    MissingFile
        One of ``_A``, ``_graph_indicator``, ``_graph_labels`` is absent.
    MalformedLine
        Non-integer token, vertex id out of range, or an edge between graphs.
    InconsistentEdgeLabels
        The two records of one undirected edge carry different labels.
    """
    directory = Path(directory)
    a_path = _required(directory, name, "A")
    ind_path = _required(directory, name, "graph_indicator")
    gl_path = directory / f"{name}_graph_labels.txt"
    has_classes = gl_path.is_file()
    if require_class_labels and not has_classes:
        _required(directory, name, "graph_labels")
    nl_path = directory / f"{name}_node_labels.txt"
    el_path = directory / f"{name}_edge_labels.txt"

    indicator = [r[0] for r in _read_ints(ind_path, 1)]
    if has_classes:
        class_labels = [r[0] for r in _read_ints(gl_path, 1)]
    else:
        class_labels = [0] * max(indicator, default=0)
    n_graphs = len(class_labels)
    n_total = len(indicator)

    graph_of = []
    local = []
    sizes = [0] * n_graphs
    for k, gid in enumerate(indicator):
        if not 1 <= gid <= n_graphs:
            raise MalformedLine(ind_path, k + 1, f"graph id {gid} outside 1..{n_graphs}")
        graph_of.append(gid - 1)
        local.append(sizes[gid - 1])
        sizes[gid - 1] += 1

    node_labels = None
    if nl_path.is_file():
        node_labels = [r[0] for r in _read_ints(nl_path, 1)]
        if len(node_labels) != n_total:
            raise MalformedLine(nl_path, len(node_labels), f"{len(node_labels)} labels for {n_total} vertices")
        shift = 1 - min(node_labels) if node_labels else 0
        node_labels = [x + shift for x in node_labels]

    records = _read_ints(a_path, 2)
    edge_raw = None
    if el_path.is_file():
        edge_raw = [r[0] for r in _read_ints(el_path, 1)]
        if len(edge_raw) != len(records):
            raise MalformedLine(el_path, len(edge_raw), f"{len(edge_raw)} edge labels for {len(records)} edge records")
        shift = 1 - min(edge_raw) if edge_raw else 0
        edge_raw = [x + shift for x in edge_raw]

    nbrs: list[list[set[int]]] = [[set() for _ in range(s)] for s in sizes]
    elabels: list[dict[tuple[int, int], int]] = [{} for _ in range(n_graphs)]
    for k, (i, j) in enumerate(records):
        for v in (i, j):
            if not 1 <= v <= n_total:
                raise MalformedLine(a_path, k + 1, f"vertex id {v} outside 1..{n_total}")
        gi, gj = graph_of[i - 1], graph_of[j - 1]
        if gi != gj:
            raise MalformedLine(a_path, k + 1, f"edge joins graphs {gi + 1} and {gj + 1}")
        if i == j:
            continue
        li, lj = local[i - 1], local[j - 1]
        nbrs[gi][li].add(lj)
        nbrs[gi][lj].add(li)
        if edge_raw is not None:
            key = edge_key(li, lj)
            w = edge_raw[k]
            prev = elabels[gi].setdefault(key, w)
            if prev != w:
                raise InconsistentEdgeLabels(
                    f"{a_path}:{k + 1}: edge ({i}, {j}) labeled {prev} and {w}"
                )

    # vertices of a graph need not be contiguous in the indicator file
    members: list[list[int]] = [[] for _ in range(n_graphs)]
    for k, g in enumerate(graph_of):
        members[g].append(k)
    graphs = []
    for g in range(n_graphs):
        adj = tuple(tuple(s) for s in nbrs[g])
        if node_labels is None:
            vlabels = tuple(len(s) + 1 for s in nbrs[g])
        else:
            vlabels = tuple(node_labels[k] for k in members[g])
        graphs.append(Graph(adj, vlabels, elabels[g] if edge_raw is not None else None, g))
    return Dataset(
        tuple(graphs),
        tuple(class_labels),
        name,
        edge_raw is not None,
        notes={"degree_labels": node_labels is None, "class_labels": has_classes},
    )


def save_tudataset(dataset: Dataset, directory: str | os.PathLike, name: str | None = None,
                   class_labels: bool = True) -> None:
    """Write ``dataset`` in the TU text format (inverse of :func:`load_tudataset`).

    Labels are written as stored; the loader's shift is the identity as long
    as every label family has minimum 1. ``class_labels=False`` skips the
    ``_graph_labels`` file.
    """
    name = name or dataset.name
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    offsets = []
    total = 0
    for g in dataset.graphs:
        offsets.append(total)
        total += g.n_vertices
    a_lines, e_lines, ind_lines, nl_lines = [], [], [], []
    for g, off in zip(dataset.graphs, offsets):
        ind_lines.extend([str(g.id + 1)] * g.n_vertices)
        nl_lines.extend(str(x) for x in g.vertex_labels)
        for i, nbrs in enumerate(g.adjacency):
            for j in nbrs:
                a_lines.append(f"{i + off + 1}, {j + off + 1}")
                if g.edge_labels is not None:
                    e_lines.append(str(g.edge_label(i, j)))

    def write(suffix, lines):
        (directory / f"{name}_{suffix}.txt").write_text("\n".join(lines) + "\n")

    write("A", a_lines)
    write("graph_indicator", ind_lines)
    if class_labels:
        write("graph_labels", [str(c) for c in dataset.class_labels])
    write("node_labels", nl_lines)
    if dataset.has_edge_labels:
        write("edge_labels", e_lines)
