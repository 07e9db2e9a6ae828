"""Turn vertex paths into signed label sequences.

Vertex labels keep their (positive) value and edge labels are negated, so a
path ``v0 -e01- v1 -e12- v2`` becomes ``(l(v0), -w(e01), l(v1), -w(e12), l(v2))``.
Graphs without edge labels produce the plain vertex-label sequence.
"""
from __future__ import annotations

from typing import Sequence

from .errors import MissingEdgeLabel
from .graph import Graph, edge_key

__all__ = ["serialize_path", "serialize_paths"]


def serialize_path(graph: Graph, path: Sequence[int], use_edge_labels: bool | None = None) -> tuple[int, ...]:
    """Serialize ``path`` (a sequence of vertex indices) into a label sequence.

    ``use_edge_labels`` defaults to ``graph.has_edge_labels``; pass the
    dataset-wide flag to keep every graph of a dataset in one alphabet.
    """
    if use_edge_labels is None:
        use_edge_labels = graph.has_edge_labels
    vl = graph.vertex_labels
    if not use_edge_labels:
        return tuple(vl[v] for v in path)
    el = graph.edge_labels
    if el is None:
        raise MissingEdgeLabel("graph has no edge labels")
    seq = [vl[path[0]]]
    for u, v in zip(path, path[1:]):
        try:
            w = el[edge_key(u, v)]
        except KeyError:
            raise MissingEdgeLabel(f"edge ({u}, {v}) has no label") from None
        seq.append(-w)
        seq.append(vl[v])
    return tuple(seq)


def serialize_paths(graph: Graph, paths, use_edge_labels: bool | None = None) -> list[tuple[int, ...]]:
    return [serialize_path(graph, p, use_edge_labels) for p in paths]
