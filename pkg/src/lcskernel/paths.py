"""All-pairs shortest paths on unweighted graphs, with one geodesic per pair."""
from __future__ import annotations

from collections import deque

from .graph import Graph

__all__ = ["bfs_distances", "shortest_path_tree", "all_pairs_shortest_paths"]


def bfs_distances(graph: Graph, source: int) -> list[int]:
    """Hop distance from ``source`` to every vertex (``-1`` if unreachable)."""
    dist = [-1] * graph.n_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path_tree(graph: Graph, source: int) -> tuple[list[int], list[int]]:
    """BFS distances and predecessors from ``source``.

    The predecessor of ``v`` is its lowest-index neighbor one hop closer to
    the source, so ties between geodesics are broken deterministically.
    """
    dist = bfs_distances(graph, source)
    pred = [-1] * graph.n_vertices
    for v, d in enumerate(dist):
        if d > 0:
            # adjacency lists are sorted, the first hit is the smallest index
            for u in graph.adjacency[v]:
                if dist[u] == d - 1:
                    pred[v] = u
                    break
    return dist, pred


def all_pairs_shortest_paths(graph: Graph) -> list[tuple[int, ...]]:
    """One shortest path for every ordered reachable pair ``(i, j)``, ``i != j``.

    Paths are vertex tuples from ``i`` to ``j``, returned in lexicographic
    ``(i, j)`` order. Unreachable pairs are skipped.
    """
    out = []
    for i in range(graph.n_vertices):
        dist, pred = shortest_path_tree(graph, i)
        for j in range(graph.n_vertices):
            if j == i or dist[j] < 0:
                continue
            path = [j]
            while path[-1] != i:
                path.append(pred[path[-1]])
            out.append(tuple(reversed(path)))
    return out
