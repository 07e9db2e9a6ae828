"""A graph as a discrete measure over its serialized shortest paths.

``build_basic`` keeps every distinct path sequence with its multiplicity.
``build_fast`` first drops sequences shorter than ``rho * L_max`` and then
greedily merges each remaining sequence into its nearest center when that
center lies within LCS distance ``s``; a merged center is represented by the
longer of the two sequences and its mass grows by one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, EmptyRepresentation
from .graph import Graph
from .lcs import _nearest, pack
from .paths import all_pairs_shortest_paths
from .serialize import serialize_path

__all__ = [
    "PathMeasure",
    "FlcsParams",
    "path_sequences",
    "build_basic",
    "build_fast",
    "remove_fragments",
    "merge_adjacent",
]

# ``len >= rho * L_max`` on integer lengths; absorbs float error in rho * L_max
_LEN_SLACK = 1e-9


@dataclass(frozen=True)
class FlcsParams:
    removing_ratio: float = 0.8
    merging_radius: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.removing_ratio <= 1.0:
            raise ConfigError(f"removing_ratio must lie in [0, 1], got {self.removing_ratio}")
        if not 0.0 <= self.merging_radius <= 1.0:
            raise ConfigError(f"merging_radius must lie in [0, 1], got {self.merging_radius}")


@dataclass(frozen=True)
class PathMeasure:
    """Distinct path sequences with positive integer masses."""

    sequences: tuple[tuple[int, ...], ...]
    masses: tuple[int, ...]

    def __post_init__(self):
        if len(self.sequences) != len(self.masses):
            raise ValueError("sequences and masses differ in length")
        if any(m < 1 for m in self.masses):
            raise ValueError("masses must be >= 1")

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def total_mass(self) -> int:
        return sum(self.masses)

    @cached_property
    def packed(self) -> tuple[np.ndarray, np.ndarray]:
        return pack(self.sequences)

    @cached_property
    def weights(self) -> np.ndarray:
        """Masses normalized to a probability vector."""
        m = np.asarray(self.masses, dtype=np.float64)
        return m / m.sum()

    def as_multiset(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for s, m in zip(self.sequences, self.masses):
            out[s] = out.get(s, 0) + m
        return out

    def length_histogram(self) -> dict[int, int]:
        """Total mass per sequence length."""
        hist: dict[int, int] = {}
        for s, m in zip(self.sequences, self.masses):
            hist[len(s)] = hist.get(len(s), 0) + m
        return dict(sorted(hist.items()))

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"seq": list(s), "mass": m}) + "\n"
            for s, m in zip(self.sequences, self.masses)
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "PathMeasure":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        return cls(tuple(tuple(r["seq"]) for r in rows), tuple(r["mass"] for r in rows))

    # the packed cache is rebuilt on demand after unpickling
    def __getstate__(self):
        return {"sequences": self.sequences, "masses": self.masses}

    def __setstate__(self, state):
        object.__setattr__(self, "sequences", state["sequences"])
        object.__setattr__(self, "masses", state["masses"])


def path_sequences(graph: Graph, use_edge_labels: bool | None = None) -> list[tuple[int, ...]]:
    """Serialized shortest paths of ``graph`` in ``(i, j)`` enumeration order."""
    return [serialize_path(graph, p, use_edge_labels) for p in all_pairs_shortest_paths(graph)]


def _dedup(sequences: Iterable[tuple[int, ...]]) -> PathMeasure:
    index: dict[tuple[int, ...], int] = {}
    seqs: list[tuple[int, ...]] = []
    masses: list[int] = []
    for x in sequences:
        k = index.get(x)
        if k is None:
            index[x] = len(seqs)
            seqs.append(x)
            masses.append(1)
        else:
            masses[k] += 1
    return PathMeasure(tuple(seqs), tuple(masses))


def build_basic(graph: Graph, use_edge_labels: bool | None = None) -> PathMeasure:
    """All serialized shortest paths, deduplicated, with multiplicities as masses."""
    seqs = path_sequences(graph, use_edge_labels)
    if not seqs:
        raise EmptyRepresentation(f"graph {graph.id} has no shortest paths")
    return _dedup(seqs)


def remove_fragments(sequences: Sequence[tuple[int, ...]], removing_ratio: float) -> list[tuple[int, ...]]:
    """Keep the sequences whose length is at least ``removing_ratio`` times the longest."""
    if not sequences:
        return []
    threshold = removing_ratio * max(len(x) for x in sequences) - _LEN_SLACK
    return [x for x in sequences if len(x) >= threshold]


def merge_adjacent(sequences: Iterable[tuple[int, ...]], merging_radius: float) -> PathMeasure:
    """Greedy radius merging of a stream of unit-mass sequences.

    Each sequence joins its nearest center (lowest index on ties) if their
    LCS distance is at most ``merging_radius``; the center then takes the
    longer of the two as representative. Otherwise it opens a new center.
    """
    seqs = [tuple(x) for x in sequences]
    if not seqs:
        return PathMeasure((), ())
    # append-only label buffer; a replaced representative is re-appended
    buf = np.empty(sum(len(x) for x in seqs), dtype=np.int32)
    starts = np.empty(len(seqs), dtype=np.int64)
    ends = np.empty(len(seqs), dtype=np.int64)
    top = 0
    reps: list[tuple[int, ...]] = []
    masses: list[int] = []
    for x in seqs:
        xa = np.asarray(x, dtype=np.int32)
        k = len(reps)
        if k:
            j, d = _nearest(xa, buf, starts, ends, k)
            if d <= merging_radius:
                masses[j] += 1
                if len(x) > len(reps[j]):
                    reps[j] = x
                    buf[top:top + len(x)] = xa
                    starts[j], ends[j] = top, top + len(x)
                    top += len(x)
                continue
        buf[top:top + len(x)] = xa
        starts[k], ends[k] = top, top + len(x)
        top += len(x)
        reps.append(x)
        masses.append(1)
    return PathMeasure(tuple(reps), tuple(masses))


def build_fast(graph: Graph, params: FlcsParams, use_edge_labels: bool | None = None) -> PathMeasure:
    """Fragment removal followed by adjacent point merging."""
    seqs = path_sequences(graph, use_edge_labels)
    kept = remove_fragments(seqs, params.removing_ratio)
    if not kept:
        raise EmptyRepresentation(f"graph {graph.id} has no shortest paths")
    return merge_adjacent(kept, params.merging_radius)
