"""LCS graph distance, the Laplacian graph kernel, and Gram matrices.

The distance between two graphs is the 1-Wasserstein distance between their
path measures under the LCS ground metric; the kernel is
``exp(-lambda * distance)``. Gram matrices are assembled from a dataset-level
distance matrix, so a whole ``lambda`` grid costs one transport sweep.
"""
from __future__ import annotations

import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, EmptyMeasure, EmptyRepresentation, NonConvergenceWarning
from .graph import Dataset
from .lcs import cross_distances
from .representation import FlcsParams, PathMeasure, build_basic, build_fast
from .transport import OTSettings, TransportPlan, transport

__all__ = [
    "KernelParams",
    "DistanceMatrix",
    "GramMatrix",
    "ground_distance_matrix",
    "graph_distance",
    "kernel_value",
    "build_representations",
    "distance_matrix",
    "gram_matrix",
    "save_gram",
    "load_gram",
]

logger = logging.getLogger(__name__)

BLCS = "blcs"
FLCS = "flcs"


@dataclass(frozen=True)
class KernelParams:
    """Everything that determines a Gram matrix.

    ``flcs`` is only meaningful (and only allowed) for the ``"flcs"`` variant.
    """

    variant: str = BLCS
    lam: float = 1.0
    flcs: FlcsParams | None = None
    ot: OTSettings = field(default_factory=OTSettings)

    def __post_init__(self):
        variant = self.variant.lower()
        object.__setattr__(self, "variant", variant)
        if variant not in (BLCS, FLCS):
            raise ConfigError(f"unknown variant {self.variant!r}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigError(f"lambda must be finite and > 0, got {self.lam}")
        if variant == FLCS and self.flcs is None:
            object.__setattr__(self, "flcs", FlcsParams())
        if variant == BLCS and self.flcs is not None:
            raise ConfigError("FLCS parameters (rho, s) given for the BLCS variant")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "lambda": self.lam,
            "rho": self.flcs.removing_ratio if self.flcs else None,
            "s": self.flcs.merging_radius if self.flcs else None,
            "ot": asdict(self.ot),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelParams":
        flcs = None
        if d.get("rho") is not None:
            flcs = FlcsParams(d["rho"], d["s"])
        return cls(d["variant"], d["lambda"], flcs, OTSettings(**d.get("ot", {})))


def ground_distance_matrix(a: PathMeasure, b: PathMeasure) -> np.ndarray:
    """Pairwise LCS distances between the support points of two measures."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyMeasure("ground distances need two non-empty measures")
    return cross_distances(a.packed, b.packed)


def _plan(a: PathMeasure, b: PathMeasure, ot: OTSettings) -> TransportPlan:
    D = ground_distance_matrix(a, b)
    return transport(D, a.weights, b.weights, ot)


def graph_distance(a: PathMeasure, b: PathMeasure, ot: OTSettings = OTSettings()) -> float:
    """Wasserstein distance between two path measures, in ``[0, 1]``."""
    return _plan(a, b, ot).cost


def kernel_value(a: PathMeasure, b: PathMeasure, params: KernelParams) -> float:
    """``exp(-lambda * graph_distance(a, b))``."""
    return math.exp(-params.lam * graph_distance(a, b, params.ot))


def build_representations(dataset: Dataset, params: KernelParams):
    """Path measure of every graph; graphs without any path are reported separately.

    Returns ``(measures, kept_ids, excluded_ids)``.
    """
    measures, kept, excluded = [], [], []
    for g in dataset.graphs:
        try:
            if params.variant == FLCS:
                m = build_fast(g, params.flcs, dataset.has_edge_labels)
            else:
                m = build_basic(g, dataset.has_edge_labels)
        except EmptyRepresentation:
            excluded.append(g.id)
            continue
        measures.append(m)
        kept.append(g.id)
    if excluded:
        logger.warning("excluded %d graph(s) without shortest paths: %s", len(excluded), excluded)
    return measures, kept, excluded


@dataclass
class DistanceMatrix:
    """Symmetric matrix of LCS graph distances over a dataset."""

    values: np.ndarray
    params: KernelParams
    graph_ids: list[int]
    excluded: list[int] = field(default_factory=list)
    warnings: list[tuple[int, int, float]] = field(default_factory=list)
    seconds: float = 0.0
    dataset: str = ""

    def gram(self, lam: float | None = None) -> "GramMatrix":
        lam = self.params.lam if lam is None else lam
        params = KernelParams(self.params.variant, lam, self.params.flcs, self.params.ot)
        return GramMatrix(
            np.exp(-lam * self.values), params, list(self.graph_ids), list(self.excluded),
            list(self.warnings), self.seconds, self.dataset,
        )


@dataclass
class GramMatrix:
    values: np.ndarray
    params: KernelParams
    graph_ids: list[int]
    excluded: list[int] = field(default_factory=list)
    warnings: list[tuple[int, int, float]] = field(default_factory=list)
    seconds: float = 0.0
    dataset: str = ""

    def min_eigenvalue(self) -> float | None:
        """Most negative eigenvalue (PSD diagnostic); ``None`` above 2000 x 2000."""
        if self.values.shape[0] > 2000:
            return None
        return float(np.linalg.eigvalsh(self.values)[0])

    def header(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "dataset": self.dataset,
            "n_graphs": len(self.graph_ids),
            "graph_ids": self.graph_ids,
            "excluded": self.excluded,
            "nonconverged": [[i, j, v] for i, j, v in self.warnings],
            "seconds": self.seconds,
        }


# --- pairwise sweep ----------------------------------------------------------

_WORKER_MEASURES: list[PathMeasure] = []
_WORKER_OT: OTSettings | None = None


def _init_worker(measures, ot):
    global _WORKER_MEASURES, _WORKER_OT
    _WORKER_MEASURES = measures
    _WORKER_OT = ot


def _solve_rows(rows: Sequence[int]):
    """Distances for pairs ``(i, j)``, ``j > i``, of every row ``i`` in ``rows``."""
    ms, ot = _WORKER_MEASURES, _WORKER_OT
    out = []
    for i in rows:
        vals = np.empty(len(ms) - i - 1)
        bad = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonConvergenceWarning)
            for j in range(i + 1, len(ms)):
                plan = _plan(ms[i], ms[j], ot)
                vals[j - i - 1] = plan.cost
                if not plan.converged and plan.violation > 100 * ot.tol:
                    bad.append((i, j, plan.violation))
        out.append((i, vals, bad))
    return out


def _pair_distances(measures: list[PathMeasure], ot: OTSettings, workers: int):
    n = len(measures)
    D = np.zeros((n, n))
    flagged = []
    # interleave rows so chunks carry similar amounts of work
    chunks = [list(range(w, n, max(workers, 1))) for w in range(max(workers, 1))]
    if workers <= 1 or n < 3:
        _init_worker(measures, ot)
        results = [_solve_rows(range(n))]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(measures, ot)) as ex:
            results = list(ex.map(_solve_rows, [c for c in chunks if c]))
    for part in results:
        for i, vals, bad in part:
            D[i, i + 1:] = vals
            D[i + 1:, i] = vals
            flagged.extend(bad)
    flagged.sort()
    return D, flagged


def distance_matrix(dataset: Dataset, params: KernelParams, workers: int = 1) -> DistanceMatrix:
    """Graph distances for every unordered pair; the diagonal is 0 by definition."""
    t0 = time.perf_counter()
    measures, kept, excluded = build_representations(dataset, params)
    D, flagged = _pair_distances(measures, params.ot, workers)
    return DistanceMatrix(
        D, params, kept, excluded,
        [(kept[i], kept[j], v) for i, j, v in flagged],
        time.perf_counter() - t0, dataset.name,
    )


def gram_matrix(dataset: Dataset, params: KernelParams, workers: int = 1) -> GramMatrix:
    """Kernel matrix ``exp(-lambda * d_G)`` over all graphs of ``dataset``.

    Diagonal entries are exactly 1. The result does not depend on ``workers``.
    """
    return distance_matrix(dataset, params, workers).gram()


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


# --- CSV with JSON header ----------------------------------------------------

def save_gram(gram: GramMatrix, path: str | os.PathLike) -> None:
    """Write ``#<json header>`` followed by the matrix as 17-digit CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("#" + json.dumps(gram.header(), sort_keys=True) + "\n")
        np.savetxt(fh, gram.values, fmt="%.17g", delimiter=",")


def read_gram_header(path: str | os.PathLike) -> dict:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise ValueError(f"{path} has no JSON header line")
    return json.loads(first[1:])


def load_gram(path: str | os.PathLike) -> GramMatrix:
    header = read_gram_header(path)
    values = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return GramMatrix(
        values,
        KernelParams.from_dict(header["params"]),
        header["graph_ids"],
        header["excluded"],
        [tuple(w) for w in header.get("nonconverged", [])],
        header.get("seconds", 0.0),
        header.get("dataset", ""),
    )
