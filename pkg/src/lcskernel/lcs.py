"""Longest common subsequence and the LCS distance between label sequences.

``distance(x, y) = 1 - lcs(x, y) / max(len(x), len(y))`` is a metric on
non-empty sequences. It is evaluated as ``(M - L) / M`` with integers
``M`` and ``L`` so that the float is the correctly rounded value of the
exact rational, in particular exactly 0 iff the sequences are equal.

Batches of sequences are handled in a packed layout: one flat ``int32``
array of all labels plus an ``int64`` offsets array of length ``n + 1``.
"""
from __future__ import annotations

from typing import Sequence

import numba
import numpy as np

from .errors import EmptySequence

__all__ = [
    "lcs_length",
    "lcstr_length",
    "path_similarity",
    "lcs_distance",
    "pack",
    "cross_distances",
]


@numba.njit(cache=True, nogil=True)
def _lcs(a, a0, a1, b, b0, b1, row):
    # row holds len(b)+1 counters; one rolling row plus a scalar diagonal
    m = b1 - b0
    for j in range(m + 1):
        row[j] = 0
    for i in range(a0, a1):
        ai = a[i]
        diag = 0
        for j in range(1, m + 1):
            up = row[j]
            if ai == b[b0 + j - 1]:
                row[j] = diag + 1
            elif row[j - 1] > up:
                row[j] = row[j - 1]
            diag = up
    return row[m]


@numba.njit(cache=True, nogil=True)
def _lcstr(a, b):
    n, m = a.shape[0], b.shape[0]
    row = np.zeros(m + 1, dtype=np.int32)
    best = 0
    for i in range(n):
        diag = 0
        for j in range(1, m + 1):
            up = row[j]
            if a[i] == b[j - 1]:
                row[j] = diag + 1
                if row[j] > best:
                    best = row[j]
            else:
                row[j] = 0
            diag = up
    return best


@numba.njit(cache=True, nogil=True)
def _cross_distances(va, oa, vb, ob):
    na = oa.shape[0] - 1
    nb = ob.shape[0] - 1
    out = np.empty((na, nb), dtype=np.float64)
    maxlen = 0
    for j in range(nb):
        if ob[j + 1] - ob[j] > maxlen:
            maxlen = ob[j + 1] - ob[j]
    row = np.empty(maxlen + 1, dtype=np.int32)
    for i in range(na):
        la = oa[i + 1] - oa[i]
        for j in range(nb):
            lb = ob[j + 1] - ob[j]
            big = la if la > lb else lb
            common = _lcs(va, oa[i], oa[i + 1], vb, ob[j], ob[j + 1], row)
            out[i, j] = (big - common) / big
    return out


@numba.njit(cache=True, nogil=True)
def _nearest(x, vals, starts, ends, k):
    """Index and distance of the closest of ``k`` sequences ``vals[starts[j]:ends[j]]``."""
    lx = x.shape[0]
    row = np.empty(lx + 1, dtype=np.int32)
    best = -1
    best_d = np.inf
    for j in range(k):
        lb = ends[j] - starts[j]
        big = lx if lx > lb else lb
        common = _lcs(vals, starts[j], ends[j], x, 0, lx, row)
        d = (big - common) / big
        if d < best_d:
            best_d = d
            best = j
    return best, best_d


def _as_array(x: Sequence[int]) -> np.ndarray:
    return np.asarray(x, dtype=np.int32).reshape(-1)


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of a longest common subsequence of ``a`` and ``b``."""
    a, b = _as_array(a), _as_array(b)
    row = np.empty(b.shape[0] + 1, dtype=np.int32)
    return int(_lcs(a, 0, a.shape[0], b, 0, b.shape[0], row))


def lcstr_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of a longest common contiguous run (substring) of ``a`` and ``b``."""
    return int(_lcstr(_as_array(a), _as_array(b)))


def path_similarity(a: Sequence[int], b: Sequence[int]) -> float:
    """``lcs(a, b) / max(len(a), len(b))``, in ``[0, 1]``."""
    big = max(len(a), len(b))
    if len(a) == 0 or len(b) == 0:
        raise EmptySequence("similarity needs two non-empty sequences")
    return lcs_length(a, b) / big


def lcs_distance(a: Sequence[int], b: Sequence[int]) -> float:
    """``1 - path_similarity(a, b)``, in ``[0, 1]``."""
    if len(a) == 0 or len(b) == 0:
        raise EmptySequence("distance needs two non-empty sequences")
    big = max(len(a), len(b))
    return (big - lcs_length(a, b)) / big


def pack(sequences: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Pack sequences into ``(values, offsets)``."""
    offsets = np.zeros(len(sequences) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(s) for s in sequences])
    values = np.fromiter(
        (x for s in sequences for x in s), dtype=np.int32, count=int(offsets[-1])
    )
    return values, offsets


def cross_distances(a, b) -> np.ndarray:
    """Matrix of LCS distances between two collections of sequences.

    Each argument is either a sequence of sequences or an already packed
    ``(values, offsets)`` pair.
    """
    va, oa = a if _is_packed(a) else pack(a)
    vb, ob = b if _is_packed(b) else pack(b)
    return _cross_distances(va, oa, vb, ob)


def _is_packed(x) -> bool:
    return (
        isinstance(x, tuple)
        and len(x) == 2
        and isinstance(x[0], np.ndarray)
        and isinstance(x[1], np.ndarray)
    )
