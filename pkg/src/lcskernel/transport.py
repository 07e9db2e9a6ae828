"""Discrete optimal transport between two weighted point sets.

Two solvers share the :class:`TransportPlan` result type:

* :func:`exact_emd` solves the transportation linear program with a
  primal network simplex on the complete bipartite graph (north-west corner
  start, block-search pricing, Bland's rule while pivots stay degenerate).
* :func:`sinkhorn` runs log-domain Sinkhorn scaling for the entropically
  regularized problem. The log domain is required: with ``eps = 0.01`` and
  costs near 1, ``exp(-C / eps)`` underflows.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .errors import BadMarginals, ConfigError, NonConvergenceWarning, TooLarge

__all__ = [
    "TransportPlan",
    "OTSettings",
    "check_marginals",
    "exact_emd",
    "sinkhorn",
    "transport",
]

MARGINAL_SUM_TOL = 1e-12
DEFAULT_EXACT_CAP = 250_000


@dataclass(frozen=True)
class TransportPlan:
    coupling: np.ndarray
    cost: float
    solver: str = "exact"
    converged: bool = True
    violation: float = 0.0
    n_iter: int = 0


@dataclass(frozen=True)
class OTSettings:
    """Solver choice and tuning for ground-distance transport problems.

    Problems with ``n1 * n2 <= exact_max_size`` use :func:`exact_emd`,
    larger ones :func:`sinkhorn`.
    """

    epsilon: float = 0.01
    tol: float = 1e-9
    max_iter: int = 10_000
    exact_max_size: int = DEFAULT_EXACT_CAP
    exact_cap: int = DEFAULT_EXACT_CAP

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.exact_max_size > self.exact_cap:
            raise ConfigError("exact_max_size cannot exceed exact_cap")


def check_marginals(D, p, q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    D = np.asarray(D, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    if D.ndim != 2 or D.shape != (p.size, q.size):
        raise BadMarginals(f"cost matrix {D.shape} does not match marginals ({p.size}, {q.size})")
    for name, v in (("p", p), ("q", q)):
        if v.size == 0:
            raise BadMarginals(f"{name} is empty")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise BadMarginals(f"{name} has negative or non-finite entries")
        if abs(v.sum() - 1.0) > MARGINAL_SUM_TOL:
            raise BadMarginals(f"{name} sums to {v.sum()!r}, not 1")
    return D, p, q


# --- network simplex ---------------------------------------------------------

@numba.njit(cache=True)
def _northwest(p, q, bi, bj, flow):
    n1, n2 = p.shape[0], q.shape[0]
    sup = p.copy()
    dem = q.copy()
    i = 0
    j = 0
    for k in range(n1 + n2 - 1):
        x = min(sup[i], dem[j])
        if x < 0.0:
            x = 0.0
        bi[k] = i
        bj[k] = j
        flow[k] = x
        sup[i] -= x
        dem[j] -= x
        if i == n1 - 1:
            j += 1
        elif j == n2 - 1:
            i += 1
        elif sup[i] <= dem[j]:
            i += 1
        else:
            j += 1


@numba.njit(cache=True)
def _build_tree(n1, n2, bi, bj, C, deg, start, nbr, arc, parent, parent_arc, depth, pot, queue):
    n = n1 + n2
    m = n - 1
    for v in range(n + 1):
        deg[v] = 0
    for k in range(m):
        deg[bi[k]] += 1
        deg[n1 + bj[k]] += 1
    start[0] = 0
    for v in range(n):
        start[v + 1] = start[v] + deg[v]
        deg[v] = start[v]
    for k in range(m):
        a = bi[k]
        b = n1 + bj[k]
        nbr[deg[a]] = b
        arc[deg[a]] = k
        deg[a] += 1
        nbr[deg[b]] = a
        arc[deg[b]] = k
        deg[b] += 1
    for v in range(n):
        parent[v] = -2
    parent[0] = -1
    parent_arc[0] = -1
    depth[0] = 0
    pot[0] = 0.0
    head = 0
    tail = 1
    queue[0] = 0
    while head < tail:
        u = queue[head]
        head += 1
        for t in range(start[u], start[u + 1]):
            v = nbr[t]
            if parent[v] == -2:
                k = arc[t]
                parent[v] = u
                parent_arc[v] = k
                depth[v] = depth[u] + 1
                pot[v] = C[bi[k], bj[k]] - pot[u]
                queue[tail] = v
                tail += 1
    return tail


@numba.njit(cache=True)
def _flows_from_tree(n1, n2, bi, bj, p, q, flow, deg, start, nbr, arc, queue):
    """Recompute basic flows from the tree structure by peeling leaves."""
    n = n1 + n2
    m = n - 1
    rem = np.empty(n, dtype=np.float64)
    for i in range(n1):
        rem[i] = p[i]
    for j in range(n2):
        rem[n1 + j] = q[j]
    live = np.zeros(n, dtype=np.int64)
    for v in range(n):
        live[v] = start[v + 1] - start[v]
    done = np.zeros(m, dtype=np.bool_)
    head = 0
    tail = 0
    for v in range(n):
        if live[v] == 1:
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        if live[v] != 1:
            continue
        for t in range(start[v], start[v + 1]):
            k = arc[t]
            if not done[k]:
                x = rem[v]
                if x < 0.0:
                    x = 0.0
                flow[k] = x
                done[k] = True
                u = nbr[t]
                rem[u] -= x
                live[v] -= 1
                live[u] -= 1
                if live[u] == 1:
                    queue[tail] = u
                    tail += 1
                break


@numba.njit(cache=True)
def _network_simplex(C, p, q, max_iter):
    n1, n2 = C.shape
    n = n1 + n2
    m = n - 1
    bi = np.empty(m, dtype=np.int64)
    bj = np.empty(m, dtype=np.int64)
    flow = np.empty(m, dtype=np.float64)
    _northwest(p, q, bi, bj, flow)

    deg = np.empty(n + 1, dtype=np.int64)
    start = np.empty(n + 1, dtype=np.int64)
    nbr = np.empty(2 * m, dtype=np.int64)
    arc = np.empty(2 * m, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    parent_arc = np.empty(n, dtype=np.int64)
    depth = np.empty(n, dtype=np.int64)
    pot = np.empty(n, dtype=np.float64)
    queue = np.empty(n, dtype=np.int64)
    cyc_arc = np.empty(n, dtype=np.int64)
    na_stack = np.empty(n, dtype=np.int64)

    scale = 0.0
    for i in range(n1):
        for j in range(n2):
            a = abs(C[i, j])
            if a > scale:
                scale = a
    eps = 1e-12 * (1.0 + scale)
    total = n1 * n2
    block = max(int(math.sqrt(total)), 16)
    cursor = 0
    degenerate_run = 0
    bland = False
    it = 0
    while it < max_iter:
        it += 1
        _build_tree(n1, n2, bi, bj, C, deg, start, nbr, arc, parent, parent_arc, depth, pot, queue)

        # pricing
        enter = -1
        best = -eps
        if bland:
            for e in range(total):
                i = e // n2
                j = e - i * n2
                if C[i, j] - pot[i] - pot[n1 + j] < -eps:
                    enter = e
                    break
        else:
            scanned = 0
            e = cursor
            in_block = 0
            while scanned < total:
                i = e // n2
                j = e - i * n2
                r = C[i, j] - pot[i] - pot[n1 + j]
                if r < best:
                    best = r
                    enter = e
                scanned += 1
                in_block += 1
                e += 1
                if e == total:
                    e = 0
                if in_block == block:
                    if enter >= 0:
                        break
                    in_block = 0
            cursor = e
        if enter < 0:
            break

        ei = enter // n2
        ej = enter - ei * n2
        # cycle: from column node up to the common ancestor, then down to the row node
        a = ei
        b = n1 + ej
        nb = 0
        na = 0
        while depth[b] > depth[a]:
            cyc_arc[nb] = parent_arc[b]
            nb += 1
            b = parent[b]
        while depth[a] > depth[b]:
            na_stack[na] = parent_arc[a]
            na += 1
            a = parent[a]
        while a != b:
            cyc_arc[nb] = parent_arc[b]
            nb += 1
            b = parent[b]
            na_stack[na] = parent_arc[a]
            na += 1
            a = parent[a]
        length = nb
        for t in range(na - 1, -1, -1):
            cyc_arc[length] = na_stack[t]
            length += 1
        # arcs alternate -, +, -, ... starting next to the entering column
        theta = np.inf
        leave = -1
        leave_key = total
        for t in range(0, length, 2):
            k = cyc_arc[t]
            key = bi[k] * n2 + bj[k]
            if flow[k] < theta or (flow[k] == theta and key < leave_key):
                theta = flow[k]
                leave = k
                leave_key = key
        for t in range(length):
            k = cyc_arc[t]
            if t % 2 == 0:
                flow[k] -= theta
            else:
                flow[k] += theta
        bi[leave] = ei
        bj[leave] = ej
        flow[leave] = theta
        if theta <= 0.0:
            degenerate_run += 1
            if degenerate_run > n:
                bland = True
        else:
            degenerate_run = 0
            bland = False

    _build_tree(n1, n2, bi, bj, C, deg, start, nbr, arc, parent, parent_arc, depth, pot, queue)
    _flows_from_tree(n1, n2, bi, bj, p, q, flow, deg, start, nbr, arc, queue)
    T = np.zeros((n1, n2), dtype=np.float64)
    for k in range(m):
        T[bi[k], bj[k]] += flow[k]
    return T, it


def exact_emd(D, p, q, cap: int = DEFAULT_EXACT_CAP, max_iter: int | None = None) -> TransportPlan:
    """Exact optimal transport plan for cost ``D`` and marginals ``p``, ``q``.

    Raises
    ------
    TooLarge
        If ``D.size`` exceeds ``cap``.
    BadMarginals
        If ``p`` or ``q`` is not a probability vector matching ``D``.
    """
    D, p, q = check_marginals(D, p, q)
    if D.size > cap:
        raise TooLarge(f"{D.shape[0]}x{D.shape[1]} problem exceeds the exact-solver cap {cap}")
    if max_iter is None:
        max_iter = 50 * D.size + 1000
    T, it = _network_simplex(np.ascontiguousarray(D), p, q, max_iter)
    if it >= max_iter:
        raise RuntimeError(f"network simplex hit the pivot limit ({max_iter})")
    return TransportPlan(T, float(np.sum(T * D)), "exact", True, _violation(T, p, q), it)


# --- Sinkhorn ----------------------------------------------------------------

@numba.njit(cache=True)
def _sinkhorn_log(C, logp, logq, eps, tol, max_iter, check_every):
    n1, n2 = C.shape
    f = np.zeros(n1)
    g = np.zeros(n2)
    viol = np.inf
    it = 0
    while it < max_iter:
        it += 1
        for i in range(n1):
            mx = -np.inf
            for j in range(n2):
                v = (g[j] - C[i, j]) / eps
                if v > mx:
                    mx = v
            s = 0.0
            for j in range(n2):
                s += math.exp((g[j] - C[i, j]) / eps - mx)
            f[i] = eps * (logp[i] - mx - math.log(s))
        for j in range(n2):
            mx = -np.inf
            for i in range(n1):
                v = (f[i] - C[i, j]) / eps
                if v > mx:
                    mx = v
            s = 0.0
            for i in range(n1):
                s += math.exp((f[i] - C[i, j]) / eps - mx)
            g[j] = eps * (logq[j] - mx - math.log(s))
        if it % check_every == 0 or it == max_iter:
            viol = 0.0
            for i in range(n1):
                s = 0.0
                for j in range(n2):
                    s += math.exp((f[i] + g[j] - C[i, j]) / eps)
                d = abs(s - math.exp(logp[i]))
                if d > viol:
                    viol = d
            for j in range(n2):
                s = 0.0
                for i in range(n1):
                    s += math.exp((f[i] + g[j] - C[i, j]) / eps)
                d = abs(s - math.exp(logq[j]))
                if d > viol:
                    viol = d
            if viol <= tol:
                break
    T = np.empty((n1, n2))
    for i in range(n1):
        for j in range(n2):
            T[i, j] = math.exp((f[i] + g[j] - C[i, j]) / eps)
    return T, it, viol


def sinkhorn(D, p, q, epsilon: float = 0.01, tol: float = 1e-9, max_iter: int = 10_000,
             check_every: int = 10) -> TransportPlan:
    """Entropic transport plan by log-domain Sinkhorn iterations.

    Stops once the largest row or column marginal error is ``<= tol``. If
    ``max_iter`` is reached with an error above ``100 * tol`` a
    :class:`NonConvergenceWarning` is emitted and the plan is flagged.
    """
    D, p, q = check_marginals(D, p, q)
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    # zero-mass points carry no coupling; drop them so the logs stay finite
    rows = np.flatnonzero(p > 0)
    cols = np.flatnonzero(q > 0)
    sub = np.ascontiguousarray(D[np.ix_(rows, cols)])
    Ts, it, viol = _sinkhorn_log(sub, np.log(p[rows]), np.log(q[cols]), float(epsilon),
                                 float(tol), int(max_iter), int(check_every))
    T = np.zeros(D.shape)
    T[np.ix_(rows, cols)] = Ts
    converged = viol <= tol
    if not converged and viol > 100 * tol:
        warnings.warn(
            f"Sinkhorn stopped after {it} iterations with marginal violation {viol:.3g}",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return TransportPlan(T, float(np.sum(T * D)), "sinkhorn", bool(converged), float(viol), int(it))


def _violation(T, p, q) -> float:
    return float(max(np.max(np.abs(T.sum(axis=1) - p)), np.max(np.abs(T.sum(axis=0) - q))))


def transport(D, p, q, settings: OTSettings = OTSettings()) -> TransportPlan:
    """Solve with the exact solver on small problems, Sinkhorn on large ones."""
    D = np.asarray(D, dtype=np.float64)
    if D.size <= settings.exact_max_size:
        return exact_emd(D, p, q, cap=settings.exact_cap)
    return sinkhorn(D, p, q, settings.epsilon, settings.tol, settings.max_iter)
