"""Reference implementations for testing the engines.

Nothing here touches the engines' scan, hashtable or aggregation code:
graphs are turned into plain dict adjacency and processed in pure Python.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import CsrGraph
from .louvain_mc import LouvainParams, LouvainResult, PassStats
from .quality import DegenerateGraphError, delta_modularity

MAX_EXHAUSTIVE_VERTICES = 10


@dataclass
class OracleReport:
    best_q: float
    best_partition: np.ndarray
    method: str


def _adjacency(g: CsrGraph) -> list[dict[int, float]]:
    adj: list[dict[int, float]] = [dict() for _ in range(g.num_vertices)]
    for i in range(g.num_vertices):
        lo, hi = int(g.offsets[i]), int(g.offsets[i + 1])
        row = adj[i]
        for j, w in zip(g.edges[lo:hi].tolist(), g.weights[lo:hi].tolist()):
            row[j] = row.get(j, 0.0) + w
    return adj


def bruteforce_modularity(g: CsrGraph, membership) -> float:
    """Modularity straight from its definition, one arc at a time."""
    c = [int(x) for x in membership]
    two_m = 0.0
    internal = 0.0
    totals: dict[int, float] = {}
    for i, row in enumerate(_adjacency(g)):
        for j, w in row.items():
            two_m += w
            totals[c[i]] = totals.get(c[i], 0.0) + w
            if c[i] == c[j]:
                internal += w
    if two_m <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    return internal / two_m - sum((t / two_m) ** 2 for t in totals.values())


def check_delta(g: CsrGraph, c, i: int, target: int) -> tuple[float, float]:
    """Delta-modularity formula vs. recomputing modularity before and after."""
    c = [int(x) for x in c]
    adj = _adjacency(g)
    k = [sum(row.values()) for row in adj]
    d = c[i]
    k_to = {}
    for j, w in adj[i].items():
        if j != i:
            k_to[c[j]] = k_to.get(c[j], 0.0) + w
    sigma: dict[int, float] = {}
    for v, kv in enumerate(k):
        sigma[c[v]] = sigma.get(c[v], 0.0) + kv
    sigma_c = sigma.get(target, 0.0) - (k[i] if target == d else 0.0)
    formula = delta_modularity(k_to.get(target, 0.0), k_to.get(d, 0.0), k[i], sigma_c,
                               sigma[d], g.total_weight)
    moved = list(c)
    moved[i] = target
    direct = bruteforce_modularity(g, moved) - bruteforce_modularity(g, c)
    return float(formula), float(direct)


def _restricted_growth_strings(n: int) -> np.ndarray:
    """Every set partition of ``n`` items as a canonical label row, in
    lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        choices = top.astype(np.int64) + 2
        rep = np.repeat(np.arange(rows.shape[0]), choices)
        starts = np.repeat(np.cumsum(choices) - choices, choices)
        pick = (np.arange(rep.size) - starts).astype(np.int8)
        rows = np.column_stack([rows[rep], pick])
        top = np.maximum(top[rep], pick)
    return rows


def exhaustive_best_partition(g: CsrGraph) -> OracleReport:
    """Highest-modularity partition by enumerating all set partitions.

    Ties within 1e-12 go to the lexicographically smallest labelling.
    """
    n = g.num_vertices
    if n > MAX_EXHAUSTIVE_VERTICES:
        raise ValueError(f"exhaustive search is capped at {MAX_EXHAUSTIVE_VERTICES} vertices")
    adj = _adjacency(g)
    two_m = sum(sum(row.values()) for row in adj)
    if two_m <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    k = np.array([sum(row.values()) for row in adj])
    labels = _restricted_growth_strings(n)
    internal = np.zeros(labels.shape[0])
    for i, row in enumerate(adj):
        for j, w in row.items():
            internal += w * (labels[:, i] == labels[:, j])
    expected = np.zeros(labels.shape[0])
    for label in range(n):
        s = (labels == label) @ k
        expected += s * s
    q = internal / two_m - expected / (two_m * two_m)
    best = int(np.flatnonzero(q >= q.max() - 1e-12)[0])
    return OracleReport(float(q[best]), labels[best].astype(np.uint32), "exhaustive")


def sequential_louvain(g: CsrGraph, p: LouvainParams | None = None,
                       track_modularity: bool = False) -> LouvainResult:
    """Single-threaded Louvain visiting vertices in ascending order.

    Same pass structure, tolerances, pruning and tie-breaking as the
    engines, so results are reproducible run to run.
    """
    p = p or LouvainParams(thread_count=1)
    m = g.total_weight
    if m <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    t_start = time.perf_counter()
    t_move = t_aggr = 0.0
    adj = _adjacency(g)
    top = list(range(g.num_vertices))
    tau = p.initial_tolerance
    stats: list[PassStats] = []
    pass_times: list[float] = []
    comm: list[int] | None = None
    for _ in range(p.max_passes):
        t_pass = time.perf_counter()
        n = len(adj)
        k = [sum(row.values()) for row in adj]
        sigma = list(k)
        comm = list(range(n))
        unprocessed = [True] * n
        history: list[float] = []
        moves = 0
        min_gain = float("inf")
        t0 = time.perf_counter()
        for _ in range(p.max_iterations):
            dq = 0.0
            for i in range(n):
                if p.prune and not unprocessed[i]:
                    continue
                unprocessed[i] = False
                links: dict[int, float] = {}
                order: list[int] = []
                for j, w in adj[i].items():
                    if j == i or w == 0:
                        continue
                    if comm[j] not in links:
                        order.append(comm[j])
                        links[comm[j]] = 0.0
                    links[comm[j]] += w
                d = comm[i]
                best_c, best_g = d, 0.0
                for cand in order:
                    if cand == d:
                        continue
                    gain = delta_modularity(links[cand], links.get(d, 0.0), k[i], sigma[cand],
                                            sigma[d], m)
                    if gain > best_g or (gain == best_g and gain > 0 and cand < best_c):
                        best_c, best_g = cand, gain
                if best_c == d:
                    continue
                sigma[d] -= k[i]
                sigma[best_c] += k[i]
                comm[i] = best_c
                dq += best_g
                moves += 1
                min_gain = min(min_gain, best_g)
                for j in adj[i]:
                    unprocessed[j] = True
            history.append(dq)
            if dq <= tau:
                break
        t_move += time.perf_counter() - t0
        after = len(set(comm))
        ps = PassStats(len(history), history, moves, min_gain, n, after, tau)
        stats.append(ps)
        if track_modularity:
            ps.modularity = bruteforce_modularity(g, [comm[x] for x in top])
        if len(history) <= 1 or after / n > p.aggregation_tolerance:
            pass_times.append(time.perf_counter() - t_pass)
            break
        rank = {old: new for new, old in enumerate(sorted(set(comm)))}
        comm = [rank[x] for x in comm]
        top = [comm[x] for x in top]
        t0 = time.perf_counter()
        merged: list[dict[int, float]] = [dict() for _ in range(len(rank))]
        for i, row in enumerate(adj):
            ci = comm[i]
            for j, w in row.items():
                merged[ci][comm[j]] = merged[ci].get(comm[j], 0.0) + w
        adj = merged
        comm = None
        t_aggr += time.perf_counter() - t0
        ps.aggregated = True
        tau /= p.tolerance_drop
        pass_times.append(time.perf_counter() - t_pass)
    if comm is not None:
        top = [comm[x] for x in top]
    rank = {old: new for new, old in enumerate(sorted(set(top)))}
    membership = np.array([rank[x] for x in top], dtype=np.uint32)
    q = bruteforce_modularity(g, membership)
    total = time.perf_counter() - t_start
    phase_times = {
        "local_moving": t_move,
        "aggregation": t_aggr,
        "other": max(total - t_move - t_aggr, 0.0),
    }
    return LouvainResult(membership, q, len(stats), [s.iterations for s in stats], phase_times,
                         pass_times, stats)
