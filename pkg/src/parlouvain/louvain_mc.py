"""Multicore Louvain with per-thread Far-KV scratch tables.

Local moving is asynchronous: workers share one membership array and
update community totals with atomic adds. Membership writes and the
"unprocessed" marks are plain stores, so multi-threaded runs are not
reproducible label-for-label; single-threaded runs are.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from numba import get_thread_id, njit, prange

from . import _runtime
from ._atomics import atomic_add
from .graph import CsrGraph, HoleyCsr, compact_holey
from .primitives import (
    community_total_degree,
    community_vertices,
    exclusive_scan,
    lookup_dendrogram,
    renumber_communities,
    scan_offsets,
)
from .quality import DegenerateGraphError, modularity

__all__ = [
    "LouvainParams",
    "LouvainResult",
    "FarKvScratch",
    "louvain",
    "louvain_move",
    "louvain_aggregate",
    "scan_communities",
    "best_community",
    "renumber_communities",
    "lookup_dendrogram",
    "exclusive_scan",
]

log = logging.getLogger(__name__)


@dataclass
class LouvainParams:
    max_passes: int = 10
    max_iterations: int = 20
    initial_tolerance: float = 0.01
    tolerance_drop: float = 10.0
    aggregation_tolerance: float = 0.8
    thread_count: int = field(default_factory=_runtime.default_threads)
    chunk_size: int = 2048
    # Off means every vertex is visited in every iteration.
    prune: bool = True

    def __post_init__(self):
        if self.max_passes < 0:
            raise ValueError("max_passes must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance_drop < 1:
            raise ValueError("tolerance_drop must be >= 1")
        if not 0 < self.aggregation_tolerance <= 1:
            raise ValueError("aggregation_tolerance must lie in (0, 1]")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")


@dataclass
class PassStats:
    iterations: int
    delta_q: list[float]
    moves: int
    min_gain: float
    communities_before: int
    communities_after: int
    tolerance: float
    aggregated: bool = False
    modularity: float | None = None


@dataclass
class LouvainResult:
    membership: np.ndarray
    modularity: float
    passes: int
    iterations_per_pass: list[int]
    phase_times: dict[str, float]
    pass_times: list[float]
    pass_stats: list[PassStats] = field(default_factory=list)

    @property
    def communities(self) -> int:
        return int(self.membership.max()) + 1 if self.membership.size else 0

    @property
    def tolerances(self) -> list[float]:
        return [s.tolerance for s in self.pass_stats]

    @property
    def total_time(self) -> float:
        return sum(self.phase_times.values())


class WorkGraph(NamedTuple):
    """CSR view used inside the passes; ``degrees`` may be smaller than the
    allocated span, as in a holey CSR."""

    offsets: np.ndarray
    degrees: np.ndarray
    edges: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.degrees.size

    @classmethod
    def from_csr(cls, g: CsrGraph) -> "WorkGraph":
        return cls(g.offsets, np.diff(g.offsets), g.edges, g.weights)

    def to_csr(self, total_weight: float = -1.0) -> CsrGraph:
        h = HoleyCsr(self.offsets, self.edges, self.weights, self.degrees)
        return compact_holey(h, total_weight)


# --- Far-KV scratch ---------------------------------------------------------


@njit(cache=True)
def _farkv_scan(offsets, degrees, edges, weights, c, i, include_self, keys, values, n_live):
    start = offsets[i]
    for e in range(start, start + degrees[i]):
        j = edges[e]
        if j == i and not include_self:
            continue
        w = weights[e]
        if w == 0:
            continue
        d = c[j]
        if values[d] == 0.0:
            keys[n_live] = d
            n_live += 1
        values[d] += w
    return n_live


@njit(cache=True)
def _farkv_clear(keys, values, n_live):
    for t in range(n_live):
        values[keys[t]] = 0.0


@njit(cache=True)
def _farkv_best(keys, values, n_live, ci, ki, sigma, m):
    k_to_d = values[ci]
    sigma_d = sigma[ci]
    best_c = ci
    best_g = 0.0
    for t in range(n_live):
        d = keys[t]
        if d == ci:
            continue
        g = (values[d] - k_to_d) / m - ki / (2.0 * m * m) * (ki + sigma[d] - sigma_d)
        if g > best_g or (g == best_g and g > 0.0 and d < best_c):
            best_c = d
            best_g = g
    return best_c, best_g


@dataclass
class FarKvScratch:
    """Collision-free map for one worker: a key list plus a dense value array
    indexed directly by community id. Clearing touches only listed keys."""

    keys: np.ndarray
    values: np.ndarray
    count: int = 0

    @classmethod
    def allocate(cls, n: int) -> "FarKvScratch":
        return cls(np.zeros(max(n, 1), dtype=np.uint32), np.zeros(max(n, 1), dtype=np.float64))

    def clear(self) -> None:
        _farkv_clear(self.keys, self.values, self.count)
        self.count = 0

    def items(self) -> dict[int, float]:
        return {int(k): float(self.values[k]) for k in self.keys[: self.count]}

    def __len__(self) -> int:
        return self.count


class FarKvPool:
    """One scratch row per worker. Rows are padded so neighbouring workers
    never share a cache line."""

    def __init__(self, threads: int, n: int):
        stride = max(n, 1) + 64
        self.keys = np.zeros((threads, stride), dtype=np.uint32)
        self.values = np.zeros((threads, stride), dtype=np.float64)

    def row(self, t: int) -> FarKvScratch:
        return FarKvScratch(self.keys[t], self.values[t])


def scan_communities(h: FarKvScratch, g: CsrGraph, c, i: int, include_self: bool) -> FarKvScratch:
    """Accumulate into ``h`` the link weight from ``i`` to each neighbouring community."""
    c = np.ascontiguousarray(c, dtype=np.uint32)
    h.count = _farkv_scan(
        g.offsets, np.diff(g.offsets), g.edges, g.weights, c, i, include_self,
        h.keys, h.values, h.count,
    )
    return h


def best_community(h: FarKvScratch, i: int, c_i: int, k, sigma, m: float) -> tuple[int, float]:
    """Best community for ``i`` among those in ``h``; staying put scores 0.

    Only a strictly positive gain beats staying; equal gains go to the lower id.
    """
    c, dq = _farkv_best(h.keys, h.values, h.count, c_i, float(k[i]), np.asarray(sigma, np.float64), m)
    return int(c), float(dq)


# --- local moving -----------------------------------------------------------


@njit(cache=True)
def _move_iteration_serial(offsets, degrees, edges, weights, c, k, sigma, flags, m, prune,
                           keys, values, stats):
    dq = 0.0
    moves = 0
    min_gain = np.inf
    for i in range(degrees.size):
        if prune and flags[i] == 0:
            continue
        flags[i] = 0
        n_live = _farkv_scan(offsets, degrees, edges, weights, c, i, False, keys, values, 0)
        ci = c[i]
        cs, g = _farkv_best(keys, values, n_live, ci, k[i], sigma, m)
        _farkv_clear(keys, values, n_live)
        if cs == ci:
            continue
        sigma[ci] -= k[i]
        sigma[cs] += k[i]
        c[i] = cs
        dq += g
        moves += 1
        min_gain = min(min_gain, g)
        start = offsets[i]
        for e in range(start, start + degrees[i]):
            flags[edges[e]] = 1
    stats[0] = dq
    stats[1] = moves
    stats[2] = min_gain


@njit(parallel=True, cache=True)
def _move_iteration_parallel(offsets, degrees, edges, weights, c, k, sigma, flags, m, prune,
                             keys2d, values2d, partial):
    pad = 8
    for i in prange(degrees.size):
        if prune and flags[i] == 0:
            continue
        t = get_thread_id()
        keys = keys2d[t]
        values = values2d[t]
        flags[i] = 0
        n_live = _farkv_scan(offsets, degrees, edges, weights, c, i, False, keys, values, 0)
        ci = c[i]
        cs, g = _farkv_best(keys, values, n_live, ci, k[i], sigma, m)
        _farkv_clear(keys, values, n_live)
        if cs == ci:
            continue
        atomic_add(sigma, ci, -k[i])
        atomic_add(sigma, cs, k[i])
        c[i] = cs
        partial[t * pad] += g
        partial[t * pad + 1] += 1.0
        if g < partial[t * pad + 2]:
            partial[t * pad + 2] = g
        start = offsets[i]
        for e in range(start, start + degrees[i]):
            flags[edges[e]] = 1


def _reduce_partials(partial: np.ndarray, threads: int) -> tuple[float, int, float]:
    rows = partial[: threads * _runtime.PAD].reshape(threads, _runtime.PAD)
    return float(rows[:, 0].sum()), int(rows[:, 1].sum()), float(rows[:, 2].min())


def _new_partials(threads: int) -> np.ndarray:
    partial = np.zeros(threads * _runtime.PAD, dtype=np.float64)
    partial[2 :: _runtime.PAD] = np.inf
    return partial


def _move_phase(wg: WorkGraph, c, k, sigma, flags, m, tau, p: LouvainParams, pool: FarKvPool):
    """Run local-moving iterations until the summed gain drops to ``tau``."""
    history = []
    moves = 0
    min_gain = math.inf
    threads = p.thread_count
    stats = np.zeros(3)
    iterations = 0
    for _ in range(p.max_iterations):
        iterations += 1
        if threads == 1:
            _move_iteration_serial(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma,
                                   flags, m, p.prune, pool.keys[0], pool.values[0], stats)
            dq, n_moves, low = float(stats[0]), int(stats[1]), float(stats[2])
        else:
            partial = _new_partials(threads)
            _move_iteration_parallel(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma,
                                     flags, m, p.prune, pool.keys, pool.values, partial)
            dq, n_moves, low = _reduce_partials(partial, threads)
        history.append(dq)
        moves += n_moves
        min_gain = min(min_gain, low)
        if dq <= tau:
            break
    return iterations, history, moves, min_gain


def louvain_move(g: CsrGraph, c, k, sigma, p: LouvainParams, flags=None, tolerance=None,
                 history: list | None = None) -> int:
    """Local-moving phase on ``g``; updates ``c``, ``sigma`` and ``flags`` in place.

    Returns the number of iterations performed. Per-iteration gains are
    appended to ``history`` when given.
    """
    if g.total_weight <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    if c.dtype != np.uint32 or sigma.dtype != np.float64:
        raise TypeError("membership must be uint32 and sigma float64 (updated in place)")
    if flags is None:
        flags = np.ones(g.num_vertices, dtype=np.uint8)
    tau = p.initial_tolerance if tolerance is None else tolerance
    pool = FarKvPool(p.thread_count, g.num_vertices)
    with _runtime.using_threads(p.thread_count, p.chunk_size):
        iterations, hist, _, _ = _move_phase(
            WorkGraph.from_csr(g), c, np.asarray(k, np.float64), sigma, flags,
            g.total_weight, tau, p, pool,
        )
    if history is not None:
        history.extend(hist)
    return iterations


# --- aggregation ------------------------------------------------------------


@njit(cache=True)
def _aggregate_serial(offsets, degrees, edges, weights, c, comm_off, comm_verts,
                      out_off, out_fill, out_edges, out_weights, keys, values):
    for q in range(comm_off.size - 1):
        n_live = 0
        for p in range(comm_off[q], comm_off[q + 1]):
            n_live = _farkv_scan(offsets, degrees, edges, weights, c, comm_verts[p], True,
                                 keys, values, n_live)
        base = out_off[q]
        for t in range(n_live):
            d = keys[t]
            out_edges[base + out_fill[q]] = d
            out_weights[base + out_fill[q]] = values[d]
            out_fill[q] += 1
            values[d] = 0.0


@njit(parallel=True, cache=True)
def _aggregate_parallel(offsets, degrees, edges, weights, c, comm_off, comm_verts,
                        out_off, out_fill, out_edges, out_weights, keys2d, values2d):
    for q in prange(comm_off.size - 1):
        if comm_off[q + 1] == comm_off[q]:
            continue
        tid = get_thread_id()
        keys = keys2d[tid]
        values = values2d[tid]
        n_live = 0
        for p in range(comm_off[q], comm_off[q + 1]):
            n_live = _farkv_scan(offsets, degrees, edges, weights, c, comm_verts[p], True,
                                 keys, values, n_live)
        base = out_off[q]
        for t in range(n_live):
            d = keys[t]
            pos = atomic_add(out_fill, q, 1)
            out_edges[base + pos] = d
            out_weights[base + pos] = values[d]
            values[d] = 0.0


class CsrBuffers:
    """Two preallocated arc buffers that the passes alternate between."""

    def __init__(self, num_arcs: int, num_vertices: int):
        self.edges = [np.empty(num_arcs, np.uint32) for _ in range(2)]
        self.weights = [np.empty(num_arcs, np.float32) for _ in range(2)]
        self.offsets = [np.empty(num_vertices + 1, np.int64) for _ in range(2)]
        self.fills = [np.empty(num_vertices, np.int64) for _ in range(2)]
        self.turn = 0

    def next_target(self, nc: int, spans_offsets: np.ndarray):
        b = self.turn
        self.turn ^= 1
        off = self.offsets[b][: nc + 1]
        off[:] = spans_offsets
        fill = self.fills[b][:nc]
        fill[:] = 0
        return off, fill, self.edges[b], self.weights[b]


def _aggregate_phase(wg: WorkGraph, c, nc: int, threads: int, pool: FarKvPool,
                     buffers: CsrBuffers | None = None) -> WorkGraph:
    parallel = threads > 1
    comm_off, comm_verts = community_vertices(c, nc, parallel)
    spans = community_total_degree(c, wg.degrees, nc, parallel)
    span_off = scan_offsets(spans, parallel)
    if buffers is None:
        out_off, out_fill = span_off, np.zeros(nc, np.int64)
        out_edges = np.empty(int(span_off[-1]), np.uint32)
        out_weights = np.empty(int(span_off[-1]), np.float32)
    else:
        out_off, out_fill, out_edges, out_weights = buffers.next_target(nc, span_off)
    if parallel:
        _aggregate_parallel(wg.offsets, wg.degrees, wg.edges, wg.weights, c, comm_off, comm_verts,
                            out_off, out_fill, out_edges, out_weights, pool.keys, pool.values)
    else:
        _aggregate_serial(wg.offsets, wg.degrees, wg.edges, wg.weights, c, comm_off, comm_verts,
                          out_off, out_fill, out_edges, out_weights, pool.keys[0], pool.values[0])
    return WorkGraph(out_off, out_fill, out_edges, out_weights)


def louvain_aggregate(g: CsrGraph, c, threads: int = 1) -> CsrGraph:
    """Collapse each community of ``c`` (ids ``0..k-1``) into a super-vertex.

    Internal arcs become a self-loop carrying their summed weight, so the
    total arc weight is unchanged.
    """
    c = np.ascontiguousarray(c, dtype=np.uint32)
    nc = int(c.max()) + 1 if c.size else 0
    pool = FarKvPool(threads, g.num_vertices)
    with _runtime.using_threads(threads):
        wg = _aggregate_phase(WorkGraph.from_csr(g), c, nc, threads, pool)
    return wg.to_csr(g.total_weight)


# --- driver -----------------------------------------------------------------


@njit(parallel=True, cache=True)
def _work_vertex_weights(offsets, degrees, weights, k):
    for i in prange(degrees.size):
        acc = 0.0
        start = offsets[i]
        for e in range(start, start + degrees[i]):
            acc += weights[e]
        k[i] = acc


def work_vertex_weights(wg: WorkGraph) -> np.ndarray:
    k = np.empty(wg.n, dtype=np.float64)
    _work_vertex_weights(wg.offsets, wg.degrees, wg.weights, k)
    return k


MoveFn = Callable[..., tuple]
AggregateFn = Callable[[WorkGraph, np.ndarray, int], WorkGraph]


def run_passes(g: CsrGraph, p: LouvainParams, move: MoveFn, aggregate: AggregateFn,
               track_modularity: bool = False) -> LouvainResult:
    """Shared pass loop: reset, local-move, convergence checks, renumber,
    dendrogram lookup, aggregate, scale the tolerance."""
    m = g.total_weight
    if m <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    t_start = time.perf_counter()
    t_move = t_aggr = 0.0
    pass_times: list[float] = []
    stats: list[PassStats] = []
    top = np.arange(g.num_vertices, dtype=np.uint32)
    wg = WorkGraph.from_csr(g)
    tau = p.initial_tolerance
    pending = None  # membership of the current super-vertices, not yet composed into `top`
    parallel = p.thread_count > 1
    for lp in range(p.max_passes):
        t_pass = time.perf_counter()
        k = work_vertex_weights(wg)
        sigma = k.copy()
        cp = np.arange(wg.n, dtype=np.uint32)
        flags = np.ones(wg.n, dtype=np.uint8)
        t0 = time.perf_counter()
        iterations, history, moves, min_gain = move(wg, cp, k, sigma, flags, m, tau)
        t_move += time.perf_counter() - t0
        pending = cp
        before = wg.n
        after = int(np.count_nonzero(np.bincount(cp, minlength=1)))
        ps = PassStats(iterations, history, moves, min_gain, before, after, tau)
        stats.append(ps)
        log.debug("pass %d: tau=%g iterations=%d communities %d -> %d",
                  lp, tau, iterations, before, after)
        if track_modularity:
            ps.modularity = modularity(g, lookup_dendrogram(top, cp))
        if iterations <= 1:
            pass_times.append(time.perf_counter() - t_pass)
            break
        if after / before > p.aggregation_tolerance:
            pass_times.append(time.perf_counter() - t_pass)
            break
        cp, nc = renumber_communities(cp, parallel)
        top = lookup_dendrogram(top, cp)
        pending = None
        t0 = time.perf_counter()
        wg = aggregate(wg, cp, nc)
        t_aggr += time.perf_counter() - t0
        ps.aggregated = True
        tau /= p.tolerance_drop
        pass_times.append(time.perf_counter() - t_pass)
    if pending is not None:
        top = lookup_dendrogram(top, pending)
    top, _ = renumber_communities(top, parallel)
    q = modularity(g, top)
    total = time.perf_counter() - t_start
    phase_times = {
        "local_moving": t_move,
        "aggregation": t_aggr,
        "other": max(total - t_move - t_aggr, 0.0),
    }
    return LouvainResult(top, q, len(stats), [s.iterations for s in stats], phase_times,
                         pass_times, stats)


def louvain(g: CsrGraph, p: LouvainParams | None = None, track_modularity: bool = False) -> LouvainResult:
    """Detect communities with the multicore engine."""
    p = p or LouvainParams()
    pool = FarKvPool(p.thread_count, g.num_vertices)
    buffers = CsrBuffers(g.num_arcs, g.num_vertices)

    def move(wg, cp, k, sigma, flags, m, tau):
        return _move_phase(wg, cp, k, sigma, flags, m, tau, p, pool)

    def aggregate(wg, cp, nc):
        return _aggregate_phase(wg, cp, nc, p.thread_count, pool, buffers)

    with _runtime.using_threads(p.thread_count, p.chunk_size):
        return run_passes(g, p, move, aggregate, track_modularity)
