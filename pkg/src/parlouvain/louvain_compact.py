"""Louvain with per-vertex open-addressing hashtables.

All tables live in two slabs of ``2 * |arcs|`` slots. Vertex ``i`` owns the
``2 * D_i`` slots starting at ``2 * offset(i)`` and uses the first
``nextPow2(D_i) - 1`` of them, which is at least its degree, so a vertex
never has more distinct neighbour communities than table capacity.

Low-degree vertices are processed one per worker with plain table writes;
high-degree vertices are processed one at a time with their arcs spread over
all workers, which then need the atomic (shared) accumulate path.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import get_thread_id, njit, prange

from . import _runtime
from ._atomics import atomic_add, atomic_cas
from .graph import SENTINEL, CsrGraph
from .louvain_mc import (
    LouvainParams,
    LouvainResult,
    WorkGraph,
    _new_partials,
    _reduce_partials,
    run_passes,
)
from .primitives import community_total_degree, community_vertices, scan_offsets
from .quality import DegenerateGraphError

PROBE_MODES = {"linear": 0, "quadratic": 1, "double": 2, "quadratic-double": 3}
EMPTY = np.uint32(SENTINEL)


class HashtableFailure(RuntimeError):
    """A key found no slot within the retry budget. The sizing rules make
    this impossible, so it signals a bug or a misconfigured table."""


class Status(Enum):
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class PickLessSchedule:
    """Restrict moves to lower community ids in every ``rho``-th iteration,
    starting at iteration ``rho / 2``. ``rho = 0`` switches the rule off."""

    rho: int = 4

    def __post_init__(self):
        if self.rho != 0 and (self.rho < 2 or self.rho % 2):
            raise ValueError("pick-less period must be 0 (off) or even and >= 2")

    def active(self, iteration: int) -> bool:
        return self.rho > 0 and (iteration + self.rho // 2) % self.rho == 0


@dataclass(frozen=True)
class SwitchDegrees:
    """Degree at which a vertex (or community) moves to the team path."""

    move_switch: int = 64
    aggregate_switch: int = 128

    def __post_init__(self):
        if self.move_switch < 1 or self.aggregate_switch < 1:
            raise ValueError("switch degrees must be >= 1")


# --- table primitives -------------------------------------------------------


@njit(cache=True)
def next_pow2(x):
    """Smallest power of two strictly greater than ``x``."""
    p = 1
    while p <= x:
        p <<= 1
    return p


@njit(cache=True)
def secondary_modulus(p1):
    # 2^(k+1) - 1 for p1 = 2^k - 1: larger than p1 and coprime to it.
    return 2 * (p1 + 1) - 1


@njit(cache=True)
def _accumulate(hk, hv, base, p1, p2, k, v, shared, mode, max_retries):
    """Add ``v`` to key ``k``; returns the slot used or -1 once retries run out.

    The first ``max_retries - p1`` probes follow the chosen probe sequence.
    The remaining ``p1`` probes sweep linearly, so any free slot is found.
    """
    sweep = min(p1, max_retries)
    probes = max_retries - sweep
    i = np.int64(k)
    di = np.int64(1)
    r = np.int64(k) % p2
    s = i % p1
    for t in range(max_retries):
        if t < probes or t == 0:
            s = i % p1
        else:
            s = (s + 1) % p1
        slot = base + s
        cur = hk[slot]
        if cur == k or cur == EMPTY:
            if not shared:
                if cur == EMPTY:
                    hk[slot] = k
                hv[slot] += v
                return s
            old = atomic_cas(hk, slot, EMPTY, k)
            if old == EMPTY or old == k:
                atomic_add(hv, slot, v)
                return s
        # i and di only matter modulo p1; reducing them avoids overflow
        if mode == 0:
            i = (i + 1) % p1
        elif mode == 1:
            i = (i + di) % p1
            di = (2 * di) % p1
        elif mode == 2:
            i = (i + (r if r > 0 else 1)) % p1
        else:
            i = (i + di) % p1
            di = (2 * di + r) % p1
    return -1


@njit(cache=True)
def _clear(hk, hv, base, span):
    for s in range(base, base + span):
        hk[s] = EMPTY
        hv[s] = 0


@njit(cache=True)
def _table_max(hk, hv, base, p1):
    best_k = EMPTY
    best_v = 0.0
    for s in range(base, base + p1):
        k = hk[s]
        if k == EMPTY:
            continue
        v = np.float64(hv[s])
        if best_k == EMPTY or v > best_v or (v == best_v and k < best_k):
            best_k = k
            best_v = v
    return best_k, best_v


class CompactHashtable:
    """Key/value slabs holding one open-addressing table per vertex."""

    def __init__(self, num_arcs: int, value_bits: int = 32, probing: str = "quadratic-double"):
        if value_bits not in (32, 64):
            raise ValueError("value_bits must be 32 or 64")
        self.keys = np.full(max(2 * num_arcs, 1), EMPTY, dtype=np.uint32)
        self.values = np.zeros(max(2 * num_arcs, 1), dtype=np.float32 if value_bits == 32 else np.float64)
        self.mode = PROBE_MODES[probing]

    @staticmethod
    def view(offset: int, degree: int) -> tuple[int, int, int, int]:
        """``(base, span, p1, p2)`` of the table for a vertex at CSR ``offset``."""
        p1 = int(next_pow2(degree)) - 1
        return 2 * offset, 2 * degree, p1, int(secondary_modulus(p1))

    def accumulate(self, base: int, p1: int, p2: int, k: int, v: float, shared: bool = False,
                   max_retries: int | None = None) -> Status:
        return hashtable_accumulate(self, base, p1, p2, k, v, shared, max_retries)

    def clear(self, base: int, span: int) -> None:
        _clear(self.keys, self.values, base, span)

    def max(self, base: int, p1: int) -> tuple[int, float]:
        k, v = _table_max(self.keys, self.values, base, p1)
        return int(k), float(v)

    def items(self, base: int, p1: int) -> dict[int, float]:
        ks = self.keys[base : base + p1]
        vs = self.values[base : base + p1]
        live = ks != EMPTY
        return {int(k): float(v) for k, v in zip(ks[live], vs[live])}


def hashtable_accumulate(h: CompactHashtable, base: int, p1: int, p2: int, k: int, v: float,
                         shared: bool = False, max_retries: int | None = None) -> Status:
    if k == SENTINEL:
        raise ValueError("the sentinel key cannot be stored")
    retries = 3 * p1 if max_retries is None else max_retries
    slot = _accumulate(h.keys, h.values, base, p1, p2, k, v, shared, h.mode, retries)
    return Status.DONE if slot >= 0 else Status.FAILED


def hashtable_clear(h: CompactHashtable, base: int, span: int) -> None:
    h.clear(base, span)


def hashtable_max(h: CompactHashtable, base: int, p1: int) -> tuple[int, float]:
    return h.max(base, p1)


def probe_slots(k: int, p1: int, p2: int, count: int, probing: str = "quadratic-double") -> list[int]:
    """First ``count`` slots probed for key ``k`` (hybrid phase only)."""
    mode = PROBE_MODES[probing]
    i, di, r = k, 1, k % p2
    out = []
    for _ in range(count):
        out.append(i % p1)
        if mode == 0:
            i += 1
        elif mode == 1:
            i, di = i + di, 2 * di
        elif mode == 2:
            i += r if r > 0 else 1
        else:
            i, di = i + di, 2 * di + r
    return out


# --- local moving -----------------------------------------------------------


@njit(cache=True)
def _scan_into(offsets, degrees, edges, weights, c, i, include_self, hk, hv, base, p1, p2,
               shared, mode):
    start = offsets[i]
    for e in range(start, start + degrees[i]):
        j = edges[e]
        if j == i and not include_self:
            continue
        w = weights[e]
        if w == 0:
            continue
        if _accumulate(hk, hv, base, p1, p2, c[j], w, shared, mode, 3 * p1) < 0:
            return False
    return True


@njit(cache=True)
def _table_best(hk, hv, base, p1, ci, ki, sigma, m):
    k_to_d = 0.0
    for s in range(base, base + p1):
        if hk[s] == ci:
            k_to_d = np.float64(hv[s])
            break
    sigma_d = sigma[ci]
    best_c = ci
    best_g = 0.0
    for s in range(base, base + p1):
        d = hk[s]
        if d == EMPTY or d == ci:
            continue
        g = (np.float64(hv[s]) - k_to_d) / m - ki / (2.0 * m * m) * (ki + sigma[d] - sigma_d)
        if g > best_g or (g == best_g and g > 0.0 and d < best_c):
            best_c = d
            best_g = g
    return best_c, best_g


@njit(cache=True)
def _decide_serial(offsets, degrees, edges, weights, c, k, sigma, m, i, hk, hv, mode, shared):
    """Best move for ``i`` with a single worker. Returns (c*, gain, ok)."""
    deg = degrees[i]
    p1 = next_pow2(deg) - 1
    p2 = secondary_modulus(p1)
    base = 2 * offsets[i]
    _clear(hk, hv, base, 2 * deg)
    ok = _scan_into(offsets, degrees, edges, weights, c, i, False, hk, hv, base, p1, p2,
                    shared, mode)
    cs, g = _table_best(hk, hv, base, p1, c[i], k[i], sigma, m)
    return cs, g, ok


@njit(parallel=True, cache=True)
def _decide_team(offsets, degrees, edges, weights, c, k, sigma, m, i, hk, hv, mode):
    """Best move for high-degree ``i``: its arcs are split across workers."""
    deg = degrees[i]
    p1 = next_pow2(deg) - 1
    p2 = secondary_modulus(p1)
    base = 2 * offsets[i]
    span = 2 * deg
    for s in prange(span):
        hk[base + s] = EMPTY
        hv[base + s] = 0
    start = offsets[i]
    fails = 0
    for e in prange(start, start + deg):
        j = edges[e]
        w = weights[e]
        if j == i or w == 0:
            continue
        if _accumulate(hk, hv, base, p1, p2, c[j], w, True, mode, 3 * p1) < 0:
            fails += 1
    cs, g = _table_best(hk, hv, base, p1, c[i], k[i], sigma, m)
    return cs, g, fails == 0


@njit(cache=True)
def _apply_move(offsets, degrees, edges, c, k, sigma, flags, i, cs):
    ci = c[i]
    atomic_add(sigma, ci, -k[i])
    atomic_add(sigma, cs, k[i])
    c[i] = cs
    start = offsets[i]
    for e in range(start, start + degrees[i]):
        flags[edges[e]] = 1


@njit(cache=True)
def _cmove_serial(offsets, degrees, edges, weights, c, k, sigma, flags, m, prune, pick_less,
                  switch, hk, hv, mode, stats):
    dq = 0.0
    moves = 0
    min_gain = np.inf
    failed = 0
    for i in range(degrees.size):
        if prune and flags[i] == 0:
            continue
        flags[i] = 0
        if degrees[i] == 0:
            continue
        # a lone worker runs the team path with the shared accumulate
        cs, g, ok = _decide_serial(offsets, degrees, edges, weights, c, k, sigma, m, i, hk, hv,
                                   mode, degrees[i] >= switch)
        if not ok:
            failed += 1
            continue
        ci = c[i]
        if cs == ci:
            continue
        if pick_less and cs > ci:
            continue
        _apply_move(offsets, degrees, edges, c, k, sigma, flags, i, cs)
        dq += g
        moves += 1
        min_gain = min(min_gain, g)
    stats[0] = dq
    stats[1] = moves
    stats[2] = min_gain
    stats[3] = failed


@njit(parallel=True, cache=True)
def _cmove_thread_kernel(offsets, degrees, edges, weights, c, k, sigma, flags, m, prune,
                         pick_less, switch, hk, hv, mode, partial, failed):
    pad = 8
    for i in prange(degrees.size):
        deg = degrees[i]
        if deg >= switch:
            continue
        if prune and flags[i] == 0:
            continue
        flags[i] = 0
        if deg == 0:
            continue
        cs, g, ok = _decide_serial(offsets, degrees, edges, weights, c, k, sigma, m, i, hk, hv,
                                   mode, False)
        if not ok:
            atomic_add(failed, 0, 1)
            continue
        ci = c[i]
        if cs == ci or (pick_less and cs > ci):
            continue
        _apply_move(offsets, degrees, edges, c, k, sigma, flags, i, cs)
        t = get_thread_id()
        partial[t * pad] += g
        partial[t * pad + 1] += 1.0
        if g < partial[t * pad + 2]:
            partial[t * pad + 2] = g


def _cmove_team(wg, c, k, sigma, flags, m, prune, pick_less, heavy, hk, hv, mode):
    dq, moves, min_gain, failed = 0.0, 0, np.inf, 0
    for i in heavy:
        if prune and flags[i] == 0:
            continue
        flags[i] = 0
        cs, g, ok = _decide_team(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma, m,
                                 i, hk, hv, mode)
        if not ok:
            failed += 1
            continue
        ci = c[i]
        if cs == ci or (pick_less and cs > ci):
            continue
        _apply_move(wg.offsets, wg.degrees, wg.edges, c, k, sigma, flags, i, cs)
        dq += g
        moves += 1
        min_gain = min(min_gain, g)
    return dq, moves, min_gain, failed


@njit(cache=True)
def _cmove_lockstep(offsets, degrees, edges, weights, c, k, sigma, flags, m, prune, pick_less,
                    hk, hv, mode, stats):
    """All unprocessed vertices decide against the same snapshot, then all
    accepted moves are applied together, as warps executing in lockstep would."""
    n = degrees.size
    target = np.empty(n, dtype=np.int64)
    gain = np.zeros(n)
    failed = 0
    for i in range(n):
        target[i] = -1
        if (prune and flags[i] == 0) or degrees[i] == 0:
            continue
        flags[i] = 0
        cs, g, ok = _decide_serial(offsets, degrees, edges, weights, c, k, sigma, m, i, hk, hv,
                                   mode, False)
        if not ok:
            failed += 1
            continue
        ci = c[i]
        if cs == ci or (pick_less and cs > ci):
            continue
        target[i] = cs
        gain[i] = g
    dq = 0.0
    moves = 0
    min_gain = np.inf
    for i in range(n):
        if target[i] < 0:
            continue
        _apply_move(offsets, degrees, edges, c, k, sigma, flags, i, target[i])
        dq += gain[i]
        moves += 1
        min_gain = min(min_gain, gain[i])
    stats[0] = dq
    stats[1] = moves
    stats[2] = min_gain
    stats[3] = failed


@dataclass
class _Scratch:
    table: CompactHashtable
    threads: int
    schedule: PickLessSchedule
    switch: SwitchDegrees
    lockstep: bool = False


def _compact_move_phase(wg: WorkGraph, c, k, sigma, flags, m, tau, p: LouvainParams, sc: _Scratch):
    hk, hv, mode = sc.table.keys, sc.table.values, sc.table.mode
    history = []
    moves = 0
    min_gain = np.inf
    iterations = 0
    heavy = np.flatnonzero(wg.degrees >= sc.switch.move_switch)
    stats = np.zeros(4)
    for li in range(p.max_iterations):
        iterations += 1
        pl = sc.schedule.active(li)
        if sc.lockstep:
            _cmove_lockstep(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma, flags, m,
                            p.prune, pl, hk, hv, mode, stats)
            dq, n_moves, low, failed = stats[0], int(stats[1]), stats[2], int(stats[3])
        elif sc.threads == 1:
            _cmove_serial(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma, flags, m,
                          p.prune, pl, sc.switch.move_switch, hk, hv, mode, stats)
            dq, n_moves, low, failed = stats[0], int(stats[1]), stats[2], int(stats[3])
        else:
            partial = _new_partials(sc.threads)
            fail_box = np.zeros(1, np.int64)
            _cmove_thread_kernel(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma, flags,
                                 m, p.prune, pl, sc.switch.move_switch, hk, hv, mode, partial,
                                 fail_box)
            dq, n_moves, low = _reduce_partials(partial, sc.threads)
            tdq, tmoves, tlow, tfail = _cmove_team(wg, c, k, sigma, flags, m, p.prune, pl, heavy,
                                                   hk, hv, mode)
            dq, n_moves, low = dq + tdq, n_moves + tmoves, min(low, tlow)
            failed = int(fail_box[0]) + tfail
        if failed:
            raise HashtableFailure(f"{failed} vertex scans overflowed their hashtable")
        history.append(float(dq))
        moves += n_moves
        min_gain = min(min_gain, float(low))
        if dq <= tau:
            break
    return iterations, history, moves, min_gain


def compact_louvain_move(g: CsrGraph, c, k, sigma, p: LouvainParams,
                         schedule: PickLessSchedule | None = None,
                         sd: SwitchDegrees | None = None, flags=None, tolerance=None,
                         history: list | None = None, lockstep: bool = False,
                         value_bits: int = 32, probing: str = "quadratic-double") -> int:
    """Local-moving phase with per-vertex hashtables; updates ``c``/``sigma`` in place.

    ``lockstep`` makes every vertex of an iteration decide from the same
    snapshot before any move is applied (used to reproduce swap cycles).
    """
    if g.total_weight <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    if c.dtype != np.uint32 or sigma.dtype != np.float64:
        raise TypeError("membership must be uint32 and sigma float64 (updated in place)")
    if flags is None:
        flags = np.ones(g.num_vertices, dtype=np.uint8)
    sc = _Scratch(CompactHashtable(g.num_arcs, value_bits, probing), p.thread_count,
                  schedule or PickLessSchedule(), sd or SwitchDegrees(), lockstep)
    tau = p.initial_tolerance if tolerance is None else tolerance
    with _runtime.using_threads(p.thread_count, p.chunk_size):
        iterations, hist, _, _ = _compact_move_phase(
            WorkGraph.from_csr(g), c, np.asarray(k, np.float64), sigma, flags, g.total_weight,
            tau, p, sc,
        )
    if history is not None:
        history.extend(hist)
    return iterations


def best_move(g: CsrGraph, c, k, sigma, i: int, team: bool, value_bits: int = 32,
              probing: str = "quadratic-double", threads: int = 1) -> tuple[int, float]:
    """``(c*, gain)`` for vertex ``i`` through the serial or the team path."""
    table = CompactHashtable(g.num_arcs, value_bits, probing)
    c = np.ascontiguousarray(c, dtype=np.uint32)
    k = np.asarray(k, np.float64)
    sigma = np.asarray(sigma, np.float64)
    wg = WorkGraph.from_csr(g)
    with _runtime.using_threads(threads):
        if team:
            cs, gain, ok = _decide_team(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k, sigma,
                                        g.total_weight, i, table.keys, table.values, table.mode)
        else:
            cs, gain, ok = _decide_serial(wg.offsets, wg.degrees, wg.edges, wg.weights, c, k,
                                          sigma, g.total_weight, i, table.keys, table.values,
                                          table.mode, False)
    if not ok:
        raise HashtableFailure(f"scan of vertex {i} overflowed its hashtable")
    return int(cs), float(gain)


# --- aggregation ------------------------------------------------------------


@njit(cache=True)
def _emit(hk, hv, base, p1, q, out_off, out_fill, out_edges, out_weights):
    for s in range(base, base + p1):
        d = hk[s]
        if d == EMPTY:
            continue
        pos = atomic_add(out_fill, q, 1)
        out_edges[out_off[q] + pos] = d
        out_weights[out_off[q] + pos] = hv[s]


@njit(cache=True)
def _gather_serial(offsets, degrees, edges, weights, c, comm_off, comm_verts, q, span_off,
                   hk, hv, mode, shared):
    deg = span_off[q + 1] - span_off[q]
    p1 = next_pow2(deg) - 1
    p2 = secondary_modulus(p1)
    base = 2 * span_off[q]
    _clear(hk, hv, base, 2 * deg)
    for p in range(comm_off[q], comm_off[q + 1]):
        if not _scan_into(offsets, degrees, edges, weights, c, comm_verts[p], True, hk, hv,
                          base, p1, p2, shared, mode):
            return -1
    return p1


@njit(parallel=True, cache=True)
def _caggr_thread_kernel(offsets, degrees, edges, weights, c, comm_off, comm_verts, span_off,
                         switch, hk, hv, mode, out_fill, out_edges, out_weights, failed):
    for q in prange(comm_off.size - 1):
        deg = span_off[q + 1] - span_off[q]
        if deg == 0 or deg >= switch:
            continue
        p1 = _gather_serial(offsets, degrees, edges, weights, c, comm_off, comm_verts, q,
                            span_off, hk, hv, mode, False)
        if p1 < 0:
            atomic_add(failed, 0, 1)
            continue
        _emit(hk, hv, 2 * span_off[q], p1, q, span_off, out_fill, out_edges, out_weights)


@njit(parallel=True, cache=True)
def _caggr_team(offsets, degrees, edges, weights, c, comm_off, comm_verts, span_off, q,
                hk, hv, mode):
    deg = span_off[q + 1] - span_off[q]
    p1 = next_pow2(deg) - 1
    p2 = secondary_modulus(p1)
    base = 2 * span_off[q]
    for s in prange(2 * deg):
        hk[base + s] = EMPTY
        hv[base + s] = 0
    fails = 0
    for p in prange(comm_off[q], comm_off[q + 1]):
        if not _scan_into(offsets, degrees, edges, weights, c, comm_verts[p], True, hk, hv,
                          base, p1, p2, True, mode):
            fails += 1
    return p1 if fails == 0 else -1


@njit(cache=True)
def _caggr_serial(offsets, degrees, edges, weights, c, comm_off, comm_verts, span_off, switch,
                  hk, hv, mode, out_fill, out_edges, out_weights):
    failed = 0
    for q in range(comm_off.size - 1):
        deg = span_off[q + 1] - span_off[q]
        if deg == 0:
            continue
        p1 = _gather_serial(offsets, degrees, edges, weights, c, comm_off, comm_verts, q,
                            span_off, hk, hv, mode, deg >= switch)
        if p1 < 0:
            failed += 1
            continue
        _emit(hk, hv, 2 * span_off[q], p1, q, span_off, out_fill, out_edges, out_weights)
    return failed


def _compact_aggregate_phase(wg: WorkGraph, c, nc: int, sc: _Scratch, target=None) -> WorkGraph:
    parallel = sc.threads > 1
    hk, hv, mode = sc.table.keys, sc.table.values, sc.table.mode
    comm_off, comm_verts = community_vertices(c, nc, parallel)
    spans = community_total_degree(c, wg.degrees, nc, parallel)
    span_off = scan_offsets(spans, parallel)
    if target is None:
        out_off, out_fill = span_off, np.zeros(nc, np.int64)
        out_edges = np.empty(int(span_off[-1]), np.uint32)
        out_weights = np.empty(int(span_off[-1]), np.float32)
    else:
        out_off, out_fill, out_edges, out_weights = target.next_target(nc, span_off)
    switch = sc.switch.aggregate_switch
    if not parallel:
        failed = _caggr_serial(wg.offsets, wg.degrees, wg.edges, wg.weights, c, comm_off,
                               comm_verts, out_off, switch, hk, hv, mode, out_fill, out_edges,
                               out_weights)
    else:
        fail_box = np.zeros(1, np.int64)
        _caggr_thread_kernel(wg.offsets, wg.degrees, wg.edges, wg.weights, c, comm_off,
                             comm_verts, out_off, switch, hk, hv, mode, out_fill, out_edges,
                             out_weights, fail_box)
        failed = int(fail_box[0])
        for q in np.flatnonzero(spans >= switch):
            p1 = _caggr_team(wg.offsets, wg.degrees, wg.edges, wg.weights, c, comm_off,
                             comm_verts, out_off, q, hk, hv, mode)
            if p1 < 0:
                failed += 1
                continue
            _emit(hk, hv, 2 * out_off[q], p1, q, out_off, out_fill, out_edges, out_weights)
    if failed:
        raise HashtableFailure(f"{failed} community scans overflowed their hashtable")
    return WorkGraph(out_off, out_fill, out_edges, out_weights)


def compact_louvain_aggregate(g: CsrGraph, c, sd: SwitchDegrees | None = None, threads: int = 1,
                              value_bits: int = 32, probing: str = "quadratic-double") -> CsrGraph:
    """Super-vertex graph of ``c`` (ids ``0..k-1``), built through per-community tables."""
    c = np.ascontiguousarray(c, dtype=np.uint32)
    nc = int(c.max()) + 1 if c.size else 0
    sc = _Scratch(CompactHashtable(g.num_arcs, value_bits, probing), threads,
                  PickLessSchedule(), sd or SwitchDegrees())
    with _runtime.using_threads(threads):
        wg = _compact_aggregate_phase(WorkGraph.from_csr(g), c, nc, sc)
    return wg.to_csr(g.total_weight)


def compact_louvain(g: CsrGraph, p: LouvainParams | None = None,
                    schedule: PickLessSchedule | None = None, sd: SwitchDegrees | None = None,
                    value_bits: int = 32, probing: str = "quadratic-double",
                    track_modularity: bool = False) -> LouvainResult:
    """Detect communities with the per-vertex-hashtable engine."""
    from .louvain_mc import CsrBuffers

    p = p or LouvainParams()
    sc = _Scratch(CompactHashtable(g.num_arcs, value_bits, probing), p.thread_count,
                  schedule or PickLessSchedule(), sd or SwitchDegrees())
    buffers = CsrBuffers(g.num_arcs, g.num_vertices)

    def move(wg, cp, k, sigma, flags, m, tau):
        return _compact_move_phase(wg, cp, k, sigma, flags, m, tau, p, sc)

    def aggregate(wg, cp, nc):
        return _compact_aggregate_phase(wg, cp, nc, sc, buffers)

    with _runtime.using_threads(p.thread_count, p.chunk_size):
        return run_passes(g, p, move, aggregate, track_modularity)
