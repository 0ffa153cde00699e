"""Array primitives shared by both engines: prefix sums, renumbering,
dendrogram lookup and the community-vertices CSR."""
from __future__ import annotations

import numpy as np
from numba import get_num_threads, njit, prange

from . import _runtime  # noqa: F401
from ._atomics import atomic_add


@njit(cache=True)
def _scan_serial(a, out):
    acc = 0
    for k in range(a.size):
        out[k] = acc
        acc += a[k]
    out[a.size] = acc


@njit(parallel=True, cache=True)
def _scan_parallel(a, out, nblocks):
    n = a.size
    step = (n + nblocks - 1) // nblocks
    sums = np.zeros(nblocks + 1, dtype=out.dtype)
    for b in prange(nblocks):
        lo = b * step
        hi = min(lo + step, n)
        acc = 0
        for k in range(lo, hi):
            acc += a[k]
        sums[b + 1] = acc
    for b in range(nblocks):
        sums[b + 1] += sums[b]
    for b in prange(nblocks):
        lo = b * step
        hi = min(lo + step, n)
        acc = sums[b]
        for k in range(lo, hi):
            out[k] = acc
            acc += a[k]
    out[n] = sums[nblocks]


def scan_offsets(a: np.ndarray, parallel: bool = False) -> np.ndarray:
    """Exclusive scan with the grand total appended (length ``len(a) + 1``)."""
    a = np.ascontiguousarray(a)
    dtype = np.int64 if a.dtype.kind in "iub" else np.float64
    out = np.empty(a.size + 1, dtype=dtype)
    nblocks = get_num_threads() * 4
    if parallel and a.size >= 4 * nblocks:
        _scan_parallel(a, out, nblocks)
    else:
        _scan_serial(a, out)
    return out


def exclusive_scan(a, parallel: bool = True) -> np.ndarray:
    """``out[k] = sum(a[:k])``; the blocked parallel path matches the serial one exactly."""
    return scan_offsets(np.asarray(a), parallel)[:-1]


@njit(cache=True)
def _mark_present(c, present):
    for i in range(c.size):
        present[c[i]] = 1


@njit(parallel=True, cache=True)
def _mark_present_par(c, present):
    for i in prange(c.size):
        present[c[i]] = 1


@njit(parallel=True, cache=True)
def _apply_rank(c, rank, out):
    for i in prange(c.size):
        out[i] = rank[c[i]]


def renumber_communities(c, parallel: bool = False) -> tuple[np.ndarray, int]:
    """Map ids onto ``0..k-1`` preserving the order of the old ids."""
    c = np.ascontiguousarray(c)
    if c.size == 0:
        return c.astype(np.uint32), 0
    present = np.zeros(int(c.max()) + 1, dtype=np.int64)
    (_mark_present_par if parallel else _mark_present)(c, present)
    rank = scan_offsets(present, parallel)
    out = np.empty(c.size, dtype=np.uint32)
    _apply_rank(c, rank, out)
    return out, int(rank[-1])


def lookup_dendrogram(c, c_next) -> np.ndarray:
    """Compose memberships: ``result[i] = c_next[c[i]]``."""
    c = np.asarray(c)
    c_next = np.asarray(c_next)
    if c.size and int(c.max()) >= c_next.size:
        raise IndexError(
            f"membership refers to super-vertex {int(c.max())} but only "
            f"{c_next.size} exist"
        )
    return c_next[c].astype(np.uint32)


@njit(cache=True)
def _community_vertices_serial(c, nc, offsets, verts):
    cursor = np.zeros(nc, dtype=np.int64)
    for i in range(c.size):
        k = c[i]
        verts[offsets[k] + cursor[k]] = i
        cursor[k] += 1


@njit(parallel=True, cache=True)
def _count_par(c, counts):
    for i in prange(c.size):
        atomic_add(counts, c[i], 1)


@njit(parallel=True, cache=True)
def _community_vertices_par(c, nc, offsets, verts):
    cursor = np.zeros(nc, dtype=np.int64)
    for i in prange(c.size):
        k = c[i]
        pos = atomic_add(cursor, k, 1)
        verts[offsets[k] + pos] = i


@njit(cache=True)
def _degree_totals_serial(c, degrees, totals):
    for i in range(c.size):
        totals[c[i]] += degrees[i]


@njit(parallel=True, cache=True)
def _degree_totals_par(c, degrees, totals):
    for i in prange(c.size):
        atomic_add(totals, c[i], degrees[i])


def community_vertices(c, nc: int, parallel: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """CSR listing the member vertices of each (renumbered) community.

    Counting plus exclusive scan gives the offsets; members are then placed
    through per-community cursors. The serial path lists members in
    ascending order, the parallel one in arrival order.
    """
    counts = np.zeros(nc, dtype=np.int64)
    if parallel:
        _count_par(c, counts)
    else:
        np.add.at(counts, c, 1)
    offsets = scan_offsets(counts, parallel)
    verts = np.empty(c.size, dtype=np.uint32)
    (_community_vertices_par if parallel else _community_vertices_serial)(c, nc, offsets, verts)
    return offsets, verts


def community_total_degree(c, degrees, nc: int, parallel: bool = False) -> np.ndarray:
    totals = np.zeros(nc, dtype=np.int64)
    (_degree_totals_par if parallel else _degree_totals_serial)(c, degrees, totals)
    return totals
