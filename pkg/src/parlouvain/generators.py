"""Synthetic graphs for tests and benchmarks."""
from __future__ import annotations

import numpy as np

from .graph import EdgeList


def _sample_pairs(rng, count: int, p: float) -> np.ndarray:
    """Indices of the pairs (out of ``count``) kept with probability ``p``."""
    if count == 0 or p <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1:
        return np.arange(count, dtype=np.int64)
    kept = rng.binomial(count, p)
    return np.sort(rng.choice(count, size=kept, replace=False))


def _triu_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row r holds pairs (r, r+1..n-1); the row starts at r*n - r*(r+1)/2
    r = (2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * idx.astype(np.float64))) // 2
    r = r.astype(np.int64)
    start = r * n - r * (r + 1) // 2
    # guard against floating-point off-by-one in the square root
    over = idx < start
    r[over] -= 1
    start = r * n - r * (r + 1) // 2
    under = idx >= start + (n - 1 - r)
    r[under] += 1
    start = r * n - r * (r + 1) // 2
    return r, r + 1 + (idx - start)


def planted_partition(blocks: int, block_size: int, p_in: float, p_out: float,
                      seed=None, weights: str | None = None) -> tuple[EdgeList, np.ndarray]:
    """Stochastic block model with equal blocks.

    Returns the edge list (each undirected edge once) and the planted labels.
    ``weights`` may be ``None`` (all 1), ``"int"`` (1..10) or ``"real"`` (0, 10].
    """
    rng = np.random.default_rng(seed)
    n = blocks * block_size
    src, dst = [], []
    for b in range(blocks):
        lo = b * block_size
        r, c = _triu_from_index(_sample_pairs(rng, block_size * (block_size - 1) // 2, p_in),
                                block_size)
        src.append(r + lo)
        dst.append(c + lo)
        for b2 in range(b + 1, blocks):
            lo2 = b2 * block_size
            idx = _sample_pairs(rng, block_size * block_size, p_out)
            src.append(lo + idx // block_size)
            dst.append(lo2 + idx % block_size)
    src = np.concatenate(src) if src else np.empty(0, np.int64)
    dst = np.concatenate(dst) if dst else np.empty(0, np.int64)
    labels = np.repeat(np.arange(blocks, dtype=np.uint32), block_size)
    return EdgeList(n, src, dst, _weights(rng, src.size, weights)), labels


def random_graph(n: int, num_edges: int, seed=None, weights: str | None = None,
                 self_loops: bool = False) -> EdgeList:
    """Uniform random multigraph; duplicates merge when the CSR is built."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, num_edges)
    dst = rng.integers(0, n, num_edges)
    if not self_loops:
        clash = src == dst
        dst[clash] = (dst[clash] + 1 + rng.integers(0, max(n - 1, 1), clash.sum())) % n
    return EdgeList(n, src, dst, _weights(rng, num_edges, weights))


def _weights(rng, size: int, kind: str | None) -> np.ndarray:
    if kind is None:
        return np.ones(size)
    if kind == "int":
        return rng.integers(1, 11, size).astype(np.float64)
    if kind == "real":
        return 10.0 - rng.uniform(0.0, 10.0, size)
    raise ValueError(f"unknown weight kind {kind!r}")
