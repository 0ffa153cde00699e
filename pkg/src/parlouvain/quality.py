"""Modularity, delta-modularity and the per-community totals they use.

Conventions: arcs are stored in both directions and a self-loop is a single
arc, so a community's internal total counts every internal edge twice and
every self-loop once. With that, the single-community partition of a
connected graph scores exactly 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CsrGraph, vertex_weights


class DegenerateGraphError(ValueError):
    """Modularity is undefined on a graph with zero total edge weight."""


@dataclass(frozen=True)
class CommunityAggregates:
    sigma_total: np.ndarray
    sigma_internal: np.ndarray


def _check_membership(g: CsrGraph, c) -> np.ndarray:
    c = np.asarray(c)
    if c.shape != (g.num_vertices,):
        raise ValueError(
            f"membership has length {c.shape[0] if c.ndim else 0}, expected {g.num_vertices}"
        )
    if c.size and (c.min() < 0):
        raise ValueError("community ids must be non-negative")
    return c.astype(np.int64, copy=False)


def community_aggregates(g: CsrGraph, c) -> CommunityAggregates:
    """Total (Sigma_c) and internal (sigma_c) arc weight per community id.

    Arrays are indexed by community id and sized ``max(c) + 1``.
    """
    c = _check_membership(g, c)
    size = int(c.max()) + 1 if c.size else 0
    w = g.weights.astype(np.float64)
    src_c = c[g.sources()]
    dst_c = c[g.edges]
    sigma_total = np.bincount(src_c, weights=w, minlength=size)
    internal = src_c == dst_c
    sigma_internal = np.bincount(src_c[internal], weights=w[internal], minlength=size)
    return CommunityAggregates(sigma_total, sigma_internal)


def modularity(g: CsrGraph, c) -> float:
    m = g.total_weight
    if m <= 0:
        raise DegenerateGraphError("total edge weight is zero")
    agg = community_aggregates(g, c)
    two_m = 2.0 * m
    return float(np.sum(agg.sigma_internal / two_m - (agg.sigma_total / two_m) ** 2))


def delta_modularity(k_i_to_c, k_i_to_d, k_i, sigma_c, sigma_d, m):
    """Change in modularity when vertex i leaves community d for c.

    ``sigma_d`` still includes ``k_i``; ``sigma_c`` does not.
    """
    return (k_i_to_c - k_i_to_d) / m - k_i / (2.0 * m * m) * (k_i + sigma_c - sigma_d)


def count_communities(c) -> int:
    return int(np.unique(np.asarray(c)).size)


def gather_move_inputs(g: CsrGraph, c, i: int, target: int):
    """Collect the arguments of :func:`delta_modularity` for moving ``i`` to ``target``.

    Self-loops of ``i`` are left out of both link weights.
    """
    c = _check_membership(g, c)
    k = vertex_weights(g)
    nbrs, w = g.neighbors(i)
    w = w.astype(np.float64)
    mask = nbrs != i
    nc = c[nbrs[mask].astype(np.int64)]
    d = int(c[i])
    k_to_c = float(w[mask][nc == target].sum())
    k_to_d = float(w[mask][nc == d].sum())
    sigma = np.bincount(c, weights=k, minlength=max(int(c.max()), target) + 1)
    sigma_c = float(sigma[target]) if target != d else float(sigma[d] - k[i])
    return k_to_c, k_to_d, float(k[i]), sigma_c, float(sigma[d]), g.total_weight
