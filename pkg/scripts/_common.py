"""Helpers shared by the experiment scripts."""
import time

import numpy as np

from parlouvain import build_csr
from parlouvain.generators import planted_partition, random_graph


def suite(scale: int = 1, seed: int = 0):
    """A few synthetic graphs, name -> CsrGraph."""
    return {
        "planted-10x200": build_csr(planted_partition(10, 200 * scale, 0.05, 0.002, seed=seed)[0]),
        "planted-40x50-real": build_csr(
            planted_partition(40, 50 * scale, 0.2, 0.002, seed=seed + 1, weights="real")[0]),
        "random-20k": build_csr(random_graph(20_000 * scale, 100_000 * scale, seed=seed + 2)),
    }


def timed(fn, repetitions: int = 3):
    """Run once untimed, then return (geometric-mean seconds, last result)."""
    fn()
    walls = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        out = fn()
        walls.append(time.perf_counter() - t0)
    return float(np.exp(np.mean(np.log(walls)))), out
