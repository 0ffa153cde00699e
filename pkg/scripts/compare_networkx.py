"""Modularity of this package's engines next to networkx's Louvain on the
same graphs (networkx is only needed for this script)."""
import argparse
import time

import networkx as nx
import numpy as np

from parlouvain import LouvainParams, louvain, modularity
from parlouvain.louvain_compact import compact_louvain

from _common import suite


def to_networkx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.num_vertices))
    src = g.sources()
    keep = src <= g.edges
    G.add_weighted_edges_from(zip(src[keep].tolist(), g.edges[keep].tolist(),
                                  g.weights[keep].tolist()))
    return G


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    p = LouvainParams(thread_count=1)
    print(f"{'graph':22s} {'engine':10s} {'time[s]':>9s} {'Q':>8s}")
    for name, g in suite(seed=args.seed).items():
        louvain(g, p)
        compact_louvain(g, p)
        for engine, run in (("mc", lambda: louvain(g, p).membership),
                            ("compact", lambda: compact_louvain(g, p).membership)):
            t0 = time.perf_counter()
            c = run()
            print(f"{name:22s} {engine:10s} {time.perf_counter() - t0:9.4f} {modularity(g, c):8.4f}")
        G = to_networkx(g)
        t0 = time.perf_counter()
        comms = nx.community.louvain_communities(G, seed=args.seed)
        wall = time.perf_counter() - t0
        c = np.empty(g.num_vertices, dtype=np.uint32)
        for label, members in enumerate(comms):
            c[list(members)] = label
        print(f"{name:22s} {'networkx':10s} {wall:9.4f} {modularity(g, c):8.4f}")


if __name__ == "__main__":
    main()
