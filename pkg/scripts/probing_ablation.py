"""Compare collision-resolution schemes of the compact engine.

Reports wall time and final modularity per probing mode; all modes must
agree on the partition, only their speed differs.
"""
import argparse

from parlouvain import LouvainParams
from parlouvain.louvain_compact import PROBE_MODES, compact_louvain

from _common import suite, timed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args()
    p = LouvainParams(thread_count=args.threads)
    print(f"{'graph':22s} {'probing':18s} {'time[s]':>9s} {'Q':>8s}")
    for name, g in suite(args.scale).items():
        for probing in PROBE_MODES:
            wall, res = timed(lambda: compact_louvain(g, p, probing=probing))
            print(f"{name:22s} {probing:18s} {wall:9.4f} {res.modularity:8.4f}")


if __name__ == "__main__":
    main()
