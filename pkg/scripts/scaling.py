"""Strong scaling of both engines over a thread sweep.

Speedups are relative to one thread. They are only meaningful when the
machine has at least as many cores as the largest thread count.
"""
import argparse
import os

from parlouvain import LouvainParams, louvain
from parlouvain.louvain_compact import compact_louvain

from _common import suite, timed

ENGINES = {"mc": louvain, "compact": compact_louvain}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", default="1,2,4,8")
    ap.add_argument("--repetitions", type=int, default=3)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args()
    counts = [int(x) for x in args.threads.split(",")]
    print(f"# {len(os.sched_getaffinity(0))} core(s) available")
    print(f"{'graph':22s} {'engine':8s} {'threads':>7s} {'time[s]':>9s} {'speedup':>8s} {'Q':>8s}")
    for name, g in suite(args.scale).items():
        for engine, run in ENGINES.items():
            base = None
            for t in counts:
                wall, res = timed(lambda: run(g, LouvainParams(thread_count=t)), args.repetitions)
                base = base or wall
                print(f"{name:22s} {engine:8s} {t:7d} {wall:9.4f} {base / wall:8.2f} "
                      f"{res.modularity:8.4f}")


if __name__ == "__main__":
    main()
