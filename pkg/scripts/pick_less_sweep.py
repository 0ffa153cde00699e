"""Modularity and time of the compact engine for several pick-less periods
(0 = rule off)."""
import argparse

from parlouvain import LouvainParams
from parlouvain.louvain_compact import PickLessSchedule, compact_louvain

from _common import suite, timed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--periods", default="0,2,4,8,16")
    args = ap.parse_args()
    p = LouvainParams(thread_count=args.threads)
    periods = [int(x) for x in args.periods.split(",")]
    print(f"{'graph':22s} {'PL':>4s} {'time[s]':>9s} {'Q':>8s} {'iterations':>12s}")
    for name, g in suite().items():
        for rho in periods:
            wall, res = timed(lambda: compact_louvain(g, p, PickLessSchedule(rho)))
            print(f"{name:22s} {rho:4d} {wall:9.4f} {res.modularity:8.4f} "
                  f"{sum(res.iterations_per_pass):12d}")


if __name__ == "__main__":
    main()
