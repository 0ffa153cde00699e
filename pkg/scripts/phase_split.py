"""Share of run time spent in local moving, aggregation and everything
else, and the share of each pass."""
import argparse

from parlouvain import LouvainParams, louvain
from parlouvain.louvain_compact import compact_louvain

from _common import suite, timed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    p = LouvainParams(thread_count=args.threads)
    for name, g in suite().items():
        for engine, run in (("mc", louvain), ("compact", compact_louvain)):
            _, res = timed(lambda: run(g, p), 1)
            total = sum(res.phase_times.values())
            phases = " ".join(f"{k}={v / total:.2f}" for k, v in res.phase_times.items())
            passes = ",".join(f"{t / sum(res.pass_times):.2f}" for t in res.pass_times)
            print(f"{name:22s} {engine:8s} {phases}  passes=[{passes}]")


if __name__ == "__main__":
    main()
