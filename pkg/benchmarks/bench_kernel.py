"""Compare the compiled and pure-Python local-move kernels.

    python benchmarks/bench_kernel.py [--sizes 128 512 2048] [--repeat 3]

Both backends run the same seeded planted-partition graphs; the script checks
that they return identical partitions and reports the best wall time.
"""
from __future__ import annotations

import argparse
import time

from pubcomm.community import detect_communities, planted_partition
from pubcomm.community._backend import available


def bench(n: int, repeat: int, trials: int) -> tuple[dict[str, float], int]:
    k = max(2, n // 32)
    g = planted_partition(n, k, min(1.0, 8 / (n / k)), 0.5 / n, seed=n)
    times, parts = {}, {}
    for backend in available():
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            part, _ = detect_communities(g.network, seed=1, trials=trials, backend=backend)
            best = min(best, time.perf_counter() - t0)
        times[backend], parts[backend] = best, part
    if len(parts) == 2 and parts["cython"] != parts["python"]:
        raise SystemExit(f"backends disagree at n={n}")
    return times, len(g.network.edges)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 512, 2048])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=5)
    args = ap.parse_args()
    print(f"backends: {', '.join(available())}")
    print(f"{'n':>6} {'edges':>7} " + " ".join(f"{b:>10}" for b in available()) + "   speedup")
    for n in args.sizes:
        t, m = bench(n, args.repeat, args.trials)
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{n:>6} {m:>7} " + " ".join(f"{t[b]:>9.3f}s" for b in available())
              + f"   {speed:6.1f}x")


if __name__ == "__main__":
    main()
