#!/usr/bin/env python3
"""Time the pure-Python blossom against the compiled extension.

Both backends expose the same ``solve(n, edge_u, edge_v, edge_w,
maxcardinality)`` and implement the same O(n^3) algorithm; this script
runs them on identical random graphs, checks the matched totals agree,
and prints a per-size table.

    python benchmarks/bench_matching.py [--sizes 8,16,32,64] [--repeats 3]
"""

import argparse
import math
import time

import numpy as np

from nmwpm.matching import Matching, MatchGraph, _pure

try:
    from nmwpm.matching import _core
except ImportError:
    _core = None


def random_graph(n: int, rng: np.random.Generator, ties: bool) -> MatchGraph:
    if ties:
        w = rng.integers(0, 5, size=(n, n)).astype(np.float64)
    else:
        w = rng.uniform(0.0, 1.0, size=(n, n))
    w = np.triu(w, 1)
    return MatchGraph(n, w + w.T)


def flipped_edges(graph: MatchGraph):
    n = graph.n_vertices
    iu, ju = np.triu_indices(n, k=1)
    wts = (float(graph.weights.max()) + 1.0) - graph.weights[iu, ju]
    return iu.tolist(), ju.tolist(), wts.tolist()


def time_solve(impl, n, iu, ju, wts, repeats: int) -> tuple[float, list[int]]:
    best = math.inf
    mate = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        mate = impl.solve(n, iu, ju, wts, maxcardinality=True)
        best = min(best, time.perf_counter() - t0)
    return best, mate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="8,16,32,64,96",
                    help="comma-separated even vertex counts")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--graphs", type=int, default=5,
                    help="graphs per size (alternating floats/tied ints)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    if _core is None:
        print("compiled backend not available; timing pure only")

    print(f"{'n':>4} {'pure ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n in sizes:
        if n % 2:
            raise SystemExit(f"sizes must be even, got {n}")
        t_pure = t_core = 0.0
        for g in range(args.graphs):
            graph = random_graph(n, rng, ties=bool(g % 2))
            iu, ju, wts = flipped_edges(graph)
            dt, mate_p = time_solve(_pure, n, iu, ju, wts, args.repeats)
            t_pure += dt
            if _core is not None:
                dt, mate_c = time_solve(_core, n, iu, ju, wts, args.repeats)
                t_core += dt
                wp = Matching.from_mate(mate_p).total_weight(graph)
                wc = Matching.from_mate(mate_c).total_weight(graph)
                if abs(wp - wc) > 1e-9:
                    raise SystemExit(
                        f"backends disagree at n={n}: {wp} vs {wc}")
        if _core is None:
            print(f"{n:>4} {1e3 * t_pure:>10.2f} {'-':>10} {'-':>8}")
        else:
            print(f"{n:>4} {1e3 * t_pure:>10.2f} {1e3 * t_core:>10.2f} "
                  f"{t_pure / t_core:>8.1f}x")


if __name__ == "__main__":
    main()
