"""Compare the compiled MDL pair-scoring kernel with the numpy fallback.

Times greedy_model_search on selected trap populations (the hot spot of
every ecGA generation) with each backend and checks both learn the same
partition.

    python benchmarks/bench_kernels.py --pop 5000 --blocks 10 20 --repeat 3
"""

import argparse
import time

import numpy as np

from dynecga import _kernels
from dynecga.core import RandomStream, evaluate_population, random_population
from dynecga.model import greedy_model_search
from dynecga.operators import tournament_select
from dynecga.problems import StaticTrap


def selected_population(pop_size, k, blocks, seed):
    rng = RandomStream(seed)
    problem = StaticTrap(k, blocks)
    pop = evaluate_population(random_population(pop_size, problem.genome_length, rng), problem, 0)
    return tournament_select(pop, 16, rng)


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pop", type=int, default=5000)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--blocks", type=int, nargs="+", default=[10, 20])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.BACKEND != "cython":
        print("compiled kernel not built; only the fallback is available")
    fallback = _kernels.python_backend.pair_clogc
    print(f"{'loci':>6} {'compiled ms':>12} {'fallback ms':>12} {'speedup':>8}  same partition")
    for m in args.blocks:
        sel = selected_population(args.pop, args.k, m, args.seed)
        t_py, m_py = best_of(lambda: greedy_model_search(sel, kernel=fallback), args.repeat)
        if _kernels.BACKEND == "cython":
            t_c, m_c = best_of(lambda: greedy_model_search(sel), args.repeat)
            same = m_c.partition == m_py.partition
            print(f"{args.k * m:>6} {1e3 * t_c:>12.1f} {1e3 * t_py:>12.1f} {t_py / t_c:>7.1f}x  {same}")
        else:
            print(f"{args.k * m:>6} {'-':>12} {1e3 * t_py:>12.1f} {'-':>8}  -")


if __name__ == "__main__":
    main()
