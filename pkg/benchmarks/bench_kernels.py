#!/usr/bin/env python3
"""Benchmark the compiled reachability kernel against the numpy fallback.

Both backends consume identical pre-drawn coin arrays, so their per-trial
outcomes must match exactly; the benchmark asserts that while timing them.

    python3 benchmarks/bench_kernels.py --n 100000 --trials 50
"""
import argparse
import time

import numpy as np

from percopt import DegreeDistribution, IncentivePolicy, PercolationParams, build_network
from percopt._core import _fallback
from percopt.simulator import trial_seed

try:
    from percopt._core import _kernels
except ImportError:
    _kernels = None


def run_backend(kernel, net, threshold, trials, master_seed):
    reached = []
    start = time.perf_counter()
    for i in range(trials):
        rng = np.random.default_rng(trial_seed(master_seed, i))
        coins = rng.random(net.indices.size)
        seed_node = int(rng.integers(net.n))
        mask = kernel.reach_mask(net.indptr, net.indices, threshold, coins, seed_node)
        reached.append(int(mask.sum()))
    elapsed = time.perf_counter() - start
    return reached, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100_000, help="node count")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--alpha", type=float, default=2.5, help="power-law exponent")
    parser.add_argument("--k-max", type=int, default=100)
    parser.add_argument("--t1", type=float, default=0.35)
    parser.add_argument("--t2", type=float, default=0.6)
    parser.add_argument("--phi", type=float, default=0.5, help="constant incentive fraction")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    dist = DegreeDistribution.power_law(args.alpha, 1, args.k_max)
    policy = IncentivePolicy.constant(args.phi, args.k_max)
    params = PercolationParams(args.t1, args.t2)
    net = build_network(dist, policy, args.n, args.seed)
    threshold = np.where(net.node_type == 2, params.t2, params.t1)
    print(f"graph: n={net.n}, directed entries={net.indices.size}, "
          f"mean degree={net.node_degree.mean():.3f}")

    backends = [("fallback", _fallback)]
    if _kernels is not None:
        backends.insert(0, ("compiled", _kernels))
    else:
        print("compiled kernel not built; timing fallback only")

    results = {}
    for name, kernel in backends:
        reached, elapsed = run_backend(kernel, net, threshold, args.trials, args.seed)
        results[name] = (reached, elapsed)
        print(f"{name:>9}: {elapsed:8.3f} s total, {1e3 * elapsed / args.trials:8.3f} ms/trial, "
              f"mean reached {np.mean(reached):.1f}")

    if len(results) == 2:
        assert results["compiled"][0] == results["fallback"][0], "backends disagree"
        speedup = results["fallback"][1] / results["compiled"][1]
        print(f"outcomes identical across backends; compiled speedup x{speedup:.2f}")


if __name__ == "__main__":
    main()
