#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot paths (Bell-analyzer trial simulation and the local-
strategy grid search) on identical inputs, checks that the outputs agree
bit for bit, and prints a comparison table.

Usage: python benchmarks/compare_backends.py [--trials N] [--resolution R]
"""

import argparse
import time

import numpy as np

from corrlab.kernels import implementations


def _random_states(rng, n):
    z = rng.standard_normal((n, 4))
    a = np.stack([z[:, 0] + 1j * z[:, 1], z[:, 2] + 1j * z[:, 3]], axis=1)
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    return np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(a[:, 1])


def bench(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2_000_000)
    parser.add_argument("--resolution", type=int, default=24)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = implementations()
    if "compiled" not in impls:
        print("compiled extension not available; timing the fallback only")

    rng = np.random.default_rng(0)
    n = args.trials
    a0, a1 = _random_states(rng, n)
    b0, b1 = _random_states(rng, n)
    j = rng.integers(0, 2, n, dtype=np.uint8)
    u = rng.random(n)

    n_axes = args.resolution**2
    alpha0 = rng.uniform(-1, 1, n_axes)
    beta0 = rng.uniform(-1, 1, n_axes)
    gamma0 = rng.uniform(-1, 1, (n_axes, n_axes))
    alpha1 = rng.uniform(-1, 1, n_axes)
    beta1 = rng.uniform(-1, 1, n_axes)
    gamma1 = rng.uniform(-1, 1, (n_axes, n_axes))

    results = {}
    outputs = {}
    for name, impl in impls.items():
        outcome = np.empty(n, np.uint8)
        correct = np.empty(n, np.uint8)
        t_trials = bench(
            lambda: impl.joint_trials(a0, a1, b0, b1, j, u, 0.88, 1, outcome, correct),
            args.repeats,
        )
        payoff = np.empty((n_axes, n_axes))
        rule = np.empty((n_axes, n_axes), np.uint8)
        t_grid = bench(
            lambda: impl.grid_best(alpha0, beta0, gamma0, alpha1, beta1, gamma1, payoff, rule),
            args.repeats,
        )
        results[name] = (t_trials, t_grid)
        outputs[name] = (outcome.copy(), correct.copy(), payoff.copy(), rule.copy())

    if len(outputs) == 2:
        a, b = outputs["fallback"], outputs["compiled"]
        identical = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"outputs bit-identical across backends: {identical}")

    print(f"\n{'backend':<10} {'joint_trials ' + str(n):>24} {'grid_best ' + str(n_axes) + 'x' + str(n_axes):>24}")
    for name, (t_trials, t_grid) in results.items():
        print(f"{name:<10} {t_trials * 1e3:>20.1f} ms {t_grid * 1e3:>21.1f} ms")
    if len(results) == 2:
        ft, fg = results["fallback"]
        ct, cg = results["compiled"]
        print(f"{'speedup':<10} {ft / ct:>20.2f} x {fg / cg:>21.2f} x")


if __name__ == "__main__":
    main()
