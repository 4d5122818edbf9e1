"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_backends.py
The numba path needs one warm-up call per kernel for JIT compilation;
that cost is excluded from the timings below.
"""

import time

import numpy as np

from bpsksec import _kernels
from bpsksec.channel import ChannelParams, crossover_prob
from bpsksec.protosim import default_quantizer_edges, toeplitz_columns, toeplitz_diagonal


def timeit(fn, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def leakage_inputs(n, bins, gamma, eta):
    import math

    p = ChannelParams(eta=eta, gamma=gamma)
    gse = p.eve_amplitude
    edges = default_quantizer_edges(bins, gse)
    full = np.concatenate(([-math.inf], edges, [math.inf]))
    cdf = lambda x: 0.5 * math.erfc(-x / math.sqrt(2.0))
    w0 = np.array([cdf(full[j + 1] - gse) - cdf(full[j] - gse) for j in range(bins)])
    w1 = np.array([cdf(full[j + 1] + gse) - cdf(full[j] + gse) for j in range(bins)])
    pq = 0.5 * (w0 + w1)
    eps_a = crossover_prob(eta)
    p_b1 = w1 / (w0 + w1)
    abit = p_b1 * (1 - eps_a) + (1 - p_b1) * eps_a
    cols = toeplitz_columns(toeplitz_diagonal(2, n, n), n, n)
    return cols, abit, pq, n


def main():
    if not _kernels.NUMBA_AVAILABLE:
        print("numba not available; nothing to compare")
        return

    rows = []

    # quadrature kernels
    for name, np_fn, nb_fn, reps in [
        (
            "mix_entropy(s=2, tol=1e-10)",
            lambda: _kernels.mix_entropy_numpy(2.0, 1e-10, 40, 8.0),
            lambda: _kernels.mix_entropy_numba(2.0, 1e-10, 40, 8.0),
            200,
        ),
        (
            "tw_soft(gse=1.4, tol=1e-10)",
            lambda: _kernels.tw_soft_numpy(1.4, 0.0786, 1e-10, 40, 8.0),
            lambda: _kernels.tw_soft_numba(1.4, 0.0786, 1e-10, 40, 8.0),
            200,
        ),
    ]:
        nb_fn()  # warm-up / JIT
        t_np = timeit(np_fn, reps)
        t_nb = timeit(nb_fn, reps)
        rows.append((name, t_np, t_nb))

    # leakage DFS at a small and the acceptance-sized configuration
    for n, bins, reps in [(7, 4, 3), (10, 4, 1)]:
        cols, abit, pq, m = leakage_inputs(n, bins, 1.0, 1.0)
        _kernels.key_leakage_numba(cols, abit, pq, m)  # warm-up
        t_np = timeit(lambda: _kernels.key_leakage_numpy(cols, abit, pq, m), reps)
        t_nb = timeit(lambda: _kernels.key_leakage_numba(cols, abit, pq, m), reps)
        rows.append((f"key_leakage(n={n}, m={n}, bins={bins})", t_np, t_nb))

    w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{w}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{w}}  {t_np*1e3:>8.3f}ms  {t_nb*1e3:>8.3f}ms  {t_np/t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
