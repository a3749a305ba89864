#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Both backends are imported directly (ignoring ERRLENS_NO_NUMBA) and timed on
workloads shaped like real corpora. Numba kernels get a warmup call so JIT
compilation is not billed to the measurement.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np
from scipy import sparse

from errlens.kernels import _numpy

try:
    from errlens.kernels import _numba
except ImportError:
    _numba = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_workloads(rng):
    n_docs, n_feat = 5000, 4000
    pattern = sparse.random(n_docs, n_feat, density=0.01, random_state=7, format="csr")
    csr = sparse.csr_matrix(
        (np.ones(pattern.nnz, dtype=np.uint8), pattern.indices, pattern.indptr),
        shape=(n_docs, n_feat),
    )
    indptr = csr.indptr.astype(np.int64)
    indices = csr.indices.astype(np.int32)
    err = (rng.random(n_docs) < 0.3).astype(np.uint8)
    rows = rng.integers(0, n_docs, size=n_docs).astype(np.int32)
    feat_ids = np.sort(rng.choice(n_feat, size=64, replace=False)).astype(np.int64)

    cols = (rng.random((n_docs, 300)) < 0.12).astype(np.uint8)
    flags = (rng.random(2000) < 0.3).astype(np.uint8)
    idx = rng.integers(0, 2000, size=(1000, 2000)).astype(np.int32)

    x = rng.normal(size=(800, 32))
    y = np.ascontiguousarray(rng.normal(size=(800, 2)))
    d = _numpy.sq_dists(x)
    p_cond, _ = _numpy.binary_search_affinities(d, np.log2(30.0), 1e-5, 100)
    p = (p_cond + p_cond.T) / (2 * 800)
    p = np.maximum(p, 1e-12)
    np.fill_diagonal(p, 0.0)

    return {
        "node_split_counts (5k docs, 4k feats)": lambda impl: impl.node_split_counts(
            indptr, indices, rows, err, feat_ids, n_feat
        ),
        "pair_counts (5k docs x 300 units)": lambda impl: impl.pair_counts(cols, err),
        "bootstrap_means (B=1000, n=2000)": lambda impl: impl.bootstrap_means(flags, idx),
        "sq_dists (800 x 32)": lambda impl: impl.sq_dists(x),
        "affinity search (800 pts)": lambda impl: impl.binary_search_affinities(
            d, np.log2(30.0), 1e-5, 100
        ),
        "tsne_grad (800 pts)": lambda impl: impl.tsne_grad(y, p, False),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    workloads = make_workloads(rng)

    name_w = max(len(k) for k in workloads) + 2
    print(f"{'kernel'.ljust(name_w)}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    print("-" * (name_w + 34))
    for name, call in workloads.items():
        t_np = timeit(lambda: call(_numpy), args.repeat)
        if _numba is not None:
            call(_numba)  # warmup / JIT
            t_nb = timeit(lambda: call(_numba), args.repeat)
            print(f"{name.ljust(name_w)}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name.ljust(name_w)}{t_np * 1e3:>10.2f}ms{'n/a':>12}{'-':>10}")
    if _numba is None:
        print("\nnumba not importable: only the numpy fallback was benchmarked")


if __name__ == "__main__":
    main()
