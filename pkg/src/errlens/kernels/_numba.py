"""Numba-jitted implementations of the hot kernels.

Same signatures and semantics as errlens.kernels._numpy; loop-structured for
nopython mode. Compiled lazily on first call, cached on disk.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NAME = "numba"

_LN2 = math.log(2.0)


@njit(cache=True)
def node_split_counts(indptr, indices, rows, err, feat_ids, n_features):
    n1_full = np.zeros(n_features, dtype=np.int64)
    e1_full = np.zeros(n_features, dtype=np.int64)
    for k in range(rows.shape[0]):
        r = rows[k]
        is_err = err[r] != 0
        for p in range(indptr[r], indptr[r + 1]):
            j = indices[p]
            n1_full[j] += 1
            if is_err:
                e1_full[j] += 1
    m = feat_ids.shape[0]
    n1 = np.empty(m, dtype=np.int64)
    e1 = np.empty(m, dtype=np.int64)
    for t in range(m):
        n1[t] = n1_full[feat_ids[t]]
        e1[t] = e1_full[feat_ids[t]]
    return n1, e1


@njit(cache=True)
def pair_counts(cols, err):
    n, n_units = cols.shape
    support = np.zeros((n_units, n_units), dtype=np.int64)
    errors = np.zeros((n_units, n_units), dtype=np.int64)
    active = np.empty(n_units, dtype=np.int64)
    for i in range(n):
        cnt = 0
        for a in range(n_units):
            if cols[i, a] != 0:
                active[cnt] = a
                cnt += 1
        is_err = err[i] != 0
        for x in range(cnt):
            a = active[x]
            for y in range(x, cnt):
                b = active[y]
                support[a, b] += 1
                if is_err:
                    errors[a, b] += 1
    for a in range(n_units):
        for b in range(a + 1, n_units):
            support[b, a] = support[a, b]
            errors[b, a] = errors[a, b]
    return support, errors


@njit(cache=True)
def bootstrap_means(flags, idx):
    b, n = idx.shape
    means = np.empty(b, dtype=np.float64)
    for i in range(b):
        total = 0
        for j in range(n):
            total += flags[idx[i, j]]
        means[i] = total / n
    return means


@njit(cache=True)
def sq_dists(x):
    n = x.shape[0]
    g = np.dot(x, x.T)
    d = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        d[i, i] = 0.0
        for j in range(i + 1, n):
            v = g[i, i] + g[j, j] - 2.0 * g[i, j]
            if v < 0.0:
                v = 0.0
            d[i, j] = v
            d[j, i] = v
    return d


@njit(cache=True)
def binary_search_affinities(d, target_bits, tol, max_iter):
    n = d.shape[0]
    p_cond = np.zeros((n, n), dtype=np.float64)
    entropies = np.zeros(n, dtype=np.float64)
    uniform_h = math.log(n - 1.0) / _LN2 if n > 1 else 0.0

    shifted = np.empty(n - 1, dtype=np.float64)
    p = np.empty(n - 1, dtype=np.float64)

    for i in range(n):
        d_min = np.inf
        d_max = -np.inf
        k = 0
        for j in range(n):
            if j == i:
                continue
            v = d[i, j]
            shifted[k] = v
            k += 1
            if v < d_min:
                d_min = v
            if v > d_max:
                d_max = v

        if d_max - d_min <= 1e-12:
            for j in range(n):
                if j != i:
                    p_cond[i, j] = 1.0 / (n - 1)
            entropies[i] = uniform_h
            continue

        for t in range(n - 1):
            shifted[t] -= d_min

        beta = 1.0
        beta_min = -np.inf
        beta_max = np.inf
        h_bits = 0.0
        for _ in range(max_iter):
            s = 0.0
            for t in range(n - 1):
                p[t] = math.exp(-shifted[t] * beta)
                s += p[t]
            dot = 0.0
            for t in range(n - 1):
                p[t] /= s
                dot += shifted[t] * p[t]
            h_bits = (math.log(s) + beta * dot) / _LN2
            diff = h_bits - target_bits
            if abs(diff) <= tol:
                break
            if diff > 0.0:
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if beta_min == -np.inf else (beta + beta_min) / 2.0

        entropies[i] = h_bits
        k = 0
        for j in range(n):
            if j != i:
                p_cond[i, j] = p[k]
                k += 1
    return p_cond, entropies


@njit(cache=True)
def tsne_grad(y, p, want_kl):
    n, dim = y.shape
    num = np.empty((n, n), dtype=np.float64)
    z = 0.0
    for i in range(n):
        num[i, i] = 0.0
        for j in range(i + 1, n):
            sq = 0.0
            for c in range(dim):
                diff = y[i, c] - y[j, c]
                sq += diff * diff
            v = 1.0 / (1.0 + sq)
            num[i, j] = v
            num[j, i] = v
            z += 2.0 * v

    grad = np.zeros((n, dim), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            nij = num[i, j]
            qij = nij / z
            if qij < 1e-300:
                qij = 1e-300
            w = 4.0 * (p[i, j] - qij) * nij
            for c in range(dim):
                grad[i, c] += w * (y[i, c] - y[j, c])

    kl = np.nan
    if want_kl:
        kl = 0.0
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                pij = p[i, j]
                if pij > 0.0:
                    qij = num[i, j] / z
                    if qij < 1e-300:
                        qij = 1e-300
                    kl += pij * (math.log(pij) - math.log(qij))
    return grad, kl
