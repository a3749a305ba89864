"""Pure-numpy implementations of the hot kernels.

Selected when ERRLENS_NO_NUMBA=1 or numba is unavailable. Integer kernels
match the numba backend exactly; float kernels match up to summation order.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_LN2 = float(np.log(2.0))


def node_split_counts(indptr, indices, rows, err, feat_ids, n_features):
    """Counts for one tree node: per feature, how many bootstrap rows have
    the feature set, and how many of those are errors.

    `rows` carries bootstrap multiplicity (duplicate indices count twice).
    """
    mult = np.bincount(rows, minlength=indptr.shape[0] - 1).astype(np.int64)
    n1 = np.zeros(n_features, dtype=np.int64)
    e1 = np.zeros(n_features, dtype=np.int64)
    for r in np.nonzero(mult)[0]:
        cols = indices[indptr[r] : indptr[r + 1]]
        n1[cols] += mult[r]
        if err[r]:
            e1[cols] += mult[r]
    return n1[feat_ids], e1[feat_ids]


def pair_counts(cols, err):
    """Co-occurrence support and error counts for every column pair.

    cols: uint8 (n_docs, n_units) incidence; err: uint8 (n_docs,).
    Returns symmetric int64 (n_units, n_units) matrices whose diagonals are
    the single-unit counts.
    """
    f = cols.astype(np.float64)
    support = f.T @ f
    errors = (f * err.astype(np.float64)[:, None]).T @ f
    return np.rint(support).astype(np.int64), np.rint(errors).astype(np.int64)


def bootstrap_means(flags, idx):
    """Mean of `flags` under each row of resample indices `idx` (B, n)."""
    n = idx.shape[1]
    return flags[idx].astype(np.int64).sum(axis=1) / float(n)


def sq_dists(x):
    """Pairwise squared euclidean distances, zero diagonal."""
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def binary_search_affinities(d, target_bits, tol, max_iter):
    """Per-point Gaussian bandwidth search matching a Shannon entropy target.

    d: squared distance matrix. Returns (p_cond, entropy_bits) where row i of
    p_cond is the conditional distribution over j != i. Rows whose distances
    are all equal (e.g. duplicate-only inputs) get uniform affinities.
    """
    n = d.shape[0]
    p_cond = np.zeros((n, n), dtype=np.float64)
    entropies = np.zeros(n, dtype=np.float64)
    uniform_h = np.log2(n - 1.0) if n > 1 else 0.0

    for i in range(n):
        di = np.delete(d[i], i)
        d_min = di.min()
        d_max = di.max()
        if d_max - d_min <= 1e-12:
            row = np.full(n, 1.0 / (n - 1), dtype=np.float64)
            row[i] = 0.0
            p_cond[i] = row
            entropies[i] = uniform_h
            continue

        shifted = di - d_min
        beta = 1.0
        beta_min = -np.inf
        beta_max = np.inf
        p = None
        for _ in range(max_iter):
            w = np.exp(-shifted * beta)
            s = w.sum()
            p = w / s
            # H in nats via the shifted-log trick, then convert to bits
            h_nats = np.log(s) + beta * float(np.dot(shifted, p))
            h_bits = h_nats / _LN2
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
        p_cond[i, :i] = p[:i]
        p_cond[i, i + 1 :] = p[i:]
    return p_cond, entropies


def tsne_grad(y, p, want_kl):
    """Gradient (and optionally the value) of the KL objective for the
    Student-t embedding.

    p must have a zero diagonal; zero entries contribute zero to the KL.
    The KL needs two full log passes, so the descent loop skips it.
    """
    d = np.einsum("ij,ij->i", y, y)
    num = y @ y.T
    num *= -2.0
    num += d[:, None]
    num += d[None, :]
    np.maximum(num, 0.0, out=num)
    num += 1.0
    np.reciprocal(num, out=num)
    np.fill_diagonal(num, 0.0)
    z = num.sum()
    q = np.maximum(num / z, 1e-300)

    w = (p - q) * num
    grad = 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)

    if not want_kl:
        return grad, np.nan
    p_safe = np.where(p > 0.0, p, 1.0)
    kl_terms = p * (np.log(p_safe) - np.log(q))
    np.fill_diagonal(kl_terms, 0.0)
    return grad, float(kl_terms.sum())
