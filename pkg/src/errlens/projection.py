"""2D projection of document embeddings for the scatter view.

Exact (quadratic) t-SNE over the ingested embedding vectors: per-point
Gaussian bandwidths found by binary search on the Shannon entropy target,
Student-t low-dimensional kernel, momentum gradient descent with early
exaggeration, PCA initialization. Precomputed coordinates can be ingested
instead, and PCA alone serves as a deterministic fallback.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from errlens import kernels
from errlens.ingest import DatasetStore

__all__ = ["Projection2D", "pca_project", "tsne_project", "filter_projection", "project_store"]

_P_FLOOR = 1e-12
ENTROPY_TOL_BITS = 1e-5


@dataclass
class Projection2D:
    coords: np.ndarray  # (n, 2) float64, aligned with store.test_records
    doc_ids: list[str]
    method: str  # "tsne" | "pca" | "ingested"
    final_kl: float | None = None
    initial_kl: float | None = None


def pca_project(embeddings: np.ndarray, d: int = 2) -> np.ndarray:
    """Projection onto the top-d principal components of the centered data.

    Component signs follow a fixed convention (the largest-magnitude loading
    of each axis is made positive) so repeated runs agree exactly.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ValueError("need at least 3 embedding vectors")
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:d]
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    out = centered @ comps.T
    if comps.shape[0] < d:
        out = np.hstack([out, np.zeros((x.shape[0], d - comps.shape[0]))])
    return out


def joint_affinities(embeddings: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized t-SNE input affinities and the per-point entropies (bits)."""
    d = kernels.sq_dists(np.ascontiguousarray(embeddings, dtype=np.float64))
    target_bits = math.log2(perplexity)
    p_cond, entropies = kernels.binary_search_affinities(d, target_bits, ENTROPY_TOL_BITS, 100)
    n = d.shape[0]
    p = (p_cond + p_cond.T) / (2.0 * n)
    p = np.maximum(p, _P_FLOOR)
    np.fill_diagonal(p, 0.0)
    return p, entropies


def kl_divergence(y: np.ndarray, p: np.ndarray) -> float:
    _, kl = kernels.tsne_grad(np.ascontiguousarray(y, dtype=np.float64), p, True)
    return float(kl)


def tsne_project(
    embeddings: np.ndarray,
    perplexity: float = 30.0,
    iters: int = 1000,
    seed: int = 0,
    learning_rate: float = 200.0,
) -> tuple[np.ndarray, float, float]:
    """Exact t-SNE to 2D; returns (coords, initial_kl, final_kl).

    Deterministic for a given seed. Early exaggeration (x12) runs for the
    first 250 iterations with momentum 0.5, then momentum switches to 0.8.
    Duplicate-only inputs degrade to uniform affinities and still produce
    finite coordinates.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    n = x.shape[0]
    if n < 3:
        raise ValueError("need at least 3 embedding vectors")

    max_perp = (n - 1) / 3.0
    if perplexity > max_perp:
        warnings.warn(
            f"perplexity {perplexity} too large for {n} points; clamped to {max_perp:.3f}",
            stacklevel=2,
        )
        perplexity = max_perp

    p, _ = joint_affinities(x, perplexity)

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x74534E45])))
    y = pca_project(x, d=2)
    std = float(y[:, 0].std())
    if std > 0.0:
        y = y / std * 1e-4
    else:
        y = rng.normal(0.0, 1e-4, size=(n, 2))
    y = np.ascontiguousarray(y)

    initial_kl = kl_divergence(y, p)

    exaggeration = 12.0
    exag_until = min(250, iters)
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    p_run = p * exaggeration

    for it in range(iters):
        if it == exag_until:
            p_run = p
        momentum = 0.5 if it < 250 else 0.8
        grad, _ = kernels.tsne_grad(y, p_run, False)
        inc = (update * grad) < 0.0
        gains[inc] += 0.2
        gains[~inc] *= 0.8
        np.clip(gains, 0.01, None, out=gains)
        update = momentum * update - learning_rate * (gains * grad)
        y = y + update
        y = y - y.mean(axis=0)

    final_kl = kl_divergence(y, p)
    if not np.isfinite(y).all():
        raise FloatingPointError("t-SNE produced non-finite coordinates")
    return y, initial_kl, final_kl


def project_store(
    store: DatasetStore,
    method: str = "auto",
    perplexity: float = 30.0,
    iters: int = 1000,
    seed: int = 0,
) -> Projection2D | None:
    """Projection for the test split: ingested coords when present,
    otherwise t-SNE (or PCA) over the ingested embeddings. None when the
    corpus carries neither coordinates nor embeddings."""
    ids = [r.id for r in store.test_records]
    has_ingested = all(r.projection is not None for r in store.test_records)
    if has_ingested and method in ("auto", "ingested"):
        coords = np.array([r.projection for r in store.test_records], dtype=np.float64)
        return Projection2D(coords=coords, doc_ids=ids, method="ingested")

    if any(r.embedding is None for r in store.test_records):
        return None
    emb = np.stack([r.embedding for r in store.test_records])
    if method == "pca":
        return Projection2D(coords=pca_project(emb), doc_ids=ids, method="pca")
    coords, kl0, kl1 = tsne_project(emb, perplexity=perplexity, iters=iters, seed=seed)
    return Projection2D(coords=coords, doc_ids=ids, method="tsne", final_kl=kl1, initial_kl=kl0)


def filter_projection(
    projection: Projection2D, subpop: list[str], store: DatasetStore
) -> list[tuple[str, float, float, bool]]:
    """The subpopulation's points with correctness flags, coordinates
    untouched (the map never re-fits per subpopulation)."""
    wanted = set(subpop)
    err = store.error_labels
    out = []
    for i, doc_id in enumerate(projection.doc_ids):
        if doc_id in wanted:
            x, y = projection.coords[i]
            correct = not bool(err[store.id_to_test_index[doc_id]])
            out.append((doc_id, float(x), float(y), correct))
    return out
