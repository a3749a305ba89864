"""Random-forest feature filter for rule discovery.

Shallow CART-style trees (Gini splits, bootstrap rows, sqrt-F feature
subsampling per split) are grown over the binary incidence matrix against
the error labels. The forest is never used to predict: only the impurity
decrease it assigns to features matters, as a cheap filter that keeps the
rule search over a few hundred candidate tokens instead of the full
vocabulary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from errlens import kernels
from errlens.features import FeatureMatrix

if TYPE_CHECKING:
    from errlens.rules import DiscoveryConfig

__all__ = ["Forest", "SplitRecord", "train_filter_forest", "select_candidates"]

_FOREST_TAG = 0x464F52  # namespaces the forest RNG under the run seed


@dataclass
class SplitRecord:
    tree: int
    node: int
    feature: int
    n_node: int
    gain: float


@dataclass
class Forest:
    n_features: int
    n_trees: int
    importances: np.ndarray
    splits: list[SplitRecord] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.splits


def _gini(e: np.ndarray | float, n: np.ndarray | float):
    p = np.divide(e, n)
    return 2.0 * p * (1.0 - p)


def train_filter_forest(matrix: FeatureMatrix, errors: np.ndarray, config: "DiscoveryConfig") -> Forest:
    """Grow the filter forest; deterministic for a given config.rng_seed.

    Degenerate error vectors (all correct or all wrong) admit no
    discriminative split, so an empty forest is returned.
    """
    n = matrix.n_docs
    if errors.shape[0] != n:
        raise ValueError(f"matrix has {n} rows but error vector has {errors.shape[0]}")
    n_feat = matrix.n_features
    err = np.ascontiguousarray(errors, dtype=np.uint8)

    total_err = int(err.sum())
    if total_err == 0 or total_err == n:
        return Forest(n_features=n_feat, n_trees=0, importances=np.zeros(n_feat))

    indptr = np.ascontiguousarray(matrix.indptr, dtype=np.int64)
    indices = np.ascontiguousarray(matrix.indices, dtype=np.int32)
    csc = matrix.matrix.tocsc()
    m_sub = min(n_feat, math.ceil(math.sqrt(n_feat)))

    importances = np.zeros(n_feat, dtype=np.float64)
    splits: list[SplitRecord] = []

    for t in range(config.n_trees):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([config.rng_seed, _FOREST_TAG, t]))
        )
        rows = rng.integers(0, n, size=n).astype(np.int32)
        # DFS preorder; RNG draws happen in expansion order so trees are
        # reproducible independent of kernel backend
        stack = [(rows, 0)]
        node_id = 0
        while stack:
            node_rows, depth = stack.pop()
            nid = node_id
            node_id += 1
            n_node = node_rows.shape[0]
            e_node = int(err[node_rows].sum())
            if depth >= config.max_depth or n_node < 2 or e_node == 0 or e_node == n_node:
                continue

            feat_ids = np.sort(rng.choice(n_feat, size=m_sub, replace=False)).astype(np.int64)
            n1, e1 = kernels.node_split_counts(indptr, indices, node_rows, err, feat_ids, n_feat)
            n0 = n_node - n1
            e0 = e_node - e1
            valid = (n1 > 0) & (n0 > 0)
            if not valid.any():
                continue

            with np.errstate(invalid="ignore", divide="ignore"):
                w_child = np.where(
                    valid, (n1 * _gini(e1, n1) + n0 * _gini(e0, n0)) / n_node, np.inf
                )
            gain = _gini(e_node, n_node) - w_child
            best = int(np.argmax(np.where(valid, gain, -np.inf)))
            best_gain = float(gain[best])
            if best_gain <= 0.0:
                continue

            f = int(feat_ids[best])
            splits.append(SplitRecord(tree=t, node=nid, feature=f, n_node=n_node, gain=best_gain))
            importances[f] += (n_node / n) * best_gain / config.n_trees

            col_rows = csc.indices[csc.indptr[f] : csc.indptr[f + 1]]
            col_mask = np.zeros(n, dtype=bool)
            col_mask[col_rows] = True
            has = col_mask[node_rows]
            # push right (feature present) then left so left expands first
            stack.append((node_rows[has], depth + 1))
            stack.append((node_rows[~has], depth + 1))

    return Forest(n_features=n_feat, n_trees=config.n_trees, importances=importances, splits=splits)


def select_candidates(forest: Forest, cap: int = 500) -> list[int]:
    """Feature ids with positive importance, best first, truncated to cap."""
    if forest.is_empty:
        return []
    pos = np.nonzero(forest.importances > 0.0)[0]
    ranked = sorted(pos, key=lambda f: (-forest.importances[f], f))
    return [int(f) for f in ranked[:cap]]
