"""Token n-gram features, high-level numeric features and the incidence matrix.

Token features are surface 1-3-grams; a document has a feature if the gram
occurs contiguously in any text part. High-level features (document length,
premise/hypothesis word overlap, plus any ingested numeric metrics) are
bucketed into Low/Medium/High at the 10th/90th percentile of the test split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from errlens._tokenize import extract_ngrams, ngrams_of_tokens
from errlens.ingest import DatasetStore, DocumentRecord

__all__ = [
    "TokenFeature",
    "HighLevelFeature",
    "FeatureMatrix",
    "CorpusFeatures",
    "extract_ngrams",
    "build_vocabulary",
    "build_feature_matrix",
    "compute_high_level_features",
    "bucketize",
    "build_features",
    "default_min_df",
]

BUCKETS = ("Low", "Medium", "High")
MIN_BUCKET_VALUES = 10


@dataclass
class TokenFeature:
    tokens: tuple[str, ...]
    id: int
    doc_frequency_test: int
    doc_frequency_train_by_label: dict[str, int] = field(default_factory=dict)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class HighLevelFeature:
    name: str
    values: np.ndarray  # float64 per test record
    t_low: float
    t_high: float
    buckets: list[str]  # per test record, one of BUCKETS

    def bucket_of(self, value: float) -> str:
        if value < self.t_low:
            return "Low"
        if value > self.t_high:
            return "High"
        return "Medium"


@dataclass
class FeatureMatrix:
    """Binary incidence of token features over the test split (CSR)."""

    matrix: sparse.csr_matrix
    n_docs: int
    n_features: int

    @property
    def indptr(self) -> np.ndarray:
        return self.matrix.indptr.astype(np.int64)

    @property
    def indices(self) -> np.ndarray:
        return self.matrix.indices.astype(np.int32)

    def _csc(self) -> sparse.csc_matrix:
        cached = getattr(self, "_csc_cache", None)
        if cached is None:
            cached = self.matrix.tocsc()
            self._csc_cache = cached
        return cached

    def column_mask(self, feature_id: int) -> np.ndarray:
        csc = self._csc()
        rows = csc.indices[csc.indptr[feature_id] : csc.indptr[feature_id + 1]]
        mask = np.zeros(self.n_docs, dtype=bool)
        mask[rows] = True
        return mask

    def dense_columns(self, feature_ids: list[int]) -> np.ndarray:
        """uint8 (n_docs, len(feature_ids)) slice of the incidence matrix."""
        sub = self.matrix[:, feature_ids]
        return np.ascontiguousarray(sub.toarray().astype(np.uint8))


def default_min_df(n_test: int) -> int:
    return max(2, math.ceil(0.005 * n_test))


def _doc_ngrams(record: DocumentRecord, n_max: int = 3) -> set[tuple[str, ...]]:
    grams: set[tuple[str, ...]] = set()
    for tokens in record.tokens_parts:
        grams |= ngrams_of_tokens(tokens, n_max)
    return grams


def build_vocabulary(store: DatasetStore, min_df: int) -> list[TokenFeature]:
    """All 1-3-grams with test-split document frequency >= min_df.

    Ids are dense and assigned in lexicographic order of the token tuples,
    so the vocabulary is identical across runs. Train-split per-label
    document frequencies are attached for the training-distribution view.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")

    df_test: dict[tuple[str, ...], int] = {}
    for rec in store.test_records:
        for gram in _doc_ngrams(rec):
            df_test[gram] = df_test.get(gram, 0) + 1

    kept = sorted(gram for gram, df in df_test.items() if df >= min_df)
    if not kept:
        raise ValueError("min_df too high: vocabulary is empty")

    vocab = [
        TokenFeature(tokens=gram, id=i, doc_frequency_test=df_test[gram])
        for i, gram in enumerate(kept)
    ]
    index = {f.tokens: f for f in vocab}

    for rec in store.train_records:
        for gram in _doc_ngrams(rec):
            feat = index.get(gram)
            if feat is not None:
                by_label = feat.doc_frequency_train_by_label
                by_label[rec.label] = by_label.get(rec.label, 0) + 1

    return vocab


def build_feature_matrix(store: DatasetStore, vocab: list[TokenFeature]) -> FeatureMatrix:
    """Binary document x feature incidence over the test split."""
    if not vocab:
        raise ValueError("vocabulary is empty")
    index = {f.tokens: f.id for f in vocab}
    indptr = [0]
    indices: list[int] = []
    for rec in store.test_records:
        cols = sorted(index[g] for g in _doc_ngrams(rec) if g in index)
        indices.extend(cols)
        indptr.append(len(indices))
    mat = sparse.csr_matrix(
        (
            np.ones(len(indices), dtype=np.uint8),
            np.asarray(indices, dtype=np.int32),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(store.test_records), len(vocab)),
    )
    return FeatureMatrix(matrix=mat, n_docs=len(store.test_records), n_features=len(vocab))


def _nearest_rank(q: float, n: int) -> int:
    """1-indexed nearest-rank: ceil(q * n), guarded against float dust."""
    rank = math.ceil(q * n - 1e-9)
    return min(max(rank, 1), n)


def bucketize(
    values: np.ndarray | list[float], p_low: float = 10, p_high: float = 90
) -> tuple[float, float, list[str]]:
    """Nearest-rank percentile thresholds plus the per-value bucket labels.

    Low means strictly below the p_low threshold, High strictly above the
    p_high threshold, Medium otherwise.
    """
    vals = np.asarray(values, dtype=np.float64)
    n = vals.shape[0]
    if n < MIN_BUCKET_VALUES:
        raise ValueError("insufficient data for bucketing")
    ordered = np.sort(vals)
    t_low = float(ordered[_nearest_rank(p_low / 100.0, n) - 1])
    t_high = float(ordered[_nearest_rank(p_high / 100.0, n) - 1])
    buckets = ["Low" if v < t_low else "High" if v > t_high else "Medium" for v in vals]
    return t_low, t_high, buckets


def doc_length(record: DocumentRecord) -> float:
    return float(sum(len(p) for p in record.tokens_parts))


def word_overlap(record: DocumentRecord) -> float:
    """|T1 n T2| / |T2| over unigram sets; part 2 is the hypothesis side."""
    t1 = set(record.tokens_parts[0])
    t2 = set(record.tokens_parts[1])
    if not t2:
        return 0.0
    return len(t1 & t2) / len(t2)


COMPUTED_FEATURES = {"doc_length": doc_length, "overlap": word_overlap}


def high_level_value(name: str, record: DocumentRecord) -> float | None:
    """Value of a high-level feature for any record (train or test)."""
    fn = COMPUTED_FEATURES.get(name)
    if fn is not None:
        if name == "overlap" and len(record.tokens_parts) < 2:
            return None
        return fn(record)
    return record.extra_features.get(name)


def compute_high_level_features(store: DatasetStore) -> list[HighLevelFeature]:
    """Document length, word overlap (two-part corpora only) and every
    ingested numeric feature, each bucketized over the test split."""
    specs: list[tuple[str, list[float]]] = []
    specs.append(("doc_length", [doc_length(r) for r in store.test_records]))
    if store.n_text_parts == 2:
        specs.append(("overlap", [word_overlap(r) for r in store.test_records]))

    ingested_names = sorted({name for r in store.test_records for name in r.extra_features})
    for name in ingested_names:
        if name in COMPUTED_FEATURES:
            raise ValueError(f"ingested feature {name!r} collides with a computed feature")
        vals = []
        for rec in store.test_records:
            if name not in rec.extra_features:
                raise ValueError(f"ingested feature {name!r} missing for test record {rec.id!r}")
            vals.append(rec.extra_features[name])
        specs.append((name, vals))

    features = []
    for name, vals in specs:
        t_low, t_high, buckets = bucketize(vals)
        features.append(
            HighLevelFeature(
                name=name,
                values=np.asarray(vals, dtype=np.float64),
                t_low=t_low,
                t_high=t_high,
                buckets=buckets,
            )
        )
    return features


@dataclass
class CorpusFeatures:
    """Everything discovery and analysis need, built once per corpus."""

    vocabulary: list[TokenFeature]
    matrix: FeatureMatrix
    high_level: list[HighLevelFeature]
    min_df: int

    def feature_by_tokens(self, tokens: tuple[str, ...]) -> TokenFeature | None:
        if not hasattr(self, "_by_tokens"):
            self._by_tokens = {f.tokens: f for f in self.vocabulary}
        return self._by_tokens.get(tokens)

    def high_level_by_name(self, name: str) -> HighLevelFeature | None:
        for f in self.high_level:
            if f.name == name:
                return f
        return None

    def bucket_mask(self, name: str, bucket: str) -> np.ndarray:
        feat = self.high_level_by_name(name)
        if feat is None:
            raise KeyError(f"unknown high-level feature {name!r}")
        return np.array([b == bucket for b in feat.buckets], dtype=bool)


def build_features(store: DatasetStore, min_df: int | None = None) -> CorpusFeatures:
    """Vocabulary, incidence matrix and bucketed high-level features.

    High-level features are skipped (with no error) when the test split is
    too small to bucketize.
    """
    if min_df is None:
        min_df = default_min_df(store.n_test)
    vocab = build_vocabulary(store, min_df)
    matrix = build_feature_matrix(store, vocab)
    if store.n_test >= MIN_BUCKET_VALUES:
        high_level = compute_high_level_features(store)
    else:
        high_level = []
    return CorpusFeatures(vocabulary=vocab, matrix=matrix, high_level=high_level, min_df=min_df)
