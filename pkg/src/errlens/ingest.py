"""Corpus ingestion: parse, validate and index line-delimited document records.

Input is UTF-8 JSONL, one document per line:

    {"id": str, "texts": [str] or [str, str], "label": str,
     "prediction": str (required for test records),
     "split": "train" | "test",
     "attributions": {class: [{"token": str, "pos": int, "score": num}, ...]},
     "embedding": [num, ...]            (optional),
     "features": {str: num}            (optional),
     "projection": [num, num]          (optional, precomputed 2D coords)}

Attribution `pos` indexes into the engine's token sequence: the concatenation
of the whitespace-split, punctuation-stripped tokens of all text parts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from errlens._tokenize import tokenize

ATTRIBUTION_TOP_K = 3


class ParseError(ValueError):
    """A line of the input file is not valid JSON or not an object."""


class ValidationError(ValueError):
    """A record violates the corpus schema or a cross-record invariant."""


@dataclass
class AttributionEntry:
    token: str
    pos: int
    score: float


@dataclass
class DocumentRecord:
    id: str
    text_parts: list[str]
    label: str
    prediction: str | None
    split: str
    attributions: dict[str, list[AttributionEntry]]
    embedding: np.ndarray | None = None
    extra_features: dict[str, float] = field(default_factory=dict)
    projection: tuple[float, float] | None = None
    # tokenized text parts, filled at load time and reused everywhere
    tokens_parts: list[list[str]] = field(default_factory=list)

    @property
    def all_tokens(self) -> list[str]:
        out: list[str] = []
        for part in self.tokens_parts:
            out.extend(part)
        return out


@dataclass
class DatasetStore:
    """Immutable-after-build view of the corpus.

    Built once by `load_dataset`; everything downstream only reads it.
    """

    records: list[DocumentRecord]
    test_records: list[DocumentRecord]
    train_records: list[DocumentRecord]
    classes: tuple[str, ...]
    error_labels: np.ndarray  # uint8, one per test record
    baseline_error_rate: float
    n_text_parts: int
    embedding_dim: int | None
    id_to_test_index: dict[str, int]

    @property
    def n_test(self) -> int:
        return len(self.test_records)

    @property
    def n_train(self) -> int:
        return len(self.train_records)

    def summary(self) -> dict:
        """Deterministic summary of the store (stable key order and values)."""
        return {
            "n_records": len(self.records),
            "n_train": self.n_train,
            "n_test": self.n_test,
            "classes": list(self.classes),
            "n_text_parts": self.n_text_parts,
            "embedding_dim": self.embedding_dim,
            "error_count": int(self.error_labels.sum()),
            "baseline_error_rate": self.baseline_error_rate,
        }


def truncate_attributions(record: DocumentRecord, k: int = ATTRIBUTION_TOP_K) -> DocumentRecord:
    """Keep, per class, the k entries with largest |score|.

    Ties break toward the smaller token position (stable sort on
    (-|score|, pos)). The record is modified in place and returned.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for cls, entries in record.attributions.items():
        if len(entries) > k:
            ranked = sorted(entries, key=lambda e: (-abs(e.score), e.pos))
            record.attributions[cls] = ranked[:k]
        else:
            record.attributions[cls] = sorted(entries, key=lambda e: (-abs(e.score), e.pos))
    return record


def compute_error_labels(store: DatasetStore) -> np.ndarray:
    """Bit per test record: 1 iff prediction differs from label."""
    return np.array(
        [0 if r.prediction == r.label else 1 for r in store.test_records],
        dtype=np.uint8,
    )


def _parse_record(obj: dict, lineno: int) -> DocumentRecord:
    def fail(msg: str):
        raise ValidationError(f"record at line {lineno}: {msg}")

    rid = obj.get("id")
    if not isinstance(rid, str) or not rid:
        fail("missing or non-string 'id'")

    texts = obj.get("texts")
    if not isinstance(texts, list) or not (1 <= len(texts) <= 2) or not all(
        isinstance(t, str) for t in texts
    ):
        fail(f"'texts' must be a list of 1 or 2 strings (id={rid})")

    split = obj.get("split")
    if split not in ("train", "test"):
        fail(f"'split' must be 'train' or 'test' (id={rid})")

    label = obj.get("label")
    if not isinstance(label, str) or not label:
        fail(f"missing 'label' (id={rid})")

    prediction = obj.get("prediction")
    if split == "test" and not isinstance(prediction, str):
        fail(f"test record missing 'prediction' (id={rid})")
    if prediction is not None and not isinstance(prediction, str):
        fail(f"'prediction' must be a string (id={rid})")

    raw_attr = obj.get("attributions")
    if split == "test":
        if not isinstance(raw_attr, dict):
            fail(f"test record missing 'attributions' object (id={rid})")
    elif raw_attr is None:
        raw_attr = {}
    elif not isinstance(raw_attr, dict):
        fail(f"'attributions' must be an object (id={rid})")

    attributions: dict[str, list[AttributionEntry]] = {}
    for cls, entries in raw_attr.items():
        if not isinstance(entries, list):
            fail(f"attributions for class {cls!r} must be a list (id={rid})")
        parsed = []
        for e in entries:
            try:
                parsed.append(
                    AttributionEntry(token=str(e["token"]), pos=int(e["pos"]), score=float(e["score"]))
                )
            except (KeyError, TypeError, ValueError):
                fail(f"bad attribution entry for class {cls!r} (id={rid})")
        attributions[cls] = parsed

    embedding = None
    if obj.get("embedding") is not None:
        try:
            embedding = np.asarray(obj["embedding"], dtype=np.float64)
        except (TypeError, ValueError):
            fail(f"'embedding' must be an array of numbers (id={rid})")
        if embedding.ndim != 1 or embedding.size == 0:
            fail(f"'embedding' must be a nonempty 1-D array (id={rid})")

    extra = {}
    if obj.get("features") is not None:
        if not isinstance(obj["features"], dict):
            fail(f"'features' must be an object (id={rid})")
        for name, val in obj["features"].items():
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                fail(f"feature {name!r} must be numeric (id={rid})")
            extra[str(name)] = float(val)

    projection = None
    if obj.get("projection") is not None:
        proj = obj["projection"]
        if (
            not isinstance(proj, list)
            or len(proj) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in proj)
        ):
            fail(f"'projection' must be [x, y] (id={rid})")
        projection = (float(proj[0]), float(proj[1]))

    rec = DocumentRecord(
        id=rid,
        text_parts=list(texts),
        label=label,
        prediction=prediction,
        split=split,
        attributions=attributions,
        embedding=embedding,
        extra_features=extra,
        projection=projection,
    )
    rec.tokens_parts = [tokenize(t) for t in rec.text_parts]
    return rec


def _validate_corpus(records: list[DocumentRecord]) -> tuple[tuple[str, ...], int, int | None]:
    seen_ids: set[str] = set()
    classes: set[str] = set()
    part_counts: set[int] = set()
    emb_dim: int | None = None

    for rec in records:
        if rec.id in seen_ids:
            raise ValidationError(f"duplicate record id {rec.id!r}")
        seen_ids.add(rec.id)
        classes.add(rec.label)
        if rec.prediction is not None:
            classes.add(rec.prediction)
        part_counts.add(len(rec.text_parts))
        if rec.embedding is not None:
            if emb_dim is None:
                emb_dim = int(rec.embedding.shape[0])
            elif rec.embedding.shape[0] != emb_dim:
                raise ValidationError(
                    f"mixed embedding dimensions: {emb_dim} vs {rec.embedding.shape[0]} (id={rec.id})"
                )

    if len(part_counts) > 1:
        raise ValidationError("all records must have the same number of text parts")

    # attribution classes come from the model, so they must belong to the class set
    for rec in records:
        for cls in rec.attributions:
            if cls not in classes:
                raise ValidationError(f"attribution class {cls!r} not in class set (id={rec.id})")
        n_tokens = sum(len(p) for p in rec.tokens_parts)
        for cls, entries in rec.attributions.items():
            for e in entries:
                if n_tokens == 0 or not (0 <= e.pos < n_tokens):
                    raise ValidationError(
                        f"attribution position {e.pos} out of range for {n_tokens} tokens (id={rec.id})"
                    )

    test = [r for r in records if r.split == "test"]
    with_emb = [r for r in test if r.embedding is not None]
    if with_emb and len(with_emb) != len(test):
        raise ValidationError("either all test records must have embeddings or none")
    with_proj = [r for r in test if r.projection is not None]
    if with_proj and len(with_proj) != len(test):
        raise ValidationError("either all test records must have 'projection' coords or none")

    return tuple(sorted(classes)), next(iter(part_counts)) if part_counts else 1, emb_dim


def load_dataset(path: str) -> DatasetStore:
    """Parse and validate a JSONL corpus file into a DatasetStore.

    Attribution lists are truncated to the top-3 entries per class by
    absolute score at load time, so everything downstream aggregates over
    the retained lists only.
    """
    records: list[DocumentRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"line {lineno}: record must be a JSON object")
            records.append(_parse_record(obj, lineno))

    classes, n_parts, emb_dim = _validate_corpus(records)

    for rec in records:
        truncate_attributions(rec)

    test_records = [r for r in records if r.split == "test"]
    train_records = [r for r in records if r.split == "train"]
    if not test_records:
        raise ValidationError("no test records")

    store = DatasetStore(
        records=records,
        test_records=test_records,
        train_records=train_records,
        classes=classes,
        error_labels=np.zeros(len(test_records), dtype=np.uint8),
        baseline_error_rate=0.0,
        n_text_parts=n_parts,
        embedding_dim=emb_dim,
        id_to_test_index={r.id: i for i, r in enumerate(test_records)},
    )
    store.error_labels = compute_error_labels(store)
    store.baseline_error_rate = float(store.error_labels.sum()) / len(test_records)
    return store
