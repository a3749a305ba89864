import json

import numpy as np
import pytest


def record(
    rid,
    texts,
    label="pos",
    prediction=None,
    split="test",
    attributions=None,
    embedding=None,
    features=None,
    projection=None,
):
    rec = {"id": rid, "texts": texts, "label": label, "split": split}
    if split == "test":
        rec["prediction"] = prediction if prediction is not None else label
        rec["attributions"] = attributions if attributions is not None else {}
    else:
        if prediction is not None:
            rec["prediction"] = prediction
        if attributions is not None:
            rec["attributions"] = attributions
    if embedding is not None:
        rec["embedding"] = embedding
    if features is not None:
        rec["features"] = features
    if projection is not None:
        rec["projection"] = projection
    return rec


def write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return str(path)


@pytest.fixture
def corpus_file(tmp_path):
    def _write(records, name="corpus.jsonl"):
        return write_corpus(tmp_path / name, records)

    return _write


def synthetic_records(
    n_test=120,
    n_train=40,
    vocab_size=20,
    tokens_per_doc=6,
    error_rate=0.3,
    seed=0,
    planted=None,
    with_embeddings=False,
    embedding_dim=8,
):
    """Random filler corpus; `planted` = (token, n_docs, n_errors) injects a
    high-error token subpopulation with exact counts."""
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(vocab_size)]
    records = []
    planted_token, planted_docs, planted_errors = planted if planted else (None, 0, 0)
    for i in range(n_test):
        toks = [str(w) for w in rng.choice(words, size=tokens_per_doc, replace=False)]
        if i < planted_docs:
            toks[0] = planted_token
            err = i < planted_errors
        else:
            err = rng.random() < error_rate
        text = " ".join(toks)
        attr = {
            "pos": [
                {"token": toks[j], "pos": j, "score": float(rng.normal())}
                for j in range(min(3, len(toks)))
            ]
        }
        records.append(
            record(
                f"d{i}",
                [text],
                label="pos",
                prediction="neg" if err else "pos",
                attributions=attr,
                embedding=list(rng.normal(size=embedding_dim)) if with_embeddings else None,
            )
        )
    for i in range(n_train):
        toks = [str(w) for w in rng.choice(words, size=tokens_per_doc, replace=False)]
        records.append(record(f"t{i}", [" ".join(toks)], label=rng.choice(["pos", "neg"]).item(), split="train"))
    return records


@pytest.fixture
def small_store(corpus_file):
    """4 test docs, 1 mispredicted (baseline 0.25), plus 2 train docs."""
    from errlens.ingest import load_dataset

    recs = [
        record("a", ["the island is big"], label="pos", prediction="pos",
               attributions={"pos": [{"token": "island", "pos": 1, "score": 0.5}]}),
        record("b", ["want to be here"], label="pos", prediction="neg",
               attributions={"pos": [{"token": "want", "pos": 0, "score": -0.2}]}),
        record("c", ["hello there friend"], label="neg", prediction="neg",
               attributions={"neg": [{"token": "hello", "pos": 0, "score": 0.1}]}),
        record("d", ["the sea is blue"], label="neg", prediction="neg",
               attributions={}),
        record("tr1", ["the island has a beach"], label="pos", split="train"),
        record("tr2", ["desert sand everywhere"], label="neg", split="train"),
    ]
    return load_dataset(corpus_file(recs))
