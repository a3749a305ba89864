import numpy as np
import pytest

from errlens.analysis import Concept, ConceptRegistry, RuleEvaluator, compare_concepts
from errlens.features import build_features
from errlens.ingest import load_dataset
from errlens.rules import Condition, DiscoveryConfig, Rule, RuleMetrics, discover

from conftest import record, synthetic_records, write_corpus
from oracles import doc_contains


def mk_rule(*conds):
    return Rule(conditions=tuple(conds), metrics=RuleMetrics(0, 0.0, 0.0, None, None, None))


@pytest.fixture
def nli_like(tmp_path):
    rng = np.random.default_rng(4)
    recs = []
    for i in range(60):
        premise = " ".join(str(w) for w in rng.choice([f"p{k}" for k in range(15)], size=5, replace=False))
        hyp_words = ["island"] if i % 4 == 0 else ["mainland"]
        hyp = " ".join(hyp_words + [f"h{i % 7}"])
        err = i % 4 == 0 and i % 8 == 0
        recs.append(
            record(
                f"d{i}",
                [premise, hyp],
                label="entailment",
                prediction="neutral" if err else "entailment",
                attributions={"entailment": [{"token": "island", "pos": 5, "score": 0.4}]}
                if i % 4 == 0
                else {},
            )
        )
    for i in range(30):
        toks = ["island"] if i < 15 else ["desert"]
        recs.append(
            record(
                f"t{i}",
                ["train premise " + " ".join(toks), "train hyp"],
                label="entailment" if i % 2 == 0 else "neutral",
                split="train",
            )
        )
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    return store, feats


def test_match_rule_token_present(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    rule = mk_rule(Condition.token(("island",)))
    doc_with = next(r for r in store.test_records if "island" in r.text_parts[1])
    doc_without = next(r for r in store.test_records if "island" not in r.text_parts[1])
    assert ev.match_rule(rule, doc_with)
    assert not ev.match_rule(rule, doc_without)


def test_match_rule_conjunction_fails_on_bucket(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    overlap = feats.high_level_by_name("overlap")
    doc_with = next(
        r
        for i, r in enumerate(store.test_records)
        if "island" in r.text_parts[1] and overlap.buckets[i] == "Medium"
    )
    rule = mk_rule(Condition.token(("island",)), Condition.high_level("overlap", "Low"))
    assert not ev.match_rule(rule, doc_with)


def test_match_rule_concept_any_token(corpus_file):
    recs = [
        record("a", ["i saw her yesterday"], prediction="pos"),
        record("b", ["nothing relevant here"], prediction="pos"),
    ]
    store = load_dataset(corpus_file(recs))
    feats = build_features(store, min_df=1)
    registry = ConceptRegistry()
    concept = registry.add("female-pronouns", [("she",), ("her",), ("hers",)])
    ev = RuleEvaluator(store, feats, concepts=registry)
    rule = mk_rule(Condition.concept(concept.id))
    assert ev.match_rule(rule, store.test_records[0])
    assert not ev.match_rule(rule, store.test_records[1])


def test_dangling_concept_id_raises(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    rule = mk_rule(Condition.concept(99))
    with pytest.raises(KeyError, match="unknown concept"):
        ev.match_rule(rule, store.test_records[0])


def test_stats_by_label_breakdown(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    stats = ev.subpopulation_stats(mk_rule(Condition.token(("island",))))
    assert stats.error_count == sum(stats.errors_by_label.values())
    assert stats.error_count == sum(stats.errors_by_prediction.values())
    assert set(stats.errors_by_label) == {"entailment"}
    assert set(stats.errors_by_prediction) == {"neutral"}


def test_train_token_frequency(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    stats = ev.subpopulation_stats(mk_rule(Condition.token(("island",))))
    per_label = stats.train_token_frequency["island"]
    assert sum(per_label.values()) == 15
    assert stats.train_match_count == 15


def test_stats_match_bruteforce_recount(tmp_path):
    recs = synthetic_records(n_test=100, n_train=30, seed=41)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    ev = RuleEvaluator(store, feats)
    token = feats.vocabulary[3].tokens
    stats = ev.subpopulation_stats(mk_rule(Condition.token(token)))

    size = err_count = 0
    by_label = {}
    for i, rec in enumerate(store.test_records):
        if doc_contains(rec.text_parts, token):
            size += 1
            if store.error_labels[i]:
                err_count += 1
                by_label[rec.label] = by_label.get(rec.label, 0) + 1
    assert stats.size == size
    assert stats.error_count == err_count
    assert stats.errors_by_label == by_label
    train = sum(1 for r in store.train_records if doc_contains(r.text_parts, token))
    assert stats.train_match_count == train


def test_empty_subpopulation_is_not_error(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    stats = ev.subpopulation_stats(mk_rule(Condition.token(("zzzunseen",))))
    assert stats.size == 0
    assert stats.errors_by_label == {}
    metrics, _ = ev.evaluate_conditions((Condition.token(("zzzunseen",)),))
    assert metrics.support_count == 0
    assert metrics.p_value is None


def test_concept_of_all_vocab_tokens_is_whole_test_set(tmp_path):
    recs = synthetic_records(n_test=60, n_train=0, seed=43)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    registry = ConceptRegistry()
    concept = registry.add("everything", [f.tokens for f in feats.vocabulary if len(f.tokens) == 1])
    ev = RuleEvaluator(store, feats, concepts=registry)
    summary = ev.evaluate_concept(concept)
    # every doc contains at least one vocab unigram in this corpus
    assert summary.subpop_size == store.n_test
    assert summary.error_rate == store.baseline_error_rate


def test_concept_summary_matches_scan(tmp_path):
    recs = synthetic_records(n_test=80, n_train=0, seed=47)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    registry = ConceptRegistry()
    grams = [("w1",), ("w2", "w3"), ("zzz",)]
    concept = registry.add("mix", grams)
    ev = RuleEvaluator(store, feats, concepts=registry)
    summary = ev.evaluate_concept(concept)
    size = sum(
        1 for r in store.test_records if any(doc_contains(r.text_parts, g) for g in grams)
    )
    errs = sum(
        int(store.error_labels[i])
        for i, r in enumerate(store.test_records)
        if any(doc_contains(r.text_parts, g) for g in grams)
    )
    assert summary.subpop_size == size
    assert summary.error_rate == (errs / size if size else None)


def test_single_token_concept_equals_token_rule_metrics(tmp_path):
    recs = synthetic_records(n_test=90, n_train=0, seed=53)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    registry = ConceptRegistry()
    token = feats.vocabulary[0].tokens
    concept = registry.add("single", [token])
    ev = RuleEvaluator(store, feats, concepts=registry)
    summary = ev.evaluate_concept(concept)
    metrics, _ = ev.evaluate_conditions((Condition.token(token),))
    assert summary.subpop_size == metrics.support_count
    assert summary.error_rate == metrics.error_rate
    assert summary.p_value == metrics.p_value


def test_empty_concept_subpop_marked_undefined(nli_like):
    store, feats = nli_like
    registry = ConceptRegistry()
    concept = registry.add("ghost", [("qqqq",)])
    ev = RuleEvaluator(store, feats, concepts=registry)
    summary = ev.evaluate_concept(concept)
    assert summary.subpop_size == 0
    assert summary.error_rate is None
    assert summary.p_value is None


def test_concept_registry_rules():
    registry = ConceptRegistry()
    c = registry.add("a", [("x",)])
    with pytest.raises(ValueError, match="already in use"):
        registry.add("a", [("y",)])
    updated = registry.add("a-renamed", [("y",)], concept_id=c.id)
    assert updated.id == c.id
    with pytest.raises(ValueError, match="nonempty"):
        registry.add("empty", [])
    with pytest.raises(ValueError, match="1-3"):
        registry.add("long", [("a", "b", "c", "d")])


def test_overview_accuracy_identity_and_ranking(tmp_path):
    recs = synthetic_records(
        n_test=400, n_train=20, vocab_size=25, seed=59, planted=("island", 40, 28)
    )
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    rs = discover(store, feats.vocabulary, feats.matrix, feats.high_level, DiscoveryConfig(rng_seed=2))
    ev = RuleEvaluator(store, feats)
    report = ev.overview(rs)
    assert report.accuracy + report.baseline_error_rate == 1.0
    assert report.top_tokens[0].conditions[0].tokens == ("island",)
    assert len(report.top_tokens) <= 10
    assert len(report.top_high_level) <= 5
    for r in report.top_tokens:
        assert len(r.conditions) == 1 and r.conditions[0].kind == "token"


def test_compare_concepts_overlap_flags(tmp_path):
    recs = synthetic_records(n_test=100, n_train=0, seed=61)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    registry = ConceptRegistry()
    ev = RuleEvaluator(store, feats, concepts=registry)

    from errlens.analysis import ConceptSummary

    a = (Concept(1, "a", [("x",)]), ConceptSummary(10, 0.3, 0.5, 0.2, 0.4))
    b = (Concept(2, "b", [("y",)]), ConceptSummary(10, 0.4, 0.5, 0.35, 0.5))
    c = (Concept(3, "c", [("z",)]), ConceptSummary(10, 0.35, 0.5, 0.1, 0.2))
    overlaps = dict(((x, y), f) for x, y, f in compare_concepts([a, b, c]))
    assert overlaps[(1, 2)] is True  # [0.2,0.4] and [0.35,0.5]
    assert overlaps[(1, 3)] is True  # [0.2,0.4] and [0.1,0.2] touch at 0.2
    assert overlaps[(2, 3)] is False  # [0.35,0.5] vs [0.1,0.2]

    with pytest.raises(ValueError, match="at least 2"):
        compare_concepts([a])


def test_anti_monotone_subpopulation_size(tmp_path):
    recs = synthetic_records(n_test=150, n_train=0, seed=67)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    feats = build_features(store, min_df=2)
    ev = RuleEvaluator(store, feats)
    t1 = Condition.token(feats.vocabulary[0].tokens)
    t2 = Condition.token(feats.vocabulary[1].tokens)
    m1, _ = ev.evaluate_conditions((t1,))
    m2, _ = ev.evaluate_conditions((t1, t2))
    assert m2.support_count <= m1.support_count


def test_stats_size_equals_match_rule_sum(nli_like):
    store, feats = nli_like
    ev = RuleEvaluator(store, feats)
    rule = mk_rule(Condition.token(("island",)))
    stats = ev.subpopulation_stats(rule)
    assert stats.size == sum(ev.match_rule(rule, r) for r in store.test_records)
