"""Rule matching, subpopulation statistics, concepts and the overview report.

This is where a rule (discovered or drafted) is turned into the numbers the
UI shows while validating an error hypothesis: who matches, how errors break
down by label/prediction/bucket, how the rule's tokens are distributed over
the training set, and how user-defined concepts compare.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from errlens._tokenize import contains_tuple
from errlens.features import CorpusFeatures, HighLevelFeature, high_level_value
from errlens.ingest import DatasetStore, DocumentRecord
from errlens.rules import Condition, DiscoveryConfig, Rule, RuleMetrics, RuleSet, rule_seed_sequence
from errlens.stats import binomial_p_value, bootstrap_ci

__all__ = [
    "Concept",
    "ConceptSummary",
    "ConceptRegistry",
    "SubpopulationStats",
    "OverviewReport",
    "RuleEvaluator",
    "compare_concepts",
]


@dataclass
class Concept:
    id: int
    name: str
    tokens: list[tuple[str, ...]]
    summary: "ConceptSummary | None" = None


@dataclass
class ConceptSummary:
    subpop_size: int
    error_rate: float | None
    p_value: float | None
    ci_low: float | None
    ci_high: float | None


@dataclass
class SubpopulationStats:
    size: int
    error_count: int
    error_rate: float | None
    errors_by_label: dict[str, int]
    errors_by_prediction: dict[str, int]
    errors_by_bucket: dict[str, dict[str, int]]  # feature -> bucket -> error count
    train_token_frequency: dict[str, dict[str, int]]  # token text -> label -> doc count
    train_match_count: int
    test_match_count: int


@dataclass
class OverviewReport:
    accuracy: float
    baseline_error_rate: float
    n_test: int
    n_train: int
    classes: tuple[str, ...]
    top_tokens: list[Rule]
    top_high_level: list[Rule]


class ConceptRegistry:
    """Session-scoped concept store; creation/edit serialized by a lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._concepts: dict[int, Concept] = {}
        self._next_id = 1

    def add(self, name: str, tokens: list[tuple[str, ...]], concept_id: int | None = None) -> Concept:
        if not tokens:
            raise ValueError("concept token list must be nonempty")
        for gram in tokens:
            if not (1 <= len(gram) <= 3):
                raise ValueError(f"concept tokens must be 1-3-grams, got {gram!r}")
        with self._lock:
            for cid, existing in self._concepts.items():
                if existing.name == name and cid != concept_id:
                    raise ValueError(f"concept name {name!r} already in use")
            if concept_id is None:
                concept_id = self._next_id
                self._next_id += 1
            elif concept_id not in self._concepts:
                raise KeyError(f"unknown concept id {concept_id}")
            concept = Concept(id=concept_id, name=name, tokens=sorted(set(tokens)))
            self._concepts[concept_id] = concept
            return concept

    def get(self, concept_id: int) -> Concept:
        try:
            return self._concepts[concept_id]
        except KeyError:
            raise KeyError(f"unknown concept id {concept_id}") from None

    def all(self) -> list[Concept]:
        return [self._concepts[cid] for cid in sorted(self._concepts)]


def _record_contains(rec: DocumentRecord, gram: tuple[str, ...]) -> bool:
    return any(contains_tuple(tokens, gram) for tokens in rec.tokens_parts)


class RuleEvaluator:
    """Evaluates arbitrary rules (including out-of-vocabulary drafts) against
    the corpus, with the same metric definitions discovery uses."""

    def __init__(
        self,
        store: DatasetStore,
        features: CorpusFeatures,
        concepts: ConceptRegistry | None = None,
        config: DiscoveryConfig | None = None,
    ):
        self.store = store
        self.features = features
        self.concepts = concepts if concepts is not None else ConceptRegistry()
        self.config = config if config is not None else DiscoveryConfig()
        self._gram_masks: dict[tuple[str, ...], np.ndarray] = {}

    # condition semantics

    def _token_tuple_mask(self, gram: tuple[str, ...]) -> np.ndarray:
        mask = self._gram_masks.get(gram)
        if mask is None:
            feat = self.features.feature_by_tokens(gram)
            if feat is not None:
                mask = self.features.matrix.column_mask(feat.id)
            else:
                # out-of-vocabulary token: direct scan
                mask = np.array(
                    [_record_contains(r, gram) for r in self.store.test_records], dtype=bool
                )
            self._gram_masks[gram] = mask
        return mask

    def _concept_mask(self, cond: Condition) -> np.ndarray:
        concept = self.concepts.get(cond.concept_id)
        mask = np.zeros(self.store.n_test, dtype=bool)
        for gram in concept.tokens:
            mask |= self._token_tuple_mask(gram)
        return mask

    def condition_mask(self, cond: Condition) -> np.ndarray:
        if cond.kind == "token":
            return self._token_tuple_mask(cond.tokens)
        if cond.kind == "concept":
            return self._concept_mask(cond)
        if cond.kind == "high_level":
            return self.features.bucket_mask(cond.feature, cond.bucket)
        raise ValueError(f"unknown condition kind {cond.kind!r}")

    def rule_mask(self, conditions) -> np.ndarray:
        mask = np.ones(self.store.n_test, dtype=bool)
        for cond in conditions:
            mask &= self.condition_mask(cond)
        return mask

    def match_rule(self, rule: Rule, doc: DocumentRecord) -> bool:
        """True iff every condition of the rule holds for the document."""
        idx = self.store.id_to_test_index.get(doc.id)
        for cond in rule.conditions:
            if idx is not None and cond.kind in ("token", "concept", "high_level"):
                if not self.condition_mask(cond)[idx]:
                    return False
                continue
            if not self._match_condition_scan(cond, doc):
                return False
        return True

    def _match_condition_scan(self, cond: Condition, doc: DocumentRecord) -> bool:
        if cond.kind == "token":
            return _record_contains(doc, cond.tokens)
        if cond.kind == "concept":
            concept = self.concepts.get(cond.concept_id)
            return any(_record_contains(doc, gram) for gram in concept.tokens)
        if cond.kind == "high_level":
            feat = self.features.high_level_by_name(cond.feature)
            if feat is None:
                raise KeyError(f"unknown high-level feature {cond.feature!r}")
            value = high_level_value(cond.feature, doc)
            if value is None:
                return False
            return feat.bucket_of(value) == cond.bucket
        raise ValueError(f"unknown condition kind {cond.kind!r}")

    # metrics

    def evaluate_conditions(self, conditions) -> tuple[RuleMetrics, np.ndarray]:
        """Metrics plus the test-doc membership mask for a conjunction."""
        conditions = tuple(sorted(conditions, key=lambda c: c.sort_key()))
        mask = self.rule_mask(conditions)
        support = int(mask.sum())
        n = self.store.n_test
        baseline = self.store.baseline_error_rate
        if support == 0:
            empty = RuleMetrics(
                support_count=0,
                support_fraction=0.0,
                error_rate=None,
                p_value=None,
                ci_low=None,
                ci_high=None,
            )
            return empty, mask
        flags = self.store.error_labels[mask]
        k = int(flags.sum())
        key = "|".join(c.render() for c in conditions)
        lo, hi = bootstrap_ci(
            flags,
            B=self.config.bootstrap_B,
            alpha=self.config.alpha,
            seed=rule_seed_sequence(self.config.rng_seed, key),
        )
        return (
            RuleMetrics(
                support_count=support,
                support_fraction=support / n,
                error_rate=k / support,
                p_value=binomial_p_value(k, support, baseline) if 0.0 < baseline < 1.0 else None,
                ci_low=lo,
                ci_high=hi,
            ),
            mask,
        )

    def subpopulation_stats(self, rule: Rule | None) -> SubpopulationStats:
        """Statistics for a rule's subpopulation; rule=None means the whole
        test set (the overall tab)."""
        if rule is None:
            mask = np.ones(self.store.n_test, dtype=bool)
            conditions: tuple[Condition, ...] = ()
        else:
            conditions = rule.conditions
            mask = self.rule_mask(conditions)

        err = self.store.error_labels.astype(bool)
        sub_err = mask & err
        size = int(mask.sum())
        error_count = int(sub_err.sum())

        by_label: dict[str, int] = {}
        by_pred: dict[str, int] = {}
        for i in np.nonzero(sub_err)[0]:
            rec = self.store.test_records[int(i)]
            by_label[rec.label] = by_label.get(rec.label, 0) + 1
            by_pred[rec.prediction] = by_pred.get(rec.prediction, 0) + 1

        by_bucket: dict[str, dict[str, int]] = {}
        for feat in self.features.high_level:
            counts = {b: 0 for b in ("Low", "Medium", "High")}
            for i in np.nonzero(sub_err)[0]:
                counts[feat.buckets[int(i)]] += 1
            by_bucket[feat.name] = counts

        # training-side distribution of the rule's tokens
        grams: list[tuple[str, ...]] = []
        for cond in conditions:
            if cond.kind == "token":
                grams.append(cond.tokens)
            elif cond.kind == "concept":
                grams.extend(self.concepts.get(cond.concept_id).tokens)
        train_freq: dict[str, dict[str, int]] = {}
        for gram in dict.fromkeys(grams):
            feat = self.features.feature_by_tokens(gram)
            if feat is not None:
                per_label = dict(sorted(feat.doc_frequency_train_by_label.items()))
            else:
                per_label = {}
                for rec in self.store.train_records:
                    if _record_contains(rec, gram):
                        per_label[rec.label] = per_label.get(rec.label, 0) + 1
                per_label = dict(sorted(per_label.items()))
            train_freq[" ".join(gram)] = per_label

        if rule is None:
            train_match = self.store.n_train
        else:
            train_match = sum(1 for rec in self.store.train_records if self.match_rule(rule, rec))

        return SubpopulationStats(
            size=size,
            error_count=error_count,
            error_rate=(error_count / size) if size else None,
            errors_by_label=dict(sorted(by_label.items())),
            errors_by_prediction=dict(sorted(by_pred.items())),
            errors_by_bucket=by_bucket,
            train_token_frequency=train_freq,
            train_match_count=train_match,
            test_match_count=size,
        )

    def evaluate_concept(self, concept: Concept) -> ConceptSummary:
        """Size, error rate and significance of the documents containing any
        of the concept's tokens; empty subpopulations are representable."""
        if not concept.tokens:
            raise ValueError("concept token list must be nonempty")
        cond = Condition.concept(concept.id)
        mask = self._concept_mask(cond)
        size = int(mask.sum())
        if size == 0:
            return ConceptSummary(
                subpop_size=0, error_rate=None, p_value=None, ci_low=None, ci_high=None
            )
        flags = self.store.error_labels[mask]
        k = int(flags.sum())
        baseline = self.store.baseline_error_rate
        key = "concept-tokens:" + "|".join(" ".join(g) for g in concept.tokens)
        lo, hi = bootstrap_ci(
            flags,
            B=self.config.bootstrap_B,
            alpha=self.config.alpha,
            seed=rule_seed_sequence(self.config.rng_seed, key),
        )
        return ConceptSummary(
            subpop_size=size,
            error_rate=k / size,
            p_value=binomial_p_value(k, size, baseline) if 0.0 < baseline < 1.0 else None,
            ci_low=lo,
            ci_high=hi,
        )

    def overview(self, ruleset: RuleSet) -> OverviewReport:
        """Model performance plus the highest-error single-condition rules,
        split into token conditions (top 10) and high-level buckets (top 5)."""
        singles = [r for r in ruleset.rules if len(r.conditions) == 1]
        token_rules = [r for r in singles if r.conditions[0].kind == "token"]
        hl_rules = [r for r in singles if r.conditions[0].kind == "high_level"]
        return OverviewReport(
            accuracy=1.0 - self.store.baseline_error_rate,
            baseline_error_rate=self.store.baseline_error_rate,
            n_test=self.store.n_test,
            n_train=self.store.n_train,
            classes=self.store.classes,
            top_tokens=token_rules[:10],
            top_high_level=hl_rules[:5],
        )


def compare_concepts(summaries: list[tuple[Concept, ConceptSummary]]):
    """Per-concept metrics plus pairwise CI-overlap flags.

    The overlap flag is None when either CI is undefined (empty
    subpopulation)."""
    if len(summaries) < 2:
        raise ValueError("need at least 2 concepts to compare")
    overlaps = []
    for i in range(len(summaries)):
        for j in range(i + 1, len(summaries)):
            a, sa = summaries[i]
            b, sb = summaries[j]
            if sa.ci_low is None or sb.ci_low is None:
                flag = None
            else:
                flag = sa.ci_low <= sb.ci_high and sb.ci_low <= sa.ci_high
            overlaps.append((a.id, b.id, flag))
    return overlaps
