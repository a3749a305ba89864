"""Rule discovery: enumerate interpretable conditions over error-prone
subpopulations and keep the statistically significant ones.

A rule is a conjunction of one or two (configurably three) conditions, each
an affirmative membership test: document contains a token n-gram, contains
any token of a concept, or falls in a Low/Medium/High bucket of a high-level
feature. Negated conditions are never produced. Kept rules must cover at
least a minimum fraction of the test set and have an error rate at least the
baseline; each carries an exact binomial p-value against the baseline and a
percentile-bootstrap confidence interval.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from errlens import kernels
from errlens.features import FeatureMatrix, HighLevelFeature, TokenFeature
from errlens.forest import select_candidates, train_filter_forest
from errlens.ingest import DatasetStore
from errlens.stats import binomial_p_value, bootstrap_ci

__all__ = [
    "Condition",
    "Rule",
    "RuleMetrics",
    "DiscoveryConfig",
    "RuleSet",
    "enumerate_and_evaluate",
    "discover",
]

_KIND_ORDER = {"token": 0, "concept": 1, "high_level": 2}
_RULE_TAG = 0x52554C45  # namespaces per-rule bootstrap seeds under the run seed


@dataclass(frozen=True)
class Condition:
    """One affirmative membership test; never a negation."""

    kind: str
    tokens: tuple[str, ...] | None = None
    feature_id: int | None = None
    concept_id: int | None = None
    feature: str | None = None
    bucket: str | None = None

    @staticmethod
    def token(tokens: tuple[str, ...], feature_id: int | None = None) -> "Condition":
        return Condition(kind="token", tokens=tuple(tokens), feature_id=feature_id)

    @staticmethod
    def concept(concept_id: int) -> "Condition":
        return Condition(kind="concept", concept_id=concept_id)

    @staticmethod
    def high_level(feature: str, bucket: str) -> "Condition":
        if bucket not in ("Low", "Medium", "High"):
            raise ValueError(f"bucket must be Low/Medium/High, got {bucket!r}")
        return Condition(kind="high_level", feature=feature, bucket=bucket)

    def sort_key(self):
        if self.kind == "token":
            return (_KIND_ORDER[self.kind], " ".join(self.tokens))
        if self.kind == "concept":
            return (_KIND_ORDER[self.kind], str(self.concept_id))
        return (_KIND_ORDER[self.kind], f"{self.feature}={self.bucket}")

    def render(self) -> str:
        if self.kind == "token":
            return "token:" + " ".join(self.tokens)
        if self.kind == "concept":
            return f"concept:{self.concept_id}"
        return f"hl:{self.feature}={self.bucket}"

    @staticmethod
    def parse(text: str) -> "Condition":
        kind, _, rest = text.partition(":")
        if kind == "token" and rest:
            return Condition.token(tuple(rest.split(" ")))
        if kind == "concept" and rest:
            return Condition.concept(int(rest))
        if kind == "hl" and "=" in rest:
            name, _, bucket = rest.rpartition("=")
            return Condition.high_level(name, bucket)
        raise ValueError(f"unparseable condition {text!r}")


@dataclass
class RuleMetrics:
    support_count: int
    support_fraction: float
    error_rate: float | None  # None only for empty draft subpopulations
    p_value: float | None
    ci_low: float | None
    ci_high: float | None


@dataclass
class Rule:
    conditions: tuple[Condition, ...]
    metrics: RuleMetrics

    def __post_init__(self):
        ordered = tuple(sorted(self.conditions, key=lambda c: c.sort_key()))
        if len(set(c.sort_key() for c in ordered)) != len(ordered):
            raise ValueError("rule conditions must be distinct")
        object.__setattr__(self, "conditions", ordered)

    @property
    def key(self) -> str:
        return "|".join(c.render() for c in self.conditions)

    def render(self) -> str:
        return " AND ".join(c.render() for c in self.conditions)


def canonical_conditions(conditions) -> tuple[Condition, ...]:
    return tuple(sorted(conditions, key=lambda c: c.sort_key()))


def rule_seed_sequence(rng_seed: int, rule_key: str) -> np.random.SeedSequence:
    """Stable per-rule seed so a re-evaluated draft reproduces the CI of the
    discovered rule with the same conditions."""
    digest = hashlib.blake2b(rule_key.encode("utf-8"), digest_size=8).digest()
    return np.random.SeedSequence([rng_seed, _RULE_TAG, int.from_bytes(digest, "big")])


@dataclass
class DiscoveryConfig:
    max_conditions: int = 2
    min_support_fraction: float = 0.05
    min_error_rate: float | str = "auto"
    n_trees: int = 100
    max_depth: int = 3
    candidate_cap: int = 500
    bootstrap_B: int = 1000
    alpha: float = 0.05
    rng_seed: int = 0
    use_forest_filter: bool = True
    redundancy_pruning: bool = True

    def __post_init__(self):
        if not (1 <= self.max_conditions <= 3):
            raise ValueError("max_conditions must be 1, 2 or 3")
        if not (0.0 < self.min_support_fraction < 1.0):
            raise ValueError("min_support_fraction must be in (0, 1)")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_error_rate != "auto" and not (0.0 <= float(self.min_error_rate) <= 1.0):
            raise ValueError("min_error_rate must be 'auto' or in [0, 1]")

    def resolved_min_error_rate(self, baseline: float) -> float:
        return baseline if self.min_error_rate == "auto" else float(self.min_error_rate)


@dataclass
class RuleSet:
    rules: list[Rule]
    baseline_error_rate: float
    n_test: int
    config: DiscoveryConfig

    def __len__(self) -> int:
        return len(self.rules)

    def to_lines(self) -> str:
        """Tab-separated report, one rule per line:
        support_count, support_fraction, error_rate, p_value, ci_low,
        ci_high, then one field per condition."""
        lines = []
        for rule in self.rules:
            m = rule.metrics
            fields = [
                str(m.support_count),
                repr(m.support_fraction),
                repr(m.error_rate),
                repr(m.p_value),
                repr(m.ci_low),
                repr(m.ci_high),
            ] + [c.render() for c in rule.conditions]
            lines.append("\t".join(fields))
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def rules_from_lines(text: str) -> list[Rule]:
        rules = []
        for line in text.splitlines():
            if not line.strip():
                continue
            fields = line.split("\t")
            metrics = RuleMetrics(
                support_count=int(fields[0]),
                support_fraction=float(fields[1]),
                error_rate=float(fields[2]),
                p_value=float(fields[3]),
                ci_low=float(fields[4]),
                ci_high=float(fields[5]),
            )
            conditions = tuple(Condition.parse(f) for f in fields[6:])
            rules.append(Rule(conditions=conditions, metrics=metrics))
        return rules


def _sort_rules(rules: list[Rule]) -> list[Rule]:
    return sorted(
        rules,
        key=lambda r: (-r.metrics.error_rate, -r.metrics.support_count, r.key),
    )


@dataclass
class _Unit:
    """One candidate condition plus its incidence column index."""

    condition: Condition
    col: int


def enumerate_and_evaluate(
    candidates: list[int],
    high_level: list[HighLevelFeature],
    matrix: FeatureMatrix,
    errors: np.ndarray,
    config: DiscoveryConfig,
    vocab: list[TokenFeature],
) -> list[Rule]:
    """Evaluate all 1..max_conditions conjunctions over the candidate units.

    Units are the candidate token features plus every high-level bucket.
    Kept rules meet the support and error-rate floors; multi-condition rules
    must additionally improve strictly on every sub-conjunction when
    redundancy pruning is on. Each kept rule gets a binomial p-value against
    the baseline and a seeded bootstrap CI.
    """
    n = matrix.n_docs
    if n == 0:
        return []
    err = np.ascontiguousarray(errors, dtype=np.uint8)
    baseline = float(err.sum()) / n
    min_rate = config.resolved_min_error_rate(baseline)
    min_frac = config.min_support_fraction

    columns: list[np.ndarray] = []
    conditions: list[Condition] = []
    if candidates:
        dense = matrix.dense_columns(list(candidates))
        for j, fid in enumerate(candidates):
            columns.append(dense[:, j])
            conditions.append(Condition.token(vocab[fid].tokens, feature_id=int(fid)))
    for feat in high_level:
        for bucket in ("Low", "Medium", "High"):
            mask = np.fromiter((b == bucket for b in feat.buckets), dtype=np.uint8, count=n)
            columns.append(mask)
            conditions.append(Condition.high_level(feat.name, bucket))

    if not columns:
        return []

    cols = np.ascontiguousarray(np.stack(columns, axis=1), dtype=np.uint8)
    n_units = cols.shape[1]
    supp_u = cols.astype(np.int64).sum(axis=0)
    err_u = (cols.astype(np.int64) * err[:, None]).sum(axis=0)
    rate_u = np.divide(err_u, supp_u, out=np.zeros(n_units), where=supp_u > 0)

    kept: list[tuple[Rule, np.ndarray]] = []

    def keep(conds: tuple[Condition, ...], support: int, k_err: int, mask: np.ndarray):
        metrics = RuleMetrics(
            support_count=int(support),
            support_fraction=support / n,
            error_rate=k_err / support,
            p_value=binomial_p_value(int(k_err), int(support), baseline)
            if 0.0 < baseline < 1.0
            else None,
            ci_low=None,
            ci_high=None,
        )
        kept.append((Rule(conditions=conds, metrics=metrics), mask))

    # single conditions
    for u in range(n_units):
        s = int(supp_u[u])
        if s == 0 or s / n < min_frac:
            continue
        if rate_u[u] < min_rate:
            continue
        keep((conditions[u],), s, int(err_u[u]), cols[:, u])

    # pairs, restricted to units that individually clear the support floor
    # (conjunction support is anti-monotone)
    if config.max_conditions >= 2 and n_units >= 2:
        eligible = [u for u in range(n_units) if supp_u[u] / n >= min_frac]
        if eligible:
            sub = np.ascontiguousarray(cols[:, eligible])
            s_pair, e_pair = kernels.pair_counts(sub, err)
            for x in range(len(eligible)):
                for y in range(x + 1, len(eligible)):
                    s = int(s_pair[x, y])
                    if s == 0 or s / n < min_frac:
                        continue
                    k_err = int(e_pair[x, y])
                    rate = k_err / s
                    if rate < min_rate:
                        continue
                    a, b = eligible[x], eligible[y]
                    if config.redundancy_pruning and rate <= max(rate_u[a], rate_u[b]):
                        continue
                    mask = (cols[:, a] & cols[:, b]).astype(np.uint8)
                    keep((conditions[a], conditions[b]), s, k_err, mask)

            if config.max_conditions >= 3:
                pair_rate = np.divide(
                    e_pair, s_pair, out=np.zeros_like(e_pair, dtype=np.float64), where=s_pair > 0
                )
                for x in range(len(eligible)):
                    for y in range(x + 1, len(eligible)):
                        if s_pair[x, y] / n < min_frac:
                            continue
                        a, b = eligible[x], eligible[y]
                        mask_ab = (cols[:, a] & cols[:, b]).astype(bool)
                        rows_ab = np.nonzero(mask_ab)[0]
                        if rows_ab.size == 0:
                            continue
                        sub_rows = cols[rows_ab]
                        err_rows = err[rows_ab].astype(np.int64)
                        for z in range(y + 1, len(eligible)):
                            c = eligible[z]
                            s3 = int(sub_rows[:, c].astype(np.int64).sum())
                            if s3 == 0 or s3 / n < min_frac:
                                continue
                            k3 = int((sub_rows[:, c].astype(np.int64) * err_rows).sum())
                            rate3 = k3 / s3
                            if rate3 < min_rate:
                                continue
                            if config.redundancy_pruning:
                                floor = max(
                                    rate_u[a],
                                    rate_u[b],
                                    rate_u[c],
                                    pair_rate[x, y],
                                    pair_rate[x, z],
                                    pair_rate[y, z],
                                )
                                if rate3 <= floor:
                                    continue
                            mask = np.zeros(n, dtype=np.uint8)
                            mask[rows_ab[sub_rows[:, c] != 0]] = 1
                            keep((conditions[a], conditions[b], conditions[c]), s3, k3, mask)

    # attach bootstrap CIs last so pruned rules never consume resamples
    out = []
    for rule, mask in kept:
        flags = err[mask.astype(bool)]
        lo, hi = bootstrap_ci(
            flags,
            B=config.bootstrap_B,
            alpha=config.alpha,
            seed=rule_seed_sequence(config.rng_seed, rule.key),
        )
        rule.metrics.ci_low = lo
        rule.metrics.ci_high = hi
        out.append(rule)
    return out


def discover(
    store: DatasetStore,
    vocab: list[TokenFeature],
    matrix: FeatureMatrix,
    high_level: list[HighLevelFeature],
    config: DiscoveryConfig | None = None,
) -> RuleSet:
    """Full discovery pass: forest filter, candidate selection, conjunction
    enumeration, significance attachment. Deterministic given config.rng_seed.

    A perfect (or perfectly wrong) model admits no error-prone subpopulation,
    so degenerate baselines yield an empty rule set.
    """
    if config is None:
        config = DiscoveryConfig()
    errors = store.error_labels
    baseline = store.baseline_error_rate

    if baseline <= 0.0 or baseline >= 1.0:
        return RuleSet(rules=[], baseline_error_rate=baseline, n_test=store.n_test, config=config)

    if config.use_forest_filter:
        forest = train_filter_forest(matrix, errors, config)
        candidates = select_candidates(forest, cap=config.candidate_cap)
    else:
        candidates = [f.id for f in vocab]

    rules = enumerate_and_evaluate(candidates, high_level, matrix, errors, config, vocab)
    return RuleSet(
        rules=_sort_rules(rules),
        baseline_error_rate=baseline,
        n_test=store.n_test,
        config=config,
    )
