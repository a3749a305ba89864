"""HTTP API serving the engine to the interactive UI.

All endpoints live under /api/v1 and return the engine's numbers untouched;
the client never recomputes statistics. Reads run concurrently over the
immutable store; concept mutations are serialized by the registry lock and
discovery runs as a background job polled via /discovery/status.

Endpoint field names are frozen in docs/api.md.
"""

from __future__ import annotations

import json
import threading
import traceback
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from errlens._tokenize import find_tuple_spans, tokenize
from errlens.analysis import Concept, RuleEvaluator, compare_concepts
from errlens.attribution import aggregate_counts, chart_order
from errlens.cache import Workspace
from errlens.ingest import DocumentRecord
from errlens.projection import Projection2D, filter_projection
from errlens.rules import Condition, DiscoveryConfig, Rule, RuleMetrics, RuleSet, discover

API_PREFIX = "/api/v1"


class ConditionBody(BaseModel):
    kind: str
    token: str | None = None
    concept_id: int | None = None
    feature: str | None = None
    bucket: str | None = None


class RuleDraft(BaseModel):
    conditions: list[ConditionBody]


class ConceptBody(BaseModel):
    name: str
    tokens: list[str]
    id: int | None = None


class CompareBody(BaseModel):
    ids: list[int] = Field(min_length=2)


class EngineState:
    """Everything the API serves, bound to one ingested corpus."""

    def __init__(self, store, features, projection: Projection2D | None = None,
                 ruleset: RuleSet | None = None, config: DiscoveryConfig | None = None,
                 workspace: Workspace | None = None):
        self.store = store
        self.features = features
        self.projection = projection
        self.ruleset = ruleset
        self.config = config or (ruleset.config if ruleset else DiscoveryConfig())
        self.evaluator = RuleEvaluator(store, features, config=self.config)
        self.workspace = workspace
        self._discovery_lock = threading.Lock()
        self.discovery_state = "ready" if ruleset is not None else "pending"
        self.discovery_error: str | None = None

    def start_discovery(self) -> None:
        """Kick off discovery in the background unless already running/done."""
        with self._discovery_lock:
            if self.discovery_state in ("running", "ready"):
                return
            self.discovery_state = "running"

        def run():
            try:
                rs = discover(
                    self.store,
                    self.features.vocabulary,
                    self.features.matrix,
                    self.features.high_level,
                    self.config,
                )
                if self.workspace is not None:
                    self.workspace.save_ruleset(rs)
                self.ruleset = rs
                self.discovery_state = "ready"
            except Exception as exc:  # surfaced via /discovery/status
                self.discovery_error = f"{exc}\n{traceback.format_exc()}"
                self.discovery_state = "failed"

        threading.Thread(target=run, name="errlens-discovery", daemon=True).start()


def load_engine(data_dir: str | Path, auto_discover: bool = True) -> EngineState:
    ws = Workspace(data_dir)
    ws.read_manifest()
    engine = EngineState(
        store=ws.load_store(),
        features=ws.load_features(),
        projection=ws.load_projection(),
        ruleset=ws.load_ruleset(),
        workspace=ws,
    )
    if engine.ruleset is None and auto_discover:
        engine.start_discovery()
    return engine


# JSON shapes (field names frozen in docs/api.md)


def condition_json(cond: Condition) -> dict:
    if cond.kind == "token":
        return {"kind": "token", "token": " ".join(cond.tokens)}
    if cond.kind == "concept":
        return {"kind": "concept", "concept_id": cond.concept_id}
    return {"kind": "high_level", "feature": cond.feature, "bucket": cond.bucket}


def rule_json(rule: Rule, rule_id: int | None = None) -> dict:
    m = rule.metrics
    return {
        "id": rule_id,
        "conditions": [condition_json(c) for c in rule.conditions],
        "n_conditions": len(rule.conditions),
        "support_count": m.support_count,
        "support_fraction": m.support_fraction,
        "error_rate": m.error_rate,
        "p_value": m.p_value,
        "ci_low": m.ci_low,
        "ci_high": m.ci_high,
    }


def stats_json(stats) -> dict:
    return {
        "size": stats.size,
        "error_count": stats.error_count,
        "error_rate": stats.error_rate,
        "errors_by_label": stats.errors_by_label,
        "errors_by_prediction": stats.errors_by_prediction,
        "errors_by_bucket": stats.errors_by_bucket,
        "train_token_frequency": stats.train_token_frequency,
        "train_match_count": stats.train_match_count,
        "test_match_count": stats.test_match_count,
    }


def concept_json(concept: Concept) -> dict:
    s = concept.summary
    return {
        "id": concept.id,
        "name": concept.name,
        "tokens": [" ".join(g) for g in concept.tokens],
        "summary": {
            "size": s.subpop_size,
            "error_rate": s.error_rate,
            "p_value": s.p_value,
            "ci_low": s.ci_low,
            "ci_high": s.ci_high,
        }
        if s is not None
        else None,
    }


def create_app(engine: EngineState, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="errlens", version="0.1.0")
    ev = engine.evaluator

    def parse_condition(body: ConditionBody) -> Condition:
        if body.kind == "token":
            if not body.token:
                raise HTTPException(422, "token condition requires 'token'")
            gram = tuple(tokenize(body.token))
            if not (1 <= len(gram) <= 3):
                raise HTTPException(422, f"token must be a 1-3-gram, got {body.token!r}")
            feat = engine.features.feature_by_tokens(gram)
            return Condition.token(gram, feature_id=feat.id if feat else None)
        if body.kind == "concept":
            if body.concept_id is None:
                raise HTTPException(422, "concept condition requires 'concept_id'")
            try:
                ev.concepts.get(body.concept_id)
            except KeyError:
                raise HTTPException(422, f"unknown concept id {body.concept_id}")
            return Condition.concept(body.concept_id)
        if body.kind == "high_level":
            if not body.feature or not body.bucket:
                raise HTTPException(422, "high_level condition requires 'feature' and 'bucket'")
            if engine.features.high_level_by_name(body.feature) is None:
                raise HTTPException(422, f"unknown high-level feature {body.feature!r}")
            if body.bucket not in ("Low", "Medium", "High"):
                raise HTTPException(422, f"unknown bucket {body.bucket!r}")
            return Condition.high_level(body.feature, body.bucket)
        raise HTTPException(422, f"unknown condition kind {body.kind!r}")

    def conditions_from_query(conditions: str) -> tuple[Condition, ...]:
        try:
            raw = json.loads(conditions)
            bodies = [ConditionBody(**obj) for obj in raw]
        except (json.JSONDecodeError, TypeError, ValueError):
            raise HTTPException(422, "conditions must be a JSON list of condition objects")
        return tuple(parse_condition(b) for b in bodies)

    def rule_by_id(rule_id: int) -> Rule:
        if engine.ruleset is None:
            raise HTTPException(409, "discovery not ready")
        if not (0 <= rule_id < len(engine.ruleset.rules)):
            raise HTTPException(404, f"no rule with id {rule_id}")
        return engine.ruleset.rules[rule_id]

    def resolve_rule(
        rule_id: int | None, conditions: str | None
    ) -> tuple[tuple[Condition, ...], Rule | None]:
        if rule_id is not None:
            rule = rule_by_id(rule_id)
            return rule.conditions, rule
        if conditions:
            return conditions_from_query(conditions), None
        return (), None

    def highlight_spans(rec: DocumentRecord, conditions) -> list[list[int]]:
        grams = []
        for cond in conditions:
            if cond.kind == "token":
                grams.append(cond.tokens)
            elif cond.kind == "concept":
                grams.extend(ev.concepts.get(cond.concept_id).tokens)
        spans = []
        for part_idx, text in enumerate(rec.text_parts):
            for gram in dict.fromkeys(grams):
                for start, end in find_tuple_spans(text, gram):
                    spans.append([part_idx, start, end])
        spans.sort()
        return spans

    def documents_page(conditions, page: int, page_size: int) -> dict:
        if conditions:
            mask = ev.rule_mask(conditions)
            idxs = [int(i) for i in mask.nonzero()[0]]
        else:
            idxs = list(range(engine.store.n_test))
        err = engine.store.error_labels
        ordered = sorted(idxs, key=lambda i: (0 if err[i] else 1, engine.store.test_records[i].id))
        total = len(ordered)
        start = (page - 1) * page_size
        page_idxs = ordered[start : start + page_size] if start >= 0 else []
        docs = []
        for i in page_idxs:
            rec = engine.store.test_records[i]
            docs.append(
                {
                    "id": rec.id,
                    "texts": rec.text_parts,
                    "label": rec.label,
                    "prediction": rec.prediction,
                    "correct": not bool(err[i]),
                    "highlights": highlight_spans(rec, conditions),
                }
            )
        return {"total": total, "page": page, "page_size": page_size, "documents": docs}

    def projection_subset(conditions) -> dict | None:
        if engine.projection is None:
            return None
        if conditions:
            mask = ev.rule_mask(conditions)
            ids = [engine.store.test_records[int(i)].id for i in mask.nonzero()[0]]
        else:
            ids = [r.id for r in engine.store.test_records]
        pts = filter_projection(engine.projection, ids, engine.store)
        return {
            "method": engine.projection.method,
            "final_kl": engine.projection.final_kl,
            "points": [{"id": d, "x": x, "y": y, "correct": c} for d, x, y, c in pts],
        }

    def attributions_json(conditions) -> dict:
        mask = ev.rule_mask(conditions) if conditions else None
        if mask is None:
            ids = [r.id for r in engine.store.test_records]
        else:
            ids = [engine.store.test_records[int(i)].id for i in mask.nonzero()[0]]
        out = {}
        for cls in engine.store.classes:
            agg = aggregate_counts(ids, cls, engine.store)
            order = chart_order(agg)
            out[cls] = [
                {"token": t, "cnt_pos": agg.counts[t][0], "cnt_neg": agg.counts[t][1]}
                for t in order
            ]
        return out

    @app.get(f"{API_PREFIX}/summary")
    def summary():
        overview = ev.overview(engine.ruleset) if engine.ruleset is not None else None
        return {
            "n_test": engine.store.n_test,
            "n_train": engine.store.n_train,
            "classes": list(engine.store.classes),
            "accuracy": 1.0 - engine.store.baseline_error_rate,
            "baseline_error_rate": engine.store.baseline_error_rate,
            "discovery_state": engine.discovery_state,
            "n_rules": len(engine.ruleset.rules) if engine.ruleset is not None else None,
            "high_level_features": [
                {"name": f.name, "t_low": f.t_low, "t_high": f.t_high}
                for f in engine.features.high_level
            ],
            "top_tokens": [rule_json(r) for r in overview.top_tokens] if overview else [],
            "top_high_level": [rule_json(r) for r in overview.top_high_level] if overview else [],
        }

    @app.get(f"{API_PREFIX}/rules")
    def get_rules(
        min_error_rate: float | None = None,
        max_conditions: int | None = None,
        sort: str = Query("error_rate", pattern="^(support|error_rate)$"),
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
    ):
        if engine.ruleset is None:
            raise HTTPException(409, "discovery not ready")
        all_rules = list(enumerate(engine.ruleset.rules))
        rates = [r.metrics.error_rate for _, r in all_rules]
        counts = [0] * 20
        for rate in rates:
            b = min(int(rate * 20), 19)
            counts[b] += 1

        selected = all_rules
        if min_error_rate is not None:
            selected = [(i, r) for i, r in selected if r.metrics.error_rate >= min_error_rate]
        if max_conditions is not None:
            selected = [(i, r) for i, r in selected if len(r.conditions) <= max_conditions]
        if sort == "support":
            selected.sort(key=lambda ir: (-ir[1].metrics.support_count, ir[0]))
        # "error_rate" keeps discovery order, already rate-descending

        start = (page - 1) * page_size
        page_rules = selected[start : start + page_size]
        return {
            "total": len(selected),
            "page": page,
            "page_size": page_size,
            "baseline_error_rate": engine.ruleset.baseline_error_rate,
            "rules": [rule_json(r, i) for i, r in page_rules],
            "histogram": {
                "bin_edges": [i / 20 for i in range(21)],
                "counts": counts,
            },
        }

    @app.post(f"{API_PREFIX}/rules/evaluate")
    def evaluate_rule(draft: RuleDraft):
        if not draft.conditions:
            raise HTTPException(422, "draft must have at least one condition")
        if len(draft.conditions) > 3:
            raise HTTPException(422, "draft cannot have more than 3 conditions")
        conditions = tuple(parse_condition(b) for b in draft.conditions)
        metrics, _ = ev.evaluate_conditions(conditions)
        rule = Rule(conditions=conditions, metrics=metrics)
        return {
            "rule": rule_json(rule),
            "stats": stats_json(ev.subpopulation_stats(rule)),
            "attributions": attributions_json(rule.conditions),
            "projection": projection_subset(rule.conditions),
            "documents": documents_page(rule.conditions, page=1, page_size=20),
        }

    @app.get(f"{API_PREFIX}/documents")
    def get_documents(
        rule_id: int | None = None,
        conditions: str | None = None,
        page: int = Query(1, ge=1),
        page_size: int = Query(20, ge=1, le=200),
    ):
        conds, _ = resolve_rule(rule_id, conditions)
        return documents_page(conds, page, page_size)

    @app.get(f"{API_PREFIX}/stats/overall")
    def stats_overall():
        return stats_json(ev.subpopulation_stats(None))

    @app.get(f"{API_PREFIX}/stats/subpopulation")
    def stats_subpopulation(rule_id: int | None = None, conditions: str | None = None):
        conds, rule = resolve_rule(rule_id, conditions)
        if not conds:
            raise HTTPException(422, "rule_id or conditions required")
        if rule is None:
            rule = Rule(
                conditions=conds,
                metrics=RuleMetrics(0, 0.0, None, None, None, None),
            )
        return stats_json(ev.subpopulation_stats(rule))

    @app.get(f"{API_PREFIX}/projection")
    def get_projection(rule_id: int | None = None, conditions: str | None = None):
        conds, _ = resolve_rule(rule_id, conditions)
        subset = projection_subset(conds)
        if subset is None:
            return {"method": None, "final_kl": None, "points": []}
        return subset

    @app.post(f"{API_PREFIX}/concepts")
    def post_concept(body: ConceptBody):
        if not body.name.strip():
            raise HTTPException(422, "concept name must be nonempty")
        if not body.tokens:
            raise HTTPException(422, "concept token list must be nonempty")
        grams = []
        for raw in body.tokens:
            gram = tuple(tokenize(raw))
            if not (1 <= len(gram) <= 3):
                raise HTTPException(422, f"concept tokens must be 1-3-grams, got {raw!r}")
            grams.append(gram)
        try:
            concept = ev.concepts.add(body.name.strip(), grams, concept_id=body.id)
        except ValueError as exc:
            raise HTTPException(409, str(exc))
        except KeyError as exc:
            raise HTTPException(404, str(exc))
        concept.summary = ev.evaluate_concept(concept)
        return concept_json(concept)

    @app.get(f"{API_PREFIX}/concepts")
    def get_concepts():
        out = []
        for concept in ev.concepts.all():
            if concept.summary is None:
                concept.summary = ev.evaluate_concept(concept)
            out.append(concept_json(concept))
        return {"concepts": out}

    @app.post(f"{API_PREFIX}/concepts/compare")
    def post_compare(body: CompareBody):
        pairs = []
        for cid in body.ids:
            try:
                concept = ev.concepts.get(cid)
            except KeyError:
                raise HTTPException(404, f"unknown concept id {cid}")
            if concept.summary is None:
                concept.summary = ev.evaluate_concept(concept)
            pairs.append((concept, concept.summary))
        overlaps = compare_concepts(pairs)
        return {
            "concepts": [concept_json(c) for c, _ in pairs],
            "overlaps": [{"a": a, "b": b, "ci_overlap": flag} for a, b, flag in overlaps],
        }

    @app.get(f"{API_PREFIX}/discovery/status")
    def discovery_status():
        return {
            "state": engine.discovery_state,
            "n_rules": len(engine.ruleset.rules) if engine.ruleset is not None else None,
            "error": engine.discovery_error,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
