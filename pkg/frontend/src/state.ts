import { ApiClient } from "./api.js";
import type {
  BundleJson,
  ConceptJson,
  ConditionJson,
  DocumentsPageJson,
  ProjectionJson,
  RuleJson,
  RulesPageJson,
  StatsJson,
  SummaryJson,
} from "./types.js";

export interface RuleFilters {
  minErrorRate: number;
  maxConditions: number | null; // null = any
  sort: "error_rate" | "support";
}

export interface OverallViews {
  stats: StatsJson | null;
  projection: ProjectionJson | null;
  documents: DocumentsPageJson | null;
}

/** Everything the seven views render from.
 *
 * Invariant: `selected === null` means the dependent views show
 * whole-test-set data; otherwise they show exactly `selected.bundle`,
 * fetched in ONE request when the selection was made. */
export interface Snapshot {
  summary: SummaryJson | null;
  rulesPage: RulesPageJson | null;
  filters: RuleFilters;
  metricDisplay: "p_value" | "ci";
  selected: { ruleId: number | null; bundle: BundleJson } | null;
  draft: ConditionJson[];
  concepts: ConceptJson[];
  compare: { concepts: ConceptJson[]; overlaps: { a: number; b: number; ci_overlap: boolean | null }[] } | null;
  overall: OverallViews;
  error: string | null;
  busy: boolean;
}

export type Listener = (state: Snapshot) => void;

const conditionKey = (c: ConditionJson): string =>
  c.kind === "token"
    ? `token:${c.token}`
    : c.kind === "concept"
      ? `concept:${c.concept_id}`
      : `hl:${c.feature}=${c.bucket}`;

/** Central store for the linked views. In-flight selection fetches are
 * superseded by a sync token: the last selection wins, partial responses
 * from stale selections are dropped. */
export class AppState {
  private listeners: Listener[] = [];
  private syncToken = 0;

  readonly state: Snapshot = {
    summary: null,
    rulesPage: null,
    filters: { minErrorRate: 0, maxConditions: null, sort: "error_rate" },
    metricDisplay: "p_value",
    selected: null,
    draft: [],
    concepts: [],
    compare: null,
    overall: { stats: null, projection: null, documents: null },
    error: null,
    busy: false,
  };

  constructor(readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const l of this.listeners) l(this.state);
  }

  /** Initial load: summary, rule list and the overall (no-rule) views. */
  async init(): Promise<void> {
    this.state.summary = await this.api.summary();
    if (this.state.summary.discovery_state === "ready") {
      this.state.rulesPage = await this.api.rules();
    }
    await this.loadOverall();
    this.emit();
  }

  async loadOverall(): Promise<void> {
    const [stats, documents] = await Promise.all([
      this.api.statsOverall(),
      this.api.documents(),
    ]);
    let projection: ProjectionJson | null = null;
    try {
      projection = await this.api.projection();
    } catch {
      projection = null;
    }
    this.state.overall = { stats, projection, documents };
  }

  /** The rules currently visible in the list view: API data filtered and
   * ordered client-side, never recomputed. */
  visibleRules(): RuleJson[] {
    const page = this.state.rulesPage;
    if (!page) return [];
    const { minErrorRate, maxConditions, sort } = this.state.filters;
    let rules = page.rules.filter(
      (r) => (r.error_rate ?? 0) >= minErrorRate &&
        (maxConditions === null || r.n_conditions <= maxConditions),
    );
    if (sort === "support") {
      rules = [...rules].sort((a, b) => b.support_count - a.support_count);
    }
    return rules;
  }

  setFilters(patch: Partial<RuleFilters>): void {
    Object.assign(this.state.filters, patch);
    this.emit();
  }

  toggleMetricDisplay(): void {
    this.state.metricDisplay = this.state.metricDisplay === "p_value" ? "ci" : "p_value";
    this.emit();
  }

  /** Select a discovered rule: ONE bundle fetch updates projection,
   * subpopulation stats, attribution chart and document list together. */
  async selectRule(ruleId: number): Promise<void> {
    const page = this.state.rulesPage;
    const rule = page?.rules.find((r) => r.id === ruleId);
    if (!rule) return;
    await this.evaluateConditions(rule.conditions, ruleId);
    if (this.state.selected) {
      this.state.draft = [...rule.conditions];
      this.emit();
    }
  }

  /** Evaluate draft conditions (the rule editor submit path). */
  async evaluateDraft(): Promise<void> {
    if (this.state.draft.length === 0) return;
    await this.evaluateConditions(this.state.draft, null);
  }

  private async evaluateConditions(conditions: ConditionJson[], ruleId: number | null): Promise<void> {
    const token = ++this.syncToken;
    this.state.busy = true;
    this.emit();
    try {
      const bundle = await this.api.evaluate(conditions);
      if (token !== this.syncToken) return; // superseded by a later selection
      this.state.selected = { ruleId, bundle };
      this.state.error = null;
    } catch (err) {
      if (token !== this.syncToken) return;
      // non-blocking: keep the previous state, surface a banner
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      if (token === this.syncToken) {
        this.state.busy = false;
        this.emit();
      }
    }
  }

  /** Deselect: dependent views revert to the whole test set. */
  deselect(): void {
    this.syncToken++; // cancels any in-flight selection
    this.state.selected = null;
    this.state.busy = false;
    this.emit();
  }

  // rule editor

  addDraftCondition(cond: ConditionJson): void {
    if (this.state.draft.length >= 3) return;
    const key = conditionKey(cond);
    if (this.state.draft.some((c) => conditionKey(c) === key)) return;
    this.state.draft.push(cond);
    this.emit();
  }

  removeDraftCondition(index: number): void {
    this.state.draft.splice(index, 1);
    this.emit();
  }

  resetDraft(): void {
    this.state.draft = [];
    this.emit();
  }

  draftSubmittable(): boolean {
    return this.state.draft.length > 0;
  }

  // concepts

  async refreshConcepts(): Promise<void> {
    this.state.concepts = (await this.api.concepts()).concepts;
    this.emit();
  }

  async submitConcept(name: string, tokens: string[], id?: number): Promise<ConceptJson> {
    const concept = await this.api.createConcept(name, tokens, id);
    await this.refreshConcepts();
    return concept;
  }

  async compareConcepts(ids: number[]): Promise<void> {
    this.state.compare = await this.api.compareConcepts(ids);
    this.emit();
  }
}
