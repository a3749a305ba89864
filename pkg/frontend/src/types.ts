/** Response shapes of the errlens HTTP API (field names frozen in docs/api.md). */

export interface ConditionJson {
  kind: "token" | "concept" | "high_level";
  token?: string;
  concept_id?: number;
  feature?: string;
  bucket?: "Low" | "Medium" | "High";
}

export interface RuleJson {
  id: number | null;
  conditions: ConditionJson[];
  n_conditions: number;
  support_count: number;
  support_fraction: number;
  error_rate: number | null;
  p_value: number | null;
  ci_low: number | null;
  ci_high: number | null;
}

export interface SummaryJson {
  n_test: number;
  n_train: number;
  classes: string[];
  accuracy: number;
  baseline_error_rate: number;
  discovery_state: string;
  n_rules: number | null;
  high_level_features: { name: string; t_low: number; t_high: number }[];
  top_tokens: RuleJson[];
  top_high_level: RuleJson[];
}

export interface HistogramJson {
  bin_edges: number[];
  counts: number[];
}

export interface RulesPageJson {
  total: number;
  page: number;
  page_size: number;
  baseline_error_rate: number;
  rules: RuleJson[];
  histogram: HistogramJson;
}

export interface StatsJson {
  size: number;
  error_count: number;
  error_rate: number | null;
  errors_by_label: Record<string, number>;
  errors_by_prediction: Record<string, number>;
  errors_by_bucket: Record<string, Record<string, number>>;
  train_token_frequency: Record<string, Record<string, number>>;
  train_match_count: number;
  test_match_count: number;
}

export interface AttributionColumn {
  token: string;
  cnt_pos: number;
  cnt_neg: number;
}

export interface ProjectionPoint {
  id: string;
  x: number;
  y: number;
  correct: boolean;
}

export interface ProjectionJson {
  method: string | null;
  final_kl: number | null;
  points: ProjectionPoint[];
}

export interface DocumentJson {
  id: string;
  texts: string[];
  label: string;
  prediction: string;
  correct: boolean;
  highlights: [number, number, number][];
}

export interface DocumentsPageJson {
  total: number;
  page: number;
  page_size: number;
  documents: DocumentJson[];
}

/** The single-fetch validation bundle returned by POST /rules/evaluate. */
export interface BundleJson {
  rule: RuleJson;
  stats: StatsJson;
  attributions: Record<string, AttributionColumn[]>;
  projection: ProjectionJson | null;
  documents: DocumentsPageJson;
}

export interface ConceptSummaryJson {
  size: number;
  error_rate: number | null;
  p_value: number | null;
  ci_low: number | null;
  ci_high: number | null;
}

export interface ConceptJson {
  id: number;
  name: string;
  tokens: string[];
  summary: ConceptSummaryJson | null;
}

export interface CompareJson {
  concepts: ConceptJson[];
  overlaps: { a: number; b: number; ci_overlap: boolean | null }[];
}

export interface DiscoveryStatusJson {
  state: "pending" | "running" | "ready" | "failed";
  n_rules: number | null;
  error: string | null;
}
