/** Canned API responses for the mocked-fetch tests. */

import type {
  BundleJson,
  CompareJson,
  ConceptJson,
  DocumentsPageJson,
  ProjectionJson,
  RuleJson,
  RulesPageJson,
  StatsJson,
  SummaryJson,
} from "../src/types.js";

export const rules: RuleJson[] = [
  {
    id: 0,
    conditions: [{ kind: "token", token: "island" }],
    n_conditions: 1,
    support_count: 200,
    support_fraction: 0.1,
    error_rate: 0.6,
    p_value: 1.2e-8,
    ci_low: 0.53,
    ci_high: 0.67,
  },
  {
    id: 1,
    conditions: [
      { kind: "token", token: "want to" },
      { kind: "high_level", feature: "overlap", bucket: "Low" },
    ],
    n_conditions: 2,
    support_count: 120,
    support_fraction: 0.06,
    error_rate: 0.5,
    p_value: 3e-4,
    ci_low: 0.41,
    ci_high: 0.59,
  },
  {
    id: 2,
    conditions: [{ kind: "token", token: "financial" }],
    n_conditions: 1,
    support_count: 110,
    support_fraction: 0.055,
    error_rate: 0.42,
    p_value: 0.002,
    ci_low: 0.33,
    ci_high: 0.51,
  },
];

export const summary: SummaryJson = {
  n_test: 2000,
  n_train: 5000,
  classes: ["entailment", "neutral"],
  accuracy: 0.75,
  baseline_error_rate: 0.25,
  discovery_state: "ready",
  n_rules: rules.length,
  high_level_features: [{ name: "overlap", t_low: 0.2, t_high: 0.8 }],
  top_tokens: [rules[0], rules[2]],
  top_high_level: [],
};

export const rulesPage: RulesPageJson = {
  total: rules.length,
  page: 1,
  page_size: 500,
  baseline_error_rate: 0.25,
  rules,
  histogram: { bin_edges: Array.from({ length: 21 }, (_, i) => i / 20), counts: [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0] },
};

export const overallStats: StatsJson = {
  size: 2000,
  error_count: 500,
  error_rate: 0.25,
  errors_by_label: { entailment: 300, neutral: 200 },
  errors_by_prediction: { neutral: 500 },
  errors_by_bucket: { overlap: { Low: 200, Medium: 250, High: 50 } },
  train_token_frequency: {},
  train_match_count: 5000,
  test_match_count: 2000,
};

export const overallProjection: ProjectionJson = {
  method: "tsne",
  final_kl: 1.31,
  points: [
    { id: "d1", x: 0.0, y: 0.0, correct: true },
    { id: "d2", x: 1.0, y: 1.0, correct: false },
    { id: "d3", x: -1.0, y: 2.0, correct: true },
    { id: "d4", x: 2.0, y: -1.0, correct: true },
  ],
};

export const overallDocuments: DocumentsPageJson = {
  total: 4,
  page: 1,
  page_size: 20,
  documents: [
    { id: "d2", texts: ["the island premise", "hyp"], label: "entailment", prediction: "neutral", correct: false, highlights: [] },
    { id: "d1", texts: ["plain text", "hyp"], label: "neutral", prediction: "neutral", correct: true, highlights: [] },
    { id: "d3", texts: ["more text", "hyp"], label: "entailment", prediction: "entailment", correct: true, highlights: [] },
    { id: "d4", texts: ["words here", "hyp"], label: "neutral", prediction: "neutral", correct: true, highlights: [] },
  ],
};

export const islandBundle: BundleJson = {
  rule: rules[0],
  stats: {
    size: 200,
    error_count: 120,
    error_rate: 0.6,
    errors_by_label: { entailment: 90, neutral: 30 },
    errors_by_prediction: { neutral: 120 },
    errors_by_bucket: { overlap: { Low: 70, Medium: 40, High: 10 } },
    train_token_frequency: { island: { entailment: 9, neutral: 6 } },
    train_match_count: 15,
    test_match_count: 200,
  },
  attributions: {
    entailment: [
      { token: "island", cnt_pos: 44, cnt_neg: 9 },
      { token: "sea", cnt_pos: 21, cnt_neg: 3 },
      { token: "travel", cnt_pos: 12, cnt_neg: 8 },
    ],
    neutral: [
      { token: "island", cnt_pos: 4, cnt_neg: 39 },
      { token: "beach", cnt_pos: 2, cnt_neg: 11 },
    ],
  },
  projection: {
    method: "tsne",
    final_kl: 1.31,
    points: [{ id: "d2", x: 1.0, y: 1.0, correct: false }],
  },
  documents: {
    total: 200,
    page: 1,
    page_size: 20,
    documents: [
      {
        id: "d2",
        texts: ["the island premise", "hyp"],
        label: "entailment",
        prediction: "neutral",
        correct: false,
        highlights: [[0, 4, 10]],
      },
    ],
  },
};

export const concepts: ConceptJson[] = [
  {
    id: 1,
    name: "female-pronouns",
    tokens: ["she", "her", "hers"],
    summary: { size: 320, error_rate: 0.31, p_value: 0.02, ci_low: 0.26, ci_high: 0.36 },
  },
  {
    id: 2,
    name: "male-pronouns",
    tokens: ["he", "him", "his"],
    summary: { size: 290, error_rate: 0.28, p_value: 0.13, ci_low: 0.23, ci_high: 0.33 },
  },
  {
    id: 3,
    name: "plural-pronouns",
    tokens: ["they", "them"],
    summary: { size: 150, error_rate: 0.12, p_value: 0.99, ci_low: 0.07, ci_high: 0.17 },
  },
];

export const compareResult: CompareJson = {
  concepts,
  overlaps: [
    { a: 1, b: 2, ci_overlap: true },
    { a: 1, b: 3, ci_overlap: false },
    { a: 2, b: 3, ci_overlap: false },
  ],
};

type Responder = (url: string, init?: RequestInit) => unknown | null;

/** fetch stub routing /api/v1 calls to fixtures; records every request. */
export function mockFetch(overrides: Record<string, unknown> = {}, responder?: Responder) {
  const calls: { url: string; method: string; body?: unknown }[] = [];
  const fetchImpl = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({
      url,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });

    const custom = responder?.(url, init);
    if (custom !== null && custom !== undefined) {
      const payload = await custom;
      return payload instanceof Response ? payload : jsonResponse(payload);
    }
    for (const [prefix, payload] of Object.entries(overrides)) {
      if (url.includes(prefix)) return jsonResponse(payload);
    }
    if (url.includes("/rules/evaluate")) return jsonResponse(islandBundle);
    if (url.includes("/rules")) return jsonResponse(rulesPage);
    if (url.includes("/summary")) return jsonResponse(summary);
    if (url.includes("/stats/overall")) return jsonResponse(overallStats);
    if (url.includes("/projection")) return jsonResponse(overallProjection);
    if (url.includes("/documents")) return jsonResponse(overallDocuments);
    if (url.includes("/concepts/compare")) return jsonResponse(compareResult);
    if (url.includes("/concepts")) return jsonResponse({ concepts });
    if (url.includes("/discovery/status")) {
      return jsonResponse({ state: "ready", n_rules: rules.length, error: null });
    }
    return jsonResponse({ detail: `unmocked ${url}` }, 404);
  };
  return { fetchImpl, calls };
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
