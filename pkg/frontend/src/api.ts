import type {
  BundleJson,
  CompareJson,
  ConceptJson,
  ConditionJson,
  DiscoveryStatusJson,
  DocumentsPageJson,
  ProjectionJson,
  RulesPageJson,
  StatsJson,
  SummaryJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`API ${status}: ${detail}`);
  }
}

/** Thin typed wrapper over the /api/v1 endpoints; the client never
 * recomputes any statistic it gets from here. */
export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(`${this.base}/api/v1${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  summary(): Promise<SummaryJson> {
    return this.request("/summary");
  }

  rules(params: { page_size?: number } = {}): Promise<RulesPageJson> {
    const q = new URLSearchParams();
    q.set("page_size", String(params.page_size ?? 500));
    return this.request(`/rules?${q}`);
  }

  evaluate(conditions: ConditionJson[]): Promise<BundleJson> {
    return this.post("/rules/evaluate", { conditions });
  }

  documents(page = 1, pageSize = 20): Promise<DocumentsPageJson> {
    return this.request(`/documents?page=${page}&page_size=${pageSize}`);
  }

  statsOverall(): Promise<StatsJson> {
    return this.request("/stats/overall");
  }

  projection(): Promise<ProjectionJson> {
    return this.request("/projection");
  }

  createConcept(name: string, tokens: string[], id?: number): Promise<ConceptJson> {
    return this.post("/concepts", id === undefined ? { name, tokens } : { name, tokens, id });
  }

  concepts(): Promise<{ concepts: ConceptJson[] }> {
    return this.request("/concepts");
  }

  compareConcepts(ids: number[]): Promise<CompareJson> {
    return this.post("/concepts/compare", { ids });
  }

  discoveryStatus(): Promise<DiscoveryStatusJson> {
    return this.request("/discovery/status");
  }
}
