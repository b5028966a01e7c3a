/**
 * Thin client over the hypodb HTTP API.
 *
 * Tables that end up on screen are fetched through the CSV endpoints and
 * kept as raw strings; JSON is used for mutations and registry listings.
 */

export interface ApiError {
  code: string;
  message: string;
  detail?: Record<string, unknown>;
}

export class ApiFailure extends Error {
  constructor(public status: number, public payload: ApiError) {
    super(payload.message);
  }
}

export class Client {
  constructor(public baseUrl: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: ApiError;
      try {
        payload = (await response.json()) as ApiError;
      } catch {
        payload = { code: "http_error", message: response.statusText };
      }
      throw new ApiFailure(response.status, payload);
    }
    return response;
  }

  async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  async getCsv(path: string): Promise<string> {
    return (await this.request(path)).text();
  }

  async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return response.json() as Promise<T>;
  }

  listPhenomena() {
    return this.getJson<
      { phenomenon_id: number; description: string; symbols: string[] }[]
    >("/phenomena");
  }

  listHypotheses() {
    return this.getJson<
      { hypothesis_id: number; name: string; synthesized: boolean }[]
    >("/hypotheses");
  }

  addPhenomenon(id: number, description: string) {
    return this.postJson("/phenomena", { phenomenon_id: id, description });
  }

  addHypothesis(doc: Record<string, unknown>) {
    return this.postJson<{ hypothesis_id: number; sigma: string }>(
      "/hypotheses",
      doc,
    );
  }

  addTrial(
    hypothesisId: number,
    body: {
      phenomenon_id: number;
      trial_id: number;
      mappings: Record<string, string>;
      csv: string;
    },
  ) {
    return this.postJson(`/hypotheses/${hypothesisId}/trials`, body);
  }

  addObservations(phenomenonId: number, csv: string) {
    return this.postJson(`/phenomena/${phenomenonId}/observations`, { csv });
  }

  synthesize(hypothesisId: number) {
    return this.postJson<{ job_id: number }>(
      `/synthesize/${hypothesisId}?background=true`,
      {},
    );
  }

  condition(phenomenonId: number, symbol: string, sigma: number, intersect: boolean) {
    return this.postJson<{ job_id: number }>(
      `/condition/${phenomenonId}?background=true`,
      { symbol, sigma, intersect },
    );
  }

  rankCsv(phenomenonId: number, at?: string, symbol?: string) {
    const params = new URLSearchParams();
    if (at) params.set("at", at);
    if (symbol) params.set("symbol", symbol);
    const qs = params.toString();
    return this.getCsv(`/rank/${phenomenonId}/csv${qs ? "?" + qs : ""}`);
  }

  queryCsv(spec: {
    projection: string;
    filters: string[];
    order?: string;
    columns?: string;
  }) {
    const params = new URLSearchParams();
    params.set("projection", spec.projection);
    for (const f of spec.filters) params.append("filter", f);
    if (spec.order) params.set("order", spec.order);
    if (spec.columns) params.set("columns", spec.columns);
    return this.getCsv(`/query/csv?${params.toString()}`);
  }

  status() {
    return this.getJson<{
      store: { relations: string[]; synthesized: number[]; conditioned: number[] };
      jobs: { id: number; op: string; status: string; error: ApiError | null }[];
    }>("/status");
  }
}
