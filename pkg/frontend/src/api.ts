import type { ChartResponse, SearchResponse } from "./types.js";

/**
 * Thin client over the search API. At most one search request is in
 * flight; starting a new one aborts the previous (latest wins).
 */
export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(private baseUrl: string = "") {}

  async search(query: string, excluded: Set<string>, page = 1): Promise<SearchResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const params = new URLSearchParams({ q: query, page: String(page) });
    if (excluded.size > 0) {
      params.set("exclude", [...excluded].sort().join(","));
    }
    const resp = await fetch(`${this.baseUrl}/api/search?${params}`, {
      signal: controller.signal,
    });
    if (!resp.ok) {
      throw new Error(`search failed: ${resp.status} ${await resp.text()}`);
    }
    return (await resp.json()) as SearchResponse;
  }

  async chart(chartId: string): Promise<ChartResponse> {
    const resp = await fetch(`${this.baseUrl}/api/charts/${encodeURIComponent(chartId)}`);
    if (!resp.ok) {
      throw new Error(`chart failed: ${resp.status}`);
    }
    return (await resp.json()) as ChartResponse;
  }
}
