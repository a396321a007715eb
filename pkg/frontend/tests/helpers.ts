import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { vi } from "vitest";

import type { ChartResponse, SearchResponse } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8")) as T;
}

export const CHARTS = fixture<Record<string, ChartResponse>>("charts");

/**
 * Install a fetch stub that answers /api/search from a routing function
 * and /api/charts from the bundled chart fixture.
 */
export function stubFetch(
  route: (q: string, excluded: Set<string>) => SearchResponse,
): ReturnType<typeof vi.fn> {
  const impl = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input), "http://localhost");
    if (init?.signal?.aborted) {
      throw Object.assign(new Error("aborted"), { name: "AbortError" });
    }
    if (url.pathname === "/api/search") {
      const excluded = new Set(
        (url.searchParams.get("exclude") ?? "").split(",").filter(Boolean),
      );
      return jsonResponse(route(url.searchParams.get("q") ?? "", excluded));
    }
    const chartMatch = url.pathname.match(/^\/api\/charts\/(.+)$/);
    if (chartMatch) {
      const chart = CHARTS[decodeURIComponent(chartMatch[1])];
      if (!chart) return new Response("missing", { status: 404 });
      return jsonResponse(chart);
    }
    return new Response("not found", { status: 404 });
  });
  vi.stubGlobal("fetch", impl);
  return impl;
}

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
