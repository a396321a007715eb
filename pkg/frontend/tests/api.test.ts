import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("latest-wins search requests", () => {
  it("aborts the in-flight request when a new search starts", async () => {
    const signals: AbortSignal[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn((_input: RequestInfo | URL, init?: RequestInit) => {
        const signal = init!.signal!;
        signals.push(signal);
        return new Promise<Response>((resolve, reject) => {
          signal.addEventListener("abort", () =>
            reject(Object.assign(new Error("aborted"), { name: "AbortError" })),
          );
          setTimeout(
            () => resolve(new Response("{}", { status: 200 })),
            20,
          );
        });
      }),
    );
    const client = new ApiClient();
    const first = client.search("one", new Set()).catch((e: Error) => e.name);
    const second = client.search("two", new Set());
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
    expect(await first).toBe("AbortError");
    await second;
  });

  it("sends the sorted exclusion list", async () => {
    const fetchMock = vi.fn(async () => new Response("{}", { status: 200 }));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient();
    await client.search("x", new Set(["soaring", "climbing"]));
    const url = new URL(String(fetchMock.mock.calls[0][0]), "http://localhost");
    expect(url.searchParams.get("exclude")).toBe("climbing,soaring");
    expect(url.searchParams.get("q")).toBe("x");
  });

  it("raises on http errors", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("bad", { status: 400 })));
    const client = new ApiClient();
    await expect(client.search("x", new Set())).rejects.toThrow("search failed: 400");
  });
});
