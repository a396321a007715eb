import { beforeEach, afterEach, describe, expect, it, vi } from "vitest";

import { App } from "../src/app.js";
import { collectExcluded } from "../src/facets.js";
import type { SearchResponse } from "../src/types.js";
import { fixture, flush, stubFetch } from "./helpers.js";

const WENT_UP = fixture<SearchResponse>("golden_went_up");
const WENT_UP_EXCL = fixture<SearchResponse>("golden_went_up_excl_soaring");

let root: HTMLElement;
let app: App;
let fetchMock: ReturnType<typeof stubFetch>;

beforeEach(async () => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  fetchMock = stubFetch((q, excluded) =>
    excluded.has("soaring") ? WENT_UP_EXCL : WENT_UP,
  );
  app = new App(root);
  await app.runSearch("stocks that went up", new Set());
  await flush();
});

afterEach(() => {
  vi.unstubAllGlobals();
});

function facetBox(label: string): HTMLInputElement {
  const box = root.querySelector<HTMLInputElement>(
    `#facets input[data-label="${label}"]`,
  );
  expect(box).not.toBeNull();
  return box!;
}

describe("facet checkbox filtering", () => {
  it("renders the nested family tree with counts", () => {
    const soaring = facetBox("soaring");
    expect(soaring.checked).toBe(true);
    const children = soaring
      .closest("li")!
      .querySelectorAll<HTMLInputElement>(":scope > ul input[type=checkbox]");
    expect(children.length).toBeGreaterThan(0);
  });

  it("unchecking a parent unchecks its descendants", () => {
    const soaring = facetBox("soaring");
    soaring.checked = false;
    soaring.dispatchEvent(new Event("change", { bubbles: true }));
    const children = soaring
      .closest("li")!
      .querySelectorAll<HTMLInputElement>(":scope > ul input[type=checkbox]");
    for (const child of children) {
      expect(child.checked).toBe(false);
    }
  });

  it("unchecking a leaf keeps its parent checked", () => {
    const soaring = facetBox("soaring");
    const leaf = soaring
      .closest("li")!
      .querySelector<HTMLInputElement>(":scope > ul input[type=checkbox]")!;
    leaf.checked = false;
    leaf.dispatchEvent(new Event("change", { bubbles: true }));
    expect(facetBox("soaring").checked).toBe(true);
    expect(collectExcluded(root.querySelector("#facets")!)).toEqual(
      new Set([leaf.dataset.label]),
    );
  });

  it("unchecking soaring sends the exclusion and removes the family's spans", async () => {
    const soaring = facetBox("soaring");
    soaring.checked = false;
    soaring.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    await flush();

    const lastSearch = fetchMock.mock.calls
      .map((c) => new URL(String(c[0]), "http://localhost"))
      .filter((u) => u.pathname === "/api/search")
      .at(-1)!;
    const sent = lastSearch.searchParams.get("exclude")!.split(",");
    expect(sent).toContain("soaring");
    expect(sent).toContain("slowly soaring");
    expect(sent).toContain("gradually soaring");

    // The refreshed response carries no soaring-family events, and the
    // page renders exactly its buckets.
    for (const bucket of WENT_UP_EXCL.buckets) {
      for (const event of bucket.events) {
        expect(event.label.split(" ")).not.toContain("soaring");
      }
    }
    const tiles = [...root.querySelectorAll<HTMLElement>(".tile")];
    expect(tiles.map((t) => t.dataset.chart)).toEqual(
      WENT_UP_EXCL.buckets.map((b) => b.chart_id),
    );
  });

  it("re-checking restores the original results", async () => {
    const soaring = facetBox("soaring");
    soaring.checked = false;
    soaring.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    await flush();
    const again = facetBox("soaring");
    again.checked = true;
    again.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    await flush();
    const tiles = [...root.querySelectorAll<HTMLElement>(".tile")];
    expect(tiles.map((t) => t.dataset.chart)).toEqual(
      WENT_UP.buckets.map((b) => b.chart_id),
    );
  });
});
