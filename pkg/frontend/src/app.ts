import { ApiClient } from "./api.js";
import { renderChart } from "./chart.js";
import { renderFacets } from "./facets.js";
import { hoverExtraRow, clearHover, wireHover } from "./hover.js";
import { buildTiles, TileViewModel } from "./state.js";
import type { ChartPoint, SearchResponse } from "./types.js";

/**
 * Page controller. The client never re-scores or re-orders anything:
 * tiles appear exactly in the API's bucket order, spans come from the
 * API's events, and the only state sent back is the raw query plus the
 * unchecked facet labels.
 */
export class App {
  private api: ApiClient;
  private lastQuery = "";
  private chartCache = new Map<string, ChartPoint[]>();
  private searchSeq = 0;

  constructor(private root: HTMLElement, api?: ApiClient) {
    this.api = api ?? new ApiClient();
    this.root.innerHTML = `
      <header>
        <form id="search-form">
          <input id="search-box" type="search" placeholder="e.g. stocks that tanked in 2016" />
          <button id="search-button" type="submit">Search</button>
        </form>
      </header>
      <div id="notification" class="notification" hidden></div>
      <div id="error-banner" class="error-banner" hidden></div>
      <main>
        <aside id="facets"></aside>
        <section id="results"></section>
      </main>
    `;
    const form = this.root.querySelector<HTMLFormElement>("#search-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const box = this.root.querySelector<HTMLInputElement>("#search-box")!;
      void this.runSearch(box.value, new Set());
    });
  }

  async runSearch(query: string, excluded: Set<string>): Promise<void> {
    if (!query.trim()) return;
    this.lastQuery = query;
    const seq = ++this.searchSeq;
    try {
      const response = await this.api.search(query, excluded);
      if (seq !== this.searchSeq) return; // superseded; latest wins
      await this.render(response, seq);
      if (seq === this.searchSeq) this.setError(null);
    } catch (err) {
      if ((err as Error).name === "AbortError") return;
      if (seq !== this.searchSeq) return;
      this.setError(`Search failed: ${(err as Error).message}`);
    }
  }

  private setError(message: string | null): void {
    const banner = this.root.querySelector<HTMLElement>("#error-banner")!;
    banner.hidden = message === null;
    banner.textContent = message ?? "";
  }

  private async render(response: SearchResponse, seq: number): Promise<void> {
    // Assemble every tile (chart fetches included) before touching the
    // DOM, then swap in one pass; a superseding search discards the
    // whole batch.
    const tiles = await Promise.all(
      buildTiles(response.buckets).map((tile) => this.renderTile(tile)),
    );
    if (seq !== this.searchSeq) return;

    const notification = this.root.querySelector<HTMLElement>("#notification")!;
    notification.hidden = !response.notification;
    notification.textContent = response.notification ?? "";

    const facetsRoot = this.root.querySelector<HTMLElement>("#facets")!;
    renderFacets(facetsRoot, response.facet_tree, (newExcluded) => {
      void this.runSearch(this.lastQuery, newExcluded);
    });

    const results = this.root.querySelector<HTMLElement>("#results")!;
    results.innerHTML = "";
    if (tiles.length === 0) {
      const empty = document.createElement("p");
      empty.className = "no-results";
      empty.textContent = "No results.";
      results.appendChild(empty);
      return;
    }
    for (const tile of tiles) {
      results.appendChild(tile);
    }
  }

  private async chartPoints(chartId: string): Promise<ChartPoint[]> {
    const cached = this.chartCache.get(chartId);
    if (cached) return cached;
    const body = await this.api.chart(chartId);
    this.chartCache.set(chartId, body.points);
    return body.points;
  }

  private async renderTile(tile: TileViewModel): Promise<HTMLElement> {
    const el = document.createElement("article");
    el.className = "tile";
    el.dataset.chart = tile.chartId;

    let points: ChartPoint[] = [];
    try {
      points = await this.chartPoints(tile.chartId);
    } catch {
      points = [];
    }
    el.appendChild(renderChart(points, tile.spans));

    const ticker = document.createElement("h2");
    ticker.className = "ticker";
    ticker.textContent = tile.chartId;
    el.appendChild(ticker);

    const count = document.createElement("p");
    count.className = "match-count";
    count.textContent = `${tile.matchCount} ${tile.matchCount === 1 ? "match" : "matches"}`;
    el.appendChild(count);

    const sentence = document.createElement("p");
    sentence.className = "snippet";
    sentence.appendChild(document.createTextNode("This stock was "));
    tile.fragments.forEach((fragment, i) => {
      if (i > 0) {
        sentence.appendChild(
          document.createTextNode(i === tile.fragments.length - 1 ? ", and " : ", "),
        );
      }
      const piece = document.createElement("span");
      piece.className = "fragment";
      piece.dataset.fragment = String(i);
      piece.textContent = fragment;
      sentence.appendChild(piece);
    });
    sentence.appendChild(document.createTextNode("."));
    el.appendChild(sentence);

    if (tile.extraRows.length > 0) {
      const toggle = document.createElement("button");
      toggle.className = "expand";
      toggle.textContent = `Show ${tile.extraRows.length} more`;
      const list = document.createElement("ul");
      list.className = "extra-matches";
      list.hidden = true;
      for (const row of tile.extraRows) {
        const item = document.createElement("li");
        item.className = "extra-row";
        item.textContent = row.text;
        item.addEventListener("mouseenter", () => hoverExtraRow(el, row.spanKeys));
        item.addEventListener("mouseleave", () => clearHover(el));
        list.appendChild(item);
      }
      toggle.addEventListener("click", () => {
        list.hidden = !list.hidden;
        toggle.textContent = list.hidden
          ? `Show ${tile.extraRows.length} more`
          : "Show fewer";
      });
      el.appendChild(toggle);
      el.appendChild(list);
    }

    wireHover(el);
    return el;
  }
}

export function mount(root: HTMLElement): App {
  return new App(root);
}
