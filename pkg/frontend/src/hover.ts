/**
 * Bidirectional hover linking inside one tile: hovering an emphasized
 * chart span fades its emphasized siblings and gray-highlights the
 * snippet fragment it belongs to; hovering a fragment does the mirror
 * image. Unhover restores everything.
 */

function spans(tile: HTMLElement): SVGElement[] {
  return [...tile.querySelectorAll<SVGElement>(".span")];
}

function emphasizedSpans(tile: HTMLElement): SVGElement[] {
  return [...tile.querySelectorAll<SVGElement>(".span.emphasized")];
}

function fragments(tile: HTMLElement): HTMLElement[] {
  return [...tile.querySelectorAll<HTMLElement>(".fragment")];
}

export function clearHover(tile: HTMLElement): void {
  for (const el of spans(tile)) el.classList.remove("faded");
  for (const el of fragments(tile)) el.classList.remove("snippet-hover");
  for (const el of tile.querySelectorAll(".extra-row")) el.classList.remove("snippet-hover");
}

function fadeOtherEmphasized(tile: HTMLElement, keep: Set<string>): void {
  for (const el of emphasizedSpans(tile)) {
    if (!keep.has(el.dataset.spanKey ?? "")) {
      el.classList.add("faded");
    }
  }
}

export function hoverSpan(tile: HTMLElement, spanKey: string): void {
  clearHover(tile);
  const target = spans(tile).find((el) => el.dataset.spanKey === spanKey);
  if (!target) return;
  fadeOtherEmphasized(tile, new Set([spanKey]));
  const fragmentIndex = target.dataset.fragment;
  if (fragmentIndex !== undefined) {
    const fragment = fragments(tile).find((el) => el.dataset.fragment === fragmentIndex);
    fragment?.classList.add("snippet-hover");
  }
}

export function hoverFragment(tile: HTMLElement, fragmentIndex: number): void {
  clearHover(tile);
  const keep = new Set<string>();
  for (const el of spans(tile)) {
    if (el.dataset.fragment === String(fragmentIndex)) {
      keep.add(el.dataset.spanKey ?? "");
    }
  }
  fadeOtherEmphasized(tile, keep);
  const fragment = fragments(tile).find(
    (el) => el.dataset.fragment === String(fragmentIndex),
  );
  fragment?.classList.add("snippet-hover");
}

/** Hovering an expanded-list row highlights its span(s) on the chart. */
export function hoverExtraRow(tile: HTMLElement, spanKeys: string[]): void {
  clearHover(tile);
  const keep = new Set(spanKeys);
  for (const el of spans(tile)) {
    if (!keep.has(el.dataset.spanKey ?? "")) {
      el.classList.add("faded");
    }
  }
}

export function wireHover(tile: HTMLElement): void {
  for (const el of spans(tile)) {
    el.addEventListener("mouseenter", () => hoverSpan(tile, el.dataset.spanKey ?? ""));
    el.addEventListener("mouseleave", () => clearHover(tile));
  }
  for (const el of fragments(tile)) {
    el.addEventListener("mouseenter", () =>
      hoverFragment(tile, Number(el.dataset.fragment)),
    );
    el.addEventListener("mouseleave", () => clearHover(tile));
  }
}
