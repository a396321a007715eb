import type { ChartPoint } from "./types.js";
import type { SpanViewModel } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// Charts render at the same 3:1 aspect the labeling pipeline assumes,
// so perceived slopes match their labels.
export const CHART_WIDTH = 600;
export const CHART_HEIGHT = 200;
const PAD = 6;

function dayNumber(iso: string): number {
  return Date.parse(iso) / 86_400_000;
}

interface Scale {
  x(iso: string): number;
  y(value: number): number;
}

function makeScale(points: ChartPoint[]): Scale {
  const xs = points.map((p) => dayNumber(p.date));
  const ys = points.map((p) => p.value);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const xSpan = x1 - x0 || 1;
  const ySpan = y1 - y0 || 1;
  return {
    x: (iso) => PAD + ((dayNumber(iso) - x0) / xSpan) * (CHART_WIDTH - 2 * PAD),
    y: (v) => CHART_HEIGHT - PAD - ((v - y0) / ySpan) * (CHART_HEIGHT - 2 * PAD),
  };
}

function polylinePoints(points: ChartPoint[], scale: Scale): string {
  return points.map((p) => `${scale.x(p.date).toFixed(2)},${scale.y(p.value).toFixed(2)}`).join(" ");
}

/** First days of January, April, July, October within the data range. */
function quarterTicks(points: ChartPoint[]): string[] {
  if (points.length === 0) return [];
  const first = new Date(points[0].date);
  const last = new Date(points[points.length - 1].date);
  const ticks: string[] = [];
  for (let year = first.getUTCFullYear(); year <= last.getUTCFullYear(); year++) {
    for (const month of [0, 3, 6, 9]) {
      const tick = new Date(Date.UTC(year, month, 1));
      if (tick >= first && tick <= last) {
        ticks.push(tick.toISOString().slice(0, 10));
      }
    }
  }
  return ticks;
}

/**
 * Render the tile chart: a neutral gray series line, quarterly tick
 * marks, and one colored overlay polyline per highlighted span.
 */
export function renderChart(points: ChartPoint[], spans: SpanViewModel[]): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "chart");
  svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`);
  svg.setAttribute("preserveAspectRatio", "none");

  const scale = makeScale(points);

  for (const tick of quarterTicks(points)) {
    const line = document.createElementNS(SVG_NS, "line");
    const x = scale.x(tick).toFixed(2);
    line.setAttribute("class", "tick");
    line.setAttribute("x1", x);
    line.setAttribute("x2", x);
    line.setAttribute("y1", String(CHART_HEIGHT - PAD));
    line.setAttribute("y2", String(CHART_HEIGHT - PAD + 4));
    svg.appendChild(line);
  }

  const base = document.createElementNS(SVG_NS, "polyline");
  base.setAttribute("class", "series");
  base.setAttribute("points", polylinePoints(points, scale));
  svg.appendChild(base);

  for (const span of spans) {
    const inside = points.filter((p) => p.date >= span.start && p.date <= span.end);
    if (inside.length < 2) continue;
    const overlay = document.createElementNS(SVG_NS, "polyline");
    overlay.setAttribute("class", span.emphasized ? "span emphasized" : "span");
    overlay.setAttribute("points", polylinePoints(inside, scale));
    overlay.setAttribute("stroke", span.color);
    overlay.dataset.spanKey = span.key;
    if (span.fragmentIndex !== null) {
      overlay.dataset.fragment = String(span.fragmentIndex);
    }
    if (span.slotIndex !== null) {
      overlay.dataset.slotIndex = String(span.slotIndex);
    }
    svg.appendChild(overlay);
  }
  return svg;
}
