import type { BucketPayload, EventPayload } from "./types.js";

export const EMPHASIS_COLOR = "#d62728";

/** One highlighted stretch of a tile's line chart. */
export interface SpanViewModel {
  key: string;
  start: string;
  end: string;
  label: string;
  color: string;
  slotIndex: number | null;
  emphasized: boolean;
  /** Index into the tile's snippet fragments, or null for extra matches. */
  fragmentIndex: number | null;
}

/** A collapsed row of the "more matches" list. */
export interface ExtraMatchRow {
  text: string;
  spanKeys: string[];
}

export interface TileViewModel {
  chartId: string;
  matchCount: number;
  spans: SpanViewModel[];
  fragments: string[];
  sentence: string;
  extraRows: ExtraMatchRow[];
  expanded: boolean;
}

function spanKey(chartId: string, eventIndex: number): string {
  return `${chartId}:${eventIndex}`;
}

/**
 * Shape a bucket into tile state. The API's event order is authoritative:
 * the first three matches are emphasized and paired 1:1 with the snippet
 * fragments; the rest collapse behind the expand control. Sequence events
 * group into matches by match_id and color by slot position.
 */
export function buildTile(bucket: BucketPayload): TileViewModel {
  const isSequence = bucket.events.some((e) => e.match_id !== undefined);
  const spans: SpanViewModel[] = [];
  const extraRows: ExtraMatchRow[] = [];

  if (!isSequence) {
    bucket.events.forEach((event, i) => {
      const emphasized = i < bucket.snippets.length;
      spans.push({
        key: spanKey(bucket.chart_id, i),
        start: event.start_date,
        end: event.end_date,
        label: event.label,
        color: event.slot_color ?? EMPHASIS_COLOR,
        slotIndex: event.slot_index ?? null,
        emphasized,
        fragmentIndex: emphasized ? i : null,
      });
      if (!emphasized) {
        extraRows.push({
          text: `${event.label} from ${event.start_date} to ${event.end_date}`,
          spanKeys: [spanKey(bucket.chart_id, i)],
        });
      }
    });
  } else {
    const byMatch = new Map<number, { event: EventPayload; index: number }[]>();
    bucket.events.forEach((event, i) => {
      const id = event.match_id ?? 0;
      if (!byMatch.has(id)) byMatch.set(id, []);
      byMatch.get(id)!.push({ event, index: i });
    });
    for (const [matchId, members] of [...byMatch.entries()].sort((a, b) => a[0] - b[0])) {
      const emphasized = matchId < bucket.snippets.length;
      const keys: string[] = [];
      for (const { event, index } of members) {
        const key = spanKey(bucket.chart_id, index);
        keys.push(key);
        spans.push({
          key,
          start: event.start_date,
          end: event.end_date,
          label: event.label,
          color: event.slot_color ?? EMPHASIS_COLOR,
          slotIndex: event.slot_index ?? null,
          emphasized,
          fragmentIndex: emphasized ? matchId : null,
        });
      }
      if (!emphasized) {
        const labels = members.map((m) => m.event.label).join(", then ");
        extraRows.push({ text: labels, spanKeys: keys });
      }
    }
  }

  return {
    chartId: bucket.chart_id,
    matchCount: bucket.match_count,
    spans,
    fragments: bucket.snippets.slice(),
    sentence: bucket.sentence ?? "",
    extraRows,
    expanded: false,
  };
}

export function buildTiles(buckets: BucketPayload[]): TileViewModel[] {
  return buckets.map(buildTile);
}
