/** Wire types mirroring the search API responses. */

export interface EventPayload {
  doc_id: number;
  start_date: string;
  end_date: string;
  label: string;
  kind: string;
  label_score: number;
  saliency: number;
  composite: number;
  slot_index?: number;
  slot_color?: string;
  match_id?: number;
}

export interface BucketPayload {
  chart_id: string;
  bucket_score: number;
  match_count: number;
  events: EventPayload[];
  snippets: string[];
  sentence?: string;
}

export interface FacetNodePayload {
  label: string;
  match_count: number;
  checked: boolean;
  children: FacetNodePayload[];
}

export interface SearchResponse {
  notification: string | null;
  facet_tree: FacetNodePayload[];
  buckets: BucketPayload[];
  total_buckets: number;
  page: number;
  query_echo: Record<string, unknown>;
}

export interface ChartPoint {
  date: string;
  value: number;
}

export interface ChartResponse {
  chart_id: string;
  points: ChartPoint[];
}
