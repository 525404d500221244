/** Payload types mirroring the query API, field for field. */

export type Zoom = "province" | "county";

export interface CellRef {
  zoom: Zoom;
  row: number;
  col: number;
}

export interface RegionAggregate {
  cell: CellRef;
  total: number;
  anxious: number;
  ratio: number;
  intensity: number;
}

export interface ZoomInfo {
  zoom: Zoom;
  size_deg: number;
}

export interface Meta {
  time_min: string | null;
  time_max: string | null;
  record_count: number;
  global_ratio: number | null;
  zooms: ZoomInfo[];
  model_config: { smoothing: boolean; threshold: number; pos_filter: string[] };
}

/** Non-finite numbers arrive as the strings "Infinity" / "-Infinity". */
export type ApiNumber = number | "Infinity" | "-Infinity";

export interface Message {
  id: string;
  text: string;
  tokens: [string, string][];
  label: 0 | 1 | null;
  predicted: { label: "Anxiety" | "NonAnxiety"; ratio: ApiNumber };
  lat: number;
  lon: number;
  ts: string;
}

export interface TweetPage {
  region: string;
  total: number;
  offset: number;
  limit: number;
  messages: Message[];
}

export interface WordCloud {
  items: [string, number][];
}

export interface TimeRange {
  from: string; // ISO-8601 UTC, second precision
  to: string;
}

/** Everything the view is a function of. */
export interface ViewState {
  range: TimeRange;
  pending: TimeRange; // controller slider positions, applied on submit
  zoom: Zoom;
  selectedCell: CellRef | null;
  filterWords: string[];
  pageOffset: number;
  rangeError: string | null;
}

export interface Payloads {
  meta: Meta | null;
  regions: RegionAggregate[] | null;
  /** Accumulated tweet list: pagination appends to `messages`. */
  tweets: TweetPage | null;
  wordcloud: WordCloud | null;
}

export const PAGE_LIMIT = 20;

export function isoToEpoch(iso: string): number {
  return Math.floor(Date.parse(iso) / 1000);
}

export function epochToIso(epoch: number): string {
  return new Date(epoch * 1000).toISOString().replace(".000Z", "Z");
}

export function cellId(cell: CellRef): string {
  return `${cell.zoom}:${cell.row},${cell.col}`;
}

export function sameCell(a: CellRef | null, b: CellRef | null): boolean {
  return !!a && !!b && a.zoom === b.zoom && a.row === b.row && a.col === b.col;
}
