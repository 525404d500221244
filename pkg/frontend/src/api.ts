/** Typed client for the five query endpoints.
 *
 * One AbortController and one sequence number per endpoint class: a new
 * request aborts its in-flight predecessor, and a response is dropped
 * unless its sequence number is still the latest, so stale payloads
 * (superseded submits) never reach the view.
 */

import type { CellRef, Meta, RegionAggregate, TimeRange, TweetPage, WordCloud, Zoom } from "./types.js";

type EndpointClass = "meta" | "regions" | "tweets" | "wordcloud";

export type QueryParams = Record<string, string | number | undefined>;

export class ApiClient {
  private controllers = new Map<EndpointClass, AbortController>();
  private sequences = new Map<EndpointClass, number>();

  constructor(private baseUrl: string = "") {}

  async meta(): Promise<Meta | null> {
    return this.get("meta", "/api/meta", {});
  }

  async regions(range: TimeRange, zoom: Zoom): Promise<RegionAggregate[] | null> {
    return this.get("regions", "/api/regions", { from: range.from, to: range.to, zoom });
  }

  async tweets(
    cell: CellRef,
    range: TimeRange,
    words: string[],
    offset: number,
    limit: number,
  ): Promise<TweetPage | null> {
    return this.get("tweets", "/api/tweets", {
      row: cell.row,
      col: cell.col,
      zoom: cell.zoom,
      from: range.from,
      to: range.to,
      q: words.length ? words.join(" ") : undefined,
      offset,
      limit,
    });
  }

  async wordcloud(cell: CellRef | null, range: TimeRange, k: number): Promise<WordCloud | null> {
    return this.get("wordcloud", "/api/wordcloud", {
      row: cell?.row,
      col: cell?.col,
      zoom: cell?.zoom,
      from: range.from,
      to: range.to,
      k,
    });
  }

  /** Returns null when the request was superseded by a newer one. */
  private async get<T>(cls: EndpointClass, path: string, params: QueryParams): Promise<T | null> {
    this.controllers.get(cls)?.abort();
    const controller = new AbortController();
    this.controllers.set(cls, controller);
    const seq = (this.sequences.get(cls) ?? 0) + 1;
    this.sequences.set(cls, seq);

    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) query.set(key, String(value));
    }
    const suffix = query.size > 0 ? `?${query.toString()}` : "";

    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${path}${suffix}`, { signal: controller.signal });
    } catch (err) {
      if ((err as { name?: string }).name === "AbortError") return null;
      throw err;
    }
    if (this.sequences.get(cls) !== seq) return null; // stale
    if (!response.ok) {
      throw new Error(`${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }
}
