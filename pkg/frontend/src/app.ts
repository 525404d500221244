/** Controller: owns the ViewState, orchestrates fetches, and re-renders.
 *
 * Dragging the time controller only updates pending state; exactly one
 * /api/regions fetch goes out per submit. Zoom changes clear the cell
 * selection. The words filter persists across time submits. Superseded
 * responses are dropped inside the ApiClient, so late arrivals never
 * overwrite newer state.
 */

import { ApiClient } from "./api.js";
import { render, type Handlers } from "./render.js";
import {
  epochToIso,
  isoToEpoch,
  PAGE_LIMIT,
  type CellRef,
  type Payloads,
  type TimeRange,
  type ViewState,
  type Zoom,
} from "./types.js";

const WORD_CLOUD_K = 30;

const INITIAL_RANGE: TimeRange = { from: "1970-01-01T00:00:00Z", to: "1970-01-01T00:00:01Z" };

export class App {
  state: ViewState = {
    range: INITIAL_RANGE,
    pending: INITIAL_RANGE,
    zoom: "province",
    selectedCell: null,
    filterWords: [],
    pageOffset: 0,
    rangeError: null,
  };

  payloads: Payloads = { meta: null, regions: null, tweets: null, wordcloud: null };

  private inFlight = new Set<Promise<unknown>>();

  private handlers: Handlers = {
    onZoom: (zoom) => this.setZoom(zoom),
    onPendingChange: (pending) => this.setPending(pending),
    onSubmitRange: () => void this.submitRange(),
    onCellClick: (cell) => void this.selectCell(cell),
    onFilterApply: (words) => void this.applyFilter(words),
    onLoadMore: () => void this.loadMore(),
  };

  constructor(private root: HTMLElement, private api: ApiClient) {}

  /** Resolves once every outstanding fetch has settled (for tests). */
  async whenIdle(): Promise<void> {
    while (this.inFlight.size > 0) {
      await Promise.allSettled([...this.inFlight]);
    }
  }

  draw(): void {
    render(this.root, this.state, this.payloads, this.handlers);
  }

  async init(): Promise<void> {
    await this.track(this.loadMeta());
    this.draw();
    await this.track(this.refreshRegions());
  }

  private track<T>(promise: Promise<T>): Promise<T> {
    this.inFlight.add(promise);
    promise.finally(() => this.inFlight.delete(promise)).catch(() => undefined);
    return promise;
  }

  private async loadMeta(): Promise<void> {
    const meta = await this.api.meta();
    if (!meta) return;
    this.payloads.meta = meta;
    if (meta.time_min !== null && meta.time_max !== null) {
      // default to the whole data span; +1s because ranges are half-open
      const range = { from: meta.time_min, to: epochToIso(isoToEpoch(meta.time_max) + 1) };
      this.state.range = range;
      this.state.pending = { ...range };
    }
  }

  private async refreshRegions(): Promise<void> {
    const regions = await this.api.regions(this.state.range, this.state.zoom);
    if (regions === null) return; // superseded
    this.payloads.regions = regions;
    this.draw();
  }

  private async refreshPanel(): Promise<void> {
    const cell = this.state.selectedCell;
    if (!cell) return;
    const [tweets, cloud] = await Promise.all([
      this.api.tweets(cell, this.state.range, this.state.filterWords, this.state.pageOffset, PAGE_LIMIT),
      this.api.wordcloud(cell, this.state.range, WORD_CLOUD_K),
    ]);
    if (tweets !== null) this.payloads.tweets = tweets;
    if (cloud !== null) this.payloads.wordcloud = cloud;
    this.draw();
  }

  setZoom(zoom: Zoom): void {
    if (zoom === this.state.zoom) return;
    this.state.zoom = zoom;
    this.state.selectedCell = null; // selection does not survive a zoom change
    this.state.pageOffset = 0;
    this.payloads.tweets = null;
    this.payloads.wordcloud = null;
    this.draw();
    void this.track(this.refreshRegions());
  }

  setPending(pending: TimeRange): void {
    this.state.pending = pending;
    this.state.rangeError = null;
    this.draw(); // no fetch while dragging
  }

  async submitRange(): Promise<void> {
    const { from, to } = this.state.pending;
    if (isoToEpoch(from) >= isoToEpoch(to)) {
      this.state.rangeError = "'from' must be earlier than 'to'";
      this.draw();
      return;
    }
    this.state.rangeError = null;
    this.state.range = { ...this.state.pending };
    this.state.pageOffset = 0;
    const work: Promise<void>[] = [this.refreshRegions()];
    if (this.state.selectedCell) {
      work.push(this.refreshPanel());
    }
    await this.track(Promise.all(work).then(() => undefined));
  }

  async selectCell(cell: CellRef): Promise<void> {
    this.state.selectedCell = cell;
    this.state.pageOffset = 0;
    this.payloads.tweets = null;
    this.payloads.wordcloud = null;
    this.draw();
    await this.track(this.refreshPanel());
  }

  async applyFilter(words: string[]): Promise<void> {
    this.state.filterWords = words;
    this.state.pageOffset = 0;
    if (!this.state.selectedCell) {
      this.draw();
      return;
    }
    const cell = this.state.selectedCell;
    const tweets = await this.track(
      this.api.tweets(cell, this.state.range, words, 0, PAGE_LIMIT),
    );
    if (tweets !== null) {
      this.payloads.tweets = tweets;
      this.draw();
    }
  }

  async loadMore(): Promise<void> {
    const cell = this.state.selectedCell;
    const current = this.payloads.tweets;
    if (!cell || !current) return;
    this.state.pageOffset = current.messages.length;
    const next = await this.track(
      this.api.tweets(cell, this.state.range, this.state.filterWords, this.state.pageOffset, PAGE_LIMIT),
    );
    if (next !== null) {
      // pagination appends
      this.payloads.tweets = { ...next, messages: [...current.messages, ...next.messages] };
      this.draw();
    }
  }
}

export function createApp(root: HTMLElement, baseUrl = ""): App {
  return new App(root, new ApiClient(baseUrl));
}
