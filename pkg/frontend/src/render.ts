/** Pure DOM rendering: the view is a function of (ViewState, Payloads).
 *
 * Every call rebuilds the full tree deterministically, so replaying the
 * same state and payloads yields an identical DOM.
 */

import {
  cellId,
  epochToIso,
  isoToEpoch,
  sameCell,
  type CellRef,
  type Payloads,
  type RegionAggregate,
  type TimeRange,
  type ViewState,
  type Zoom,
} from "./types.js";

export interface Handlers {
  onZoom(zoom: Zoom): void;
  onPendingChange(pending: TimeRange): void;
  onSubmitRange(): void;
  onCellClick(cell: CellRef): void;
  onFilterApply(words: string[]): void;
  onLoadMore(): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const RED = "#c62828";
const BLUE = "#1565c0";
const NEUTRAL = "#9e9e9e";
const MAP_WIDTH = 720;

export function render(root: HTMLElement, state: ViewState, payloads: Payloads, handlers: Handlers): void {
  root.textContent = "";
  root.append(
    renderHeader(state, payloads),
    renderMapSection(state, payloads, handlers),
    renderTimeController(state, payloads, handlers),
    renderSidePanel(state, payloads, handlers),
  );
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderHeader(state: ViewState, payloads: Payloads): HTMLElement {
  const header = el("header", { id: "header" });
  header.append(el("h1", {}, "anxmap"));
  const meta = payloads.meta;
  const line = meta
    ? `${meta.record_count} messages · threshold ${meta.model_config.threshold}` +
      ` · smoothing ${meta.model_config.smoothing ? "on" : "off"}`
    : "loading…";
  header.append(el("p", { id: "meta-line" }, line));
  return header;
}

// -- map --

function renderMapSection(state: ViewState, payloads: Payloads, handlers: Handlers): HTMLElement {
  const section = el("section", { id: "map-section" });
  const bar = el("div", { id: "zoom-bar" });
  const zoomOut = el("button", { id: "zoom-out", type: "button" }, "−");
  const zoomIn = el("button", { id: "zoom-in", type: "button" }, "+");
  const label = el("span", { id: "zoom-label" }, `zoom: ${state.zoom}`);
  zoomIn.disabled = state.zoom === "county";
  zoomOut.disabled = state.zoom === "province";
  zoomIn.addEventListener("click", () => handlers.onZoom("county"));
  zoomOut.addEventListener("click", () => handlers.onZoom("province"));
  bar.append(zoomOut, zoomIn, label);
  section.append(bar, renderMap(state, payloads, handlers));
  return section;
}

function cellSize(state: ViewState, payloads: Payloads): number {
  const info = payloads.meta?.zooms.find((z) => z.zoom === state.zoom);
  return info ? info.size_deg : state.zoom === "province" ? 1.0 : 0.2;
}

export function renderMap(state: ViewState, payloads: Payloads, handlers: Handlers): Element {
  const aggregates = payloads.regions;
  if (!aggregates || aggregates.length === 0) {
    return el("p", { id: "map-empty" }, "no messages in the selected range");
  }
  const size = cellSize(state, payloads);
  const rows = aggregates.map((a) => a.cell.row);
  const cols = aggregates.map((a) => a.cell.col);
  const minRow = Math.min(...rows);
  const maxRow = Math.max(...rows) + 1;
  const minCol = Math.min(...cols);
  const maxCol = Math.max(...cols) + 1;
  const lonSpan = (maxCol - minCol) * size;
  const latSpan = (maxRow - minRow) * size;
  const scale = MAP_WIDTH / lonSpan;
  const height = latSpan * scale;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("id", "map");
  svg.setAttribute("width", String(MAP_WIDTH));
  svg.setAttribute("height", height.toFixed(1));
  svg.setAttribute("viewBox", `0 0 ${MAP_WIDTH} ${height.toFixed(1)}`);

  const background = document.createElementNS(SVG_NS, "rect");
  background.setAttribute("class", "base-map");
  background.setAttribute("width", String(MAP_WIDTH));
  background.setAttribute("height", height.toFixed(1));
  background.setAttribute("fill", "#eef3f6");
  svg.append(background);

  // graticule at cell boundaries stands in for the base map's grid
  for (let c = minCol; c <= maxCol; c++) {
    const x = (c - minCol) * size * scale;
    svg.append(gridLine(x, 0, x, height));
  }
  for (let r = minRow; r <= maxRow; r++) {
    const y = (maxRow - r) * size * scale;
    svg.append(gridLine(0, y, MAP_WIDTH, y));
  }

  for (const aggregate of aggregates) {
    svg.append(cellRect(aggregate, state, { minCol, maxRow, size, scale }, handlers));
  }

  const corner = document.createElementNS(SVG_NS, "text");
  corner.setAttribute("x", "4");
  corner.setAttribute("y", "14");
  corner.setAttribute("class", "map-corner");
  corner.textContent = `lat ${(minRow * size).toFixed(1)}…${(maxRow * size).toFixed(1)}, ` +
    `lon ${(minCol * size).toFixed(1)}…${(maxCol * size).toFixed(1)}`;
  svg.append(corner);
  return svg;
}

function gridLine(x1: number, y1: number, x2: number, y2: number): Element {
  const line = document.createElementNS(SVG_NS, "line");
  line.setAttribute("x1", x1.toFixed(1));
  line.setAttribute("y1", y1.toFixed(1));
  line.setAttribute("x2", x2.toFixed(1));
  line.setAttribute("y2", y2.toFixed(1));
  line.setAttribute("stroke", "#d5dde2");
  line.setAttribute("stroke-width", "0.5");
  return line;
}

function cellRect(
  aggregate: RegionAggregate,
  state: ViewState,
  view: { minCol: number; maxRow: number; size: number; scale: number },
  handlers: Handlers,
): Element {
  const { cell, intensity } = aggregate;
  const rect = document.createElementNS(SVG_NS, "rect");
  const x = (cell.col - view.minCol) * view.size * view.scale;
  const y = (view.maxRow - cell.row - 1) * view.size * view.scale;
  const side = view.size * view.scale;
  rect.setAttribute("class", "cell");
  rect.setAttribute("x", x.toFixed(2));
  rect.setAttribute("y", y.toFixed(2));
  rect.setAttribute("width", side.toFixed(2));
  rect.setAttribute("height", side.toFixed(2));
  rect.setAttribute("data-row", String(cell.row));
  rect.setAttribute("data-col", String(cell.col));
  rect.setAttribute("data-zoom", cell.zoom);
  rect.setAttribute("data-intensity", String(intensity));
  const sign = Math.sign(intensity);
  rect.setAttribute("data-sign", String(sign));
  // hue carries the sign, opacity the magnitude; zero is neutral
  rect.setAttribute("fill", sign > 0 ? RED : sign < 0 ? BLUE : NEUTRAL);
  rect.setAttribute("fill-opacity", sign === 0 ? "0.35" : Math.min(1, Math.abs(intensity)).toFixed(6));
  const selected = sameCell(state.selectedCell, cell);
  rect.setAttribute("stroke", selected ? "#111" : "#8a9aa5");
  rect.setAttribute("stroke-width", selected ? "2" : "0.6");
  const title = document.createElementNS(SVG_NS, "title");
  title.textContent =
    `${cellId(cell)}: ${aggregate.anxious}/${aggregate.total} anxious` +
    ` (ratio ${aggregate.ratio.toFixed(3)}, intensity ${intensity.toFixed(3)})`;
  rect.append(title);
  rect.addEventListener("click", () => handlers.onCellClick(cell));
  return rect;
}

// -- time controller --

function renderTimeController(state: ViewState, payloads: Payloads, handlers: Handlers): HTMLElement {
  const section = el("section", { id: "time-controller" });
  const meta = payloads.meta;
  if (!meta || meta.time_min === null || meta.time_max === null) {
    section.append(el("p", {}, "no time data"));
    return section;
  }
  const minEpoch = isoToEpoch(meta.time_min);
  // half-open ranges: the upper bound must sit one past the newest record
  const maxEpoch = isoToEpoch(meta.time_max) + 1;

  const fromSlider = slider("range-from", minEpoch, maxEpoch, isoToEpoch(state.pending.from));
  const toSlider = slider("range-to", minEpoch, maxEpoch, isoToEpoch(state.pending.to));
  const readout = el(
    "span",
    { id: "range-readout" },
    `${state.pending.from} → ${state.pending.to}`,
  );
  const submit = el("button", { id: "range-submit", type: "button" }, "submit");

  fromSlider.addEventListener("input", () =>
    handlers.onPendingChange({ from: epochToIso(Number(fromSlider.value)), to: state.pending.to }),
  );
  toSlider.addEventListener("input", () =>
    handlers.onPendingChange({ from: state.pending.from, to: epochToIso(Number(toSlider.value)) }),
  );
  submit.addEventListener("click", () => handlers.onSubmitRange());

  section.append(
    el("label", { for: "range-from" }, "from"),
    fromSlider,
    el("label", { for: "range-to" }, "to"),
    toSlider,
    submit,
    readout,
  );
  if (state.rangeError) {
    section.append(el("p", { id: "range-error", role: "alert" }, state.rangeError));
  }
  return section;
}

function slider(id: string, min: number, max: number, value: number): HTMLInputElement {
  const input = el("input", {
    id,
    type: "range",
    min: String(min),
    max: String(max),
    step: "1",
    value: String(value),
  });
  return input;
}

// -- side panel: words filter, word cloud, tweets --

function renderSidePanel(state: ViewState, payloads: Payloads, handlers: Handlers): HTMLElement {
  const side = el("aside", { id: "side" });
  side.append(
    renderWordsFilter(state, handlers),
    renderWordCloud(payloads),
    renderTweetPanel(state, payloads, handlers),
  );
  return side;
}

function renderWordsFilter(state: ViewState, handlers: Handlers): HTMLElement {
  const form = el("form", { id: "words-filter" });
  const input = el("input", {
    id: "filter-input",
    type: "text",
    placeholder: "filter words…",
    value: state.filterWords.join(" "),
  });
  const apply = el("button", { id: "filter-apply", type: "submit" }, "filter");
  form.append(input, apply);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onFilterApply(input.value.split(/\s+/).filter((w) => w.length > 0));
  });
  return form;
}

function renderWordCloud(payloads: Payloads): HTMLElement {
  const box = el("div", { id: "word-cloud" });
  box.append(el("h2", {}, "word cloud"));
  const items = payloads.wordcloud?.items ?? [];
  if (items.length === 0) {
    box.append(el("p", { class: "empty" }, "no words"));
    return box;
  }
  // sized by rank, not raw count: skew-proof and defined for any counts
  const maxPx = 26;
  const minPx = 11;
  const step = items.length > 1 ? (maxPx - minPx) / (items.length - 1) : 0;
  const cloud = el("p", { class: "cloud" });
  items.forEach(([surface, count], rank) => {
    const word = el("span", {
      class: "cloud-word",
      "data-rank": String(rank),
      "data-count": String(count),
      style: `font-size:${(maxPx - rank * step).toFixed(1)}px`,
      title: `${surface}: ${count}`,
    });
    word.textContent = surface;
    cloud.append(word, document.createTextNode(" "));
  });
  box.append(cloud);
  return box;
}

function renderTweetPanel(state: ViewState, payloads: Payloads, handlers: Handlers): HTMLElement {
  const panel = el("div", { id: "tweet-panel" });
  if (!state.selectedCell) {
    panel.append(el("p", { class: "empty" }, "click a region to see its messages"));
    return panel;
  }
  const page = payloads.tweets;
  const heading = el(
    "h2",
    { id: "region-heading" },
    page ? `${page.region} · ${page.total} messages` : cellId(state.selectedCell),
  );
  panel.append(heading);
  if (!page) {
    panel.append(el("p", { class: "empty" }, "loading…"));
    return panel;
  }
  if (page.total === 0) {
    panel.append(el("p", { id: "no-tweets", class: "empty" }, "no tweets here in this range"));
    return panel;
  }
  const list = el("ul", { id: "tweet-list" });
  for (const message of page.messages) {
    const item = el("li", { class: "tweet", "data-id": message.id });
    const badge = el(
      "span",
      { class: `badge ${message.predicted.label === "Anxiety" ? "anx" : "non"}` },
      message.predicted.label === "Anxiety" ? "A" : "N",
    );
    item.append(
      badge,
      el("span", { class: "tweet-text" }, message.text),
      el("span", { class: "tweet-meta" }, `${message.ts} · (${message.lat.toFixed(3)}, ${message.lon.toFixed(3)})`),
    );
    list.append(item);
  }
  panel.append(list);
  if (page.messages.length < page.total) {
    const more = el("button", { id: "load-more", type: "button" }, `load more (${page.messages.length}/${page.total})`);
    more.addEventListener("click", () => handlers.onLoadMore());
    panel.append(more);
  }
  return panel;
}
