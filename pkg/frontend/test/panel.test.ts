import { afterEach, describe, expect, it, vi } from "vitest";

import { bootApp, clickCell, REGIONS, TWEETS, WORDCLOUD } from "./helpers.js";

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.textContent = "";
});

describe("region panel", () => {
  it("a cell click issues /api/tweets and /api/wordcloud with the cell and range", async () => {
    const { app, root, server } = await bootApp();
    expect(server.callsTo("/api/tweets").length).toBe(0);
    expect(server.callsTo("/api/wordcloud").length).toBe(0);

    await clickCell(app, root, 0);
    const cell = REGIONS[0]!.cell;
    for (const path of ["/api/tweets", "/api/wordcloud"] as const) {
      const calls = server.callsTo(path);
      expect(calls.length).toBe(1);
      const params = calls[0]!.params;
      expect(params.get("row")).toBe(String(cell.row));
      expect(params.get("col")).toBe(String(cell.col));
      expect(params.get("zoom")).toBe(cell.zoom);
      expect(params.get("from")).toBe(app.state.range.from);
      expect(params.get("to")).toBe(app.state.range.to);
    }
  });

  it("renders the region heading, tweet texts, and rank-sized cloud words", async () => {
    const { app, root } = await bootApp();
    await clickCell(app, root, 0);
    expect(root.querySelector("#region-heading")!.textContent).toBe(
      `${TWEETS.region} · ${TWEETS.total} messages`,
    );
    const items = [...root.querySelectorAll("#tweet-list .tweet")];
    expect(items.length).toBe(TWEETS.messages.length);
    expect(items[0]!.getAttribute("data-id")).toBe(TWEETS.messages[0]!.id);

    const words = [...root.querySelectorAll(".cloud-word")];
    expect(words.length).toBe(WORDCLOUD.items.length);
    const sizes = words.map((w) => parseFloat((w.getAttribute("style") ?? "").replace(/.*font-size:/, "")));
    for (let i = 1; i < sizes.length; i++) {
      expect(sizes[i]!).toBeLessThan(sizes[i - 1]!); // rank-sized, strictly decreasing
    }
  });

  it("shows the empty state for a cell without tweets", async () => {
    const empty = { region: "province:1,1", total: 0, offset: 0, limit: 20, messages: [] };
    const { app, root } = await bootApp({ "/api/tweets": empty, "/api/wordcloud": { items: [] } });
    await clickCell(app, root, 0);
    expect(root.querySelector("#no-tweets")).not.toBeNull();
  });

  it("pagination appends the next page", async () => {
    const many = Array.from({ length: 50 }, (_, i) => ({
      ...TWEETS.messages[0]!,
      id: `m${String(i).padStart(3, "0")}`,
      text: `message ${i}`,
    }));
    const { app, root, server } = await bootApp({
      "/api/tweets": (params: URLSearchParams) => {
        const offset = Number(params.get("offset") ?? 0);
        const limit = Number(params.get("limit") ?? 20);
        return { region: "province:36,128", total: many.length, offset, limit,
                 messages: many.slice(offset, offset + limit) };
      },
    });
    await clickCell(app, root, 0);
    expect(root.querySelectorAll("#tweet-list .tweet").length).toBe(20);

    root.querySelector<HTMLButtonElement>("#load-more")!.dispatchEvent(new Event("click"));
    await app.whenIdle();
    const tweetCalls = server.callsTo("/api/tweets");
    expect(tweetCalls.at(-1)!.params.get("offset")).toBe("20");
    const shown = [...root.querySelectorAll("#tweet-list .tweet")];
    expect(shown.length).toBe(40);
    expect(shown[0]!.getAttribute("data-id")).toBe("m000");
    expect(shown[39]!.getAttribute("data-id")).toBe("m039");
  });
});
