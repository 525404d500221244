/** A fixture server: replays golden payloads through a recording fetch stub. */

import { vi } from "vitest";

import { App, createApp } from "../src/app.js";
import type { Meta, RegionAggregate, TweetPage, WordCloud } from "../src/types.js";

import metaFixture from "./fixtures/meta.json";
import regionsFixture from "./fixtures/regions.json";
import tweetsFixture from "./fixtures/tweets.json";
import wordcloudFixture from "./fixtures/wordcloud.json";

export const META = metaFixture as unknown as Meta;
export const REGIONS = regionsFixture as unknown as RegionAggregate[];
export const TWEETS = tweetsFixture as unknown as TweetPage;
export const WORDCLOUD = wordcloudFixture as unknown as WordCloud;

export interface RecordedCall {
  path: string;
  params: URLSearchParams;
}

type Route = unknown | ((params: URLSearchParams) => unknown);

export interface FixtureServer {
  calls: RecordedCall[];
  callsTo(path: string): RecordedCall[];
}

export function installFixtureServer(overrides: Record<string, Route> = {}): FixtureServer {
  const routes: Record<string, Route> = {
    "/api/meta": META,
    "/api/regions": REGIONS,
    "/api/tweets": TWEETS,
    "/api/wordcloud": WORDCLOUD,
    ...overrides,
  };
  const calls: RecordedCall[] = [];
  vi.stubGlobal("fetch", async (input: string | URL) => {
    const url = new URL(String(input), "http://fixture.test");
    calls.push({ path: url.pathname, params: url.searchParams });
    const route = routes[url.pathname];
    if (route === undefined) {
      return new Response(JSON.stringify({ status: 404, code: "not_found", message: url.pathname }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    const body = typeof route === "function" ? (route as (p: URLSearchParams) => unknown)(url.searchParams) : route;
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  });
  return {
    calls,
    callsTo: (path: string) => calls.filter((c) => c.path === path),
  };
}

export async function bootApp(overrides: Record<string, Route> = {}): Promise<{
  app: App;
  root: HTMLElement;
  server: FixtureServer;
}> {
  const server = installFixtureServer(overrides);
  const root = document.createElement("div");
  document.body.append(root);
  const app = createApp(root);
  await app.init();
  await app.whenIdle();
  return { app, root, server };
}

export function cellRects(root: HTMLElement): SVGRectElement[] {
  return [...root.querySelectorAll("rect.cell")] as SVGRectElement[];
}

export async function clickCell(app: App, root: HTMLElement, index = 0): Promise<void> {
  const rect = cellRects(root)[index]!;
  rect.dispatchEvent(new Event("click"));
  await app.whenIdle();
}

export function setSlider(root: HTMLElement, id: string, value: number): void {
  const input = root.querySelector<HTMLInputElement>(`#${id}`)!;
  input.value = String(value);
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export async function submitRange(app: App, root: HTMLElement): Promise<void> {
  root.querySelector<HTMLButtonElement>("#range-submit")!.dispatchEvent(new Event("click"));
  await app.whenIdle();
}

export async function applyFilter(app: App, root: HTMLElement, words: string): Promise<void> {
  const input = root.querySelector<HTMLInputElement>("#filter-input")!;
  input.value = words;
  root.querySelector<HTMLFormElement>("#words-filter")!.dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }),
  );
  await app.whenIdle();
}
