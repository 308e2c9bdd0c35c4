import { afterEach, describe, expect, it, vi } from "vitest";

import { LayoutClient, debounce } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.restoreAllMocks();
  vi.useRealTimers();
});

describe("LayoutClient", () => {
  it("returns the layout for a lone request", async () => {
    const body = { polylines: [[[0, 0], [1, 1]]], objectives: { labels: [], values: [] } };
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(body)));
    const client = new LayoutClient();
    const out = await client.fetchLayout([1, 2]);
    expect(out).not.toBeNull();
    expect(out!.polylines).toEqual(body.polylines);
    expect(vi.mocked(fetch).mock.calls[0][0]).toBe("/api/layout?vars=1,2");
  });

  it("discards stale responses: only the latest request renders", async () => {
    const resolvers: ((r: Response) => void)[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(
        () =>
          new Promise<Response>((resolve) => {
            resolvers.push(resolve);
          }),
      ),
    );
    const client = new LayoutClient();
    const first = client.fetchLayout([1]);
    const second = client.fetchLayout([2]);
    // resolve out of order: the slow first response arrives last
    resolvers[1](jsonResponse({ id: "second" }));
    resolvers[0](jsonResponse({ id: "first" }));
    const [r1, r2] = await Promise.all([first, second]);
    expect(r1).toBeNull(); // superseded
    expect(r2).not.toBeNull();
    expect((r2 as unknown as { id: string }).id).toBe("second");
  });

  it("raises the server message on a 400", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse({ error: "value 99 outside [-3, 3]" }, 400)),
    );
    const client = new LayoutClient();
    await expect(client.fetchLayout([99])).rejects.toThrow(/outside/);
  });
});

describe("debounce", () => {
  it("coalesces a burst into the trailing call", () => {
    vi.useFakeTimers();
    const hits: number[][] = [];
    const fn = debounce((v: number[]) => hits.push(v), 50);
    for (let i = 0; i < 20; i++) fn([i]);
    expect(hits).toHaveLength(0); // nothing during the burst
    vi.advanceTimersByTime(49);
    expect(hits).toHaveLength(0);
    vi.advanceTimersByTime(2);
    expect(hits).toEqual([[19]]); // latest wins, exactly once
  });
});
