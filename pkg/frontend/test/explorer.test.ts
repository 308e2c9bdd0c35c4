// @vitest-environment jsdom
import { readFileSync } from "node:fs";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Explorer } from "../src/main.js";
import type { LayoutResponse, SessionDoc } from "../src/types.js";

const session: SessionDoc = JSON.parse(
  readFileSync("test/fixtures/session.json", "utf-8"),
);
const layouts: Record<string, LayoutResponse> = JSON.parse(
  readFileSync("test/fixtures/layouts.json", "utf-8"),
);

function installFetchMock(): void {
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string) => {
      if (url === "/api/session") {
        return new Response(JSON.stringify(session), { status: 200 });
      }
      const match = /^\/api\/layout\?vars=(.*)$/.exec(url);
      if (match) {
        const key = decodeURIComponent(match[1]);
        const canned = layouts[key];
        if (canned) return new Response(JSON.stringify(canned), { status: 200 });
        // canned responses only cover the fixture's known assignments; for
        // everything else behave like the server at the base layout
        return new Response(JSON.stringify(layouts["0,0,0"]), { status: 200 });
      }
      return new Response(JSON.stringify({ error: "not found" }), { status: 404 });
    }),
  );
}

async function settle(): Promise<void> {
  // drain microtasks queued by fetch handlers
  for (let i = 0; i < 10; i++) await Promise.resolve();
  await new Promise((resolve) => setTimeout(resolve, 80));
}

describe("Explorer", () => {
  let root: HTMLElement;
  let explorer: Explorer;

  beforeEach(async () => {
    installFetchMock();
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    explorer = new Explorer(root);
    await explorer.start();
    await settle();
  });

  afterEach(() => {
    vi.restoreAllMocks();
  });

  it("renders one scatter point per feasible individual", () => {
    const gen = session.generations[session.generations.length - 1];
    const feasible = gen.objectives.filter((o) => o !== null).length;
    const points = root.querySelectorAll("#scatter circle.point");
    expect(points).toHaveLength(feasible);
  });

  it("highlights exactly the rank-zero individuals", () => {
    const gen = session.generations[session.generations.length - 1];
    const rank0 = gen.ranks.filter(
      (r, i) => r === 0 && gen.objectives[i] !== null,
    ).length;
    const front = root.querySelectorAll("#scatter circle.point.front");
    expect(front).toHaveLength(rank0);
  });

  it("labels the axes with the session objective names", () => {
    expect(root.querySelector(".x-label")!.textContent).toBe(
      session.objectives[0],
    );
    expect(root.querySelector(".y-label")!.textContent).toBe(
      session.objectives[1],
    );
  });

  it("hover preview draws the API polylines verbatim", async () => {
    const member = session.front[0];
    const key = member.genome.map((v) => String(v)).join(",");
    const canned = layouts[key];
    expect(canned).toBeDefined();
    await explorer.hoverSolution({
      genome: member.genome,
      objectives: member.objectives,
      rank: 0,
      onFront: true,
    });
    await settle();
    const polys = root.querySelectorAll("#preview polyline");
    expect(polys).toHaveLength(canned.polylines.length);
    // endpoint count per polyline must match the response verbatim
    canned.polylines.forEach((line, i) => {
      const pts = (polys[i].getAttribute("points") ?? "").split(" ");
      expect(pts).toHaveLength(line.length);
    });
  });

  it("slider inputs clamp to the variable bounds", () => {
    const input = root.querySelector<HTMLInputElement>("#slider-0")!;
    const lo = Number(input.min);
    const hi = Number(input.max);
    const vars = session.model.variables.slice().sort((a, b) => a.id - b.id);
    expect(lo).toBe(vars[0].lo);
    expect(hi).toBe(vars[0].hi);
    const clamped = explorer.state.setSlider(0, hi + 1000);
    expect(clamped).toBe(hi);
  });

  it("a stored-genome slider setting reproduces stored objectives", async () => {
    const member = session.front[0];
    await explorer.selectSolution({
      genome: member.genome,
      objectives: member.objectives,
      rank: 0,
      onFront: true,
    });
    await settle();
    const dds = root.querySelectorAll("#readout dd");
    expect(dds.length).toBe(session.objectives.length);
    member.objectives.forEach((stored, i) => {
      // display precision: the readout shows toPrecision(6)
      expect(dds[i].textContent).toBe(stored.toPrecision(6));
    });
  });

  it("shows an error banner with retry when the API is unreachable", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("gone", { status: 503 })),
    );
    document.body.innerHTML = '<div id="app"></div>';
    const broken = new Explorer(document.getElementById("app")!);
    await broken.start();
    await settle();
    const banner = document.querySelector<HTMLElement>("#banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("could not load session");
    expect(banner.querySelector("button")!.textContent).toBe("retry");
  });

  it("empty history shows the empty-state message without crashing", async () => {
    const empty: SessionDoc = {
      ...session,
      generations: [
        {
          index: 0,
          genomes: [],
          objectives: [],
          ranks: [],
          front_size: 0,
          hypervolume: 0,
          best: [],
        },
      ],
      front: [],
    };
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) =>
        url === "/api/session"
          ? new Response(JSON.stringify(empty), { status: 200 })
          : new Response(JSON.stringify(layouts["0,0,0"]), { status: 200 }),
      ),
    );
    document.body.innerHTML = '<div id="app"></div>';
    const bare = new Explorer(document.getElementById("app")!);
    await bare.start();
    await settle();
    expect(document.querySelector(".empty-state")!.textContent).toContain(
      "no solutions",
    );
  });

  it("only issues GET requests", () => {
    for (const call of vi.mocked(fetch).mock.calls) {
      const init = call[1] as RequestInit | undefined;
      expect(init?.method ?? "GET").toBe("GET");
    }
  });
});
