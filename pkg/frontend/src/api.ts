/** Read-only session API client. Every request is a GET; the layout
 * fetcher discards stale responses so only the latest request renders. */

import type { LayoutResponse, SessionDoc } from "./types.js";

export async function fetchSession(base = ""): Promise<SessionDoc> {
  const resp = await fetch(`${base}/api/session`);
  if (!resp.ok) throw new Error(`session request failed: HTTP ${resp.status}`);
  return (await resp.json()) as SessionDoc;
}

export class LayoutClient {
  private base: string;
  private latest = 0;

  constructor(base = "") {
    this.base = base;
  }

  /** Resolve with the layout, or null when a newer request superseded
   * this one. Rejects with the server message on a 400. */
  async fetchLayout(values: number[]): Promise<LayoutResponse | null> {
    const token = ++this.latest;
    const q = values.map((v) => String(v)).join(",");
    const resp = await fetch(`${this.base}/api/layout?vars=${q}`);
    if (token !== this.latest) return null; // superseded while in flight
    if (!resp.ok) {
      let message = `HTTP ${resp.status}`;
      try {
        const body = await resp.json();
        if (body && body.error) message = String(body.error);
      } catch {
        /* keep the status message */
      }
      throw new Error(message);
    }
    const body = (await resp.json()) as LayoutResponse;
    if (token !== this.latest) return null;
    return body;
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, waitMs);
  };
}
