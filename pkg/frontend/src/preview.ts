/** Floorplan preview: draws the polylines returned by /api/layout
 * verbatim, flipped to y-up for display. No other geometry math happens
 * client-side; the server is the single source of layout truth. */

import type { LayoutResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 320;

export function renderPreview(host: HTMLElement, layout: LayoutResponse): void {
  host.textContent = "";
  const pts = layout.polylines.flat();
  if (pts.length === 0) {
    host.textContent = "empty layout";
    return;
  }
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const minX = Math.min(...xs) - 10;
  const maxX = Math.max(...xs) + 10;
  const minY = Math.min(...ys) - 10;
  const maxY = Math.max(...ys) + 10;
  const span = Math.max(maxX - minX, maxY - minY);
  const scale = SIZE / span;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("width", String(SIZE));
  svg.setAttribute("height", String(SIZE));
  svg.classList.add("preview");
  for (const line of layout.polylines) {
    const poly = document.createElementNS(SVG_NS, "polyline");
    poly.setAttribute(
      "points",
      line
        .map(([x, y]) => {
          const px = (x - minX) * scale;
          const py = SIZE - (y - minY) * scale; // sketch y-down -> view y-up
          return `${px.toFixed(2)},${py.toFixed(2)}`;
        })
        .join(" "),
    );
    poly.classList.add("wall");
    svg.appendChild(poly);
  }
  host.appendChild(svg);
}

export function renderObjectives(
  host: HTMLElement,
  labels: string[],
  values: number[] | null,
): void {
  host.textContent = "";
  if (values === null) {
    host.textContent = "infeasible layout";
    return;
  }
  const dl = document.createElement("dl");
  dl.classList.add("objective-readout");
  labels.forEach((label, i) => {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = values[i].toPrecision(6);
    dl.appendChild(dt);
    dl.appendChild(dd);
  });
  host.appendChild(dl);
}
