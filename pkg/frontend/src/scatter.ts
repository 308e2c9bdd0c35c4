/** SVG scatter plot of one generation in objective space. */

import type { PointView } from "./types.js";
import type { ViewState } from "./state.js";

const W = 460;
const H = 380;
const PAD = 44;
const SVG_NS = "http://www.w3.org/2000/svg";

export interface ScatterCallbacks {
  onHover: (p: PointView) => void;
  onSelect: (p: PointView) => void;
}

function niceScale(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const margin = (hi - lo) * 0.06;
  return [lo - margin, hi + margin];
}

export function renderScatter(
  host: HTMLElement,
  state: ViewState,
  callbacks: ScatterCallbacks,
  whatIf: number[] | null = null,
): void {
  host.textContent = "";
  const points = state.points();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("width", String(W));
  svg.setAttribute("height", String(H));
  svg.classList.add("scatter");
  host.appendChild(svg);

  if (points.length === 0) {
    const msg = document.createElementNS(SVG_NS, "text");
    msg.setAttribute("x", String(W / 2));
    msg.setAttribute("y", String(H / 2));
    msg.setAttribute("text-anchor", "middle");
    msg.classList.add("empty-state");
    msg.textContent = "no solutions in this generation";
    svg.appendChild(msg);
    return;
  }

  const xi = state.xAxis;
  const yi = state.yAxis;
  const xs = points.map((p) => p.objectives[xi]);
  const ys = points.map((p) => p.objectives[yi]);
  const extra = whatIf ? [whatIf[xi]] : [];
  const extraY = whatIf ? [whatIf[yi]] : [];
  const [x0, x1] = niceScale(xs.concat(extra));
  const [y0, y1] = niceScale(ys.concat(extraY));
  const sx = (v: number) => PAD + ((v - x0) / (x1 - x0)) * (W - 2 * PAD);
  const sy = (v: number) => H - PAD - ((v - y0) / (y1 - y0)) * (H - 2 * PAD);

  const axes = document.createElementNS(SVG_NS, "path");
  axes.setAttribute(
    "d",
    `M ${PAD} ${PAD} L ${PAD} ${H - PAD} L ${W - PAD} ${H - PAD}`,
  );
  axes.classList.add("axes");
  svg.appendChild(axes);

  const xLabel = document.createElementNS(SVG_NS, "text");
  xLabel.setAttribute("x", String(W / 2));
  xLabel.setAttribute("y", String(H - 8));
  xLabel.setAttribute("text-anchor", "middle");
  xLabel.classList.add("axis-label", "x-label");
  xLabel.textContent = state.labels[xi];
  svg.appendChild(xLabel);

  const yLabel = document.createElementNS(SVG_NS, "text");
  yLabel.setAttribute("x", "12");
  yLabel.setAttribute("y", String(H / 2));
  yLabel.setAttribute(
    "transform",
    `rotate(-90 12 ${H / 2})`,
  );
  yLabel.setAttribute("text-anchor", "middle");
  yLabel.classList.add("axis-label", "y-label");
  yLabel.textContent = state.labels[yi];
  svg.appendChild(yLabel);

  for (const p of points) {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", String(sx(p.objectives[xi])));
    c.setAttribute("cy", String(sy(p.objectives[yi])));
    c.setAttribute("r", p.onFront ? "5" : "3.5");
    c.classList.add("point");
    if (p.onFront) c.classList.add("front");
    c.addEventListener("mouseenter", () => callbacks.onHover(p));
    c.addEventListener("click", () => callbacks.onSelect(p));
    svg.appendChild(c);
  }

  if (whatIf) {
    const m = document.createElementNS(SVG_NS, "path");
    const cx = sx(whatIf[xi]);
    const cy = sy(whatIf[yi]);
    m.setAttribute(
      "d",
      `M ${cx - 6} ${cy} L ${cx + 6} ${cy} M ${cx} ${cy - 6} L ${cx} ${cy + 6}`,
    );
    m.classList.add("what-if-marker");
    svg.appendChild(m);
  }
}
