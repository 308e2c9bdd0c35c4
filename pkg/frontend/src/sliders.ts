/** What-if sliders: one per design variable, bounds from the session.
 * Range inputs clamp by construction; changes are debounced upstream. */

import type { ViewState } from "./state.js";

export function renderSliders(
  host: HTMLElement,
  state: ViewState,
  onChange: (values: number[]) => void,
): void {
  host.textContent = "";
  const bounds = state.bounds;
  if (bounds.length === 0) {
    host.textContent = "no design variables";
    return;
  }
  bounds.forEach(([lo, hi], i) => {
    const row = document.createElement("div");
    row.classList.add("slider-row");

    const label = document.createElement("label");
    label.textContent = `variable ${i}`;
    label.htmlFor = `slider-${i}`;

    const input = document.createElement("input");
    input.type = "range";
    input.id = `slider-${i}`;
    input.min = String(lo);
    input.max = String(hi);
    input.step = String((hi - lo) / 200);
    input.value = String(state.sliders[i]);

    const readout = document.createElement("span");
    readout.classList.add("slider-value");
    readout.textContent = state.sliders[i].toFixed(2);

    input.addEventListener("input", () => {
      const v = state.setSlider(i, Number(input.value));
      input.value = String(v);
      readout.textContent = v.toFixed(2);
      onChange(state.sliders.slice());
    });

    row.appendChild(label);
    row.appendChild(input);
    row.appendChild(readout);
    host.appendChild(row);
  });
}

export function syncSliders(host: HTMLElement, values: number[]): void {
  values.forEach((v, i) => {
    const input = host.querySelector<HTMLInputElement>(`#slider-${i}`);
    if (input) {
      input.value = String(v);
      const readout = input.nextElementSibling as HTMLElement | null;
      if (readout) readout.textContent = v.toFixed(2);
    }
  });
}
