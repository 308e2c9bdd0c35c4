/** View state: axis selection, generation filter, sliders, hover.
 *
 * All mutation goes through methods that enforce the invariants: slider
 * values stay inside the variable bounds from the session document, and
 * axis selections always reference existing objective labels.
 */

import type { PointView, SessionDoc } from "./types.js";

export class ViewState {
  readonly session: SessionDoc;
  xAxis: number;
  yAxis: number;
  generation: number;
  sliders: number[];
  hovered: PointView | null = null;
  selected: PointView | null = null;

  constructor(session: SessionDoc) {
    this.session = session;
    const m = session.objectives.length;
    this.xAxis = 0;
    this.yAxis = m > 1 ? 1 : 0;
    this.generation = session.generations.length - 1;
    this.sliders = session.model.variables.map(() => 0);
    for (let i = 0; i < this.sliders.length; i++) {
      this.sliders[i] = this.clampValue(i, 0);
    }
  }

  get labels(): string[] {
    return this.session.objectives;
  }

  get bounds(): [number, number][] {
    return this.session.model.variables
      .slice()
      .sort((a, b) => a.id - b.id)
      .map((v) => [v.lo, v.hi]);
  }

  clampValue(index: number, value: number): number {
    const [lo, hi] = this.bounds[index];
    return Math.min(hi, Math.max(lo, value));
  }

  setSlider(index: number, value: number): number {
    const clamped = this.clampValue(index, value);
    this.sliders[index] = clamped;
    return clamped;
  }

  setSliders(values: number[]): number[] {
    values.forEach((v, i) => {
      if (i < this.sliders.length) this.setSlider(i, v);
    });
    return this.sliders.slice();
  }

  setAxis(which: "x" | "y", label: string): void {
    const idx = this.session.objectives.indexOf(label);
    if (idx < 0) throw new Error(`unknown objective label: ${label}`);
    if (which === "x") this.xAxis = idx;
    else this.yAxis = idx;
  }

  setGeneration(index: number): void {
    const n = this.session.generations.length;
    if (!Number.isInteger(index) || index < 0 || index >= n) {
      throw new Error(`generation ${index} out of range 0..${n - 1}`);
    }
    this.generation = index;
  }

  /** Points of the displayed generation; front flags match rank-0. */
  points(): PointView[] {
    const gen = this.session.generations[this.generation];
    if (!gen) return [];
    const out: PointView[] = [];
    for (let i = 0; i < gen.genomes.length; i++) {
      const obj = gen.objectives[i];
      if (obj === null) continue; // infeasible: no place in objective space
      out.push({
        genome: gen.genomes[i],
        objectives: obj,
        rank: gen.ranks[i],
        onFront: gen.ranks[i] === 0,
      });
    }
    return out;
  }
}
