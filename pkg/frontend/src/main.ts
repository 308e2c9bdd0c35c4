/** Explorer wiring: session load, scatter, hover preview, what-if sliders. */

import { LayoutClient, debounce, fetchSession } from "./api.js";
import { renderObjectives, renderPreview } from "./preview.js";
import { renderScatter } from "./scatter.js";
import { renderSliders, syncSliders } from "./sliders.js";
import { ViewState } from "./state.js";
import type { PointView, SessionDoc } from "./types.js";

const SLIDER_DEBOUNCE_MS = 50;

export class Explorer {
  state!: ViewState;
  private layoutClient = new LayoutClient();
  private root: HTMLElement;
  private whatIfObjectives: number[] | null = null;

  constructor(root: HTMLElement) {
    this.root = root;
  }

  async start(): Promise<void> {
    this.root.innerHTML = `
      <div id="banner" hidden></div>
      <div class="columns">
        <section>
          <div class="controls">
            <label>x <select id="x-axis"></select></label>
            <label>y <select id="y-axis"></select></label>
            <label>generation <select id="generation"></select></label>
          </div>
          <div id="scatter"></div>
        </section>
        <aside>
          <h2>layout</h2>
          <div id="preview"></div>
          <div id="readout"></div>
          <div id="warning" class="inline-warning" hidden></div>
          <h2>what-if</h2>
          <div id="sliders"></div>
        </aside>
      </div>`;
    try {
      const session = await fetchSession();
      this.initView(session);
    } catch (err) {
      this.showBanner(String(err));
    }
  }

  private showBanner(message: string): void {
    const banner = this.root.querySelector<HTMLElement>("#banner")!;
    banner.hidden = false;
    banner.textContent = "";
    const text = document.createElement("span");
    text.textContent = `could not load session: ${message} `;
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", () => void this.start());
    banner.appendChild(text);
    banner.appendChild(retry);
  }

  private initView(session: SessionDoc): void {
    this.state = new ViewState(session);
    const xSel = this.root.querySelector<HTMLSelectElement>("#x-axis")!;
    const ySel = this.root.querySelector<HTMLSelectElement>("#y-axis")!;
    for (const sel of [xSel, ySel]) {
      sel.textContent = "";
      for (const label of session.objectives) {
        const opt = document.createElement("option");
        opt.value = label;
        opt.textContent = label;
        sel.appendChild(opt);
      }
    }
    xSel.value = session.objectives[this.state.xAxis];
    ySel.value = session.objectives[this.state.yAxis];
    xSel.addEventListener("change", () => {
      this.state.setAxis("x", xSel.value);
      this.redrawScatter();
    });
    ySel.addEventListener("change", () => {
      this.state.setAxis("y", ySel.value);
      this.redrawScatter();
    });

    const genSel = this.root.querySelector<HTMLSelectElement>("#generation")!;
    genSel.textContent = "";
    session.generations.forEach((g) => {
      const opt = document.createElement("option");
      opt.value = String(g.index);
      opt.textContent = String(g.index);
      genSel.appendChild(opt);
    });
    genSel.value = String(this.state.generation);
    genSel.addEventListener("change", () => {
      this.state.setGeneration(Number(genSel.value));
      this.redrawScatter();
    });

    renderSliders(
      this.root.querySelector<HTMLElement>("#sliders")!,
      this.state,
      debounce((values: number[]) => void this.showAssignment(values), SLIDER_DEBOUNCE_MS),
    );
    this.redrawScatter();
    void this.showAssignment(this.state.sliders.slice());
  }

  redrawScatter(): void {
    renderScatter(
      this.root.querySelector<HTMLElement>("#scatter")!,
      this.state,
      {
        onHover: (p) => void this.hoverSolution(p),
        onSelect: (p) => void this.selectSolution(p),
      },
      this.whatIfObjectives,
    );
  }

  async hoverSolution(point: PointView): Promise<void> {
    this.state.hovered = point;
    await this.showAssignment(point.genome, false);
  }

  async selectSolution(point: PointView): Promise<void> {
    this.state.selected = point;
    this.state.setSliders(point.genome);
    syncSliders(this.root.querySelector<HTMLElement>("#sliders")!, this.state.sliders);
    await this.showAssignment(point.genome);
  }

  /** Fetch and render a layout; stale responses never render. */
  async showAssignment(values: number[], markWhatIf = true): Promise<void> {
    const warning = this.root.querySelector<HTMLElement>("#warning")!;
    try {
      const layout = await this.layoutClient.fetchLayout(values);
      if (layout === null) return; // superseded by a newer request
      warning.hidden = true;
      renderPreview(this.root.querySelector<HTMLElement>("#preview")!, layout);
      renderObjectives(
        this.root.querySelector<HTMLElement>("#readout")!,
        layout.objectives.labels,
        layout.objectives.values,
      );
      if (markWhatIf && layout.objectives.values) {
        this.whatIfObjectives = layout.objectives.values;
        this.redrawScatter();
      }
    } catch (err) {
      warning.hidden = false;
      warning.textContent = `layout request rejected: ${String(err)} (stale session/model pair?)`;
    }
  }
}

export function mount(): void {
  const root = document.getElementById("app");
  if (root) void new Explorer(root).start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}
