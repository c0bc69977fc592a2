// Interactive trace stepper: per-tick variable entry against a live monitor
// session, with a colored verdict chip per step. Steps are strictly
// sequential; a final verdict or END disables further input.

import { Api, ApiError, SimulateStart } from "./api.js";
import { VERDICT_COLORS, VERDICT_GLYPHS } from "./state.js";

export class StepperView {
  readonly root: HTMLElement;
  private readonly formulaEl: HTMLElement;
  private readonly formHost: HTMLElement;
  private readonly timeline: HTMLElement;
  private readonly statusEl: HTMLElement;
  private session: SimulateStart | null = null;
  private tick = 0;
  private busy = false;

  constructor(private readonly api: Api) {
    this.root = document.createElement("section");
    this.root.id = "stepper-view";
    this.root.innerHTML = `
      <h2>Trace stepper</h2>
      <div class="row">
        <input id="formula-input" size="40"
          placeholder="past formula, e.g. H ((grasp => near))">
        <button id="start-session">Start</button>
      </div>
      <div id="session-formula" class="muted"></div>
      <div id="step-form" class="row"></div>
      <div id="verdict-timeline" class="timeline"></div>
      <div id="stepper-status" class="muted"></div>`;
    this.formulaEl = this.root.querySelector("#session-formula")!;
    this.formHost = this.root.querySelector("#step-form")!;
    this.timeline = this.root.querySelector("#verdict-timeline")!;
    this.statusEl = this.root.querySelector("#stepper-status")!;
    this.root.querySelector("#start-session")!.addEventListener("click", () => {
      const text = (this.root.querySelector("#formula-input") as HTMLInputElement).value;
      if (text.trim()) void this.start({ formula: text });
    });
  }

  async start(body: { formula?: string; requirement_id?: string; project?: string }):
      Promise<void> {
    try {
      this.session = await this.api.simulate(body);
    } catch (err) {
      this.statusEl.textContent =
        err instanceof ApiError ? err.message : String(err);
      return;
    }
    this.tick = 0;
    this.timeline.replaceChildren();
    this.formulaEl.textContent = this.session.formula;
    this.statusEl.textContent = "";
    this.renderForm();
  }

  private renderForm(): void {
    const s = this.session;
    this.formHost.replaceChildren();
    if (!s) return;
    const locked = s.final || s.closed;
    for (const name of s.vars) {
      const label = document.createElement("label");
      label.textContent = name;
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.var = name;
      box.disabled = locked;
      label.appendChild(box);
      this.formHost.appendChild(label);
    }
    const stepBtn = document.createElement("button");
    stepBtn.id = "step-button";
    stepBtn.textContent = "Step";
    stepBtn.disabled = locked;
    stepBtn.addEventListener("click", () => void this.step());
    const endBtn = document.createElement("button");
    endBtn.id = "end-button";
    endBtn.textContent = "END";
    endBtn.disabled = s.closed;
    endBtn.addEventListener("click", () => void this.end());
    this.formHost.append(stepBtn, endBtn);
    if (locked) {
      this.statusEl.textContent = s.closed
        ? "trace ended" : "verdict is final; further events cannot change it";
    }
  }

  private assignments(): Record<string, boolean> {
    const out: Record<string, boolean> = {};
    this.formHost.querySelectorAll<HTMLInputElement>("input[data-var]")
      .forEach((box) => { out[box.dataset.var!] = box.checked; });
    return out;
  }

  async step(): Promise<void> {
    if (!this.session || this.busy) return;
    this.busy = true;
    try {
      const result = await this.api.step(this.session.session, {
        tick: this.tick, assign: this.assignments(),
      });
      this.tick += 1;
      this.session = { ...this.session, ...result };
      this.appendChip(result.verdict);
      this.renderForm();
    } catch (err) {
      this.statusEl.textContent =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    } finally {
      this.busy = false;
    }
  }

  async end(): Promise<void> {
    if (!this.session || this.busy) return;
    this.busy = true;
    try {
      const result = await this.api.step(this.session.session, { end: true });
      this.session = { ...this.session, ...result, closed: true };
      this.appendChip(result.verdict);
      this.renderForm();
    } catch (err) {
      this.statusEl.textContent =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    } finally {
      this.busy = false;
    }
  }

  private appendChip(verdict: string): void {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.dataset.verdict = verdict;
    chip.textContent = VERDICT_GLYPHS[verdict] ?? verdict;
    chip.style.backgroundColor = VERDICT_COLORS[verdict] ?? "#ddd";
    this.timeline.appendChild(chip);
  }

  get verdictChips(): string[] {
    return Array.from(this.timeline.querySelectorAll<HTMLElement>(".chip"))
      .map((c) => c.dataset.verdict!);
  }
}
