import { ApiError, type ApiClient } from "../api.js";
import { clear, el, show, table } from "../dom.js";
import { SliderModel } from "../sliders.js";
import type { FrontierInfo, Interval, RangeResponse } from "../types.js";

/**
 * Interactive range-query builder: one two-handle slider per specialty,
 * calibrated by the frontier box. Results show coverage, the best
 * candidate with its progress level, the nested interval lines and a
 * candidate table whose View buttons jump to the case-mix browser.
 */
export class RangeQueryPanel {
  readonly root: HTMLElement;
  sliders: SliderModel[] = [];
  private labels: string[] = [];
  private controls: HTMLElement;
  private results: HTMLElement;

  constructor(private api: ApiClient,
              private onView: (index: number) => void = () => undefined) {
    this.root = el("section", { class: "panel", id: "range-panel" });
    this.controls = el("div", { class: "controls" });
    this.results = el("div", { class: "results" });
    this.root.append(el("h2", {}, "Range query"), this.controls, this.results);
  }

  load(frontier: FrontierInfo): void {
    this.labels = frontier.labels;
    this.sliders = frontier.frontier.map((interval) => new SliderModel(interval as Interval));
    clear(this.controls);
    this.labels.forEach((label, i) => {
      const model = this.sliders[i];
      const lowInput = el("input", {
        type: "number", class: "bound-low", value: show(model.requested[0]),
      });
      const highInput = el("input", {
        type: "number", class: "bound-high", value: show(model.requested[1]),
      });
      lowInput.addEventListener("change", () => {
        model.setLow(Number(lowInput.value));
        lowInput.value = show(model.requested[0]);
        highInput.value = show(model.requested[1]);
      });
      highInput.addEventListener("change", () => {
        model.setHigh(Number(highInput.value));
        lowInput.value = show(model.requested[0]);
        highInput.value = show(model.requested[1]);
      });
      this.controls.append(el("div", { class: "slider-row" },
        el("span", { class: "strip-label" }, label),
        el("span", { class: "axis-lo" }, show(model.frontierLb)),
        lowInput, highInput,
        el("span", { class: "axis-hi" }, show(model.frontierUb)),
      ));
    });
    const run = el("button", { type: "button", id: "run-range" }, "Run range query");
    run.addEventListener("click", () => void this.run());
    this.controls.append(run);
  }

  async run(): Promise<void> {
    clear(this.results);
    let response: RangeResponse;
    try {
      response = await this.api.rangeQuery(
        this.sliders.map((s) => s.requested[0]),
        this.sliders.map((s) => s.requested[1]),
      );
    } catch (err) {
      const message = err instanceof ApiError && err.status === 422
        ? `dimension error: ${err.message}`
        : String(err);
      this.results.append(el("p", { class: "error" }, message));
      return;
    }
    this.renderResult(response);
  }

  renderResult(response: RangeResponse): void {
    clear(this.results);
    this.sliders.forEach((model, i) => {
      model.setAchievable(response.achievable ? (response.achievable[i] as Interval) : null);
    });
    this.results.append(el("p", { id: "range-count" },
      `candidates: ${show(response.count)} of ${show(response.size)} ` +
      `(coverage ${response.coverage_percent.toFixed(2)}%)`));
    if (response.count === 0) {
      this.results.append(el("p", { class: "hint" },
        "No stored case mix satisfies this request; expectations may need to be relaxed."));
      return;
    }
    const brackets = el("pre", { id: "nested-ranges" }, response.nested_ranges.join("\n"));
    this.results.append(el("h3", {}, "Objective ranges"), brackets);
    if (response.best) {
      this.results.append(el("p", { id: "range-best" },
        `best candidate (progress ${show(response.best_progress)}%): ` +
        response.best.map((v, i) => `${this.labels[i]}=${show(v)}`).join(", ")));
    }
    const rows = response.candidates.map((point, row) => {
      const view = el("button", { type: "button", class: "view" }, "View");
      const index = response.candidate_indices[row];
      view.addEventListener("click", () => this.onView(index));
      return [show(index), ...point.map(show), view as unknown as Node];
    });
    this.results.append(
      el("h3", {}, `Candidates (page ${show(response.page)})`),
      table(["idx", ...this.labels, ""], rows),
    );
  }
}
