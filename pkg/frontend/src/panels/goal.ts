import { ApiError, type ApiClient } from "../api.js";
import { clear, el, show, table } from "../dom.js";
import { distributionStrip } from "../strips.js";
import type { FrontierInfo, GoalResponse, Interval } from "../types.js";

/**
 * Goal tester: one numeric entry per specialty. A dominated goal is
 * reported as inferior with the count and distribution of strictly
 * better case mixes; otherwise the panel shows the closest stored case
 * mix with the signed per-group change row.
 */
export class GoalTestPanel {
  readonly root: HTMLElement;
  private frontier: FrontierInfo | null = null;
  private inputs: HTMLInputElement[] = [];
  private form: HTMLElement;
  private results: HTMLElement;

  constructor(private api: ApiClient) {
    this.root = el("section", { class: "panel", id: "goal-panel" });
    this.form = el("div", { class: "controls" });
    this.results = el("div", { class: "results" });
    this.root.append(el("h2", {}, "Goal test"), this.form, this.results);
  }

  load(frontier: FrontierInfo): void {
    this.frontier = frontier;
    clear(this.form);
    this.inputs = frontier.labels.map((label) => {
      const input = el("input", { type: "text", class: "goal-entry", value: "0" });
      this.form.append(el("div", { class: "slider-row" },
        el("span", { class: "strip-label" }, label), input));
      return input;
    });
    const test = el("button", { type: "button", id: "run-goal" }, "Test");
    test.addEventListener("click", () => void this.run());
    this.form.append(test);
  }

  parseGoal(): number[] | null {
    const values: number[] = [];
    let ok = true;
    for (const input of this.inputs) {
      const value = Number(input.value.trim());
      if (input.value.trim() === "" || Number.isNaN(value)) {
        input.classList.add("invalid");
        ok = false;
      } else {
        input.classList.remove("invalid");
        values.push(value);
      }
    }
    return ok ? values : null;
  }

  async run(): Promise<void> {
    clear(this.results);
    const goal = this.parseGoal();
    if (goal === null) {
      this.results.append(el("p", { class: "error", id: "goal-validation" },
        "Every specialty needs a numeric goal."));
      return;
    }
    let response: GoalResponse;
    try {
      response = await this.api.goalQuery(goal);
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      this.results.append(el("p", { class: "error" }, message));
      return;
    }
    this.renderResult(response);
  }

  renderResult(response: GoalResponse): void {
    clear(this.results);
    if (response.dominated) {
      this.results.append(el("p", { id: "goal-verdict", class: "verdict inferior" },
        `inferior: ${show(response.alternatives_total)} stored case mixes are strictly better`));
      if (response.alternatives_summary && this.frontier) {
        const strips = el("div", { class: "strips" });
        response.alternatives_summary.histograms.forEach((hist, i) => {
          strips.append(el("div", { class: "strip-row" },
            el("span", { class: "strip-label" }, hist.label),
            distributionStrip(hist, response.alternatives_summary!.spread[i],
                              this.frontier!.frontier[i] as Interval)));
        });
        this.results.append(el("h3", {}, "Better case mixes"), strips);
      }
      return;
    }
    this.results.append(el("p", { id: "goal-verdict", class: "verdict infeasible" },
      "not dominated: the goal is efficient or unachievable"));
    if (response.closest && response.change) {
      const rows = response.labels.map((label, i) => [
        label,
        show(response.goal[i]),
        show(response.closest![i]),
        show(response.change![i]),
      ]);
      this.results.append(
        el("h3", {}, "Closest optimal case mix"),
        table(["group", "goal", "closest", "change"], rows),
      );
    }
    this.results.append(el("p", { id: "goal-achievable" },
      `achievable case mixes the goal dominates: ${show(response.alternatives_total)}`));
  }
}
