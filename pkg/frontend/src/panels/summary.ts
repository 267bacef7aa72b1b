import type { ApiClient } from "../api.js";
import { clear, el, show, table } from "../dom.js";
import { distributionStrip } from "../strips.js";
import type { BoundsResponse, Interval } from "../types.js";

/**
 * Archive overview: one distribution strip per specialty (density bars
 * plus quartile box) with a raw/normalized axis toggle, and a summary
 * table of bounds and quartiles. Every figure comes from the service.
 */
export class SummaryPanel {
  readonly root: HTMLElement;
  private normalized = false;
  private bounds: BoundsResponse | null = null;

  constructor(private api: ApiClient) {
    this.root = el("section", { class: "panel", id: "summary-panel" });
  }

  async load(): Promise<void> {
    try {
      this.bounds = await this.api.getBounds();
    } catch {
      this.bounds = null;
    }
    this.render();
  }

  toggleNormalized(): void {
    this.normalized = !this.normalized;
    this.render();
  }

  private render(): void {
    clear(this.root);
    this.root.append(el("h2", {}, "Archive summary"));
    const bounds = this.bounds;
    if (!bounds || bounds.size === 0) {
      this.root.append(el("p", { class: "empty" },
        "No archive loaded yet. Generate one or restart the service with an archive file."));
      return;
    }
    this.root.append(el("p", {},
      `${show(bounds.size)} case mixes, ${show(bounds.k)} specialty groups.`));

    const toggle = el("button", { class: "toggle", type: "button" },
      this.normalized ? "Show raw axes" : "Show normalized axes");
    toggle.addEventListener("click", () => this.toggleNormalized());
    this.root.append(toggle);

    const strips = el("div", { class: "strips" });
    bounds.labels.forEach((label, i) => {
      const axis = bounds.frontier[i];
      const axisLabels: [string, string] = this.normalized
        ? ["0", "1"]
        : [show(axis[0]), show(axis[1])];
      const row = el("div", { class: "strip-row" },
        el("span", { class: "strip-label" }, label),
        el("span", { class: "axis-lo" }, axisLabels[0]),
        distributionStrip(bounds.histograms[i], bounds.spread[i], axis as Interval),
        el("span", { class: "axis-hi" }, axisLabels[1]),
      );
      strips.append(row);
    });
    this.root.append(strips);

    const rows = bounds.labels.map((label, i) => [
      label,
      show(bounds.frontier[i][0]),
      show(bounds.spread[i].q1),
      show(bounds.spread[i].q2),
      show(bounds.spread[i].q3),
      show(bounds.frontier[i][1]),
    ]);
    this.root.append(
      el("h3", {}, "Bounds and quartiles"),
      table(["group", "lower", "q1", "median", "q3", "upper"], rows),
    );
  }
}
