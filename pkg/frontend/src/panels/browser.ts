import type { ApiClient } from "../api.js";
import { clear, el, show, table } from "../dom.js";
import { valueBar } from "../strips.js";
import type { FrontierInfo, Interval, PointResponse } from "../types.js";

/** Case-mix browser: an index slider walks the archive member by member. */
export class CasemixBrowser {
  readonly root: HTMLElement;
  private slider: HTMLInputElement;
  private detail: HTMLElement;
  private frontier: FrontierInfo | null = null;

  constructor(private api: ApiClient) {
    this.root = el("section", { class: "panel", id: "browser-panel" });
    this.slider = el("input", { type: "range", min: "0", max: "0", value: "0" });
    this.detail = el("div", { class: "detail" });
    this.root.append(
      el("h2", {}, "Case-mix browser"),
      el("div", { class: "slider-row" },
        el("label", {}, "archive index "), this.slider,
        el("span", { class: "slider-value", id: "browser-index" }, "0")),
      this.detail,
    );
    this.slider.addEventListener("input", () => {
      void this.showIndex(Number(this.slider.value));
    });
  }

  async load(frontier: FrontierInfo): Promise<void> {
    this.frontier = frontier;
    this.slider.max = String(Math.max(0, frontier.size - 1));
    await this.showIndex(Number(this.slider.value));
  }

  async showIndex(index: number): Promise<void> {
    if (!this.frontier || this.frontier.size === 0) {
      clear(this.detail);
      this.detail.append(el("p", { class: "empty" }, "No archive loaded."));
      return;
    }
    this.slider.value = String(index);
    const label = this.root.querySelector("#browser-index");
    if (label) label.textContent = String(index);
    let point: PointResponse;
    try {
      point = await this.api.getPoint(index);
    } catch (err) {
      clear(this.detail);
      this.detail.append(el("p", { class: "error" }, String(err)));
      return;
    }
    clear(this.detail);
    this.detail.append(el("p", {},
      `Case mix ${show(point.index)} of ${show(point.size)}; progress ${show(point.progress)}%.`));
    const rows = point.labels.map((group, i) => [
      group,
      show(point.point[i]),
      valueBar(point.point[i], point.frontier[i] as Interval) as unknown as Node,
    ]);
    this.detail.append(table(["group", "patients", ""], rows));
  }
}
