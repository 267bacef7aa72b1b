import { ApiClient, pollGeneration } from "./api.js";
import { clear, el, show } from "./dom.js";
import { CasemixBrowser } from "./panels/browser.js";
import { GoalTestPanel } from "./panels/goal.js";
import { RangeQueryPanel } from "./panels/range.js";
import { SummaryPanel } from "./panels/summary.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  if (param) return param.replace(/\/$/, "");
  return "http://127.0.0.1:8080";
}

export async function boot(mount: HTMLElement, api = new ApiClient(apiBase())): Promise<void> {
  clear(mount);
  const summary = new SummaryPanel(api);
  const browser = new CasemixBrowser(api);
  const range = new RangeQueryPanel(api, (index) => {
    void browser.showIndex(index);
    activate("browser");
  });
  const goal = new GoalTestPanel(api);

  const panels: Record<string, HTMLElement> = {
    summary: summary.root,
    browser: browser.root,
    range: range.root,
    goal: goal.root,
  };
  const nav = el("nav", { class: "tabs" });
  const main = el("main", {});
  const status = el("div", { id: "generation-status" });

  function activate(name: string): void {
    clear(main);
    main.append(panels[name]);
    nav.querySelectorAll("button").forEach((b) =>
      b.classList.toggle("active", b.dataset.panel === name));
  }

  for (const name of Object.keys(panels)) {
    const button = el("button", { type: "button", "data-panel": name }, name);
    button.addEventListener("click", () => activate(name));
    nav.append(button);
  }
  mount.append(el("h1", {}, "Case-mix decision support"), nav, status, main);

  await summary.load();
  try {
    const bounds = await api.getBounds();
    await browser.load(bounds);
    range.load(bounds);
    goal.load(bounds);
  } catch {
    /* empty session: panels show their own empty states */
  }
  activate("summary");
}

/** Kick off a generation job and mirror its stage progress into `status`. */
export async function runGeneration(
  api: ApiClient,
  status: HTMLElement,
  points: number,
  threads = 2,
  stage = 50,
): Promise<void> {
  const start = await api.startGeneration({ points, threads, stage });
  status.textContent = `job ${start.job_id}: stage 0/${show(start.total_stages)}`;
  await pollGeneration(api, start.job_id, (p) => {
    status.textContent =
      `job ${p.job_id}: stage ${show(p.stage)}/${show(p.total_stages)}, ` +
      `${show(p.points)} points (${p.status})`;
  });
}

declare global {
  interface Window {
    casemixBoot?: typeof boot;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.casemixBoot = boot;
  void boot(document.getElementById("app") as HTMLElement);
}
