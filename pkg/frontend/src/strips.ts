import type { HistogramData, Interval, SpreadRow } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 360;
const HEIGHT = 46;
const MID = HEIGHT / 2;

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

/**
 * A horizontal distribution strip: mirrored density bars from the server
 * histogram with a quartile box and median tick on top. All numbers are
 * server-provided; this module only maps them to pixels.
 */
export function distributionStrip(
  hist: HistogramData,
  spread: SpreadRow | null,
  axis: Interval,
): SVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "strip",
    role: "img",
  });
  const [lo, hi] = axis;
  const span = hi > lo ? hi - lo : 1;
  const toX = (v: number) => ((v - lo) / span) * WIDTH;

  const peak = Math.max(1, ...hist.counts);
  const bins = hist.counts.length;
  for (let i = 0; i < bins; i++) {
    const count = hist.counts[i];
    if (count === 0) continue;
    const x0 = toX(hist.edges[i]);
    const x1 = toX(hist.edges[i + 1]);
    const half = (count / peak) * (MID - 3);
    svg.append(
      svgEl("rect", {
        x: String(Math.min(x0, x1)),
        y: String(MID - half),
        width: String(Math.max(1, Math.abs(x1 - x0))),
        height: String(2 * half),
        class: "strip-bar",
      }),
    );
  }
  if (spread) {
    svg.append(
      svgEl("rect", {
        x: String(toX(spread.q1)),
        y: String(MID - 4),
        width: String(Math.max(1, toX(spread.q3) - toX(spread.q1))),
        height: "8",
        class: "strip-box",
      }),
      svgEl("line", {
        x1: String(toX(spread.q2)),
        x2: String(toX(spread.q2)),
        y1: String(MID - 8),
        y2: String(MID + 8),
        class: "strip-median",
      }),
    );
  }
  return svg;
}

/**
 * Bar for one case mix value against the frontier interval of its group
 * (the case-mix browser's chart).
 */
export function valueBar(value: number, axis: Interval): SVGElement {
  const svg = svgEl("svg", { viewBox: `0 0 ${WIDTH} 14`, class: "strip" });
  const [lo, hi] = axis;
  const span = hi > lo ? hi - lo : 1;
  const w = Math.max(1, ((Math.min(Math.max(value, lo), hi) - lo) / span) * WIDTH);
  svg.append(
    svgEl("rect", { x: "0", y: "2", width: String(WIDTH), height: "10", class: "bar-track" }),
    svgEl("rect", { x: "0", y: "2", width: String(w), height: "10", class: "bar-value" }),
  );
  return svg;
}
