import type { Interval } from "./types.js";

/**
 * Range-slider state for one objective: the fixed frontier interval, the
 * user-movable requested interval and, after a query, the achievable
 * interval the server reported. The three always nest:
 *
 *   frontier.lb <= requested.lb <= achievable.lb
 *             <= achievable.ub <= requested.ub <= frontier.ub
 *
 * Handles clamp to the frontier; the achievable interval is display-only
 * and comes straight from a query response.
 */
export class SliderModel {
  readonly frontierLb: number;
  readonly frontierUb: number;
  private lo: number;
  private hi: number;
  private achievableLo: number | null = null;
  private achievableHi: number | null = null;

  constructor(frontier: Interval) {
    this.frontierLb = frontier[0];
    this.frontierUb = frontier[1];
    this.lo = this.frontierLb;
    this.hi = this.frontierUb;
  }

  get requested(): Interval {
    return [this.lo, this.hi];
  }

  get achievable(): Interval | null {
    return this.achievableLo === null || this.achievableHi === null
      ? null
      : [this.achievableLo, this.achievableHi];
  }

  private clamp(value: number): number {
    return Math.min(Math.max(value, this.frontierLb), this.frontierUb);
  }

  /** Move the lower handle; drags the upper handle along if overtaken. */
  setLow(value: number): void {
    this.lo = this.clamp(value);
    if (this.hi < this.lo) this.hi = this.lo;
    this.achievableLo = this.achievableHi = null;
  }

  /** Move the upper handle; drags the lower handle along if overtaken. */
  setHigh(value: number): void {
    this.hi = this.clamp(value);
    if (this.lo > this.hi) this.lo = this.hi;
    this.achievableLo = this.achievableHi = null;
  }

  /** Record the achievable interval reported by the last query. */
  setAchievable(interval: Interval | null): void {
    if (interval === null) {
      this.achievableLo = this.achievableHi = null;
      return;
    }
    const [lo, hi] = interval;
    if (lo < this.lo - 1e-9 || hi > this.hi + 1e-9 || lo > hi) {
      throw new Error(
        `achievable [${lo}, ${hi}] escapes requested [${this.lo}, ${this.hi}]`,
      );
    }
    this.achievableLo = lo;
    this.achievableHi = hi;
  }

  /** Reset the requested interval to the full frontier. */
  reset(): void {
    this.lo = this.frontierLb;
    this.hi = this.frontierUb;
    this.achievableLo = this.achievableHi = null;
  }

  /** Position of a value along the frontier axis, in [0, 100]. */
  percent(value: number): number {
    const span = this.frontierUb - this.frontierLb;
    if (span <= 0) return 0;
    return (100 * (this.clamp(value) - this.frontierLb)) / span;
  }

  nestingHolds(): boolean {
    const ok = this.frontierLb <= this.lo && this.lo <= this.hi && this.hi <= this.frontierUb;
    if (!ok) return false;
    if (this.achievableLo === null || this.achievableHi === null) return true;
    return this.lo <= this.achievableLo && this.achievableLo <= this.achievableHi &&
      this.achievableHi <= this.hi;
  }
}
