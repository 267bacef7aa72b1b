"""Deterministic text rendering of query answers.

The CLI prints these blocks and the HTTP service embeds the same strings
in its responses, so for identical inputs both surfaces emit identical
bytes. Tables show two decimal places; file formats keep full precision.
"""

from __future__ import annotations

import numpy as np

from .analytics import (
    GapStats,
    OptimalityVerdict,
    RangeQueryResult,
    SpreadStats,
    render_nested_ranges,
)
from .cam import BoundsReport, HospitalInstance
from .generate import GenerationReport


def _table(header: list[str], rows: list[list[str]], indent: str = "") -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells):
        return indent + "  ".join(c.rjust(w) if i else c.ljust(w)
                                  for i, (c, w) in enumerate(zip(cells, widths))).rstrip()
    return "\n".join([fmt(header)] + [fmt(r) for r in rows])


def _num(v) -> str:
    return f"{float(v):.2f}"


def render_bounds(report: BoundsReport, instance: HospitalInstance | None = None) -> str:
    published = {}
    if instance is not None:
        published = {g.id: g.published_ub for g in instance.groups
                     if g.published_ub is not None}
    header = ["group", "lower", "upper"]
    if published:
        header += ["published", "deviation%"]
    rows = []
    for gid, lo, hi in zip(report.group_ids, report.lower, report.upper):
        row = [gid, _num(lo), _num(hi)]
        if published:
            pub = published.get(gid)
            if pub is None:
                row += ["-", "-"]
            else:
                row += [_num(pub), f"{100.0 * (hi - pub) / pub:+.2f}"]
        rows.append(row)
    total = ["total", "", _num(report.upper.sum())]
    if published:
        total += [_num(sum(published.values())), ""]
    rows.append(total)
    lines = [_table(header, rows)]
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def render_points_table(labels: list[str], points: np.ndarray,
                        indices=None, first_col: str = "idx") -> str:
    header = [first_col] + list(labels)
    if indices is None:
        indices = range(len(points))
    rows = [[str(i)] + [_num(v) for v in pt] for i, pt in zip(indices, points)]
    return _table(header, rows)


def render_range_result(labels: list[str], result: RangeQueryResult,
                        archive_size: int, max_rows: int = 100) -> str:
    lines = []
    if result.clamped:
        lines.append("note: requested range clamped to the frontier box")
    lines.append(
        f"candidates: {result.count} of {archive_size} "
        f"(coverage {result.coverage_percent:.2f}%)"
    )
    lines.append("")
    lines.append("objective ranges, frontier [ requested [ achievable ] ]:")
    lines.append(render_nested_ranges(result.frontier, result.requested, result.achievable))
    if result.best is not None:
        shown_progress = "-" if result.best_progress is None \
            else f"{result.best_progress:.2f}%"
        lines.append("")
        lines.append(f"best candidate (nearest the ideal point, "
                     f"progress {shown_progress}):")
        lines.append(_table(["group", "value"],
                            [[lbl, _num(v)] for lbl, v in zip(labels, result.best)]))
    if result.count:
        lines.append("")
        shown = min(result.count, max_rows)
        title = "candidates:" if shown == result.count else \
            f"candidates (first {shown} of {result.count}):"
        lines.append(title)
        lines.append(render_points_table(labels, result.candidates[:shown],
                                         indices=result.candidate_indices[:shown]))
    return "\n".join(lines)


def render_goal_result(labels: list[str], verdict: OptimalityVerdict,
                       max_rows: int = 100) -> str:
    lines = []
    if verdict.dominated:
        lines.append("verdict: inferior (the archive holds strictly better case mixes)")
        lines.append(f"superior case mixes: {verdict.alternatives_total}")
        shown = min(verdict.alternatives.shape[0], max_rows)
        if shown:
            lines.append("")
            lines.append(f"showing {shown}:")
            lines.append(render_points_table(labels, verdict.alternatives[:shown]))
    else:
        lines.append("verdict: efficient-or-infeasible (nothing in the archive dominates the goal)")
        if verdict.closest is not None:
            lines.append("")
            lines.append("closest optimal case mix:")
            rows = [[lbl, _num(g), _num(c), f"{d:+.2f}"]
                    for lbl, g, c, d in zip(labels, verdict.goal,
                                            verdict.closest, verdict.change)]
            lines.append(_table(["group", "goal", "closest", "change"], rows))
        lines.append("")
        lines.append(
            f"achievable case mixes the goal dominates: {verdict.alternatives_total}"
        )
        shown = min(verdict.alternatives.shape[0], max_rows)
        if shown:
            lines.append(f"showing {shown}:")
            lines.append(render_points_table(labels, verdict.alternatives[:shown]))
    return "\n".join(lines)


def render_stats(gap: GapStats, spread: SpreadStats) -> str:
    lines = ["spread per objective:"]
    rows = [[lbl, _num(m), _num(a), _num(b), _num(c)]
            for lbl, m, a, b, c in zip(spread.labels, spread.mean,
                                       spread.q1, spread.q2, spread.q3)]
    lines.append(_table(["group", "mean", "q1", "q2", "q3"], rows))
    lines.append("")
    lines.append("uniformity (sorted-coordinate gaps) per objective:")
    rows = []
    for lbl, m, s, cv, mx in zip(gap.labels, gap.mean, gap.std, gap.cv, gap.max_gap):
        rows.append([lbl, _num(m), _num(s), "-" if cv is None else _num(cv), _num(mx)])
    lines.append(_table(["group", "mean", "std", "cv", "max"], rows))
    return "\n".join(lines)


def render_report(report: GenerationReport) -> str:
    cfg = report.config
    lines = [
        "# casemix generation report",
        f"algorithm {report.algorithm}",
        f"points {cfg.total_points}",
        f"threads {cfg.threads}",
        f"stage_size {cfg.stage_size}",
        f"proximity {cfg.proximity!r}",
        f"seed {cfg.seed}",
        f"lambda {cfg.lam!r}",
        f"correction_upfront {str(cfg.correction_upfront).lower()}",
        f"stages_completed {report.stages_completed}",
        f"evaluations {report.evaluations}",
        f"feasible_evaluations {report.feasible_evaluations}",
        f"feasibility_rate {report.feasibility_rate:.4f}",
        f"generated {report.generated}",
        f"wall_time_s {report.wall_time_s:.2f}",
        "stage evaluated feasible inserted rejected_duplicate rejected_proximity",
    ]
    for st in report.stage_stats:
        lines.append(f"{st.stage} {st.evaluated} {st.feasible} {st.inserted} "
                     f"{st.rejected_duplicate} {st.rejected_proximity}")
    return "\n".join(lines)
