"""Decision-support queries over a frontier archive.

Everything here is read-only over an archive snapshot: extended range
queries, goal optimality checks with dominance regions, per-dimension gap
(uniformity) and spread statistics, and the progress level of a solution
relative to the ideal/nadir anchors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .archive import Archive, DimensionMismatch, NotFound
from .geometry import (
    Hypercube,
    as_point,
    dominated_region,
    dominates,
    dominating_region,
    exact_equal,
)

DEFAULT_ALTERNATIVES_CAP = 1000


class UndefinedStats(ValueError):
    """Statistic requested on an archive too small to define it."""


@dataclass
class RangeQueryResult:
    requested: Hypercube               # after clamping into the frontier box
    frontier: Hypercube
    candidates: np.ndarray             # (n, k), archive order
    coverage_percent: float
    candidate_indices: list[int] = field(default_factory=list)
    best: np.ndarray | None = None     # candidate nearest the ideal point
    achievable: Hypercube | None = None
    best_progress: float | None = None
    clamped: bool = False

    @property
    def count(self) -> int:
        return int(self.candidates.shape[0])


@dataclass
class GapStats:
    labels: list[str]
    mean: np.ndarray
    std: np.ndarray
    cv: list[float | None]
    max_gap: np.ndarray


@dataclass
class SpreadStats:
    labels: list[str]
    mean: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray


@dataclass
class OptimalityVerdict:
    status: str                        # "dominated" | "efficient-or-infeasible"
    goal: np.ndarray
    alternatives: np.ndarray           # capped list
    alternatives_total: int
    closest: np.ndarray | None = None  # set when the goal is not dominated
    change: np.ndarray | None = None   # closest - goal
    cap: int = DEFAULT_ALTERNATIVES_CAP

    @property
    def dominated(self) -> bool:
        return self.status == "dominated"


def normalize(points: np.ndarray, frontier: Hypercube) -> np.ndarray:
    """Min-max scale coordinates into [0, 1] by the frontier box.

    A dimension with zero width collapses to 0 (it cannot discriminate).
    """
    span = frontier.ub - frontier.lb
    safe = np.where(span > 0, span, 1.0)
    scaled = (points - frontier.lb) / safe
    if points.ndim == 1:
        return np.where(span > 0, scaled, 0.0)
    return np.where(span > 0, scaled, 0.0)


def range_query_ext(archive: Archive, requested: Hypercube,
                    clamp: bool = True) -> RangeQueryResult:
    """Range query with achievable bounds, best point and coverage."""
    if requested.k != archive.k:
        raise DimensionMismatch("query dimension does not match the archive")
    frontier = archive.bounds()
    clamped = False
    if clamp:
        requested, clamped = requested.clamped_to(frontier)
    indices, candidates = archive.range_query_indexed(requested)
    size = len(archive)
    coverage = 100.0 * candidates.shape[0] / size if size else 0.0
    if candidates.shape[0] == 0:
        return RangeQueryResult(requested=requested, frontier=frontier,
                                candidates=candidates, coverage_percent=coverage,
                                candidate_indices=indices, clamped=clamped)
    achievable = Hypercube(candidates.min(axis=0), candidates.max(axis=0))
    scaled = normalize(candidates, frontier)
    ideal = normalize(frontier.ub, frontier)
    dists = np.sum((scaled - ideal) ** 2, axis=1)
    best = candidates[int(np.argmin(dists))]
    try:
        best_progress = progress(archive, best, frontier=frontier)
    except UndefinedStats:  # frontier box has zero extent in every dimension
        best_progress = None
    return RangeQueryResult(
        requested=requested, frontier=frontier, candidates=candidates,
        coverage_percent=coverage, candidate_indices=indices,
        best=best.copy(), achievable=achievable,
        best_progress=best_progress,
        clamped=clamped,
    )


def fmt_value(v: float) -> str:
    """Compact numeric rendering: integers bare, floats trimmed (12 sig. digits)."""
    return f"{float(v):.12g}"


def render_nested_ranges(frontier: Hypercube, requested: Hypercube,
                         achievable: Hypercube | None) -> str:
    """One line per objective showing how the interval triple nests.

    Intervals print innermost-first; a bound equal to the bound of the
    interval it encloses is suppressed, and an interval whose bounds are
    both suppressed vanishes entirely (so identical triples collapse to a
    single ``[lo, hi]``).
    """
    shells = [h for h in (achievable, requested, frontier) if h is not None]
    k = shells[-1].k
    for h in shells:
        if h.k != k:
            raise DimensionMismatch("interval triple of mixed dimension")
    lines = []
    for dim in range(k):
        lo, hi = shells[0].lb[dim], shells[0].ub[dim]
        if lo > hi:
            raise ValueError("nesting violated: inner interval is inverted")
        text = f"[{fmt_value(lo)}, {fmt_value(hi)}]"
        for outer in shells[1:]:
            olo, ohi = outer.lb[dim], outer.ub[dim]
            if olo > lo or ohi < hi:
                raise ValueError(
                    f"nesting violated in objective {dim + 1}: "
                    f"[{olo}, {ohi}] does not enclose [{lo}, {hi}]"
                )
            parts = []
            if olo != lo:
                parts.append(fmt_value(olo))
            parts.append(text)
            if ohi != hi:
                parts.append(fmt_value(ohi))
            if len(parts) > 1:
                text = "[" + ", ".join(parts) + "]"
            lo, hi = olo, ohi
        lines.append(text)
    return "\n".join(lines)


def check_optimality(archive: Archive, goal,
                     cap: int = DEFAULT_ALTERNATIVES_CAP) -> OptimalityVerdict:
    """Classify a goal case mix against the archive.

    Dominated goals come back with the strictly better stored solutions;
    otherwise the goal is efficient or unachievable and the reply lists the
    achievable solutions it dominates plus the closest stored solution.
    """
    goal = as_point(goal, archive.k)
    frontier = archive.bounds()
    if archive.is_dominated(goal):
        region = dominating_region(goal, frontier)
        hits = archive.range_query(region)
        better = [p for p in hits if dominates(p, goal)]
        alternatives = np.asarray(better) if better else np.zeros((0, archive.k))
        return OptimalityVerdict(
            status="dominated", goal=goal,
            alternatives=alternatives[:cap],
            alternatives_total=alternatives.shape[0], cap=cap,
        )
    region = dominated_region(goal, frontier)
    hits = archive.range_query(region)
    kept = [p for p in hits if not exact_equal(p, goal)]
    alternatives = np.asarray(kept) if kept else np.zeros((0, archive.k))
    try:
        closest = archive.get_nearest_neighbour(goal)
    except NotFound:
        closest = None
    return OptimalityVerdict(
        status="efficient-or-infeasible", goal=goal,
        alternatives=alternatives[:cap],
        alternatives_total=alternatives.shape[0],
        closest=closest,
        change=None if closest is None else closest - goal,
        cap=cap,
    )


def analyse_uniformity(archive: Archive | np.ndarray, labels=None) -> GapStats:
    """Sorted-coordinate gap statistics per dimension.

    Mean and standard deviation are taken over the ``n - 1`` consecutive
    gaps of each dimension (population form); the coefficient of variation
    is undefined (None) for a dimension whose mean gap is zero.
    """
    pts, labels = _points_and_labels(archive, labels)
    n = pts.shape[0]
    if n < 2:
        raise UndefinedStats("gap statistics need at least two points")
    ordered = np.sort(pts, axis=0)
    gaps = np.diff(ordered, axis=0)
    mean = gaps.mean(axis=0)
    std = np.sqrt(np.mean((gaps - mean) ** 2, axis=0))
    cv = [float(s / m) if m > 0 else None for m, s in zip(mean, std)]
    return GapStats(labels=labels, mean=mean, std=std, cv=cv,
                    max_gap=gaps.max(axis=0))


def analyse_spread(archive: Archive | np.ndarray, labels=None) -> SpreadStats:
    """Per-dimension mean and quartiles (linear interpolation between ranks)."""
    pts, labels = _points_and_labels(archive, labels)
    if pts.shape[0] == 0:
        raise UndefinedStats("spread statistics need at least one point")
    q1, q2, q3 = np.quantile(pts, [0.25, 0.5, 0.75], axis=0, method="linear")
    return SpreadStats(labels=labels, mean=pts.mean(axis=0), q1=q1, q2=q2, q3=q3)


def histogram(archive: Archive | np.ndarray, bins: int = 20, labels=None):
    """Fixed-bin counts per dimension over the frontier box (for UI strips)."""
    pts, labels = _points_and_labels(archive, labels)
    out = []
    for dim in range(pts.shape[1]):
        col = pts[:, dim]
        lo, hi = float(col.min()), float(col.max())
        if hi <= lo:
            counts = np.zeros(bins, dtype=int)
            counts[0] = col.shape[0]
            edges = np.linspace(lo, lo + 1.0, bins + 1)
        else:
            counts, edges = np.histogram(col, bins=bins, range=(lo, hi))
        out.append({"label": labels[dim], "edges": edges.tolist(),
                    "counts": counts.tolist()})
    return out


def progress(archive: Archive, point, frontier: Hypercube | None = None) -> float:
    """Progress percentage of a solution: 100 at the ideal point, 0 at the nadir.

    Computed on frontier-box normalized coordinates with the two-norm.
    """
    pt = as_point(point, archive.k)
    if frontier is None:
        frontier = archive.bounds()
    ideal = normalize(frontier.ub, frontier)
    nadir = normalize(frontier.lb, frontier)
    gamma = float(np.linalg.norm(ideal - nadir))
    if gamma == 0.0:
        raise UndefinedStats("ideal and nadir coincide; progress undefined")
    delta = float(np.linalg.norm(ideal - normalize(pt, frontier)))
    return 100.0 * (gamma - delta) / gamma


def _points_and_labels(archive, labels):
    if isinstance(archive, Archive):
        pts = archive.points_array()
        labels = labels or archive.labels
    else:
        pts = np.asarray(archive, dtype=float)
        if pts.ndim != 2:
            raise DimensionMismatch("expected an (n, k) array")
        labels = labels or [f"obj{i + 1}" for i in range(pts.shape[1])]
    return pts, list(labels)
