"""Shared point and hypercube primitives for archive code.

Both the list-based reference archive and the KD-tree archive call these
helpers so that floating-point comparisons are performed by the exact same
code path on both sides (important for tie cases in equivalence testing).
"""

from __future__ import annotations

import numpy as np

MEMBERSHIP_TOL = 1e-12  # per-coordinate tolerance for archive membership


def as_point(values, k: int | None = None) -> np.ndarray:
    pt = np.asarray(values, dtype=float)
    if pt.ndim != 1:
        raise ValueError("a point must be a flat coordinate vector")
    if k is not None and pt.shape[0] != k:
        raise ValueError(f"point has dimension {pt.shape[0]}, expected {k}")
    if not np.all(np.isfinite(pt)):
        raise ValueError("point coordinates must be finite")
    return pt


def dist_sq(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(np.dot(d, d))


def same_point(a: np.ndarray, b: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    """Membership equality: every coordinate within ``tol``."""
    return bool(np.all(np.abs(a - b) <= tol))


def exact_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a == b))


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """True iff ``a`` weakly exceeds ``b`` everywhere and strictly somewhere.

    Maximization semantics, exact comparisons: equal points never dominate.
    """
    return bool(np.all(a >= b)) and bool(np.any(a > b))


class Hypercube:
    """Closed per-dimension intervals ``[lb_k, ub_k]``."""

    __slots__ = ("lb", "ub")

    def __init__(self, lb, ub):
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        if self.lb.shape != self.ub.shape or self.lb.ndim != 1:
            raise ValueError("bounds must be two equal-length vectors")
        if np.any(self.lb > self.ub):
            raise ValueError("lower bound exceeds upper bound")

    @classmethod
    def from_intervals(cls, intervals) -> "Hypercube":
        lb = [lo for lo, _ in intervals]
        ub = [hi for _, hi in intervals]
        return cls(lb, ub)

    @property
    def k(self) -> int:
        return int(self.lb.shape[0])

    def intervals(self) -> list[tuple[float, float]]:
        return [(float(lo), float(hi)) for lo, hi in zip(self.lb, self.ub)]

    def contains(self, pt: np.ndarray) -> bool:
        return bool(np.all(pt >= self.lb)) and bool(np.all(pt <= self.ub))

    def clamped_to(self, outer: "Hypercube") -> tuple["Hypercube", bool]:
        """Clamp into ``outer``; second value reports whether clamping occurred."""
        lb = np.minimum(np.maximum(self.lb, outer.lb), outer.ub)
        ub = np.maximum(np.minimum(self.ub, outer.ub), outer.lb)
        changed = not (np.array_equal(lb, self.lb) and np.array_equal(ub, self.ub))
        return Hypercube(lb, ub), changed

    def __eq__(self, other):
        return isinstance(other, Hypercube) and \
            np.array_equal(self.lb, other.lb) and np.array_equal(self.ub, other.ub)

    def __repr__(self):
        pairs = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals())
        return f"Hypercube({pairs})"


def dominating_region(a: np.ndarray, frontier: Hypercube) -> Hypercube:
    """Region whose members dominate ``a`` (upper box ``[a_k, ub_k]``)."""
    return Hypercube(a, np.maximum(a, frontier.ub))


def dominated_region(a: np.ndarray, frontier: Hypercube) -> Hypercube:
    """Region that ``a`` dominates (lower box ``[lb_k, a_k]``)."""
    return Hypercube(np.minimum(a, frontier.lb), a)
