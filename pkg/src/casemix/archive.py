"""Pareto-frontier stores.

Two interchangeable implementations of the same procedure set:

* :class:`Archive` — an ordered point list plus a k-d tree index; the
  production store used by generators, analytics, CLI and service.
* :class:`ListArchive` — plain linear scans over the list. It exists as
  the reference oracle for equivalence testing and is deliberately free
  of any spatial-index cleverness.

All objectives are maximized. The ideal point is the per-dimension
maximum over the archive, the nadir the per-dimension minimum.
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    MEMBERSHIP_TOL,
    Hypercube,
    as_point,
    dist_sq,
    dominates,
    exact_equal,
    same_point,
)
from .kdtree import KdTree


class ArchiveError(Exception):
    pass


class NotFound(ArchiveError):
    """Requested point/extremum does not exist in the archive."""


class DimensionMismatch(ArchiveError):
    pass


class Archive:
    """Frontier store: ordered list of points with a k-d tree over them."""

    def __init__(self, k: int, labels: list[str] | None = None):
        if k < 1:
            raise ArchiveError("objective count must be >= 1")
        self.k = k
        self.labels = list(labels) if labels else [f"obj{i + 1}" for i in range(k)]
        if len(self.labels) != k:
            raise ArchiveError("label count must equal dimension")
        self._points: list[np.ndarray] = []
        self._stamps: list[int] = []
        self._next_stamp = 0
        self._tree = KdTree(k)
        self.provenance: dict | None = None

    @classmethod
    def make(cls, points, k: int | None = None, labels=None) -> "Archive":
        """Build from a point list with a balanced tree; list order kept."""
        pts = [as_point(p) for p in points]
        if pts:
            dim = pts[0].shape[0]
            for p in pts:
                if p.shape[0] != dim:
                    raise DimensionMismatch("points of mixed dimension")
            if k is not None and k != dim:
                raise DimensionMismatch(f"points have dimension {dim}, expected {k}")
            k = dim
        elif k is None:
            raise ArchiveError("dimension required for an empty archive")
        arch = cls(k, labels)
        arch._points = pts
        arch._stamps = list(range(len(pts)))
        arch._next_stamp = len(pts)
        arch._tree = KdTree.make(
            np.asarray(pts).reshape(len(pts), k), np.arange(len(pts))
        )
        return arch

    def __len__(self) -> int:
        return len(self._points)

    def points_array(self) -> np.ndarray:
        if not self._points:
            return np.zeros((0, self.k))
        return np.asarray(self._points)

    def point(self, index: int) -> np.ndarray:
        return self._points[index].copy()

    def _check_dim(self, pt: np.ndarray) -> np.ndarray:
        pt = as_point(pt)
        if pt.shape[0] != self.k:
            raise DimensionMismatch(f"point has dimension {pt.shape[0]}, archive is {self.k}-d")
        return pt

    # -- updates -----------------------------------------------------------

    def insert(self, pt) -> bool:
        """Append ``pt``; returns False (duplicate no-op) if already present."""
        pt = self._check_dim(pt)
        if self.is_in(pt):
            return False
        self._points.append(pt)
        self._stamps.append(self._next_stamp)
        self._tree.insert(pt, self._next_stamp)
        self._next_stamp += 1
        return True

    def delete(self, pt) -> None:
        pt = self._check_dim(pt)
        pos = next(
            (i for i, stored in enumerate(self._points) if same_point(stored, pt)),
            None,
        )
        if pos is None:
            raise NotFound("point not in archive")
        stored = self._points.pop(pos)
        self._stamps.pop(pos)
        if not self._tree.delete(stored):  # pragma: no cover - list and tree agree
            raise ArchiveError("tree out of sync with list")

    def rebuild(self) -> None:
        """Rebuild the tree balanced over the current list."""
        self._tree = KdTree.make(self.points_array(), np.asarray(self._stamps, dtype=np.int64))

    def copy(self) -> "Archive":
        dup = Archive(self.k, self.labels)
        dup._points = [p.copy() for p in self._points]
        dup._stamps = list(self._stamps)
        dup._next_stamp = self._next_stamp
        dup._tree = self._tree.copy()
        dup.provenance = dict(self.provenance) if self.provenance else None
        return dup

    def clear(self) -> None:
        self._points = []
        self._stamps = []
        self._next_stamp = 0
        self._tree = KdTree(self.k)

    # -- queries ------------------------------------------------------------

    def is_in(self, pt) -> bool:
        pt = self._check_dim(pt)
        return self._tree.is_in(pt, MEMBERSHIP_TOL)

    def range_query(self, h: Hypercube) -> np.ndarray:
        if h.k != self.k:
            raise DimensionMismatch("hypercube dimension mismatch")
        nodes = self._tree.range_query(h.lb, h.ub)
        return self._collect(nodes)

    def range_query_indexed(self, h: Hypercube) -> tuple[list[int], np.ndarray]:
        """Range query returning (positions in the archive list, points)."""
        if h.k != self.k:
            raise DimensionMismatch("hypercube dimension mismatch")
        nodes = sorted(self._tree.range_query(h.lb, h.ub), key=self._tree.stamp_of)
        if not nodes:
            return [], np.zeros((0, self.k))
        pos_of_stamp = {s: i for i, s in enumerate(self._stamps)}
        positions = [pos_of_stamp[self._tree.stamp_of(n)] for n in nodes]
        return positions, np.asarray([self._tree.point_of(n) for n in nodes])

    def get_neighbours(self, pt, radius: float) -> np.ndarray:
        """Stored points with ``||pt - p|| <= radius``, excluding exact copies."""
        pt = self._check_dim(pt)
        if radius < 0:
            raise ArchiveError("radius must be >= 0")
        nodes = self._tree.ball_query(pt, float(radius))
        return self._collect(nodes)

    def get_nearest_neighbour(self, pt) -> np.ndarray:
        pt = self._check_dim(pt)
        node = self._tree.nearest(pt)
        if node < 0:
            raise NotFound("archive holds no point distinct from the target")
        return self._tree.point_of(node)

    def find_min(self, dim: int) -> float:
        if not self._points:
            raise NotFound("empty archive")
        return self._tree.find_min(dim)

    def find_max(self, dim: int) -> float:
        if not self._points:
            raise NotFound("empty archive")
        return self._tree.find_max(dim)

    def bounds(self) -> Hypercube:
        """The frontier box: per-dimension [min, max] over the archive."""
        if not self._points:
            raise NotFound("empty archive")
        lo = [self._tree.find_min(d) for d in range(self.k)]
        hi = [self._tree.find_max(d) for d in range(self.k)]
        return Hypercube(lo, hi)

    def ideal(self) -> np.ndarray:
        return self.bounds().ub.copy()

    def nadir(self) -> np.ndarray:
        return self.bounds().lb.copy()

    def is_dominated(self, pt) -> bool:
        pt = self._check_dim(pt)
        return self._tree.is_dominated(pt)

    def find_non_dominated(self, points=None) -> np.ndarray:
        """Subset of ``points`` (default: archive contents) that no other
        point of the same set dominates; input order preserved."""
        if points is None:
            pts = self.points_array()
        else:
            pts = np.asarray([self._check_dim(p) for p in points]).reshape(-1, self.k)
        return find_non_dominated(pts)

    def _collect(self, nodes: list[int]) -> np.ndarray:
        if not nodes:
            return np.zeros((0, self.k))
        order = sorted(nodes, key=self._tree.stamp_of)
        return np.asarray([self._tree.point_of(n) for n in order])

    def height(self) -> int:
        return self._tree.height()

    def tree_size(self) -> int:
        return self._tree.size


def find_non_dominated(points: np.ndarray) -> np.ndarray:
    """Non-dominated subset of ``points`` via k-d tree dominance probes."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise DimensionMismatch("expected an (n, k) array")
    if points.shape[0] == 0:
        return points.copy()
    tree = KdTree.make(points)
    keep = [i for i in range(points.shape[0]) if not tree.is_dominated(points[i])]
    return points[keep].copy()


class ListArchive:
    """Reference implementation: the same procedures as linear scans."""

    def __init__(self, k: int):
        self.k = k
        self._points: list[np.ndarray] = []

    @classmethod
    def make(cls, points, k: int | None = None) -> "ListArchive":
        pts = [as_point(p) for p in points]
        if pts:
            k = pts[0].shape[0]
        elif k is None:
            raise ArchiveError("dimension required for an empty archive")
        arch = cls(k)
        arch._points = pts
        return arch

    def __len__(self) -> int:
        return len(self._points)

    def points_array(self) -> np.ndarray:
        if not self._points:
            return np.zeros((0, self.k))
        return np.asarray(self._points)

    def insert(self, pt) -> bool:
        pt = as_point(pt, self.k)
        if self.is_in(pt):
            return False
        self._points.append(pt)
        return True

    def delete(self, pt) -> None:
        pt = as_point(pt, self.k)
        for i, stored in enumerate(self._points):
            if same_point(stored, pt):
                self._points.pop(i)
                return
        raise NotFound("point not in archive")

    def is_in(self, pt) -> bool:
        pt = as_point(pt, self.k)
        return any(same_point(stored, pt) for stored in self._points)

    def range_query(self, h: Hypercube) -> np.ndarray:
        hits = [p for p in self._points if h.contains(p)]
        return np.asarray(hits) if hits else np.zeros((0, self.k))

    def get_neighbours(self, pt, radius: float) -> np.ndarray:
        pt = as_point(pt, self.k)
        r2 = float(radius) * float(radius)
        hits = [
            p for p in self._points
            if dist_sq(pt, p) <= r2 and not exact_equal(pt, p)
        ]
        return np.asarray(hits) if hits else np.zeros((0, self.k))

    def get_nearest_neighbour(self, pt) -> np.ndarray:
        pt = as_point(pt, self.k)
        best = None
        best_d2 = np.inf
        for p in self._points:
            if exact_equal(p, pt):
                continue
            d2 = dist_sq(pt, p)
            if d2 < best_d2:
                best, best_d2 = p, d2
        if best is None:
            raise NotFound("archive holds no point distinct from the target")
        return best.copy()

    def find_min(self, dim: int) -> float:
        if not self._points:
            raise NotFound("empty archive")
        return float(min(p[dim] for p in self._points))

    def find_max(self, dim: int) -> float:
        if not self._points:
            raise NotFound("empty archive")
        return float(max(p[dim] for p in self._points))

    def bounds(self) -> Hypercube:
        if not self._points:
            raise NotFound("empty archive")
        arr = self.points_array()
        return Hypercube(arr.min(axis=0), arr.max(axis=0))

    def is_dominated(self, pt) -> bool:
        pt = as_point(pt, self.k)
        return any(dominates(p, pt) for p in self._points)

    def find_non_dominated(self, points=None) -> np.ndarray:
        pts = self.points_array() if points is None else \
            np.asarray([as_point(p, self.k) for p in points]).reshape(-1, self.k)
        keep = []
        for i in range(pts.shape[0]):
            if not any(dominates(pts[j], pts[i]) for j in range(pts.shape[0]) if j != i):
                keep.append(i)
        return pts[keep].copy()
