"""Balanced k-d tree over points in R^k.

Nodes live in flat numpy arrays (coordinates, child links, insertion
stamps) rather than per-node objects, which keeps million-point trees
cheap to build and walk. Split dimensions cycle with depth. Incremental
inserts send equal coordinates to the right subtree; a balanced rebuild
may leave equal coordinates on either side of a pivot, so every descent
explores both children when the query coordinate ties the pivot.

Dominance and neighbour searches use the exact-comparison helpers from
:mod:`casemix.geometry` so results match the list reference archive
bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from .geometry import dist_sq, exact_equal, same_point

_NIL = -1


class KdTree:
    def __init__(self, k: int):
        if k < 1:
            raise ValueError("dimension must be >= 1")
        self.k = k
        cap = 16
        self._pts = np.zeros((cap, k))
        self._left = np.full(cap, _NIL, dtype=np.int64)
        self._right = np.full(cap, _NIL, dtype=np.int64)
        self._stamp = np.zeros(cap, dtype=np.int64)
        self._used = 0
        self._free: list[int] = []
        self.root = _NIL
        self.size = 0

    # -- construction -------------------------------------------------

    @classmethod
    def make(cls, points: np.ndarray, stamps=None) -> "KdTree":
        """Build a balanced tree; height is exactly ceil(log2(n + 1))."""
        points = np.asarray(points, dtype=float)
        if points.size == 0:
            points = points.reshape(0, points.shape[1] if points.ndim == 2 else 1)
        if points.ndim != 2:
            raise ValueError("expected an (n, k) coordinate array")
        n, k = points.shape
        tree = cls(k)
        tree._ensure_capacity(n)
        tree._pts[:n] = points
        tree._stamp[:n] = np.arange(n) if stamps is None else np.asarray(stamps, dtype=np.int64)
        tree._used = n
        tree.size = n
        tree.root = tree._build(np.arange(n), 0)
        return tree

    def _build(self, idx: np.ndarray, depth: int) -> int:
        n = idx.shape[0]
        if n == 0:
            return _NIL
        cd = depth % self.k
        if n > 1:
            # Stable total order (coordinate, stamp) keeps rebuilds deterministic.
            idx = idx[np.lexsort((self._stamp[idx], self._pts[idx, cd]))]
        mid = n // 2
        node = int(idx[mid])
        self._left[node] = self._build(idx[:mid], depth + 1)
        self._right[node] = self._build(idx[mid + 1:], depth + 1)
        return node

    def _ensure_capacity(self, n: int) -> None:
        cap = self._pts.shape[0]
        if n <= cap:
            return
        new_cap = max(n, cap * 2)
        grown = np.zeros((new_cap, self.k))
        grown[:self._used] = self._pts[:self._used]
        self._pts = grown
        for name in ("_left", "_right", "_stamp"):
            arr = getattr(self, name)
            bigger = np.full(new_cap, _NIL, dtype=np.int64)
            bigger[:self._used] = arr[:self._used]
            setattr(self, name, bigger)

    def _alloc(self, pt: np.ndarray, stamp: int) -> int:
        if self._free:
            node = self._free.pop()
        else:
            self._ensure_capacity(self._used + 1)
            node = self._used
            self._used += 1
        self._pts[node] = pt
        self._left[node] = _NIL
        self._right[node] = _NIL
        self._stamp[node] = stamp
        return node

    def copy(self) -> "KdTree":
        dup = KdTree(self.k)
        dup._pts = self._pts.copy()
        dup._left = self._left.copy()
        dup._right = self._right.copy()
        dup._stamp = self._stamp.copy()
        dup._used = self._used
        dup._free = list(self._free)
        dup.root = self.root
        dup.size = self.size
        return dup

    # -- membership and updates ----------------------------------------

    def insert(self, pt: np.ndarray, stamp: int) -> None:
        """Insert without rebalancing; ties on the split coordinate go right."""
        node = self._alloc(pt, stamp)
        if self.root == _NIL:
            self.root = node
            self.size = 1
            return
        cur = self.root
        depth = 0
        while True:
            cd = depth % self.k
            if pt[cd] < self._pts[cur, cd]:
                nxt = self._left[cur]
                if nxt == _NIL:
                    self._left[cur] = node
                    break
            else:
                nxt = self._right[cur]
                if nxt == _NIL:
                    self._right[cur] = node
                    break
            cur = nxt
            depth += 1
        self.size += 1

    def is_in(self, pt: np.ndarray, tol: float | None = None) -> bool:
        return self.find(pt, tol) != _NIL

    def is_in_cost(self, pt: np.ndarray, tol: float | None = None) -> int:
        """Number of nodes visited by the membership probe (test support)."""
        _, visited = self._find(pt, tol)
        return visited

    def find(self, pt: np.ndarray, tol: float | None = None) -> int:
        node, _ = self._find(pt, tol)
        return node

    def _find(self, pt: np.ndarray, tol: float | None) -> tuple[int, int]:
        eq = same_point if tol is None else (lambda a, b: same_point(a, b, tol))
        stack = [(self.root, 0)]
        visited = 0
        while stack:
            node, depth = stack.pop()
            if node == _NIL:
                continue
            visited += 1
            if eq(self._pts[node], pt):
                return node, visited
            cd = depth % self.k
            v = self._pts[node, cd]
            if pt[cd] < v:
                stack.append((self._left[node], depth + 1))
            elif pt[cd] > v:
                stack.append((self._right[node], depth + 1))
            else:
                stack.append((self._left[node], depth + 1))
                stack.append((self._right[node], depth + 1))
        return _NIL, visited

    def delete(self, pt: np.ndarray) -> bool:
        """Remove one node whose point equals ``pt`` exactly."""
        self.root, removed = self._delete(self.root, pt, 0)
        if removed:
            self.size -= 1
        return removed

    def _delete(self, node: int, pt: np.ndarray, depth: int) -> tuple[int, bool]:
        if node == _NIL:
            return _NIL, False
        cd = depth % self.k
        if exact_equal(self._pts[node], pt):
            if self._right[node] != _NIL:
                j = self._find_extreme(self._right[node], cd, depth + 1, want_min=True)
                self._pts[node] = self._pts[j]
                self._stamp[node] = self._stamp[j]
                self._right[node], _ = self._delete(self._right[node], self._pts[j].copy(), depth + 1)
            elif self._left[node] != _NIL:
                j = self._find_extreme(self._left[node], cd, depth + 1, want_min=True)
                self._pts[node] = self._pts[j]
                self._stamp[node] = self._stamp[j]
                sub, _ = self._delete(self._left[node], self._pts[j].copy(), depth + 1)
                self._right[node] = sub
                self._left[node] = _NIL
            else:
                self._free.append(node)
                return _NIL, True
            return node, True
        v = self._pts[node, cd]
        if pt[cd] < v:
            self._left[node], removed = self._delete(self._left[node], pt, depth + 1)
        elif pt[cd] > v:
            self._right[node], removed = self._delete(self._right[node], pt, depth + 1)
        else:
            self._right[node], removed = self._delete(self._right[node], pt, depth + 1)
            if not removed:
                self._left[node], removed = self._delete(self._left[node], pt, depth + 1)
        return node, removed

    # -- extrema --------------------------------------------------------

    def find_min(self, dim: int) -> float:
        return self._extreme_value(dim, want_min=True)

    def find_max(self, dim: int) -> float:
        return self._extreme_value(dim, want_min=False)

    def _extreme_value(self, dim: int, want_min: bool) -> float:
        if self.root == _NIL:
            raise LookupError("empty tree has no extrema")
        if not 0 <= dim < self.k:
            raise ValueError(f"dimension {dim} out of range for k={self.k}")
        node = self._find_extreme(self.root, dim, 0, want_min)
        return float(self._pts[node, dim])

    def _find_extreme(self, node: int, dim: int, depth: int, want_min: bool) -> int:
        cd = depth % self.k
        best = node
        follow_both = cd != dim
        children = []
        if want_min:
            children.append(self._left[node])
            if follow_both:
                children.append(self._right[node])
        else:
            children.append(self._right[node])
            if follow_both:
                children.append(self._left[node])
        for child in children:
            if child == _NIL:
                continue
            cand = self._find_extreme(child, dim, depth + 1, want_min)
            if want_min:
                if self._pts[cand, dim] < self._pts[best, dim]:
                    best = cand
            else:
                if self._pts[cand, dim] > self._pts[best, dim]:
                    best = cand
        return best

    # -- region and neighbour queries ------------------------------------

    def range_query(self, lb: np.ndarray, ub: np.ndarray) -> list[int]:
        """Node indices of points inside the closed box ``[lb, ub]``."""
        out: list[int] = []
        if self.root == _NIL:
            return out
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            pt = self._pts[node]
            if np.all(pt >= lb) and np.all(pt <= ub):
                out.append(node)
            cd = depth % self.k
            v = pt[cd]
            left, right = self._left[node], self._right[node]
            if left != _NIL and v >= lb[cd]:
                stack.append((left, depth + 1))
            if right != _NIL and v <= ub[cd]:
                stack.append((right, depth + 1))
        return out

    def ball_query(self, centre: np.ndarray, radius: float) -> list[int]:
        """Nodes within Euclidean ``radius`` of ``centre``, excluding exact copies."""
        out: list[int] = []
        if self.root == _NIL or radius < 0:
            return out
        r2 = radius * radius
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            pt = self._pts[node]
            if dist_sq(centre, pt) <= r2 and not exact_equal(centre, pt):
                out.append(node)
            cd = depth % self.k
            v = pt[cd]
            left, right = self._left[node], self._right[node]
            if left != _NIL and centre[cd] - radius <= v:
                stack.append((left, depth + 1))
            if right != _NIL and centre[cd] + radius >= v:
                stack.append((right, depth + 1))
        return out

    def nearest(self, target: np.ndarray) -> int:
        """Closest node to ``target`` bypassing nodes equal to it.

        Distance ties break toward the smallest insertion stamp, matching a
        first-wins linear scan of the backing list.
        """
        best = [_NIL, np.inf, np.iinfo(np.int64).max]  # node, dist2, stamp
        if self.root != _NIL:
            self._nearest(self.root, target, 0, best)
        return best[0]

    def _nearest(self, node: int, target: np.ndarray, depth: int, best) -> None:
        pt = self._pts[node]
        if not exact_equal(pt, target):
            d2 = dist_sq(target, pt)
            stamp = int(self._stamp[node])
            if d2 < best[1] or (d2 == best[1] and stamp < best[2]):
                best[0], best[1], best[2] = node, d2, stamp
        cd = depth % self.k
        diff = target[cd] - pt[cd]
        near, far = (self._left[node], self._right[node]) if diff < 0 else \
                    (self._right[node], self._left[node])
        if near != _NIL:
            self._nearest(near, target, depth + 1, best)
        if far != _NIL and diff * diff <= best[1]:
            self._nearest(far, target, depth + 1, best)

    # -- dominance --------------------------------------------------------

    def is_dominated(self, a: np.ndarray) -> bool:
        """True iff some stored point exceeds ``a`` weakly everywhere and
        strictly somewhere; stops at the first witness."""
        if self.root == _NIL:
            return False
        return self._dominated(self.root, a, 0)

    def _dominated(self, node: int, a: np.ndarray, depth: int) -> bool:
        pt = self._pts[node]
        if np.all(pt >= a) and not exact_equal(pt, a):
            return True
        cd = depth % self.k
        v = pt[cd]
        left, right = self._left[node], self._right[node]
        # The witness region is the upper box [a_k, +inf); prune on it.
        if left != _NIL and v >= a[cd] and self._dominated(left, a, depth + 1):
            return True
        if right != _NIL and self._dominated(right, a, depth + 1):
            return True
        return False

    # -- introspection -----------------------------------------------------

    def points(self) -> np.ndarray:
        idx = self._live_indices()
        return self._pts[idx].copy()

    def stamps(self) -> np.ndarray:
        return self._stamp[self._live_indices()].copy()

    def stamp_of(self, node: int) -> int:
        return int(self._stamp[node])

    def point_of(self, node: int) -> np.ndarray:
        return self._pts[node].copy()

    def _live_indices(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node == _NIL:
                continue
            out.append(node)
            stack.append(self._left[node])
            stack.append(self._right[node])
        return out

    def height(self) -> int:
        """Node levels on the longest root-to-leaf path (empty tree: 0)."""
        def rec(node):
            if node == _NIL:
                return 0
            return 1 + max(rec(self._left[node]), rec(self._right[node]))
        return rec(self.root)
