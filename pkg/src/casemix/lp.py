"""Dense linear-program solver.

Solves problems of the form

    optimize c.x  subject to  A x {<=, >=, =} b,  x >= 0

with a self-contained two-phase tableau simplex. The pivot rule is
deterministic (Dantzig with lowest-index tie breaking, falling back to
Bland's rule when the objective stalls), so repeated solves of the same
problem produce bitwise-identical answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

try:  # optional accelerator; the numpy path below is the reference
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is available in CI
    _njit = None

RELATIONS = ("<=", ">=", "=")

FEAS_TOL = 1e-7       # constraint satisfaction tolerance
OPT_TOL = 1e-9        # reduced-cost tolerance
_PIVOT_TOL = 1e-10    # smallest admissible pivot element
_STALL_LIMIT = 64     # degenerate pivots before switching to Bland's rule


class LpInputError(ValueError):
    """Malformed problem data (dimension mismatch, bad relation, non-finite rhs)."""


class LpRuntimeError(RuntimeError):
    """The solver failed to terminate (iteration cap exceeded)."""


@dataclass(frozen=True)
class LinearProgram:
    """optimize ``objective . x`` s.t. ``lhs x (relations) rhs``, ``x >= 0``."""

    sense: str                    # "max" | "min"
    objective: np.ndarray         # (n,)
    lhs: np.ndarray               # (m, n)
    relations: tuple[str, ...]    # each "<=", ">=" or "="
    rhs: np.ndarray               # (m,)

    @property
    def variable_count(self) -> int:
        return int(self.objective.shape[0])

    def validate(self) -> None:
        if self.sense not in ("max", "min"):
            raise LpInputError(f"unknown sense {self.sense!r}")
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.lhs, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if c.ndim != 1:
            raise LpInputError("objective must be a vector")
        n = c.shape[0]
        if a.ndim != 2 or a.shape != (len(self.relations), n):
            raise LpInputError(
                f"constraint matrix shape {a.shape} does not match "
                f"{len(self.relations)} relations x {n} variables"
            )
        if b.shape != (len(self.relations),):
            raise LpInputError("rhs length does not match constraint count")
        for rel in self.relations:
            if rel not in RELATIONS:
                raise LpInputError(f"unknown relation {rel!r}")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise LpInputError("coefficients and rhs must be finite")


def lp(sense, objective, constraints):
    """Convenience constructor from ``(coeffs, relation, rhs)`` triples."""
    objective = np.asarray(objective, dtype=float)
    n = objective.shape[0]
    if constraints:
        lhs = np.asarray([row for row, _, _ in constraints], dtype=float)
    else:
        lhs = np.zeros((0, n))
    relations = tuple(rel for _, rel, _ in constraints)
    rhs = np.asarray([r for _, _, r in constraints], dtype=float)
    return LinearProgram(sense=sense, objective=objective, lhs=lhs, relations=relations, rhs=rhs)


@dataclass(frozen=True)
class LpSolution:
    status: str                       # "optimal" | "infeasible" | "unbounded"
    objective_value: float | None = None
    x: np.ndarray | None = field(default=None)

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def solve(problem: LinearProgram, max_iterations: int = 100_000) -> LpSolution:
    """Solve ``problem``; returns an optimal basic solution or a status.

    Raises :class:`LpInputError` for malformed input (distinct from an
    infeasible but well-formed problem).
    """
    problem.validate()
    n = problem.variable_count
    m = len(problem.relations)

    if n == 0:
        # Degenerate: nothing to decide. Feasible iff every row's rhs
        # satisfies its relation against zero.
        b = np.asarray(problem.rhs, dtype=float)
        for rel, bi in zip(problem.relations, b):
            ok = (rel == "<=" and bi >= -FEAS_TOL) or \
                 (rel == ">=" and bi <= FEAS_TOL) or \
                 (rel == "=" and abs(bi) <= FEAS_TOL)
            if not ok:
                return LpSolution(status="infeasible")
        return LpSolution(status="optimal", objective_value=0.0, x=np.zeros(0))

    a = np.asarray(problem.lhs, dtype=float).copy()
    b = np.asarray(problem.rhs, dtype=float).copy()
    c = np.asarray(problem.objective, dtype=float)
    if problem.sense == "max":
        c = -c  # internally minimize

    relations = list(problem.relations)
    # Normalize to b >= 0 so artificial variables start feasible.
    for i in range(m):
        if b[i] < 0:
            a[i] = -a[i]
            b[i] = -b[i]
            relations[i] = {"<=": ">=", ">=": "<=", "=": "="}[relations[i]]

    n_slack = sum(1 for r in relations if r in ("<=", ">="))
    slack_of_row = {}
    art_rows = [i for i, r in enumerate(relations) if r in (">=", "=")]

    total = n + n_slack + len(art_rows)
    tab = np.zeros((m, total + 1))
    tab[:, :n] = a
    tab[:, -1] = b

    col = n
    for i, rel in enumerate(relations):
        if rel == "<=":
            tab[i, col] = 1.0
            slack_of_row[i] = col
            col += 1
        elif rel == ">=":
            tab[i, col] = -1.0
            slack_of_row[i] = col
            col += 1
    art_of_row = {}
    for i in art_rows:
        tab[i, col] = 1.0
        art_of_row[i] = col
        col += 1
    art_start = n + n_slack

    basis = np.empty(m, dtype=int)
    for i, rel in enumerate(relations):
        basis[i] = art_of_row[i] if i in art_of_row else slack_of_row[i]

    # The working tableau carries the objective as an extra bottom row that
    # pivots update in place, so reduced costs never need a fresh matvec.
    work = np.vstack([tab, np.zeros(total + 1)])
    scratch = _Scratch(work.shape)

    if art_rows:
        cost1 = np.zeros(total)
        cost1[art_start:] = 1.0
        work[-1, :total] = cost1
        work[-1] -= cost1[basis] @ work[:m]
        status = _iterate(work, basis, limit=total, max_iterations=max_iterations,
                          scratch=scratch)
        if status == "unbounded":  # pragma: no cover - phase 1 is bounded below by 0
            raise LpRuntimeError("phase 1 reported unbounded")
        phase1_obj = cost1[basis] @ work[:m, -1]
        if phase1_obj > 1e-7 * max(1.0, float(np.max(np.abs(b))) if m else 1.0):
            return LpSolution(status="infeasible")
        _drive_out_artificials(work, basis, art_start, scratch)

    cost2 = np.zeros(total)
    cost2[:n] = c
    work[-1, :] = 0.0
    work[-1, :total] = cost2
    work[-1] -= cost2[basis] @ work[:m]
    # Forbid artificial columns from re-entering in phase 2.
    status = _iterate(work, basis, limit=art_start, max_iterations=max_iterations,
                      scratch=scratch)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    x = np.zeros(total)
    x[basis] = work[:m, -1]
    primal = x[:n]
    value = float(problem.objective @ primal)
    return LpSolution(status="optimal", objective_value=value, x=primal)


def _iterate(work, basis, limit, max_iterations, scratch=None):
    """Run simplex pivots in place; only columns < ``limit`` may enter.

    ``work`` holds the constraint rows with the (phase-consistent) reduced
    cost row last.
    """
    if _kernel is not None:
        code = _kernel(work, basis, limit, max_iterations,
                       OPT_TOL, _PIVOT_TOL, _STALL_LIMIT)
        if code == 2:
            raise LpRuntimeError("simplex iteration cap exceeded")
        return "unbounded" if code == 1 else "optimal"
    m = work.shape[0] - 1
    if scratch is None:
        scratch = _Scratch(work.shape)
    stalled = 0
    bland = False
    obj = work[-1, -1]
    ratios = scratch.ratios
    for _ in range(max_iterations):
        reduced = work[-1, :limit]
        if bland:
            entering = -1
            neg = np.flatnonzero(reduced < -OPT_TOL)
            if neg.size:
                entering = int(neg[0])
        else:
            j = int(np.argmin(reduced))
            entering = j if reduced[j] < -OPT_TOL else -1
        if entering < 0:
            return "optimal"

        colvals = work[:m, entering]
        positive = colvals > _PIVOT_TOL
        if not positive.any():
            return "unbounded"
        ratios.fill(np.inf)
        np.divide(work[:m, -1], colvals, out=ratios, where=positive)
        best = np.min(ratios)
        ties = np.flatnonzero(ratios <= best + 1e-12)
        # Lowest basis index among tied rows keeps the rule deterministic
        # and discourages cycling.
        leaving = int(ties[np.argmin(basis[ties])])

        _pivot(work, leaving, entering, scratch)
        basis[leaving] = entering

        new_obj = work[-1, -1]
        if new_obj <= obj + 1e-12:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                bland = True
        else:
            stalled = 0
            bland = False
        obj = new_obj
    raise LpRuntimeError("simplex iteration cap exceeded")


class _Scratch:
    """Reusable buffers so pivots allocate nothing."""

    def __init__(self, shape):
        self.outer = np.empty(shape)
        self.factors = np.empty(shape[0])
        self.ratios = np.empty(shape[0] - 1)


def _pivot(tab, row, col, scratch):
    piv = tab[row, col]
    tab[row] /= piv
    factors = scratch.factors
    np.copyto(factors, tab[:, col])
    factors[row] = 0.0
    np.multiply(factors[:, None], tab[row][None, :], out=scratch.outer)
    tab -= scratch.outer
    tab[:, col] = 0.0
    tab[row, col] = 1.0


def _drive_out_artificials(work, basis, art_start, scratch=None):
    """Pivot basic artificial variables out (or detect redundant rows)."""
    if scratch is None:
        scratch = _Scratch(work.shape)
    for i in range(work.shape[0] - 1):
        if basis[i] >= art_start:
            row = work[i, :art_start]
            candidates = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
            if candidates.size:
                _pivot(work, i, int(candidates[0]), scratch)
                basis[i] = int(candidates[0])
            # else: redundant row, harmless to leave (rhs is ~0)


def _build_kernel():
    """Compile the pivot loop; semantics mirror the numpy `_iterate` path."""
    if _njit is None:
        return None

    @_njit(cache=True, fastmath=False)
    def kernel(work, basis, limit, max_iterations, opt_tol, pivot_tol, stall_limit):
        m = work.shape[0] - 1
        ncols = work.shape[1]
        rhs = ncols - 1
        stalled = 0
        bland = False
        obj = work[m, rhs]
        for _ in range(max_iterations):
            entering = -1
            if bland:
                for j in range(limit):
                    if work[m, j] < -opt_tol:
                        entering = j
                        break
            else:
                best_red = -opt_tol
                for j in range(limit):
                    v = work[m, j]
                    if v < best_red:
                        best_red = v
                        entering = j
            if entering < 0:
                return 0

            best = np.inf
            for i in range(m):
                a = work[i, entering]
                if a > pivot_tol:
                    r = work[i, rhs] / a
                    if r < best:
                        best = r
            if best == np.inf:
                return 1
            leaving = -1
            for i in range(m):
                a = work[i, entering]
                if a > pivot_tol and work[i, rhs] / a <= best + 1e-12:
                    if leaving < 0 or basis[i] < basis[leaving]:
                        leaving = i

            piv = work[leaving, entering]
            for jj in range(ncols):
                work[leaving, jj] /= piv
            for ii in range(m + 1):
                if ii == leaving:
                    continue
                f = work[ii, entering]
                if f != 0.0:
                    for jj in range(ncols):
                        work[ii, jj] -= f * work[leaving, jj]
                work[ii, entering] = 0.0
            work[leaving, entering] = 1.0
            basis[leaving] = entering

            new_obj = work[m, rhs]
            if new_obj <= obj + 1e-12:
                stalled += 1
                if stalled >= stall_limit:
                    bland = True
            else:
                stalled = 0
                bland = False
            obj = new_obj
        return 2

    return kernel


_kernel = _build_kernel()
