"""Capacity allocation model and its epsilon-constraint variants.

The hospital instance describes patient groups, their subtypes and
activities, and the resources those activities may consume. From it we
assemble dense LPs:

* the core allocation model linking patient counts, subtype mixes and
  resource-time budgets;
* per-group maximal-output models (upper bounds) and the lexicographic
  lower-bound analysis;
* the augmented epsilon-constraint model that pins floors on all but one
  group's output while rewarding surplus above those floors;
* the grid-point correction model that pulls an unreachable target back
  to the nearest achievable point (L1, dominated by the target).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .lp import LinearProgram, LpSolution
from .lp import solve as _simplex_solve

# Seam for substituting an external LP solver: any callable with the
# signature ``(LinearProgram) -> LpSolution`` may be assigned here.
solver = _simplex_solve

log = logging.getLogger("casemix.cam")

RESOURCE_KINDS = ("operating_room", "ward", "icu", "other")

MIX_TOL = 1e-6
DEFAULT_LAMBDA = 1e-3
FEAS_OBJ_TOL = 1e-6


class InstanceError(ValueError):
    """Invalid hospital instance data."""


class ConfigurationError(ValueError):
    """Structurally valid instance with nonsensical capacity behaviour."""


class SolverError(RuntimeError):
    """An LP that should have solved did not."""


@dataclass
class Resource:
    id: str
    kind: str = "other"
    beds: int = 1
    weekly_hours: float = 168.0

    def capacity(self, horizon_weeks: float) -> float:
        return self.beds * self.weekly_hours * horizon_weeks


@dataclass
class Activity:
    id: str
    hours: float
    resources: tuple[str, ...]


@dataclass
class Subtype:
    id: str
    activities: list[Activity] = field(default_factory=list)


@dataclass
class Group:
    id: str
    subtypes: list[Subtype] = field(default_factory=list)
    mix: list[float] = field(default_factory=list)
    published_ub: float | None = None


@dataclass
class HospitalInstance:
    groups: list[Group]
    resources: list[Resource]
    horizon_weeks: float = 52.0

    def validate(self) -> list[str]:
        """Check structure, renormalize off-sum mixes; returns warnings."""
        warnings: list[str] = []
        if self.horizon_weeks <= 0:
            raise InstanceError("horizon must be positive (weeks)")
        seen = set()
        for r in self.resources:
            if r.id in seen:
                raise InstanceError(f"duplicate resource id {r.id!r}")
            seen.add(r.id)
            if r.kind not in RESOURCE_KINDS:
                raise InstanceError(f"resource {r.id!r}: unknown kind {r.kind!r}")
            if r.beds < 1:
                raise InstanceError(f"resource {r.id!r}: bed count must be positive")
            if r.weekly_hours < 0:
                raise InstanceError(f"resource {r.id!r}: negative weekly hours")
        resource_ids = seen
        gseen = set()
        if not self.groups:
            raise InstanceError("instance has no patient groups")
        for g in self.groups:
            if g.id in gseen:
                raise InstanceError(f"duplicate group id {g.id!r}")
            gseen.add(g.id)
            if not g.subtypes:
                raise InstanceError(f"group {g.id!r} has no subtypes")
            if len(g.mix) != len(g.subtypes):
                raise InstanceError(f"group {g.id!r}: mix length != subtype count")
            if any(m < 0 for m in g.mix):
                raise InstanceError(f"group {g.id!r}: negative mix weight")
            total = sum(g.mix)
            if total <= 0:
                raise InstanceError(f"group {g.id!r}: mix sums to zero")
            if abs(total - 1.0) > MIX_TOL:
                g.mix = [m / total for m in g.mix]
                # Plain percentages (sum 100) are a sanctioned convention;
                # only an internally inconsistent sum deserves a warning.
                if abs(total - 100.0) > 100.0 * MIX_TOL:
                    warnings.append(
                        f"group {g.id}: subtype mix summed to {total:.6g}, renormalized"
                    )
                    log.warning(warnings[-1])
            for p in g.subtypes:
                if not p.activities:
                    raise InstanceError(f"group {g.id!r} subtype {p.id!r} has no activities")
                for a in p.activities:
                    if a.hours < 0:
                        raise InstanceError(f"activity {a.id!r}: negative duration")
                    if not a.resources:
                        raise InstanceError(
                            f"activity {a.id!r} of {g.id}/{p.id} has an empty eligible-resource set"
                        )
                    for rid in a.resources:
                        if rid not in resource_ids:
                            raise InstanceError(
                                f"activity {a.id!r} of {g.id}/{p.id} references unknown resource {rid!r}"
                            )
        return warnings

    @property
    def group_ids(self) -> list[str]:
        return [g.id for g in self.groups]


@dataclass
class CaseMix:
    """A point in objective space plus the allocation detail behind it."""

    group_ids: list[str]
    n: np.ndarray                                   # per-group output
    n_subtype: dict[tuple[str, str], float]
    beta: dict[tuple[str, str, str, str], float]    # (group, subtype, activity, resource)
    raw_point_feasible: bool | None = None

    @property
    def total(self) -> float:
        return float(self.n.sum())


@dataclass
class BoundsReport:
    group_ids: list[str]
    upper: np.ndarray
    lower: np.ndarray
    warnings: list[str] = field(default_factory=list)


class CamModel:
    """Compiled constraint skeleton of an instance, reused across solves."""

    def __init__(self, instance: HospitalInstance):
        instance.validate()
        self.instance = instance
        self.group_ids = instance.group_ids
        self.k = len(self.group_ids)

        self.var_names: list[str] = []
        self.n_index: dict[str, int] = {}
        self.np_index: dict[tuple[str, str], int] = {}
        self.beta_index: dict[tuple[str, str, str, str], int] = {}

        for g in instance.groups:
            self.n_index[g.id] = self._new_var(f"n[{g.id}]")
        for g in instance.groups:
            for p in g.subtypes:
                self.np_index[(g.id, p.id)] = self._new_var(f"n[{g.id},{p.id}]")
        for g in instance.groups:
            for p in g.subtypes:
                for a in p.activities:
                    for rid in a.resources:
                        self.beta_index[(g.id, p.id, a.id, rid)] = \
                            self._new_var(f"beta[{g.id},{p.id},{a.id},{rid}]")

        self.n_vars = len(self.var_names)
        rows: list[np.ndarray] = []
        relations: list[str] = []
        rhs: list[float] = []

        def add(row, rel, b):
            rows.append(row)
            relations.append(rel)
            rhs.append(b)

        # output bookkeeping: n_g - sum_p n_{g,p} = 0
        for g in instance.groups:
            row = np.zeros(self.n_vars)
            row[self.n_index[g.id]] = 1.0
            for p in g.subtypes:
                row[self.np_index[(g.id, p.id)]] = -1.0
            add(row, "=", 0.0)

        # each activity treats every patient of its subtype: n_{g,p} = sum_r beta
        for g in instance.groups:
            for p in g.subtypes:
                for a in p.activities:
                    row = np.zeros(self.n_vars)
                    row[self.np_index[(g.id, p.id)]] = 1.0
                    for rid in a.resources:
                        row[self.beta_index[(g.id, p.id, a.id, rid)]] = -1.0
                    add(row, "=", 0.0)

        # resource-time budgets
        acts_on_resource: dict[str, list[tuple[float, int]]] = {r.id: [] for r in instance.resources}
        for (g, p, a, rid), col in self.beta_index.items():
            hours = self._activity_hours(g, p, a)
            acts_on_resource[rid].append((hours, col))
        for r in instance.resources:
            entries = acts_on_resource[r.id]
            if not entries:
                continue
            row = np.zeros(self.n_vars)
            for hours, col in entries:
                row[col] += hours
            add(row, "<=", r.capacity(instance.horizon_weeks))

        # subtype mix floors: mu * n_g - n_{g,p} <= 0
        for g in instance.groups:
            for p, mu in zip(g.subtypes, g.mix):
                row = np.zeros(self.n_vars)
                row[self.n_index[g.id]] = mu
                row[self.np_index[(g.id, p.id)]] = -1.0
                add(row, "<=", 0.0)

        self._base_lhs = np.asarray(rows) if rows else np.zeros((0, self.n_vars))
        self._base_relations = tuple(relations)
        self._base_rhs = np.asarray(rhs, dtype=float)

    def _new_var(self, name: str) -> int:
        self.var_names.append(name)
        return len(self.var_names) - 1

    def _activity_hours(self, gid: str, pid: str, aid: str) -> float:
        for g in self.instance.groups:
            if g.id != gid:
                continue
            for p in g.subtypes:
                if p.id != pid:
                    continue
                for a in p.activities:
                    if a.id == aid:
                        return a.hours
        raise KeyError((gid, pid, aid))  # pragma: no cover

    # -- model assembly ------------------------------------------------------

    def base_lp(self) -> LinearProgram:
        """Core constraints with a zero objective (no optimization goal set)."""
        return self._assemble(np.zeros(self.n_vars), [], sense="max")

    def _assemble(self, objective, extra_rows, sense="max") -> LinearProgram:
        if extra_rows:
            lhs = np.vstack([self._base_lhs] + [row for row, _, _ in extra_rows])
            relations = self._base_relations + tuple(rel for _, rel, _ in extra_rows)
            rhs = np.concatenate([self._base_rhs, [b for _, _, b in extra_rows]])
        else:
            lhs, relations, rhs = self._base_lhs, self._base_relations, self._base_rhs
        return LinearProgram(sense=sense, objective=np.asarray(objective, dtype=float),
                             lhs=lhs, relations=relations, rhs=rhs)

    def single_group_lp(self, gid: str) -> LinearProgram:
        """Maximize one group's output with every other group forced to zero."""
        obj = np.zeros(self.n_vars)
        obj[self.n_index[gid]] = 1.0
        extra = []
        for other in self.group_ids:
            if other == gid:
                continue
            row = np.zeros(self.n_vars)
            row[self.n_index[other]] = 1.0
            extra.append((row, "<=", 0.0))
        return self._assemble(obj, extra)

    def conditional_max_lp(self, gid: str, fixed_gid: str, fixed_level: float) -> LinearProgram:
        """Maximize ``gid`` subject to ``fixed_gid`` held at its own maximum."""
        obj = np.zeros(self.n_vars)
        obj[self.n_index[gid]] = 1.0
        row = np.zeros(self.n_vars)
        row[self.n_index[fixed_gid]] = 1.0
        return self._assemble(obj, [(row, ">=", fixed_level)])

    def ecm_lp(self, eps: np.ndarray, g_star: int, lam: float,
               upper_bounds: np.ndarray) -> LinearProgram:
        """Augmented epsilon-constraint model.

        Objective: n_{g*} + lam * sum_{g != g*} n_g / ub_g (the -eps part of
        the surplus term is constant and dropped); constraints n_g >= eps_g
        for every g != g*.
        """
        if not 0 <= g_star < self.k:
            raise InstanceError(f"objective group index {g_star} out of range")
        eps = np.asarray(eps, dtype=float)
        if eps.shape != (self.k,):
            raise InstanceError("epsilon vector length must equal group count")
        obj = np.zeros(self.n_vars)
        extra = []
        for i, gid in enumerate(self.group_ids):
            col = self.n_index[gid]
            if i == g_star:
                obj[col] = 1.0
                continue
            if upper_bounds[i] > 0:
                obj[col] = lam / upper_bounds[i]
            row = np.zeros(self.n_vars)
            row[col] = 1.0
            extra.append((row, ">=", float(eps[i])))
        return self._assemble(obj, extra)

    def correction_lp(self, eps: np.ndarray) -> LinearProgram:
        """Nearest achievable point dominated by ``eps``: max sum(n) s.t. n <= eps.

        The solve's L1 gap to ``eps`` is ``sum(eps) - objective_value``; it is
        zero exactly when ``eps`` itself is achievable.
        """
        eps = np.asarray(eps, dtype=float)
        if eps.shape != (self.k,):
            raise InstanceError("epsilon vector length must equal group count")
        obj = np.zeros(self.n_vars)
        extra = []
        for i, gid in enumerate(self.group_ids):
            col = self.n_index[gid]
            obj[col] = 1.0
            row = np.zeros(self.n_vars)
            row[col] = 1.0
            extra.append((row, "<=", float(eps[i])))
        return self._assemble(obj, extra)

    # -- solution handling -----------------------------------------------------

    def extract(self, sol: LpSolution, raw_point_feasible=None) -> CaseMix:
        # Simplex output can dip a hair below zero (within feasibility
        # tolerance); case-mix quantities are nonnegative by definition.
        x = np.maximum(sol.x, 0.0)
        n = np.array([x[self.n_index[g]] for g in self.group_ids])
        n_subtype = {key: float(x[col]) for key, col in self.np_index.items()}
        beta = {key: float(x[col]) for key, col in self.beta_index.items()}
        return CaseMix(group_ids=list(self.group_ids), n=n, n_subtype=n_subtype,
                       beta=beta, raw_point_feasible=raw_point_feasible)

    def residuals(self, cm: CaseMix) -> dict[str, float]:
        """Worst violation of each constraint family for a case mix."""
        inst = self.instance
        link = 0.0
        eq2 = 0.0
        mix = 0.0
        cap = 0.0
        nonneg = -min(0.0, float(cm.n.min()), min(cm.n_subtype.values(), default=0.0),
                      min(cm.beta.values(), default=0.0))
        for i, g in enumerate(inst.groups):
            subtotal = sum(cm.n_subtype[(g.id, p.id)] for p in g.subtypes)
            link = max(link, abs(cm.n[i] - subtotal))
            for p, mu in zip(g.subtypes, g.mix):
                mix = max(mix, mu * cm.n[i] - cm.n_subtype[(g.id, p.id)])
                for a in p.activities:
                    allocated = sum(cm.beta[(g.id, p.id, a.id, rid)] for rid in a.resources)
                    eq2 = max(eq2, abs(cm.n_subtype[(g.id, p.id)] - allocated))
        for r in inst.resources:
            used = 0.0
            for (g, p, a, rid), val in cm.beta.items():
                if rid == r.id:
                    used += val * self._activity_hours(g, p, a)
            cap = max(cap, used - r.capacity(inst.horizon_weeks))
        return {"link": link, "activity": eq2, "mix": mix, "capacity": cap, "nonneg": nonneg}


def build_cam(instance: HospitalInstance) -> CamModel:
    return CamModel(instance)


def compute_upper_bounds(model: CamModel | HospitalInstance) -> BoundsReport:
    """Per-group maximal outputs (one LP solve per group)."""
    model = _as_model(model)
    upper = np.zeros(model.k)
    warnings: list[str] = []
    for i, gid in enumerate(model.group_ids):
        sol = solver(model.single_group_lp(gid))
        if sol.status == "unbounded":
            raise ConfigurationError(
                f"group {gid}: unbounded single-group output "
                "(some activity consumes no capacitated resource time)"
            )
        if sol.status == "infeasible":
            warnings.append(f"group {gid}: single-group model infeasible, upper bound set to 0")
            log.warning(warnings[-1])
            upper[i] = 0.0
        else:
            upper[i] = max(0.0, float(sol.objective_value))
    return BoundsReport(group_ids=list(model.group_ids), upper=upper,
                        lower=np.zeros(model.k), warnings=warnings)


def compute_lower_bounds(model: CamModel | HospitalInstance, report: BoundsReport) -> BoundsReport:
    """Lexicographic lower bounds: worst own maximum over rivals at their peak."""
    model = _as_model(model)
    lower = report.upper.copy()
    for i, gid in enumerate(model.group_ids):
        for j, other in enumerate(model.group_ids):
            if i == j:
                continue
            sol = solver(model.conditional_max_lp(gid, other, float(report.upper[j])))
            val = float(sol.objective_value) if sol.is_optimal else 0.0
            lower[i] = min(lower[i], val)
    lower = np.clip(lower, 0.0, report.upper)
    return BoundsReport(group_ids=report.group_ids, upper=report.upper,
                        lower=lower, warnings=list(report.warnings))


def compute_bounds(model: CamModel | HospitalInstance) -> BoundsReport:
    model = _as_model(model)
    return compute_lower_bounds(model, compute_upper_bounds(model))


def build_ecm_model(instance, eps, g_star: int = 0, lam: float = DEFAULT_LAMBDA,
                    bounds: BoundsReport | None = None) -> LinearProgram:
    model = _as_model(instance)
    if bounds is None:
        bounds = compute_upper_bounds(model)
    return model.ecm_lp(np.asarray(eps, dtype=float), g_star, lam, bounds.upper)


def build_feasible_gridpoint_model(instance, eps) -> LinearProgram:
    return _as_model(instance).correction_lp(np.asarray(eps, dtype=float))


def evaluate_gridpoint(model: CamModel | HospitalInstance, eps, bounds: BoundsReport,
                       g_star: int = 0, lam: float = DEFAULT_LAMBDA,
                       correction_upfront: bool = True) -> CaseMix:
    """Turn a grid point into an efficient case mix.

    Either attempt the epsilon-constraint model first and fall back to the
    correction model on infeasibility, or (default) run the correction model
    up front, reset the floors to the corrected point and solve the
    epsilon-constraint model once.
    """
    model = _as_model(model)
    eps = np.asarray(eps, dtype=float).copy()
    eps[g_star] = 0.0
    raw_feasible: bool | None = None

    if not correction_upfront:
        sol = solver(model.ecm_lp(eps, g_star, lam, bounds.upper))
        if sol.is_optimal:
            return model.extract(sol, raw_point_feasible=True)
        if sol.status == "unbounded":
            raise SolverError("epsilon-constraint model unbounded; check instance capacities")
        raw_feasible = False

    corr = solver(model.correction_lp(eps))
    if not corr.is_optimal:
        raise SolverError(f"correction model unexpectedly {corr.status}")
    if raw_feasible is None:
        gap = float(eps.sum()) - float(corr.objective_value)
        raw_feasible = gap <= FEAS_OBJ_TOL * max(1.0, float(eps.sum()))
    corrected = model.extract(corr)
    eps = corrected.n.copy()
    eps[g_star] = 0.0

    sol = solver(model.ecm_lp(eps, g_star, lam, bounds.upper))
    if not sol.is_optimal:
        raise SolverError(f"epsilon-constraint model {sol.status} at a corrected grid point")
    return model.extract(sol, raw_point_feasible=raw_feasible)


def _as_model(obj) -> CamModel:
    return obj if isinstance(obj, CamModel) else CamModel(obj)
