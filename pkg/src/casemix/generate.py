"""Archive generation via random corrective epsilon-constraint search.

The serial generator draws random grid points inside the per-group
upper-bound box, corrects unreachable ones with the nearest-achievable
model, solves the augmented epsilon-constraint model at the (possibly
corrected) floors and stores the resulting efficient point unless it
duplicates or crowds an existing one.

Two stage-parallel drivers wrap it:

* ``prcecm01`` — workers fill private archives each stage, then a single
  sequential merge checks every candidate against the live master, so
  proximity screening is comprehensive.
* ``prcecm02`` — workers prune their own stage output against a frozen
  start-of-stage master snapshot and the master is rebuilt balanced from
  the union, trading comprehensive in-stage screening for speed.

Worker RNG streams derive from (seed, stage, worker), so a fixed
configuration reproduces the same archive bit for bit regardless of
thread scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .archive import Archive
from .cam import (
    DEFAULT_LAMBDA,
    BoundsReport,
    CamModel,
    HospitalInstance,
    compute_upper_bounds,
    evaluate_gridpoint,
)


class GenerationError(RuntimeError):
    """A generation run failed; any completed-stage archive is attached."""

    def __init__(self, message, archive: Archive | None = None):
        super().__init__(message)
        self.archive = archive


@dataclass
class GeneratorConfig:
    total_points: int                 # overall evaluation budget I
    threads: int = 1                  # worker count J
    stage_size: int = 100             # points per thread per stage S
    proximity: float = 0.0            # Euclidean crowding radius (raw units)
    seed: int = 0
    lam: float = DEFAULT_LAMBDA
    correction_upfront: bool = True
    objective_group: int = 0

    def validate(self) -> None:
        if self.total_points < 0:
            raise ValueError("total_points must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.stage_size < 1:
            raise ValueError("stage_size must be >= 1")
        if self.proximity < 0:
            raise ValueError("proximity must be >= 0")

    @property
    def max_stages(self) -> int:
        if self.total_points == 0:
            return 0
        return math.ceil(self.total_points / (self.threads * self.stage_size))


@dataclass
class StageStats:
    stage: int
    evaluated: int = 0
    feasible: int = 0
    inserted: int = 0
    rejected_duplicate: int = 0
    rejected_proximity: int = 0

    def absorb(self, other: "StageStats") -> None:
        self.evaluated += other.evaluated
        self.feasible += other.feasible
        self.inserted += other.inserted
        self.rejected_duplicate += other.rejected_duplicate
        self.rejected_proximity += other.rejected_proximity


@dataclass
class GenerationReport:
    algorithm: str
    config: GeneratorConfig
    generated: int = 0                # final archive size
    stages_completed: int = 0
    evaluations: int = 0
    feasible_evaluations: int = 0
    wall_time_s: float = 0.0
    stage_stats: list[StageStats] = field(default_factory=list)

    @property
    def feasibility_rate(self) -> float:
        if self.evaluations == 0:
            return 0.0
        return self.feasible_evaluations / self.evaluations


def no_close_neighbours(archive: Archive, point, proximity: float) -> bool:
    """True when no stored point lies within the closed ball of ``proximity``.

    A radius of zero disables crowding control (exact duplicates are the
    duplicate guard's business, not this one's).
    """
    if proximity <= 0:
        return True
    return archive.get_neighbours(point, proximity).shape[0] == 0


def rcecm(model: CamModel, bounds: BoundsReport, count: int, target: Archive,
          rng: np.random.Generator, proximity: float = 0.0,
          lam: float = DEFAULT_LAMBDA, correction_upfront: bool = True,
          objective_group: int = 0, stats: StageStats | None = None) -> StageStats:
    """Generate ``count`` efficient points into ``target`` (Algorithm-1 loop)."""
    stats = stats if stats is not None else StageStats(stage=0)
    k = model.k
    for _ in range(count):
        eps = rng.uniform(0.0, 1.0, size=k) * bounds.upper
        eps[objective_group] = 0.0
        case = evaluate_gridpoint(model, eps, bounds, g_star=objective_group,
                                  lam=lam, correction_upfront=correction_upfront)
        stats.evaluated += 1
        if case.raw_point_feasible:
            stats.feasible += 1
        point = case.n
        if target.is_in(point):
            stats.rejected_duplicate += 1
        elif not no_close_neighbours(target, point, proximity):
            stats.rejected_proximity += 1
        else:
            target.insert(point)
            stats.inserted += 1
    return stats


def _stage_plan(config: GeneratorConfig) -> list[list[int]]:
    """Per-stage, per-worker draw counts; totals exactly ``total_points``."""
    plan = []
    remaining = config.total_points
    for _ in range(config.max_stages):
        full = config.threads * config.stage_size
        stage_total = min(full, remaining)
        base, extra = divmod(stage_total, config.threads)
        counts = [base + (1 if j < extra else 0) for j in range(config.threads)]
        plan.append(counts)
        remaining -= stage_total
    return plan


def _provenance(algorithm: str, config: GeneratorConfig) -> dict:
    return {
        "algorithm": algorithm,
        "points": config.total_points,
        "threads": config.threads,
        "stage": config.stage_size,
        "proximity": config.proximity,
        "seed": config.seed,
    }


def _worker_rng(config: GeneratorConfig, stage: int, worker: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(stage, worker))
    )


def prcecm01(instance: HospitalInstance | CamModel, config: GeneratorConfig,
             bounds: BoundsReport | None = None, progress=None,
             snapshot=None) -> tuple[Archive, GenerationReport]:
    """Stage-parallel generation with a comprehensive sequential merge."""
    return _run_staged(instance, config, "prcecm01", bounds, progress, snapshot)


def prcecm02(instance: HospitalInstance | CamModel, config: GeneratorConfig,
             bounds: BoundsReport | None = None, progress=None,
             snapshot=None) -> tuple[Archive, GenerationReport]:
    """Stage-parallel generation with in-thread pruning against a frozen
    master snapshot and a balanced rebuild of the union each stage."""
    return _run_staged(instance, config, "prcecm02", bounds, progress, snapshot)


def _run_staged(instance, config, algorithm, bounds, progress, snapshot):
    config.validate()
    model = instance if isinstance(instance, CamModel) else CamModel(instance)
    if bounds is None:
        bounds = compute_upper_bounds(model)
    report = GenerationReport(algorithm=algorithm, config=config)
    master = Archive(model.k, labels=model.group_ids)
    master.provenance = _provenance(algorithm, config)
    started = time.perf_counter()

    def worker(stage_idx, worker_idx, count):
        private = Archive(model.k, labels=model.group_ids)
        stats = StageStats(stage=stage_idx + 1)
        rng = _worker_rng(config, stage_idx, worker_idx)
        rcecm(model, bounds, count, private, rng,
              proximity=config.proximity, lam=config.lam,
              correction_upfront=config.correction_upfront,
              objective_group=config.objective_group, stats=stats)
        if algorithm == "prcecm02":
            kept = []
            for pt in private.points_array():
                if frozen.is_in(pt):
                    stats.inserted -= 1
                    stats.rejected_duplicate += 1
                elif not no_close_neighbours(frozen, pt, config.proximity):
                    stats.inserted -= 1
                    stats.rejected_proximity += 1
                else:
                    kept.append(pt)
            return kept, stats
        return private.points_array(), stats

    plan = _stage_plan(config)
    try:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for stage_idx, counts in enumerate(plan):
                frozen = master  # read-only within the stage
                futures = [pool.submit(worker, stage_idx, j, counts[j])
                           for j in range(config.threads)]
                stage = StageStats(stage=stage_idx + 1)
                batches = []
                for fut in futures:  # worker order, not completion order
                    points, stats = fut.result()
                    batches.append(points)
                    stage.absorb(stats)
                if algorithm == "prcecm01":
                    for points in batches:
                        for pt in points:
                            if master.is_in(pt):
                                stage.inserted -= 1
                                stage.rejected_duplicate += 1
                            elif not no_close_neighbours(master, pt, config.proximity):
                                stage.inserted -= 1
                                stage.rejected_proximity += 1
                            else:
                                master.insert(pt)
                    master.rebuild()
                else:
                    merged = [master.points_array()] + [
                        np.asarray(b).reshape(-1, model.k) for b in batches
                    ]
                    rebuilt = Archive.make(np.vstack(merged), k=model.k,
                                           labels=model.group_ids)
                    rebuilt.provenance = master.provenance
                    master = rebuilt
                report.stage_stats.append(stage)
                report.stages_completed = stage_idx + 1
                report.evaluations += stage.evaluated
                report.feasible_evaluations += stage.feasible
                if progress is not None:
                    progress(stage_idx + 1, len(plan), len(master))
                if snapshot is not None:
                    snapshot(master.copy())
    except Exception as exc:
        report.generated = len(master)
        report.wall_time_s = time.perf_counter() - started
        raise GenerationError(f"{algorithm} aborted: {exc}", archive=master) from exc

    report.generated = len(master)
    report.wall_time_s = time.perf_counter() - started
    return master, report
