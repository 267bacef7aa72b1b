"""HTTP facade over generation and analytics.

The service owns one session: an optional hospital instance (enables
generation) and the archive being queried. While a generation job runs,
read endpoints serve the snapshot published at the last completed stage,
never a mid-merge state. Every successful response carries the frontier
box so clients can calibrate sliders, and query responses embed the same
rendered text block the CLI prints for identical inputs.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import analytics, render
from .archive import Archive
from .cam import CamModel, HospitalInstance
from .generate import GenerationError, GeneratorConfig, prcecm01, prcecm02
from .geometry import Hypercube
from .persistence import FormatError, load_archive, load_instance

HISTOGRAM_BINS = 20
DEFAULT_PAGE_SIZE = 100


class SessionState:
    """At most one generation job mutates the session at a time."""

    def __init__(self, instance: HospitalInstance | None = None,
                 archive: Archive | None = None):
        self.instance = instance
        self.model: CamModel | None = CamModel(instance) if instance else None
        self.archive = archive
        self.job: dict | None = None
        self.job_counter = 0
        self.lock = threading.Lock()


class RangeQueryBody(BaseModel):
    low: list[float]
    high: list[float]
    page: int = Field(default=1, ge=1)
    page_size: int = Field(default=DEFAULT_PAGE_SIZE, ge=1, le=10_000)


class GoalBody(BaseModel):
    point: list[float]


class GenerateBody(BaseModel):
    points: int = Field(ge=1)
    threads: int = Field(default=1, ge=1)
    stage: int = Field(default=100, ge=1)
    proximity: float = Field(default=0.0, ge=0.0)
    seed: int = 0
    alg: int = Field(default=1, ge=1, le=2)
    lam: float = 1e-3
    correction_upfront: bool = True


def _load_target(target: Path) -> SessionState:
    target = Path(target)
    try:
        return SessionState(archive=load_archive(target))
    except FormatError:
        instance, _ = load_instance(target)
        return SessionState(instance=instance)


def build_app(target: Path | None = None, state: SessionState | None = None) -> FastAPI:
    if state is None:
        if target is None:
            raise ValueError("build_app needs a target file or a prepared state")
        state = _load_target(target)

    app = FastAPI(title="casemix service", version="1")
    app.state.session = state
    origins = os.environ.get("CASEMIX_UI_ORIGIN", "*")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[o.strip() for o in origins.split(",")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def current_archive() -> Archive:
        archive = state.archive
        if archive is None or len(archive) == 0:
            raise HTTPException(status_code=404, detail="no archive loaded or generated yet")
        return archive

    def frontier_payload(archive: Archive) -> dict:
        bounds = archive.bounds()
        return {
            "k": archive.k,
            "size": len(archive),
            "labels": archive.labels,
            "frontier": bounds.intervals(),
            "ideal": bounds.ub.tolist(),
            "nadir": bounds.lb.tolist(),
        }

    def check_dimension(values: list[float], archive: Archive, name: str):
        if len(values) != archive.k:
            raise HTTPException(
                status_code=422,
                detail=f"{name} has {len(values)} values, archive has {archive.k} objectives",
            )

    @app.get("/frontier/bounds")
    def frontier_bounds():
        archive = current_archive()
        payload = frontier_payload(archive)
        spread = analytics.analyse_spread(archive)
        payload["spread"] = [
            {"label": lbl, "mean": float(m), "q1": float(a), "q2": float(b), "q3": float(c)}
            for lbl, m, a, b, c in zip(spread.labels, spread.mean,
                                       spread.q1, spread.q2, spread.q3)
        ]
        payload["histograms"] = analytics.histogram(archive, bins=HISTOGRAM_BINS)
        return payload

    @app.get("/frontier/point/{index}")
    def frontier_point(index: int):
        archive = current_archive()
        if not 0 <= index < len(archive):
            raise HTTPException(status_code=404,
                                detail=f"point index {index} outside 0..{len(archive) - 1}")
        payload = frontier_payload(archive)
        point = archive.point(index)
        payload["index"] = index
        payload["point"] = point.tolist()
        payload["progress"] = analytics.progress(archive, point)
        return payload

    @app.get("/frontier/uniformity")
    def frontier_uniformity():
        archive = current_archive()
        payload = frontier_payload(archive)
        try:
            gap = analytics.analyse_uniformity(archive)
        except analytics.UndefinedStats as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        payload["uniformity"] = [
            {"label": lbl, "mean_gap": float(m), "std_gap": float(s),
             "cv": None if c is None else float(c), "max_gap": float(x)}
            for lbl, m, s, c, x in zip(gap.labels, gap.mean, gap.std, gap.cv, gap.max_gap)
        ]
        return payload

    @app.post("/query/range")
    def query_range(body: RangeQueryBody):
        archive = current_archive()
        check_dimension(body.low, archive, "low")
        check_dimension(body.high, archive, "high")
        try:
            requested = Hypercube(body.low, body.high)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        result = analytics.range_query_ext(archive, requested)
        payload = frontier_payload(archive)
        start = (body.page - 1) * body.page_size
        page = result.candidates[start:start + body.page_size]
        payload.update({
            "requested": result.requested.intervals(),
            "clamped": result.clamped,
            "achievable": result.achievable.intervals() if result.achievable else None,
            "count": result.count,
            "coverage_percent": result.coverage_percent,
            "best": result.best.tolist() if result.best is not None else None,
            "best_progress": result.best_progress,
            "page": body.page,
            "page_size": body.page_size,
            "candidates": page.tolist(),
            "candidate_indices": result.candidate_indices[start:start + body.page_size],
            "nested_ranges": analytics.render_nested_ranges(
                result.frontier, result.requested, result.achievable).splitlines(),
            "text": render.render_range_result(archive.labels, result, len(archive)),
        })
        return payload

    @app.post("/query/goal")
    def query_goal(body: GoalBody):
        archive = current_archive()
        check_dimension(body.point, archive, "point")
        verdict = analytics.check_optimality(archive, body.point)
        payload = frontier_payload(archive)
        alternatives = verdict.alternatives
        summary = None
        if alternatives.shape[0]:
            spread = analytics.analyse_spread(alternatives, labels=archive.labels)
            summary = {
                "histograms": analytics.histogram(alternatives, bins=HISTOGRAM_BINS,
                                                  labels=archive.labels),
                "spread": [
                    {"label": lbl, "mean": float(m), "q1": float(a),
                     "q2": float(b), "q3": float(c)}
                    for lbl, m, a, b, c in zip(spread.labels, spread.mean,
                                               spread.q1, spread.q2, spread.q3)
                ],
            }
        payload.update({
            "goal": verdict.goal.tolist(),
            "dominated": verdict.dominated,
            "status": verdict.status,
            "alternatives_total": verdict.alternatives_total,
            "alternatives": alternatives[:DEFAULT_PAGE_SIZE].tolist(),
            "alternatives_summary": summary,
            "closest": verdict.closest.tolist() if verdict.closest is not None else None,
            "change": verdict.change.tolist() if verdict.change is not None else None,
            "text": render.render_goal_result(archive.labels, verdict),
        })
        return payload

    @app.post("/generate")
    def start_generation(body: GenerateBody):
        if state.model is None:
            raise HTTPException(status_code=409,
                                detail="service was started without a hospital instance")
        with state.lock:
            if state.job is not None and state.job["status"] == "running":
                raise HTTPException(status_code=409, detail="a generation job is already running")
            state.job_counter += 1
            job_id = f"job-{state.job_counter}"
            config = GeneratorConfig(
                total_points=body.points, threads=body.threads, stage_size=body.stage,
                proximity=body.proximity, seed=body.seed, lam=body.lam,
                correction_upfront=body.correction_upfront,
            )
            job = {"id": job_id, "status": "running", "stage": 0,
                   "total_stages": config.max_stages, "points": 0, "error": None}
            state.job = job

        def on_progress(stage, total, size):
            job["stage"] = stage
            job["points"] = size

        def on_snapshot(snapshot):
            state.archive = snapshot

        def run():
            runner = prcecm01 if body.alg == 1 else prcecm02
            try:
                archive, _ = runner(state.model, config,
                                    progress=on_progress, snapshot=on_snapshot)
                state.archive = archive
                job["status"] = "done"
            except GenerationError as exc:
                if exc.archive is not None and len(exc.archive):
                    state.archive = exc.archive
                job["status"] = "failed"
                job["error"] = str(exc)

        thread = threading.Thread(target=run, name=job_id, daemon=True)
        job["thread"] = thread
        thread.start()
        return {"job_id": job_id, "total_stages": config.max_stages}

    @app.get("/generate/{job_id}/progress")
    def generation_progress(job_id: str):
        job = state.job
        if job is None or job["id"] != job_id:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return {"job_id": job_id, "status": job["status"], "stage": job["stage"],
                "total_stages": job["total_stages"], "points": job["points"],
                "error": job["error"]}

    return app
