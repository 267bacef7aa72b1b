"""Command-line interface.

Subcommands: ``bounds``, ``generate``, ``query range``, ``query goal``,
``stats`` and ``serve``. Exit codes: 0 success, 1 usage error, 2 data
error, 3 solver/runtime error. Output for a fixed seed and fixed inputs
is byte-identical across runs (no timestamps or timings on stdout).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analytics, render
from . import __version__
from .archive import ArchiveError, NotFound
from .cam import (
    CamModel,
    ConfigurationError,
    InstanceError,
    SolverError,
    compute_lower_bounds,
    compute_upper_bounds,
)
from .generate import GenerationError, GeneratorConfig, prcecm01, prcecm02
from .geometry import Hypercube
from .lp import LpInputError, LpRuntimeError
from .persistence import (
    FormatError,
    ParseError,
    RunManifest,
    load_archive,
    load_instance,
    save_archive,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

DATA_ERRORS = (ParseError, FormatError, InstanceError, ArchiveError,
               NotFound, LpInputError, analytics.UndefinedStats, ValueError)
RUNTIME_ERRORS = (SolverError, ConfigurationError, LpRuntimeError, GenerationError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _vector(text: str) -> np.ndarray:
    try:
        return np.asarray([float(v) for v in text.split(",") if v != ""])
    except ValueError:
        raise ValueError(f"expected a comma-separated number list, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="casemix",
                description="Generate and query archives of Pareto-optimal "
                            "hospital case mixes.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="per-group output bounds of an instance")
    b.add_argument("instance", type=Path)
    b.add_argument("--upper-only", action="store_true",
                   help="skip the (slower) lexicographic lower-bound analysis")

    g = sub.add_parser("generate", help="generate a Pareto archive")
    g.add_argument("instance", type=Path)
    g.add_argument("--points", type=int, required=True, help="evaluation budget I")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--stage", type=int, default=100, help="points per thread per stage")
    g.add_argument("--proximity", type=float, default=0.0)
    g.add_argument("--alg", choices=["1", "2"], default="1")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    g.add_argument("--no-correction-upfront", action="store_true",
                   help="attempt the epsilon-constraint model before correcting")
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--report", type=Path, default=None)
    g.add_argument("--manifest", type=Path, default=None)

    q = sub.add_parser("query", help="interrogate an archive")
    qsub = q.add_subparsers(dest="query_kind", required=True)
    qr = qsub.add_parser("range", help="range query with extended outputs")
    qr.add_argument("archive", type=Path)
    qr.add_argument("--low", type=_vector, required=True)
    qr.add_argument("--high", type=_vector, required=True)
    qr.add_argument("--max-rows", type=int, default=100)
    qg = qsub.add_parser("goal", help="optimality check of a goal case mix")
    qg.add_argument("archive", type=Path)
    qg.add_argument("--point", type=_vector, required=True)
    qg.add_argument("--max-rows", type=int, default=100)

    s = sub.add_parser("stats", help="uniformity and spread tables")
    s.add_argument("archive", type=Path)
    s.add_argument("--normalized", action="store_true",
                   help="min-max scale each objective by the frontier box first")

    v = sub.add_parser("serve", help="start the HTTP service")
    v.add_argument("target", type=Path, help="archive or instance file")
    v.add_argument("--port", type=int, default=8080)
    v.add_argument("--host", default="127.0.0.1")
    return p


def cmd_bounds(args) -> int:
    instance, warnings = load_instance(args.instance)
    model = CamModel(instance)
    report = compute_upper_bounds(model)
    if not args.upper_only:
        report = compute_lower_bounds(model, report)
    report.warnings = warnings + report.warnings
    print(render.render_bounds(report, instance))
    return EXIT_OK


def cmd_generate(args) -> int:
    instance, warnings = load_instance(args.instance)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    config = GeneratorConfig(
        total_points=args.points, threads=args.threads, stage_size=args.stage,
        proximity=args.proximity, seed=args.seed, lam=args.lam,
        correction_upfront=not args.no_correction_upfront,
    )
    config.validate()
    runner = prcecm01 if args.alg == "1" else prcecm02
    started = RunManifest.now()

    def progress(stage, total, size):
        print(f"stage {stage}/{total}: archive {size} points", flush=True)

    archive, report = runner(instance, config, progress=progress)
    save_archive(archive, args.out)
    print(f"generated {report.generated} points in {report.stages_completed} stages "
          f"({report.evaluations} evaluations, "
          f"feasibility rate {100 * report.feasibility_rate:.2f}%)")
    print(f"archive written to {args.out}")
    if args.report is not None:
        Path(args.report).write_text(render.render_report(report) + "\n")
        print(f"report written to {args.report}")
    if args.manifest is not None:
        outputs = [str(args.out)] + ([str(args.report)] if args.report else [])
        RunManifest(
            instance_path=str(args.instance),
            config={"algorithm": report.algorithm, "points": config.total_points,
                    "threads": config.threads, "stage": config.stage_size,
                    "proximity": config.proximity, "seed": config.seed},
            outputs=outputs, started=started, finished=RunManifest.now(),
            tool_version=__version__,
        ).write(args.manifest)
        print(f"manifest written to {args.manifest}")
    return EXIT_OK


def cmd_query_range(args) -> int:
    archive = load_archive(args.archive)
    if args.low.shape != args.high.shape or args.low.shape[0] != archive.k:
        raise ArchiveError(
            f"bounds must each have {archive.k} values for this archive"
        )
    result = analytics.range_query_ext(archive, Hypercube(args.low, args.high))
    print(render.render_range_result(archive.labels, result, len(archive),
                                     max_rows=args.max_rows))
    return EXIT_OK


def cmd_query_goal(args) -> int:
    archive = load_archive(args.archive)
    verdict = analytics.check_optimality(archive, args.point)
    print(render.render_goal_result(archive.labels, verdict, max_rows=args.max_rows))
    return EXIT_OK


def cmd_stats(args) -> int:
    archive = load_archive(args.archive)
    pts = archive.points_array()
    if args.normalized:
        pts = analytics.normalize(pts, archive.bounds())
    gap = analytics.analyse_uniformity(pts, labels=archive.labels)
    spread = analytics.analyse_spread(pts, labels=archive.labels)
    print(render.render_stats(gap, spread))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(args.target)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "bounds": cmd_bounds,
        "generate": cmd_generate,
        "stats": cmd_stats,
        "serve": cmd_serve,
    }
    try:
        if args.command == "query":
            handler = cmd_query_range if args.query_kind == "range" else cmd_query_goal
        else:
            handler = handlers[args.command]
        return handler(args)
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
