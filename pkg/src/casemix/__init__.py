"""Pareto-archive engine for hospital case-mix capacity analysis."""

from .analytics import (
    GapStats,
    OptimalityVerdict,
    RangeQueryResult,
    SpreadStats,
    analyse_spread,
    analyse_uniformity,
    check_optimality,
    progress,
    range_query_ext,
    render_nested_ranges,
)
from .archive import Archive, ListArchive, find_non_dominated
from .cam import (
    Activity,
    BoundsReport,
    CamModel,
    CaseMix,
    Group,
    HospitalInstance,
    Resource,
    Subtype,
    build_cam,
    build_ecm_model,
    build_feasible_gridpoint_model,
    compute_bounds,
    compute_lower_bounds,
    compute_upper_bounds,
    evaluate_gridpoint,
)
from .generate import (
    GenerationReport,
    GeneratorConfig,
    no_close_neighbours,
    prcecm01,
    prcecm02,
    rcecm,
)
from .geometry import Hypercube
from .kdtree import KdTree
from .lp import LinearProgram, LpSolution, solve
from .persistence import (
    load_demo30,
    load_archive,
    load_case_study,
    load_instance,
    save_archive,
    save_instance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
