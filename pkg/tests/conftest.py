import numpy as np
import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of a run."""
    outcomes = [
        ("passed", "PASS"), ("xpassed", "PASS"),
        ("failed", "FAIL"), ("error", "FAIL"),
        ("xfailed", "FAIL (non-blocking)"),
    ]
    lines = []
    for key, label in outcomes:
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py" in rep.nodeid:
                lines.append((rep.nodeid.split("::")[-1], label))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"  {label:22s} {name}")

from casemix.cam import (
    Activity,
    CamModel,
    Group,
    HospitalInstance,
    Resource,
    Subtype,
    compute_upper_bounds,
)
from casemix.persistence import load_demo30, load_case_study

# The 30-point, 3-objective demonstration archive.
DEMO30 = [
    [25, 5, 87], [28, 74, 50], [65, 47, 14], [76, 45, 25], [79, 90, 8],
    [10, 66, 17], [100, 89, 82], [96, 15, 33], [49, 64, 52], [84, 30, 47],
    [97, 33, 9], [68, 26, 96], [68, 93, 76], [12, 95, 13], [98, 35, 42],
    [98, 33, 1], [61, 31, 25], [26, 66, 50], [58, 6, 75], [50, 61, 31],
    [9, 11, 33], [19, 54, 47], [11, 62, 2], [44, 89, 49], [27, 5, 41],
    [38, 81, 29], [80, 79, 78], [51, 28, 31], [46, 88, 4], [42, 62, 36],
]


@pytest.fixture
def demo30_points():
    return np.asarray(DEMO30, dtype=float)


@pytest.fixture
def demo30_archive():
    return load_demo30()


def make_toy_single():
    """One group, one activity at 2h on a 100h resource: max output 50."""
    return HospitalInstance(
        groups=[Group("A", [Subtype("only", [Activity("ward_stay", 2.0, ("R",))])], [1.0])],
        resources=[Resource("R", "other", 1, 100.0)],
        horizon_weeks=1.0,
    )


def make_toy_shared():
    """Two groups sharing one 50h resource at 1h each: frontier n1+n2=50."""
    def grp(name):
        return Group(name, [Subtype("only", [Activity("ward_stay", 1.0, ("R",))])], [1.0])
    return HospitalInstance(
        groups=[grp("A"), grp("B")],
        resources=[Resource("R", "other", 1, 50.0)],
        horizon_weeks=1.0,
    )


def make_toy_dedicated():
    """Two groups on disjoint resources: no trade-offs, lower = upper bound."""
    def grp(name, rid, hours):
        return Group(name, [Subtype("only", [Activity("ward_stay", 1.0, (rid,))])], [1.0])
    return HospitalInstance(
        groups=[grp("A", "R1", 50.0), grp("B", "R2", 30.0)],
        resources=[Resource("R1", "other", 1, 50.0), Resource("R2", "other", 1, 30.0)],
        horizon_weeks=1.0,
    )


@pytest.fixture
def toy_single():
    return make_toy_single()


@pytest.fixture
def toy_shared():
    return make_toy_shared()


@pytest.fixture
def toy_dedicated():
    return make_toy_dedicated()


@pytest.fixture(scope="session")
def case_study():
    instance, warnings = load_case_study()
    return instance


@pytest.fixture(scope="session")
def case_model(case_study):
    return CamModel(case_study)


@pytest.fixture(scope="session")
def case_upper_bounds(case_model):
    return compute_upper_bounds(case_model)
