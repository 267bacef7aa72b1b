import itertools

import numpy as np
import pytest

from casemix.lp import FEAS_TOL, LinearProgram, LpInputError, lp, solve


def test_single_bound():
    sol = solve(lp("max", [1.0], [([1.0], "<=", 5.0)]))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(5.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(5.0, abs=1e-9)


def test_contradictory_bounds_infeasible():
    sol = solve(lp("max", [1.0], [([1.0], "<=", 5.0), ([1.0], ">=", 7.0)]))
    assert sol.status == "infeasible"
    assert sol.x is None


def test_one_resource_face():
    sol = solve(lp("max", [1.0, 1.0], [([2.0, 2.0], "<=", 100.0)]))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(50.0, abs=1e-9)


def test_min_problem():
    sol = solve(lp("min", [3.0, 2.0], [([1.0, 2.0], ">=", 8.0), ([3.0, 1.0], ">=", 6.0)]))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(9.6, rel=1e-9)


def test_unbounded():
    assert solve(lp("max", [1.0, 0.0], [([0.0, 1.0], "<=", 1.0)])).status == "unbounded"


def test_equality_constraints():
    sol = solve(lp("max", [1.0, 2.0], [([1.0, 1.0], "=", 10.0), ([1.0, 0.0], "<=", 4.0)]))
    assert sol.objective_value == pytest.approx(20.0, abs=1e-8)


def test_zero_variable_lp():
    sol = solve(lp("max", [], []))
    assert sol.status == "optimal"
    assert sol.objective_value == 0.0


def test_dimension_mismatch_is_input_error_not_infeasible():
    bad = LinearProgram(sense="max", objective=np.ones(2),
                        lhs=np.ones((1, 3)), relations=("<=",), rhs=np.ones(1))
    with pytest.raises(LpInputError):
        solve(bad)


def test_nonfinite_rhs_rejected():
    with pytest.raises(LpInputError):
        solve(lp("max", [1.0], [([1.0], "<=", np.inf)]))


def test_bad_relation_rejected():
    bad = LinearProgram(sense="max", objective=np.ones(1),
                        lhs=np.ones((1, 1)), relations=("<",), rhs=np.ones(1))
    with pytest.raises(LpInputError):
        solve(bad)


def test_negative_rhs_normalization():
    # -x1 <= -3  ->  x1 >= 3
    sol = solve(lp("min", [1.0], [([-1.0], "<=", -3.0)]))
    assert sol.objective_value == pytest.approx(3.0, abs=1e-9)


def _random_lp(rng, n, m):
    a = rng.uniform(-1.0, 1.0, size=(m, n))
    x0 = rng.uniform(0.0, 2.0, size=n)
    slack = rng.uniform(0.0, 1.0, size=m)
    b = a @ x0 + slack  # guarantees feasibility at x0
    c = rng.uniform(-1.0, 1.0, size=n)
    constraints = [(a[i], "<=", b[i]) for i in range(m)]
    return lp("max", c, constraints)


def _vertex_enumeration_max(problem):
    """Brute-force optimum over basic feasible points of A'x <= b', x >= 0."""
    n = problem.variable_count
    rows = [(-np.eye(n)[i], 0.0) for i in range(n)]  # -x_i <= 0
    for coeffs, rel, rhs in zip(problem.lhs, problem.relations, problem.rhs):
        if rel in ("<=", "="):
            rows.append((np.asarray(coeffs, dtype=float), float(rhs)))
        if rel in (">=", "="):
            rows.append((-np.asarray(coeffs, dtype=float), -float(rhs)))
    a = np.asarray([r for r, _ in rows])
    b = np.asarray([v for _, v in rows])
    best = None
    for subset in itertools.combinations(range(len(rows)), n):
        sub = a[list(subset)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, b[list(subset)])
        if np.all(a @ x <= b + 1e-8):
            value = float(problem.objective @ x)
            if best is None or value > best:
                best = value
    return best


def test_vertex_enumeration_oracle_agreement():
    rng = np.random.default_rng(1234)
    checked = 0
    for _ in range(25):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        problem = _random_lp(rng, n, m)
        sol = solve(problem)
        if sol.status != "optimal":
            continue
        oracle = _vertex_enumeration_max(problem)
        assert oracle is not None
        assert sol.objective_value == pytest.approx(oracle, abs=1e-6)
        checked += 1
    assert checked >= 10


def test_optimal_solutions_satisfy_constraints():
    rng = np.random.default_rng(99)
    optimal = 0
    for _ in range(40):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, 9))
        problem = _random_lp(rng, n, m)
        sol = solve(problem)
        assert sol.status in ("optimal", "unbounded")  # feasible by construction
        if sol.status == "optimal":
            assert np.all(problem.lhs @ sol.x <= problem.rhs + FEAS_TOL)
            assert np.all(sol.x >= -FEAS_TOL)
            optimal += 1
    assert optimal >= 15


def test_deterministic_resolve():
    rng = np.random.default_rng(7)
    for _ in range(10):
        problem = _random_lp(rng, 5, 5)
        first = solve(problem)
        second = solve(problem)
        assert first.status == second.status
        assert first.objective_value == second.objective_value  # bitwise
        assert np.array_equal(first.x, second.x)


def test_against_scipy_linprog():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(2024)
    statuses = {"optimal": 0, "infeasible": 2, "unbounded": 3}
    agreements = 0
    for trial in range(30):
        n = int(rng.integers(2, 8))
        m = int(rng.integers(1, 8))
        a = rng.uniform(-1.0, 1.0, size=(m, n))
        b = rng.uniform(-0.5, 2.0, size=m)
        c = rng.uniform(-1.0, 1.0, size=n)
        problem = lp("max", c, [(a[i], "<=", b[i]) for i in range(m)])
        mine = solve(problem)
        ref = scipy_opt.linprog(-c, A_ub=a, b_ub=b, bounds=[(0, None)] * n,
                                method="highs")
        assert ref.status == statuses[mine.status], f"trial {trial}"
        if mine.status == "optimal":
            assert mine.objective_value == pytest.approx(-ref.fun, abs=1e-7)
        agreements += 1
    assert agreements == 30


def test_degenerate_cycling_guard():
    # Beale's classic cycling example for Dantzig's rule.
    problem = lp(
        "min",
        [-0.75, 150.0, -0.02, 6.0],
        [
            ([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
            ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            ([0.0, 0.0, 1.0, 0.0], "<=", 1.0),
        ],
    )
    sol = solve(problem)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(-0.05, abs=1e-9)
