import gzip
import itertools
import math

import numpy as np
import pulp
import pytest
import scipy.sparse
from hypothesis import given, settings
from hypothesis import strategies as st

from hyplan.configuration import SolverOptions
from hyplan.hyplan_exception import SolverSizeError
from hyplan.logger import SolveLog
from hyplan.solve.linear_program import LinearProgram, RowKey
from hyplan.solve.solver import SolveStatus, geometric_scaling, solve


def make_knapsack():
    lp = LinearProgram("knapsack")
    a = lp.add_variable("a", integer=True)
    b = lp.add_variable("b", integer=True)
    lp.add_constraint(6 * a + 4 * b <= 24, RowKey("weight"))
    lp.add_constraint(a + 2 * b <= 6, RowKey("volume"))
    lp.set_objective(-5 * a - 4 * b)
    return lp


def test_simple_lp_and_dual():
    lp = LinearProgram("simple")
    x = lp.add_variable("x")
    lp.add_constraint(x >= 3, RowKey("floor"))
    lp.set_objective(x)
    result = solve(lp)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(3.0)
    assert result.value(lp, "x") == pytest.approx(3.0)
    # one more unit of floor costs one more unit of objective
    assert result.duals[0] == pytest.approx(1.0)


def test_objective_offset_is_kept():
    lp = LinearProgram()
    x = lp.add_variable("x", lower=1.0, upper=2.0)
    lp.set_objective(2 * x + 10)
    assert solve(lp).objective == pytest.approx(12.0)


def test_infeasible_and_unbounded():
    lp = LinearProgram("infeasible")
    x = lp.add_variable("x", upper=0.0)
    lp.add_constraint(x >= 1, "floor")
    lp.set_objective(x)
    result = solve(lp)
    assert result.status is SolveStatus.INFEASIBLE
    assert result.primal is None
    assert not result.optimal

    lp = LinearProgram("unbounded")
    y = lp.add_variable("y")
    lp.add_constraint(y >= 1, "floor")
    lp.set_objective(-1 * y)
    assert solve(lp, SolverOptions(presolve=False)).status is SolveStatus.UNBOUNDED


def test_integer_program():
    lp = make_knapsack()
    result = solve(lp)
    assert result.optimal
    assert result.objective == pytest.approx(-20.0)
    assert result.value(lp, "a") == 4.0
    assert result.value(lp, "b") == 0.0
    assert result.duals is None


def test_integer_cap():
    with pytest.raises(SolverSizeError) as raised:
        solve(make_knapsack(), SolverOptions(max_integer_variables=1))
    assert raised.value.details["integer_variables"] == 2


def test_geometric_scaling_evens_out_entries():
    matrix = scipy.sparse.csr_matrix(np.array([[1000.0, 1.0], [1.0, 0.001]]))
    row_scale, column_scale = geometric_scaling(matrix, np.zeros(2, dtype=bool))
    scaled = np.abs((scipy.sparse.diags(row_scale) @ matrix @ scipy.sparse.diags(column_scale)).toarray())
    assert scaled.max() / scaled.min() < 1000.0 * 1000.0
    _, fixed = geometric_scaling(matrix, np.array([True, False]))
    assert fixed[0] == 1.0


def test_solve_writes_to_log():
    written = []

    class Recorder:
        def write(self, label, lp, result):
            written.append((label, lp.name, result.status))

    lp = LinearProgram("logged")
    x = lp.add_variable("x", upper=4.0)
    lp.set_objective(-1 * x)
    result = solve(lp, fingerprint="abc", log=Recorder(), label="first")
    assert result.fingerprint == "abc"
    assert written == [("first", "logged", SolveStatus.OPTIMAL)]


@st.composite
def bounded_programs(draw):
    """Programs with 0 <= x <= 10 and nonnegative right-hand sides, so x = 0 is always feasible."""
    columns = draw(st.integers(min_value=1, max_value=5))
    rows = draw(st.integers(min_value=1, max_value=5))
    coefficient = st.floats(min_value=-100.0, max_value=100.0).map(lambda value: round(value, 3))
    matrix = draw(st.lists(st.lists(coefficient, min_size=columns, max_size=columns), min_size=rows, max_size=rows))
    rhs = draw(st.lists(st.floats(min_value=0.0, max_value=1000.0), min_size=rows, max_size=rows))
    cost = draw(st.lists(coefficient, min_size=columns, max_size=columns))
    return matrix, rhs, cost


@settings(max_examples=50, deadline=None)
@given(program=bounded_programs())
def test_scaling_does_not_change_the_optimum(program):
    matrix, rhs, cost = program
    lp = LinearProgram("random")
    x = [lp.add_variable(f"x{j}", upper=10.0) for j in range(len(cost))]
    for i, (coefficients, bound) in enumerate(zip(matrix, rhs)):
        lp.add_constraint(pulp.lpSum(c * v for c, v in zip(coefficients, x)) <= bound, f"row{i}")
    lp.set_objective(pulp.lpSum(c * v for c, v in zip(cost, x)))

    scaled = solve(lp, SolverOptions(scaling=True))
    plain = solve(lp, SolverOptions(scaling=False))
    assert scaled.optimal and plain.optimal
    assert scaled.objective == pytest.approx(plain.objective, rel=1e-6, abs=1e-6)
    assert lp.worst_row(scaled.primal)[0] <= 1e-6
    assert lp.bound_violations(scaled.primal).max() <= 1e-6
    assert scaled.objective <= 0.0 + 1e-9


def test_infinite_bounds_are_accepted():
    lp = LinearProgram()
    x = lp.add_variable("x", lower=-math.inf)
    lp.add_constraint(x >= -5, "floor")
    lp.set_objective(x)
    assert solve(lp).objective == pytest.approx(-5.0)


@pytest.mark.parametrize("compression, opener", [(None, open), ("gzip", gzip.open)])
def test_solve_log_file(tmp_path, compression, opener):
    path = tmp_path / "solve_log.tsv"
    lp = make_knapsack()
    with SolveLog(path, compression=compression) as log:
        solve(lp, log=log, label="knapsack")
    with opener(path, "rt") as handle:
        lines = handle.read().splitlines()
    assert lines[0] == SolveLog.header.rstrip("\n")
    fields = lines[1].split("\t")
    assert fields[:2] == ["knapsack", "OPTIMAL"]
    assert float(fields[2]) == pytest.approx(-20.0)
    assert fields[5:8] == ["2", "2", "4"]

    with SolveLog(tmp_path / "short.tsv", full_logs=False) as log:
        solve(lp, log=log, label="short")
    assert (tmp_path / "short.tsv").read_text().splitlines()[1].endswith("\t\t")

    with pytest.raises(NotImplementedError):
        SolveLog(tmp_path / "x.tsv", compression="zip")


def test_two_variable_vertex():
    lp = LinearProgram("vertex")
    x = lp.add_variable("x", upper=3.0)
    y = lp.add_variable("y", upper=3.0)
    lp.add_constraint(x + y <= 4, RowKey("sum"))
    lp.set_objective(-1 * x - y)
    result = solve(lp)
    assert result.objective == pytest.approx(-4.0)
    assert result.value(lp, "x") + result.value(lp, "y") == pytest.approx(4.0)


def vertex_optimum(matrix, rhs, upper, cost):
    """Least objective over the vertices of {A x <= b, 0 <= x <= upper}, by enumerating every active set."""
    columns = len(cost)
    halfspaces = np.vstack([np.asarray(matrix, dtype=float), np.eye(columns), -np.eye(columns)])
    limits = np.concatenate([np.asarray(rhs, dtype=float), np.asarray(upper, dtype=float), np.zeros(columns)])
    best = math.inf
    for active in itertools.combinations(range(len(limits)), columns):
        system = halfspaces[list(active)]
        if abs(np.linalg.det(system)) < 1e-9:
            continue
        point = np.linalg.solve(system, limits[list(active)])
        if np.all(halfspaces @ point <= limits + 1e-9 * (1.0 + np.abs(limits))):
            best = min(best, float(np.dot(cost, point)))
    return best


@st.composite
def small_programs(draw):
    """Two or three columns in a box with integer data; x = 0 is always feasible."""
    columns = draw(st.integers(min_value=2, max_value=3))
    rows = draw(st.integers(min_value=1, max_value=3))
    coefficient = st.integers(min_value=-10, max_value=10)
    matrix = draw(st.lists(st.lists(coefficient, min_size=columns, max_size=columns), min_size=rows, max_size=rows))
    rhs = draw(st.lists(st.integers(min_value=0, max_value=50), min_size=rows, max_size=rows))
    upper = draw(st.lists(st.integers(min_value=1, max_value=10), min_size=columns, max_size=columns))
    cost = draw(st.lists(coefficient, min_size=columns, max_size=columns))
    return matrix, rhs, upper, cost


@settings(max_examples=100, deadline=None)
@given(program=small_programs())
def test_optimum_matches_vertex_enumeration(program):
    matrix, rhs, upper, cost = program
    lp = LinearProgram("small")
    x = [lp.add_variable(f"x{j}", upper=float(bound)) for j, bound in enumerate(upper)]
    for i, (coefficients, bound) in enumerate(zip(matrix, rhs)):
        lp.add_constraint(pulp.lpSum(c * v for c, v in zip(coefficients, x)) <= bound, RowKey("row", hour=i + 1))
    lp.set_objective(pulp.lpSum(c * v for c, v in zip(cost, x)))
    result = solve(lp)
    assert result.optimal
    assert result.objective == pytest.approx(vertex_optimum(matrix, rhs, upper, cost), rel=1e-8, abs=1e-8)
