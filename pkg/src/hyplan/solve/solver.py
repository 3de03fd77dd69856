"""
Bundled reference solver.

Programs are modelled with PuLP (see :mod:`hyplan.solve.linear_program`);
the solve itself stays in-process. Linear programs go to the HiGHS LP code through ``scipy.optimize.linprog``;
programs with integrality marks go to HiGHS branch-and-bound through
``scipy.optimize.milp`` under a hard size cap and node cap. Both paths apply
geometric-mean row/column scaling first and map primal and dual values back
to the unscaled program.
"""
import enum
import logging
import time
from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.sparse

from hyplan.configuration import SolverOptions
from hyplan.hyplan_exception import SolverError, SolverSizeError
from hyplan.solve.linear_program import EQ, GE, LE, LinearProgram

logger = logging.getLogger(__name__)

SCALING_PASSES = 4


class SolveStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    ITERATION_LIMIT = "ITERATION_LIMIT"


@dataclass
class SolveResult:
    status: SolveStatus
    objective: float
    primal: np.ndarray | None
    duals: np.ndarray | None = None
    iterations: int = 0
    seconds: float = 0.0
    message: str = ""
    fingerprint: str | None = None

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def value(self, lp: LinearProgram, name: str) -> float:
        if self.primal is None:
            raise SolverError(f"no primal values available (status {self.status.value})")
        return float(self.primal[lp.column_index()[name]])


def geometric_scaling(matrix: scipy.sparse.csr_matrix, fixed_columns: np.ndarray, passes: int = SCALING_PASSES):
    """
    Row and column factors r, c such that diag(r) A diag(c) has entries near 1.

    Each pass divides every row, then every column, by the geometric mean of
    its largest and smallest absolute entries. Columns flagged in
    ``fixed_columns`` keep factor 1.
    """
    rows, columns = matrix.shape
    row_scale = np.ones(rows)
    column_scale = np.ones(columns)
    if matrix.nnz == 0:
        return row_scale, column_scale
    magnitude = abs(matrix).tocoo()
    for _ in range(passes):
        scaled = magnitude.data * row_scale[magnitude.row] * column_scale[magnitude.col]
        row_max = np.zeros(rows)
        row_min = np.full(rows, np.inf)
        np.maximum.at(row_max, magnitude.row, scaled)
        np.minimum.at(row_min, magnitude.row, scaled)
        present = row_max > 0
        row_scale[present] /= np.sqrt(row_max[present] * row_min[present])

        scaled = magnitude.data * row_scale[magnitude.row] * column_scale[magnitude.col]
        column_max = np.zeros(columns)
        column_min = np.full(columns, np.inf)
        np.maximum.at(column_max, magnitude.col, scaled)
        np.minimum.at(column_min, magnitude.col, scaled)
        present = (column_max > 0) & ~fixed_columns
        column_scale[present] /= np.sqrt(column_max[present] * column_min[present])
    return row_scale, column_scale


def solve(lp: LinearProgram, options: SolverOptions | None = None, fingerprint: str | None = None, log=None, label: str = "") -> SolveResult:
    """
    Solve ``lp`` (minimisation).

    The result is deterministic for a fixed program and options. Programs with
    integer variables are solved exactly only when their integer count is
    within ``options.max_integer_variables``; larger ones raise
    SolverSizeError so they can be exported and solved externally.
    """
    options = options or SolverOptions()
    start = time.perf_counter()
    integer = lp.integrality()
    if integer.sum() > options.max_integer_variables:
        raise SolverSizeError(
            f"{int(integer.sum())} integer variables exceed the cap of {options.max_integer_variables}; "
            "export for external solve",
            {"integer_variables": int(integer.sum()), "cap": options.max_integer_variables},
        )

    matrix = lp.matrix()
    row_lower, row_upper = lp.row_bounds()
    lower, upper = lp.variable_bounds()
    cost = lp.objective_vector()

    if options.scaling:
        row_scale, column_scale = geometric_scaling(matrix, integer)
    else:
        row_scale, column_scale = np.ones(lp.num_rows), np.ones(lp.num_variables)
    scaled_matrix = scipy.sparse.diags(row_scale) @ matrix @ scipy.sparse.diags(column_scale)
    scaled_matrix = scaled_matrix.tocsr()
    scaled_cost = cost * column_scale
    scaled_lower, scaled_upper = lower / column_scale, upper / column_scale
    scaled_row_lower, scaled_row_upper = row_lower * row_scale, row_upper * row_scale

    if integer.any():
        result = _solve_milp(scaled_matrix, scaled_row_lower, scaled_row_upper, scaled_cost, scaled_lower, scaled_upper, integer, options)
    else:
        result = _solve_lp(lp, scaled_matrix, row_scale, scaled_cost, scaled_lower, scaled_upper, options)

    if result.primal is not None:
        result.primal = result.primal * column_scale
        result.primal[integer] = np.round(result.primal[integer])
        result.objective = lp.objective_value(result.primal)
        lp.assign(result.primal)
        violation, name = lp.worst_row(result.primal)
        if result.optimal and violation > options.tolerance * 10:
            logger.warning("Solution of %s violates row %s by %.3g (relative)", lp.name, name, violation)
    result.seconds = time.perf_counter() - start
    result.fingerprint = fingerprint
    logger.debug("Solved %s: %s objective=%r in %.3fs", lp.name, result.status.value, result.objective, result.seconds)
    if log is not None:
        log.write(label or lp.name, lp, result)
    return result


def _solve_lp(lp, matrix, row_scale, cost, lower, upper, options) -> SolveResult:
    senses = np.array(lp.row_senses(), dtype=object)
    rhs = lp.row_rhs() * row_scale
    le_rows = np.flatnonzero(senses == LE)
    ge_rows = np.flatnonzero(senses == GE)
    eq_rows = np.flatnonzero(senses == EQ)

    inequality_rows = np.concatenate([le_rows, ge_rows])
    sign = np.concatenate([np.ones(len(le_rows)), -np.ones(len(ge_rows))])
    a_ub = b_ub = a_eq = b_eq = None
    if len(inequality_rows) > 0:
        a_ub = scipy.sparse.diags(sign) @ matrix[inequality_rows]
        b_ub = sign * rhs[inequality_rows]
    if len(eq_rows) > 0:
        a_eq = matrix[eq_rows]
        b_eq = rhs[eq_rows]

    linprog_options = {
        "presolve": options.presolve,
        "primal_feasibility_tolerance": options.tolerance,
        "dual_feasibility_tolerance": options.tolerance,
        "maxiter": options.max_iterations,
    }
    if options.time_limit is not None:
        linprog_options["time_limit"] = options.time_limit
    solution = scipy.optimize.linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=np.column_stack([lower, upper]) if len(cost) else None,
        method=options.method,
        options=linprog_options,
    )

    status = {0: SolveStatus.OPTIMAL, 1: SolveStatus.ITERATION_LIMIT, 2: SolveStatus.INFEASIBLE, 3: SolveStatus.UNBOUNDED}.get(solution.status)
    if status is None:
        raise SolverError(f"solver failed on {lp.name}: {solution.message}")

    primal = None
    duals = None
    objective = np.nan
    if status is SolveStatus.OPTIMAL:
        primal = np.asarray(solution.x, dtype=float)
        duals = np.zeros(lp.num_rows)
        if len(inequality_rows) > 0:
            duals[inequality_rows] = sign * np.asarray(solution.ineqlin.marginals)
        if len(eq_rows) > 0:
            duals[eq_rows] = np.asarray(solution.eqlin.marginals)
        duals = duals * row_scale
    return SolveResult(status, objective, primal, duals, iterations=int(getattr(solution, "nit", 0) or 0), message=str(solution.message))


def _solve_milp(matrix, row_lower, row_upper, cost, lower, upper, integer, options) -> SolveResult:
    milp_options = {
        "node_limit": options.node_cap,
        "mip_rel_gap": options.mip_gap,
        "presolve": options.presolve,
    }
    if options.time_limit is not None:
        milp_options["time_limit"] = options.time_limit
    constraints = None
    if matrix.shape[0] > 0:
        constraints = scipy.optimize.LinearConstraint(matrix, row_lower, row_upper)
    solution = scipy.optimize.milp(
        cost,
        integrality=integer.astype(int),
        bounds=scipy.optimize.Bounds(lower, upper),
        constraints=constraints,
        options=milp_options,
    )
    if solution.status == 1:
        raise SolverError(f"branch-and-bound stopped at the node cap of {options.node_cap}: {solution.message}; export for external solve")
    status = {0: SolveStatus.OPTIMAL, 2: SolveStatus.INFEASIBLE, 3: SolveStatus.UNBOUNDED}.get(solution.status)
    if status is None:
        raise SolverError(f"branch-and-bound failed: {solution.message}")
    primal = np.asarray(solution.x, dtype=float) if status is SolveStatus.OPTIMAL else None
    nodes = int(getattr(solution, "mip_node_count", 0) or 0)
    return SolveResult(status, np.nan, primal, None, iterations=nodes, message=str(solution.message))
