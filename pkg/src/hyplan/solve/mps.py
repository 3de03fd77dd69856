"""
Free-format MPS export and import through PuLP.

Names come straight from the model index (``power(R1,TU_COAL,3)``), so an
external solver's solution file maps back to variables without a symbol
table. PuLP writes coefficients with 13 significant digits and the objective
row under the name ``OBJ``; the objective constant is not carried.
"""
import logging
import math
import os

import pulp

from hyplan.hyplan_exception import ModelFormatError
from hyplan.solve.linear_program import LinearProgram

logger = logging.getLogger(__name__)

OBJECTIVE_ROW = "OBJ"
# column PuLP adds when an objective has no variables
DUMMY_COLUMN = "__dummy"
SUPPORTED_SECTIONS = ("NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA")


def _check_names(lp: LinearProgram) -> None:
    problems = []
    for name in [v.name for v in lp.variables] + list(lp.constraints):
        if not name or any(character.isspace() for character in name):
            problems.append(f"name {name!r} is empty or contains whitespace")
        if name in (OBJECTIVE_ROW, DUMMY_COLUMN):
            problems.append(f"name {name!r} is reserved in MPS files")
    problems.extend(f"duplicate name {name!r}" for name in sorted(set(lp.duplicate_names())))
    if problems:
        raise ModelFormatError(
            f"cannot export {lp.name} to MPS: " + "; ".join(problems[:10]), {"problems": problems}
        )


def export_model(lp: LinearProgram, path: str | os.PathLike) -> None:
    """Write ``lp`` as a free-format MPS file. Names are checked before anything is written."""
    _check_names(lp)
    problem = lp.problem.copy()
    # a zero objective entry keeps columns that appear in no row in the file
    objective = pulp.LpAffineExpression(lp.objective)
    for variable in lp.variables:
        objective.setdefault(variable, 0.0)
    problem.setObjective(objective)
    problem.writeMPS(os.fspath(path))
    logger.info("Wrote %s (%d columns, %d rows) to %s", lp.name, lp.num_variables, lp.num_rows, path)


def _check_sections(path: str | os.PathLike) -> None:
    try:
        mps_file = open(path)
    except OSError as error:
        raise ModelFormatError(f"cannot read MPS file {path}: {error}") from None
    with mps_file:
        for line_number, line in enumerate(mps_file, start=1):
            if not line.strip() or line[0].isspace() or line.startswith("*"):
                continue
            section = line.split()[0]
            if section not in SUPPORTED_SECTIONS:
                raise ModelFormatError(f"{path}, line {line_number}: unsupported section {section}", {"line": line_number})


def read_model(path: str | os.PathLike) -> LinearProgram:
    """
    Read a free-format MPS file written by :func:`export_model` or a solver.

    Supports ROWS, COLUMNS (with integer markers), RHS and BOUNDS.
    RANGES, SOS and quadratic sections are rejected. A negative upper bound
    on a column with the default lower bound frees the column below.
    """
    _check_sections(path)
    try:
        variables, problem = pulp.LpProblem.fromMPS(os.fspath(path), sense=pulp.LpMinimize)
    except (KeyError, ValueError, IndexError, pulp.PulpError) as error:
        raise ModelFormatError(f"{path}: cannot read MPS ({type(error).__name__}: {error})", {"error": str(error)}) from None

    lp = LinearProgram(problem.name or "hyplan")
    columns: dict[pulp.LpVariable, pulp.LpVariable] = {}
    for name, variable in variables.items():
        if name == DUMMY_COLUMN:
            continue
        lower = -math.inf if variable.lowBound is None else float(variable.lowBound)
        upper = math.inf if variable.upBound is None else float(variable.upBound)
        if upper < lower == 0.0:
            lower = -math.inf
        try:
            columns[variable] = lp.add_variable(name, lower, upper, variable.cat == pulp.LpInteger)
        except ValueError as error:
            raise ModelFormatError(f"{path}: {error}") from None

    def translate(expression) -> pulp.LpAffineExpression:
        return pulp.LpAffineExpression({columns[v]: c for v, c in expression.items() if v.name != DUMMY_COLUMN})

    for name, constraint in problem.constraints.items():
        lp.add_constraint(pulp.LpConstraint(translate(constraint), constraint.sense, rhs=-constraint.constant), name)
    if problem.objective is not None:
        lp.set_objective(translate(problem.objective))
    return lp
