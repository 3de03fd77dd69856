"""
``name value`` solution files exchanged with external solvers.

Each non-blank line holds a variable name and its value separated by
whitespace; lines starting with ``#`` are comments.
"""
import logging
import os

import numpy as np

from hyplan.hyplan_exception import SolutionImportError
from hyplan.solve.linear_program import LinearProgram
from hyplan.solve.solver import SolveResult, SolveStatus

logger = logging.getLogger(__name__)

FEASIBILITY_TOLERANCE = 1e-7


def write_solution(path: str | os.PathLike, lp: LinearProgram, result: SolveResult) -> None:
    if result.primal is None:
        raise SolutionImportError(f"no primal values to write for {lp.name} (status {result.status.value})")
    with open(path, "w") as solution_file:
        solution_file.write(f"# {lp.name} {result.status.value} objective {result.objective!r}\n")
        for variable, value in zip(lp.variables, result.primal):
            solution_file.write(f"{variable.name} {float(value)!r}\n")


def import_solution(path: str | os.PathLike, model, tolerance: float = FEASIBILITY_TOLERANCE) -> SolveResult:
    """
    Read an external solution for ``model`` (a PlanningModel or a bare LinearProgram).

    The point is accepted only when every variable is given exactly once and
    every row and bound holds within ``tolerance * (1 + |rhs|)``. The returned
    result carries the model fingerprint, so it can be passed to
    ``extract_solution`` like a bundled solve.
    """
    lp: LinearProgram = getattr(model, "lp", model)
    fingerprint = getattr(model, "fingerprint", None)
    columns = lp.column_index()
    primal = np.full(lp.num_variables, np.nan)

    try:
        solution_file = open(path)
    except OSError as error:
        raise SolutionImportError(f"cannot read solution file {path}: {error}") from None
    with solution_file:
        for line_number, line in enumerate(solution_file, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 2:
                raise SolutionImportError(
                    f"{path}, line {line_number}: expected 'name value', found {stripped!r}", {"line": line_number}
                )
            name, text = fields
            if name not in columns:
                raise SolutionImportError(f"{path}, line {line_number}: unknown variable {name}", {"line": line_number, "variable": name})
            try:
                value = float(text)
            except ValueError:
                raise SolutionImportError(f"{path}, line {line_number}: value {text!r} is not a number", {"line": line_number}) from None
            index = columns[name]
            if not np.isnan(primal[index]):
                raise SolutionImportError(f"{path}, line {line_number}: variable {name} given twice", {"line": line_number, "variable": name})
            primal[index] = value

    missing = [lp.variables[index].name for index in np.flatnonzero(np.isnan(primal))]
    if missing:
        raise SolutionImportError(
            f"{path}: no value for {len(missing)} variable(s): {', '.join(missing[:10])}", {"missing": missing}
        )

    bound_violations = lp.bound_violations(primal)
    if bound_violations.size and bound_violations.max() > tolerance:
        worst = int(np.argmax(bound_violations))
        raise SolutionImportError(
            f"{path}: variable {lp.variables[worst].name} = {primal[worst]!r} violates its bounds",
            {"variable": lp.variables[worst].name, "violation": float(bound_violations[worst])},
        )
    violation, row = lp.worst_row(primal)
    if violation > tolerance:
        raise SolutionImportError(
            f"{path}: imported point violates row {row} by {violation:.3g} (relative)",
            {"row": row, "violation": violation},
        )

    objective = lp.objective_value(primal)
    lp.assign(primal)
    logger.info("Imported solution for %s from %s, objective %r", lp.name, path, objective)
    return SolveResult(SolveStatus.OPTIMAL, objective, primal, fingerprint=fingerprint, message=f"imported from {path}")
