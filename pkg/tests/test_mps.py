import math

import numpy as np
import pytest

from hyplan.hyplan_exception import ModelFormatError, SolutionImportError
from hyplan.solve.linear_program import LinearProgram, RowKey
from hyplan.solve.mps import export_model, read_model
from hyplan.solve.solution_file import import_solution, write_solution
from hyplan.solve.solver import solve


def make_program():
    lp = LinearProgram("mixed")
    build = lp.add_variable("capacity(R,TU_M)", upper=500.0)
    power = lp.add_variable("power(R,TU_M,1)")
    units = lp.add_variable("module_on(R,TU_M.m1,1)", upper=1.0, integer=True)
    swing = lp.add_variable("flow(R,S,1)", lower=-math.inf)
    fixed = lp.add_variable("existing(R,WT)", lower=40.0, upper=40.0)
    lp.add_variable("spare(R,TU_M)", upper=7.0)
    lp.add_constraint(power <= build, RowKey("capacity_cap", "R", "TU_M", 1))
    lp.add_constraint(power + fixed - swing == 120.0, RowKey("electric_balance", "R", "", 1))
    lp.add_constraint(power >= 20.0 * units, RowKey("min_load", "R", "TU_M", 1))
    lp.add_constraint(swing >= -30.0, RowKey("flow_floor", "R", "S", 1))
    lp.set_objective(0.1 * build + 3.0 * power + 0.25 * units + 7.5)
    return lp


def columns(lp):
    lower, upper = lp.variable_bounds()
    integer = lp.integrality()
    return {v.name: (lower[j], upper[j], bool(integer[j])) for j, v in enumerate(lp.variables)}


def rows(lp):
    names = [v.name for v in lp.variables]
    row_names = list(lp.constraints)
    matrix = lp.matrix().tocoo()
    entries = {(row_names[i], names[j]): value for i, j, value in zip(matrix.row, matrix.col, matrix.data)}
    return dict(zip(row_names, zip(lp.row_senses(), lp.row_rhs()))), entries


def test_model_survives_export_and_read(tmp_path):
    lp = make_program()
    path = tmp_path / "mixed.mps"
    export_model(lp, path)
    again = read_model(path)

    assert again.name == "mixed"
    assert columns(again) == columns(lp)
    assert rows(again) == rows(lp)
    objective = dict(zip((v.name for v in lp.variables), lp.objective_vector()))
    assert dict(zip((v.name for v in again.variables), again.objective_vector())) == objective
    # the constant term stays with the model
    assert again.objective_offset == 0.0
    assert solve(again).objective == pytest.approx(solve(lp).objective - lp.objective_offset)


def test_export_rejects_bad_names(tmp_path):
    lp = LinearProgram()
    lp.add_variable("OBJ")
    twin = lp.add_variable("twin")
    lp.add_variable("twin")
    lp.add_constraint(twin >= 1.0, "OBJ")
    path = tmp_path / "bad.mps"
    with pytest.raises(ModelFormatError) as raised:
        export_model(lp, path)
    problems = raised.value.details["problems"]
    assert len(problems) == 3
    assert not path.exists()


def test_names_are_fixed_when_the_variable_is_made():
    lp = LinearProgram()
    assert lp.add_variable("has space").name == "has_space"


@pytest.mark.parametrize("section", ["RANGES", "SOS", "QUADOBJ"])
def test_read_rejects_unsupported_sections(tmp_path, section):
    path = tmp_path / "model.mps"
    path.write_text(f"NAME t\nROWS\n N COST\n L r\nCOLUMNS\n    x COST 1 r 1\nRHS\n    RHS r 4\n{section}\n    RNG r 2\nENDATA\n")
    with pytest.raises(ModelFormatError, match=f"line 9: unsupported section {section}"):
        read_model(path)


def test_read_names_the_unknown_row(tmp_path):
    path = tmp_path / "model.mps"
    path.write_text("NAME t\nROWS\n N COST\n L r\nCOLUMNS\n    x nowhere 1\nENDATA\n")
    with pytest.raises(ModelFormatError, match="nowhere"):
        read_model(path)
    with pytest.raises(ModelFormatError, match="cannot read"):
        read_model(tmp_path / "missing.mps")


def test_read_bound_conventions(tmp_path):
    path = tmp_path / "model.mps"
    path.write_text(
        "NAME t\nROWS\n N COST\n G r\nCOLUMNS\n    x COST 1 r 1\n    y COST 1 r 1\n    z COST 1\n"
        "RHS\n    RHS r 2\nBOUNDS\n UP BND x -1\n BV BND y\n MI BND z\nENDATA\n"
    )
    lp = read_model(path)
    assert columns(lp) == {"x": (-math.inf, -1.0, False), "y": (0.0, 1.0, True), "z": (-math.inf, math.inf, False)}


def test_solution_file_round_trip(tmp_path):
    lp = make_program()
    result = solve(lp)
    path = tmp_path / "mixed.sol"
    write_solution(path, lp, result)
    imported = import_solution(path, lp)
    assert np.array_equal(imported.primal, result.primal)
    assert imported.objective == pytest.approx(result.objective)
    assert imported.optimal


def write_values(path, values):
    path.write_text("# external\n" + "".join(f"{name} {value}\n" for name, value in values))
    return path


@pytest.mark.parametrize(
    "edit, message",
    [
        (lambda values: values[:-1], "no value for 1 variable"),
        (lambda values: values + [values[0]], "given twice"),
        (lambda values: values + [("ghost", 1.0)], "unknown variable ghost"),
        (lambda values: [(values[0][0], "lots")] + values[1:], "is not a number"),
        (lambda values: [(values[0][0], 900.0)] + values[1:], "violates its bounds"),
        (lambda values: [values[0], (values[1][0], values[1][1] + 5.0)] + values[2:], "violates row"),
    ],
)
def test_solution_import_errors(tmp_path, edit, message):
    lp = make_program()
    result = solve(lp)
    values = [(variable.name, float(value)) for variable, value in zip(lp.variables, result.primal)]
    path = write_values(tmp_path / "external.sol", edit(values))
    with pytest.raises(SolutionImportError, match=message):
        import_solution(path, lp)


def test_solution_import_needs_name_value_pairs(tmp_path):
    path = tmp_path / "external.sol"
    path.write_text("power(R,TU_M,1) 1 2\n")
    with pytest.raises(SolutionImportError) as raised:
        import_solution(path, make_program())
    assert raised.value.details["line"] == 1
    with pytest.raises(SolutionImportError, match="cannot read"):
        import_solution(tmp_path / "missing.sol", make_program())
