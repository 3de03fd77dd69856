from hyplan.solve.linear_program import Affine, LinearProgram, RowKey, VarKey, keyed_adder
from hyplan.solve.solver import SolveResult, SolveStatus, solve
from hyplan.solve.mps import export_model, read_model
from hyplan.solve.solution_file import import_solution, write_solution
