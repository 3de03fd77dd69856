"""
Sparse linear programs built on PuLP.

Variables are ``pulp.LpVariable`` objects created through
:meth:`LinearProgram.add_variable`. They combine into
``pulp.LpAffineExpression`` objects with ``+``, ``-`` and scalar ``*``, and
comparing an expression with ``<=``, ``>=`` or ``==`` produces a
``pulp.LpConstraint`` that is added to the program under a :class:`RowKey`.
:class:`LinearProgram` wraps the ``pulp.LpProblem`` and keeps the column
order, which the bundled solver uses to build its sparse matrix.

Example::

    lp = LinearProgram("demo")
    x = lp.add_variable("x", upper=3)
    y = lp.add_variable("y", upper=3)
    lp.add_constraint(x + y <= 4, RowKey("budget"))
    lp.set_objective(-1 * x - y)
"""
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import pulp
import scipy.sparse

LE = "<="
EQ = "=="
GE = ">="

SENSES = {pulp.LpConstraintLE: LE, pulp.LpConstraintEQ: EQ, pulp.LpConstraintGE: GE}

# anything that takes part in a row: a column or an affine combination of columns
Affine = pulp.LpAffineExpression | pulp.LpVariable


def as_expression(value) -> pulp.LpAffineExpression:
    if isinstance(value, pulp.LpAffineExpression):
        return value
    return pulp.LpAffineExpression(value)


@dataclass(frozen=True, order=True)
class RowKey:
    """Constraint family plus its (region, technology, hour) index; orders rows canonically."""

    family: str
    region: str = ""
    technology: str = ""
    hour: int = 0

    def name(self) -> str:
        index = [part for part in (self.region, self.technology) if part]
        if self.hour:
            index.append(str(self.hour))
        return f"{self.family}({','.join(index)})" if index else self.family


@dataclass(frozen=True, order=True)
class VarKey:
    """Quantity plus its (region, technology, hour) index; the variable name is derived from it."""

    quantity: str
    region: str = ""
    technology: str = ""
    hour: int = 0

    def name(self) -> str:
        index = [part for part in (self.region, self.technology) if part]
        if self.hour:
            index.append(str(self.hour))
        return f"{self.quantity}({','.join(index)})" if index else self.quantity


def keyed_adder(lp: "LinearProgram"):
    """``add(key, lower, upper, integer)`` that names variables after their key."""

    def add(key: VarKey, lower: float = 0.0, upper: float = math.inf, integer: bool = False) -> pulp.LpVariable:
        return lp.add_variable(key.name(), lower, upper, integer)

    return add


def _bound(value: float | None, missing: float) -> float:
    return missing if value is None else float(value)


class LinearProgram:
    """
    A minimisation ``pulp.LpProblem`` with a fixed column order.

    Columns are numbered in creation order and rows in insertion order; both
    orders carry through to :meth:`matrix`, the solver's primal and dual
    vectors and the solution files.
    """

    def __init__(self, name: str = "hyplan"):
        self.problem = pulp.LpProblem(name, pulp.LpMinimize)
        self.variables: list[pulp.LpVariable] = []
        self.keys: dict[str, RowKey] = {}
        self._columns: dict[pulp.LpVariable, int] = {}

    @property
    def name(self) -> str:
        return self.problem.name

    @property
    def constraints(self) -> dict[str, pulp.LpConstraint]:
        return self.problem.constraints

    @property
    def objective(self) -> pulp.LpAffineExpression:
        if self.problem.objective is None:
            return pulp.LpAffineExpression()
        return self.problem.objective

    @property
    def objective_offset(self) -> float:
        return float(self.objective.constant)

    def add_variable(self, name: str, lower: float = 0.0, upper: float = math.inf, integer: bool = False) -> pulp.LpVariable:
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ValueError(f"variable {name}: invalid bounds [{lower}, {upper}]")
        variable = pulp.LpVariable(
            name,
            lowBound=None if lower == -math.inf else float(lower),
            upBound=None if upper == math.inf else float(upper),
            cat=pulp.LpInteger if integer else pulp.LpContinuous,
        )
        self.problem.addVariable(variable)
        self._columns[variable] = len(self.variables)
        self.variables.append(variable)
        return variable

    def add_constraint(self, constraint: pulp.LpConstraint, key: RowKey | str) -> int:
        if not isinstance(constraint, pulp.LpConstraint):
            raise ValueError(f"row {key}: expected a constraint, got {type(constraint).__name__}")
        if not math.isfinite(constraint.constant) or not all(math.isfinite(c) for c in constraint.values()):
            raise ValueError(f"row {key}: coefficients and right-hand side must be finite")
        name = key.name() if isinstance(key, RowKey) else key
        if name in self.problem.constraints:
            raise ValueError(f"duplicate row {name}")
        unknown = [variable.name for variable in constraint if variable not in self._columns]
        if unknown:
            raise ValueError(f"row {name} uses variables from another program: {', '.join(unknown[:5])}")
        self.problem.addConstraint(constraint, name)
        if isinstance(key, RowKey):
            self.keys[name] = key
        return len(self.problem.constraints) - 1

    def add_rows(self, fragment: Iterable[tuple[RowKey, pulp.LpConstraint]]) -> None:
        for key, constraint in fragment:
            self.add_constraint(constraint, key)

    def set_objective(self, expression) -> None:
        objective = pulp.LpAffineExpression(expression)
        if not all(math.isfinite(c) for c in objective.values()):
            raise ValueError("objective coefficients must be finite")
        self.problem.setObjective(objective)

    def canonical(self) -> "LinearProgram":
        """Copy with keyed rows sorted by (family, region, technology, hour); columns and objective are shared."""

        def order(name):
            key = self.keys.get(name)
            if key is None:
                return (1, name, "", "", 0)
            return (0, key.family, key.region, key.technology, key.hour)

        copy = LinearProgram(self.name)
        copy.variables = list(self.variables)
        copy._columns = dict(self._columns)
        copy.problem.addVariables(self.variables)
        for name in sorted(self.problem.constraints, key=order):
            copy.problem.addConstraint(self.problem.constraints[name], name)
        copy.keys = dict(self.keys)
        copy.problem.setObjective(pulp.LpAffineExpression(self.objective))
        return copy

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_rows(self) -> int:
        return len(self.problem.constraints)

    @property
    def num_nonzeros(self) -> int:
        return sum(1 for constraint in self.problem.constraints.values() for c in constraint.values() if c != 0.0)

    @property
    def num_integer(self) -> int:
        return sum(variable.cat == pulp.LpInteger for variable in self.variables)

    def integrality(self) -> np.ndarray:
        return np.array([variable.cat == pulp.LpInteger for variable in self.variables], dtype=bool)

    def column(self, variable: pulp.LpVariable) -> int:
        return self._columns[variable]

    def column_index(self) -> dict[str, int]:
        return {variable.name: index for index, variable in enumerate(self.variables)}

    def duplicate_names(self) -> list[str]:
        seen: set[str] = set()
        duplicates = []
        for variable in self.variables:
            if variable.name in seen:
                duplicates.append(variable.name)
            seen.add(variable.name)
        return duplicates

    def matrix(self) -> scipy.sparse.csr_matrix:
        row_index, column_index, values = [], [], []
        for i, constraint in enumerate(self.problem.constraints.values()):
            for variable, coefficient in constraint.items():
                if coefficient != 0.0:
                    row_index.append(i)
                    column_index.append(self._columns[variable])
                    values.append(coefficient)
        return scipy.sparse.coo_matrix(
            (values, (row_index, column_index)), shape=(self.num_rows, self.num_variables)
        ).tocsr()

    def row_senses(self) -> list[str]:
        return [SENSES[constraint.sense] for constraint in self.problem.constraints.values()]

    def row_rhs(self) -> np.ndarray:
        return np.array([-constraint.constant for constraint in self.problem.constraints.values()], dtype=float)

    def row_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        rhs = self.row_rhs()
        senses = np.array(self.row_senses(), dtype=object)
        lower = np.where((senses == GE) | (senses == EQ), rhs, -np.inf)
        upper = np.where((senses == LE) | (senses == EQ), rhs, np.inf)
        return lower.astype(float), upper.astype(float)

    def variable_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.array([_bound(v.lowBound, -np.inf) for v in self.variables], dtype=float)
        upper = np.array([_bound(v.upBound, np.inf) for v in self.variables], dtype=float)
        return lower, upper

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.num_variables)
        for variable, coefficient in self.objective.items():
            c[self._columns[variable]] += coefficient
        return c

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective_vector() @ x + self.objective.constant)

    def assign(self, x: np.ndarray) -> None:
        """Store ``x`` as the variables' values so ``pulp.value`` evaluates expressions at it."""
        for variable, value in zip(self.variables, x):
            variable.varValue = float(value)

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        if self.num_rows == 0:
            return np.zeros(0)
        return self.matrix() @ np.asarray(x, dtype=float)

    def row_violations(self, x: np.ndarray) -> np.ndarray:
        """Relative violation of each row: excess / (1 + |rhs|), zero when satisfied."""
        activity = self.row_activity(x)
        lower, upper = self.row_bounds()
        excess = np.maximum(np.maximum(lower - activity, activity - upper), 0.0)
        return excess / (1.0 + np.abs(self.row_rhs()))

    def bound_violations(self, x: np.ndarray) -> np.ndarray:
        lower, upper = self.variable_bounds()
        x = np.asarray(x, dtype=float)
        excess = np.maximum(np.maximum(lower - x, x - upper), 0.0)
        finite = np.where(np.isfinite(lower), np.abs(lower), 0.0) + np.where(np.isfinite(upper), np.abs(upper), 0.0)
        return excess / (1.0 + finite)

    def worst_row(self, x: np.ndarray) -> tuple[float, str | None]:
        violations = self.row_violations(x)
        if violations.size == 0:
            return 0.0, None
        worst = int(np.argmax(violations))
        return float(violations[worst]), list(self.problem.constraints)[worst]

    def describe(self) -> dict:
        return {
            "name": self.name,
            "variables": self.num_variables,
            "integer_variables": self.num_integer,
            "rows": self.num_rows,
            "nonzeros": self.num_nonzeros,
        }
