"""
Exact per-module commitment, used only to check the clustered relaxation.

Every module has binary on/start/stop states per hour and its own output.
The rows are the clustered rows written for a fleet of a single module of
fixed size, so summing any feasible module schedule gives a feasible
clustered schedule.
"""
import math
from dataclasses import dataclass

import pulp

from hyplan.configuration import FlexParams
from hyplan.flex.cluster import ClusterVariables, Fragment, VariableAdder, cluster_constraints
from hyplan.solve.linear_program import Affine, RowKey, VarKey


@dataclass(frozen=True)
class ModuleFleet:
    module_size: float
    module_count: int

    def __post_init__(self):
        if self.module_size <= 0:
            raise ValueError(f"module size must be positive, got {self.module_size}")
        if self.module_count < 1:
            raise ValueError(f"module count must be at least 1, got {self.module_count}")

    @property
    def capacity(self) -> float:
        return self.module_size * self.module_count

    @classmethod
    def splitting(cls, capacity: float, module_count: int) -> "ModuleFleet":
        return cls(capacity / module_count, module_count)


def modules_initially_on(fleet: ModuleFleet, initial_online: float) -> int:
    """Number of modules on before hour 1 for a given online capacity (rounded to whole modules)."""
    return min(fleet.module_count, max(0, int(math.floor(initial_online / fleet.module_size + 0.5))))


def milp_constraints(
    add: VariableAdder,
    flex: FlexParams,
    fleet: ModuleFleet,
    horizon: int,
    wrap: bool,
    initial_online: float = 0.0,
    region: str = "",
    technology: str = "",
) -> tuple[ClusterVariables, Fragment]:
    """
    Binary commitment rows for ``fleet``.

    Returns the fleet aggregate (sum over modules of online, startup,
    shutdown and output, with constant capacity) and the rows. Modules are
    numbered 1..count; the first ``modules_initially_on`` start on when not
    wrapping.
    """
    initially_on = modules_initially_on(fleet, initial_online)
    fragment: Fragment = []
    modules = []
    for m in range(fleet.module_count):
        label = f"{technology}.m{m + 1}"
        on = [add(VarKey("module_on", region, label, t + 1), 0.0, 1.0, True) for t in range(horizon)]
        start = [add(VarKey("module_start", region, label, t + 1), 0.0, 1.0, True) for t in range(horizon)]
        stop = [add(VarKey("module_stop", region, label, t + 1), 0.0, 1.0, True) for t in range(horizon)]
        power = [add(VarKey("module_power", region, label, t + 1)) for t in range(horizon)]
        module = ClusterVariables(
            online=[fleet.module_size * x for x in on],
            startup=[fleet.module_size * x for x in start],
            shutdown=[fleet.module_size * x for x in stop],
            dispatch=power,
            capacity=fleet.module_size,
            initial=fleet.module_size if m < initially_on else 0.0,
        )
        fragment.extend(cluster_constraints(flex, module, wrap, region, label))
        # a module cannot start and stop in the same hour
        for t in range(horizon):
            fragment.append((RowKey("module_start_stop_exclusive", region, label, t + 1), start[t] + stop[t] <= 1.0))
        modules.append(module)

    def total(attribute: str) -> list[Affine]:
        return [pulp.lpSum(getattr(module, attribute)[t] for module in modules) for t in range(horizon)]

    aggregate = ClusterVariables(
        online=total("online"),
        startup=total("startup"),
        shutdown=total("shutdown"),
        dispatch=total("dispatch"),
        capacity=fleet.capacity,
        initial=fleet.module_size * initially_on,
    )
    return aggregate, fragment
