"""
Clustered commitment of a fleet of identical modules.

Instead of one binary state per module, a fleet carries three continuous
capacities per hour: online O, started up U and shut down S (MW). Output P
is limited by the online capacity and by ramp and start/stop rates, and
minimum up and down times are imposed through windows of recent startups
and shutdowns.

With ``wrap`` hour 1 follows hour T (the horizon is one repeating period);
otherwise hour 1 follows a given initial online capacity.
"""
from dataclasses import dataclass
from typing import Callable

import pulp

from hyplan.configuration import EMITTING_KINDS, FlexParams
from hyplan.solve.linear_program import Affine, RowKey, VarKey, as_expression

Fragment = list[tuple[RowKey, pulp.LpConstraint]]
VariableAdder = Callable[..., Affine]


@dataclass
class ClusterVariables:
    online: list[Affine]
    startup: list[Affine]
    shutdown: list[Affine]
    dispatch: list[Affine]
    # total fleet capacity, an expression when it is a decision
    capacity: Affine | float
    # online capacity before hour 1, ignored when wrapping
    initial: Affine | float = 0.0

    @property
    def horizon(self) -> int:
        return len(self.online)


def default_initial_online(flex: FlexParams, kind: str, existing: float) -> float:
    """Fossil fleets start fully online, hydrogen fleets start cold, unless configured."""
    if flex.initial_online is not None:
        return flex.initial_online
    return existing if kind in EMITTING_KINDS else 0.0


def cluster_variables(
    add: VariableAdder,
    horizon: int,
    capacity: Affine | float,
    region: str = "",
    technology: str = "",
    initial: Affine | float = 0.0,
) -> ClusterVariables:
    columns = {
        quantity: [add(VarKey(quantity, region, technology, t + 1)) for t in range(horizon)]
        for quantity in ("online", "startup", "shutdown", "power")
    }
    return ClusterVariables(columns["online"], columns["startup"], columns["shutdown"], columns["power"], capacity, initial)


def cluster_row_count(horizon: int, wrap: bool) -> int:
    """Rows emitted by :func:`cluster_constraints` for one fleet."""
    return 11 * horizon if wrap else 11 * horizon - 4


def _window(t: int, length: int, horizon: int, wrap: bool) -> list[int]:
    """0-based hours t-length+1 .. t, dropped before hour 1 unless wrapping."""
    if length <= 0:
        return []
    if wrap:
        length = min(length, horizon - 1)
        return [(t - k) % horizon for k in range(length)]
    return [t - k for k in range(length) if t - k >= 0]


def cluster_constraints(flex: FlexParams, cluster: ClusterVariables, wrap: bool, region: str = "", technology: str = "") -> Fragment:
    """
    Rows for one clustered fleet.

    Per hour t (1-based, t-1 of hour 1 being hour T when wrapping):

    - O_t <= cap, U_t <= cap, S_t <= cap
    - O_t - O_{t-1} = U_t - S_t
    - min_load O_t <= P_t <= max_load O_t
    - P_t <= max_load (O_t - U_t - S_{t+1}) + R^u U_t + R^d S_{t+1}
    - P_t - P_{t-1} <= r^u (O_t - U_t) + R^u U_t - min_load S_t
    - P_{t-1} - P_t <= r^d (O_t - U_t) - min_load U_t + R^d S_t
    - S_{t+1} <= O_t - sum of U over the last min_up - 1 hours up to t
    - U_{t+1} <= cap - O_t - sum of S over the last min_down - 1 hours up to t

    Without wrapping the ramp rows start at hour 2, the min up/down rows stop
    at hour T-1 and the start/stop cap at hour T has no S_{T+1} term.
    """
    horizon = cluster.horizon
    if horizon < 2:
        raise ValueError(f"clustered commitment needs at least two hours, got {horizon}")
    online, startup, shutdown, power = cluster.online, cluster.startup, cluster.shutdown, cluster.dispatch
    capacity = as_expression(cluster.capacity)
    low, high = flex.min_load, flex.max_load
    start_ramp, stop_ramp = flex.effective_startup_ramp, flex.effective_shutdown_ramp
    fragment: Fragment = []

    def key(family: str, t: int) -> RowKey:
        return RowKey(family, region, technology, t + 1)

    for t in range(horizon):
        fragment.append((key("cluster_online_cap", t), online[t] <= capacity))
        fragment.append((key("cluster_startup_cap", t), startup[t] <= capacity))
        fragment.append((key("cluster_shutdown_cap", t), shutdown[t] <= capacity))

        previous_online = online[t - 1] if t > 0 or wrap else as_expression(cluster.initial)
        fragment.append((key("cluster_online_balance", t), online[t] - previous_online == startup[t] - shutdown[t]))

        fragment.append((key("cluster_min_load", t), power[t] >= low * online[t]))
        fragment.append((key("cluster_max_load", t), power[t] <= high * online[t]))

        if t + 1 < horizon or wrap:
            stop_next = shutdown[(t + 1) % horizon]
            cap = high * (online[t] - startup[t] - stop_next) + start_ramp * startup[t] + stop_ramp * stop_next
        else:
            cap = high * (online[t] - startup[t]) + start_ramp * startup[t]
        fragment.append((key("cluster_start_stop_cap", t), power[t] <= cap))

        if t > 0 or wrap:
            steady = online[t] - startup[t]
            fragment.append(
                (
                    key("cluster_ramp_up", t),
                    power[t] - power[t - 1] <= flex.ramp_up * steady + start_ramp * startup[t] - low * shutdown[t],
                )
            )
            fragment.append(
                (
                    key("cluster_ramp_down", t),
                    power[t - 1] - power[t] <= flex.ramp_down * steady - low * startup[t] + stop_ramp * shutdown[t],
                )
            )

        if t + 1 < horizon or wrap:
            following = (t + 1) % horizon
            recent_starts = pulp.lpSum(startup[s] for s in _window(t, flex.min_up - 1, horizon, wrap))
            fragment.append((key("cluster_min_up", t), shutdown[following] <= online[t] - recent_starts))
            recent_stops = pulp.lpSum(shutdown[s] for s in _window(t, flex.min_down - 1, horizon, wrap))
            fragment.append((key("cluster_min_down", t), startup[following] <= capacity - online[t] - recent_stops))

    return fragment
