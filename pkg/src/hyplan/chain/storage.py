"""
Storage dynamics shared by HS (kg), BES/HPS (MWh) and HST (MWh of heat).

``soc[t]`` is the inventory at the start of hour t. Charge is the amount
drawn from the network and discharge the amount delivered to it, so over
hour t the inventory moves by ``charge_eff * charge - discharge / discharge_eff``
after losing ``loss_rate`` of what it held.
"""
from dataclasses import dataclass

import numpy as np
import pulp

from hyplan.configuration import StorageParams
from hyplan.solve.linear_program import Affine, RowKey
from hyplan.units import KW_PER_MW

Fragment = list[tuple[RowKey, pulp.LpConstraint]]


@dataclass
class StorageVariables:
    charge: list[Affine]
    discharge: list[Affine]
    soc: list[Affine]
    energy_capacity: Affine
    # None when flows are capped elsewhere (HS is limited by its compressor)
    power_capacity: Affine | None = None

    @property
    def horizon(self) -> int:
        return len(self.soc)


def storage_block(
    params: StorageParams,
    variables: StorageVariables,
    region: str = "",
    technology: str = "",
    wrap: bool = True,
    initial_inventory: float = 0.0,
    inventory_floor: bool = False,
) -> Fragment:
    """
    Rows for one storage fleet.

    With ``wrap`` the inventory after hour T returns to the hour-1 inventory;
    otherwise hour 1 starts from ``initial_inventory``. ``inventory_floor``
    adds ``soc[t] >= discharge[t]`` (discharge drawn from start-of-hour stock).
    """
    horizon = variables.horizon
    if horizon < 2:
        raise ValueError(f"storage needs at least two hours, got {horizon}")
    fragment: Fragment = []
    retain = 1.0 - params.loss_rate
    for t in range(horizon):
        hour = t + 1
        charge, discharge, soc = variables.charge[t], variables.discharge[t], variables.soc[t]
        if variables.power_capacity is not None:
            fragment.append((RowKey("storage_charge_cap", region, technology, hour), charge <= variables.power_capacity))
            fragment.append((RowKey("storage_discharge_cap", region, technology, hour), discharge <= variables.power_capacity))
        fragment.append((RowKey("storage_energy_cap", region, technology, hour), soc <= variables.energy_capacity))
        if inventory_floor:
            fragment.append((RowKey("storage_inventory_floor", region, technology, hour), soc - discharge >= 0.0))
        after = retain * soc + params.charge_eff * charge - discharge * (1.0 / params.discharge_eff)
        if t + 1 < horizon:
            fragment.append((RowKey("storage_balance", region, technology, hour), variables.soc[t + 1] == after))
        elif wrap:
            fragment.append((RowKey("storage_balance", region, technology, hour), variables.soc[0] == after))
    if not wrap:
        fragment.append((RowKey("storage_initial", region, technology), variables.soc[0] == initial_inventory))
    return fragment


def hs_cop_block(
    fleets: list[tuple[str, StorageParams, StorageVariables]],
    compressor_capacity: Affine,
    compressor_power: list[Affine],
    cop_kwh_per_kg: float,
    region: str = "",
    wrap: bool = True,
) -> Fragment:
    """
    Hydrogen storage behind a shared compressor.

    ``fleets`` holds (technology id, parameters, variables) per HS fleet.
    Each gets its inventory rows plus the inventory floor. In every
    hour the total charge and the total discharge are each capped by the
    compressor rating (kg/h), and the compressor draws
    ``cop_kwh_per_kg`` kWh per kg moved in either direction.
    """
    fragment: Fragment = []
    for technology, params, variables in fleets:
        fragment.extend(storage_block(params, variables, region, technology, wrap, inventory_floor=True))
    horizon = len(compressor_power)
    for t in range(horizon):
        hour = t + 1
        charged = pulp.lpSum(variables.charge[t] for _, _, variables in fleets)
        discharged = pulp.lpSum(variables.discharge[t] for _, _, variables in fleets)
        fragment.append((RowKey("cop_charge_cap", region, "COP", hour), charged <= compressor_capacity))
        fragment.append((RowKey("cop_discharge_cap", region, "COP", hour), discharged <= compressor_capacity))
        fragment.append(
            (
                RowKey("cop_power", region, "COP", hour),
                compressor_power[t] == (cop_kwh_per_kg / KW_PER_MW) * (charged + discharged),
            )
        )
    return fragment


def simulate_inventory(charge, discharge, params: StorageParams, initial: float = 0.0) -> np.ndarray:
    """Inventory at each hour boundary (length T+1) for given charge/discharge series."""
    charge = np.asarray(charge, dtype=float)
    discharge = np.asarray(discharge, dtype=float)
    soc = np.empty(len(charge) + 1)
    soc[0] = initial
    for t in range(len(charge)):
        soc[t + 1] = soc[t] * (1.0 - params.loss_rate) + params.charge_eff * charge[t] - discharge[t] / params.discharge_eff
    return soc
