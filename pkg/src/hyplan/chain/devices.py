"""
Pointwise models of the hydrogen chain devices.

Every function here is linear in its throughput argument, so it accepts
plain floats, numpy arrays or PuLP expressions alike and the planning model
embeds the same functions it is tested with.
"""
from dataclasses import dataclass

import numpy as np
import pulp

from hyplan.configuration import PriceBook, ScenarioConfig
from hyplan.solve.linear_program import Affine
from hyplan.units import LHV_H2_MJ_PER_KG, MJ_PER_MWH

# devices whose outputs follow from an electric and a heat efficiency
CONVERSION_KINDS = frozenset({"EC", "HT", "FC"})


def e2h_coefficient(lhv: float = LHV_H2_MJ_PER_KG) -> float:
    """kg of hydrogen carrying one MWh at the given heating value (MJ/kg)."""
    if lhv <= 0:
        raise ValueError(f"heating value must be positive, got {lhv}")
    return MJ_PER_MWH / lhv


def device_efficiency_ok(electric_eff: float, waste_heat_eff: float) -> bool:
    """True when a device's electric and recovered-heat outputs never exceed its energy input."""
    if not 0.0 < electric_eff <= 1.0 or not 0.0 <= waste_heat_eff <= 1.0:
        return False
    return electric_eff + waste_heat_eff * (1.0 - electric_eff) <= 1.0 + 1e-12


@dataclass(frozen=True)
class ChainCoefficients:
    # kg of hydrogen per MWh
    beta: float
    # technology id -> (electric_eff, waste_heat_eff)
    efficiencies: dict[str, tuple[float, float]]

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"hydrogen per MWh must be positive, got {self.beta}")
        bad = sorted(tech for tech, (electric, heat) in self.efficiencies.items() if not device_efficiency_ok(electric, heat))
        if bad:
            raise ValueError(f"efficiencies of {', '.join(bad)} create energy")

    @classmethod
    def from_scenario(cls, scenario: ScenarioConfig) -> "ChainCoefficients":
        return cls(
            beta=e2h_coefficient(scenario.lhv_mj_per_kg),
            efficiencies={
                tech.id: (tech.conversion.electric_eff, tech.conversion.waste_heat_eff)
                for tech in scenario.technologies
                if tech.kind in CONVERSION_KINDS and tech.conversion is not None
            },
        )

    def of(self, tech_id: str) -> tuple[float, float]:
        return self.efficiencies[tech_id]


def ec_output(power, electric_eff: float, waste_heat_eff: float, beta: float | None = None):
    """Electrolyser: (hydrogen kg/h, recovered heat MW) from ``power`` MW drawn."""
    beta = e2h_coefficient() if beta is None else beta
    return (beta * electric_eff) * power, (waste_heat_eff * (1.0 - electric_eff)) * power


def ht_output(hydrogen, electric_eff: float, waste_heat_eff: float, beta: float | None = None):
    """Hydrogen turbine: (power MW, heat MW) from ``hydrogen`` kg/h burnt."""
    beta = e2h_coefficient() if beta is None else beta
    return (electric_eff / beta) * hydrogen, (waste_heat_eff * (1.0 - electric_eff) / beta) * hydrogen


def fc_output(hydrogen, electric_eff: float, waste_heat_eff: float, beta: float | None = None):
    """Fuel cell: (power MW, heat MW) from ``hydrogen`` kg/h consumed."""
    return ht_output(hydrogen, electric_eff, waste_heat_eff, beta)


GENERATOR_OUTPUTS = {"HT": ht_output, "FC": fc_output}


def hydrogen_burn(power, electric_eff: float, beta: float | None = None):
    """kg/h a hydrogen generator burns to deliver ``power`` MW."""
    beta = e2h_coefficient() if beta is None else beta
    return (beta / electric_eff) * power


def ec_surplus_expression(renewables) -> Affine:
    """
    Renewable power left over after dispatch, the most electrolysers may draw in an hour.

    ``renewables`` is an iterable of ``(cf, capacity, dispatch)`` with ``cf`` a
    float and the others expressions, one entry per WT/PV fleet in the region.
    """
    return pulp.lpSum(cf * capacity - dispatch for cf, capacity, dispatch in renewables)


def ec_surplus_bound(wind_cf, wind_installed, wind_dispatch, solar_cf=0.0, solar_installed=0.0, solar_dispatch=0.0, tolerance: float = 1e-6):
    """
    Hourly MW of wind and solar left after dispatch, clamped at zero.

    Works on scalars or hourly arrays. Dispatch above the available output by
    more than ``tolerance`` (relative) is an error.
    """
    surplus = []
    for cf, installed, dispatch in ((wind_cf, wind_installed, wind_dispatch), (solar_cf, solar_installed, solar_dispatch)):
        available = np.asarray(cf, dtype=float) * installed
        left = available - np.asarray(dispatch, dtype=float)
        if np.any(left < -tolerance * (1.0 + np.abs(available))):
            raise ValueError(f"renewable dispatch exceeds available output by {float(-np.min(left)):.6g} MW")
        surplus.append(left)
    bound = np.maximum(surplus[0] + surplus[1], 0.0)
    return float(bound) if bound.ndim == 0 else bound


def chain_economics(produced, served_demand, prices: PriceBook, water_per_kg: float = 9.0, oxygen_per_kg: float = 8.0):
    """(water cost $, oxygen revenue $, hydrogen revenue $) for ``produced`` kg made and ``served_demand`` kg sold."""
    water_cost = water_per_kg * prices.water * produced
    oxygen_revenue = oxygen_per_kg * prices.oxygen * produced
    hydrogen_revenue = prices.hydrogen * served_demand
    return water_cost, oxygen_revenue, hydrogen_revenue
