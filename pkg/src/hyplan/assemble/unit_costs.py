"""
Per-unit cost coefficients in the model's canonical units.

Capital and fixed O&M are quoted per kW (per kg for HS, per kg/h for COP),
variable O&M per kWh and start-up cost per kW started; the model works in MW,
MWh and kg, so the kW-based figures are scaled by 1000 here and nowhere else.
"""
from hyplan.configuration import MASS_RATED_KINDS, Corridor, RegionSpec, TechnologySpec
from hyplan.finance import amortized_cost, annual_fixed_om
from hyplan.units import KW_PER_MW


def capacity_unit(tech: TechnologySpec) -> float:
    return 1.0 if tech.kind in MASS_RATED_KINDS else KW_PER_MW


def capacity_cost(tech: TechnologySpec) -> tuple[float, float]:
    """(annualised investment, fixed O&M) per year per MW (kg for HS, kg/h for COP)."""
    unit = capacity_unit(tech)
    cost = tech.cost
    return (
        amortized_cost(cost.capital, cost.lifetime_years, cost.interest_rate) * unit,
        annual_fixed_om(cost.capital, cost.fixed_om_fraction) * unit,
    )


def energy_capacity_cost(tech: TechnologySpec) -> tuple[float, float]:
    """(annualised investment, fixed O&M) per year per MWh of energy rating for BES, HPS and HST."""
    if tech.storage is None:
        return 0.0, 0.0
    capital = tech.storage.energy_capital
    cost = tech.cost
    return (
        amortized_cost(capital, cost.lifetime_years, cost.interest_rate) * KW_PER_MW,
        annual_fixed_om(capital, cost.fixed_om_fraction) * KW_PER_MW,
    )


def line_cost(line: TechnologySpec, corridor: Corridor) -> tuple[float, float]:
    """(annualised investment, fixed O&M) per year per MW of corridor rating."""
    cost = line.cost
    return (
        amortized_cost(corridor.capital, cost.lifetime_years, cost.interest_rate) * KW_PER_MW,
        annual_fixed_om(corridor.capital, cost.fixed_om_fraction) * KW_PER_MW,
    )


def variable_cost(tech: TechnologySpec, region: RegionSpec) -> float:
    """$ per MWh of output (per kg moved for HS): variable O&M plus fuel."""
    rate = tech.cost.variable_om * capacity_unit(tech)
    if tech.fuel is not None:
        rate += region.fuel_prices[tech.fuel] * tech.cost.fuel_use_per_mwh
    return rate


def startup_cost(tech: TechnologySpec) -> float:
    """$ per MW started."""
    return tech.cost.startup_cost * KW_PER_MW
