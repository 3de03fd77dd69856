"""
Annual cost and emission accounting of a plan, evaluated numerically from the
extracted capacities and series with the same unit costs the model uses.
"""
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tabulate import tabulate

from hyplan.assemble import unit_costs
from hyplan.chain.devices import chain_economics

COMPONENTS = {
    "TU": "C_TU",
    "CHP": "C_TU",
    "WT": "C_WT",
    "PV": "C_PV",
    "BES": "C_ES",
    "HPS": "C_ES",
    "EC": "C_EC",
    "HT": "C_HT",
    "FC": "C_FC",
    "HS": "C_HS",
    "COP": "C_COP",
    "EB": "C_EB",
    "HST": "C_HES",
}
COMPONENT_ORDER = ("C_TU", "C_WT", "C_PV", "C_ES", "C_EC", "C_HT", "C_FC", "C_HS", "C_COP", "C_EB", "C_HES", "C_L")


@dataclass
class CostBreakdown:
    # component, investment, fixed_om, operating, total ($/yr)
    table: pd.DataFrame
    oxygen_revenue: float
    hydrogen_revenue: float

    @property
    def revenue(self) -> float:
        return self.oxygen_revenue + self.hydrogen_revenue

    @property
    def gross_total(self) -> float:
        return float(self.table["total"].sum())

    @property
    def net_total(self) -> float:
        return self.gross_total - self.revenue

    def component(self, name: str) -> float:
        match = self.table[self.table["component"] == name]
        return float(match["total"].iloc[0]) if len(match) else 0.0

    def as_text(self) -> str:
        rows = self.table.values.tolist()
        rows.append(["R", 0.0, 0.0, -self.revenue, -self.revenue])
        rows.append(["net", None, None, None, self.net_total])
        return tabulate(rows, headers=list(self.table.columns), floatfmt=",.0f")


def cost_breakdown(solution) -> CostBreakdown:
    """
    Annualised investment on new capacity, fixed O&M on installed capacity and
    weighted operating cost per component, with oxygen and hydrogen revenue.
    The net total equals the cost objective of the model that produced the plan.
    """
    scenario = solution.scenario
    weight = scenario.operation_weight
    prices = scenario.price_book
    totals = {name: {"investment": 0.0, "fixed_om": 0.0, "operating": 0.0} for name in COMPONENT_ORDER}
    oxygen_revenue = 0.0

    for row in solution.capacities.itertuples(index=False):
        tech = scenario.technology(row.technology)
        region = scenario.region(row.region)
        entry = totals[COMPONENTS[tech.kind]]
        investment, fixed_om = unit_costs.capacity_cost(tech)
        entry["investment"] += investment * (row.installed - row.existing)
        entry["fixed_om"] += fixed_om * row.installed
        if not np.isnan(row.energy_installed):
            investment, fixed_om = unit_costs.energy_capacity_cost(tech)
            entry["investment"] += investment * (row.energy_installed - row.energy_existing)
            entry["fixed_om"] += fixed_om * row.energy_installed

        rate = unit_costs.variable_cost(tech, region)
        if tech.kind in ("BES", "HPS", "HST", "HS"):
            moved = np.sum(solution.series("charge", region.id, tech.id) + solution.series("discharge", region.id, tech.id))
            operating = rate * moved
        elif tech.kind == "COP":
            operating = 0.0
        else:
            operating = rate * np.sum(solution.series("power", region.id, tech.id))
            if tech.committed:
                operating += unit_costs.startup_cost(tech) * np.sum(solution.series("startup", region.id, tech.id))
        if tech.kind == "EC":
            produced = float(np.sum(solution.series("hydrogen_output", region.id, tech.id)))
            water, oxygen, _ = chain_economics(produced, 0.0, prices, tech.conversion.water_per_kg_h2, tech.conversion.oxygen_per_kg_h2)
            operating += water
            oxygen_revenue += weight * oxygen
        entry["operating"] += weight * float(operating)

    line = scenario.line_technology()
    for _, row in solution.lines.iterrows():
        corridor = scenario.topology.corridor_between(row["from"], row["to"])
        investment, fixed_om = unit_costs.line_cost(line, corridor)
        totals["C_L"]["investment"] += investment * (row["installed"] - row["existing"])
        totals["C_L"]["fixed_om"] += fixed_om * row["installed"]

    served = float(sum(np.sum(scenario.hydrogen_demand(region)) for region in scenario.regions))
    hydrogen_revenue = weight * chain_economics(0.0, served, prices)[2] if served > 0 else 0.0

    table = pd.DataFrame(
        [(name, *totals[name].values(), sum(totals[name].values())) for name in COMPONENT_ORDER],
        columns=["component", "investment", "fixed_om", "operating", "total"],
    )
    return CostBreakdown(table=table, oxygen_revenue=oxygen_revenue, hydrogen_revenue=hydrogen_revenue)


def co2_total(solution, emission_factors: dict | None = None) -> float:
    """
    Annual tons of CO2 from TU and CHP dispatch.

    ``emission_factors`` maps a technology id, or a (region, technology) pair,
    to t/MWh; by default factors come from the scenario. A dispatched emitting
    fleet without a factor is an error.
    """
    scenario = solution.scenario
    total = 0.0
    for region in scenario.regions:
        for tech_id in solution.technologies(region.id, "TU", "CHP"):
            generated = float(np.sum(solution.series("power", region.id, tech_id)))
            if generated == 0.0:
                continue
            if emission_factors is None:
                try:
                    factor = scenario.emission_factor(region, scenario.technology(tech_id))
                except KeyError:
                    factor = None
            else:
                factor = emission_factors.get((region.id, tech_id), emission_factors.get(tech_id))
            if factor is None:
                raise ValueError(f"no emission factor for dispatched {tech_id} in region {region.id}")
            total += factor * generated
    return scenario.operation_weight * total
