"""
Assembly of the capacity-expansion and hourly-operation linear program.

One LP covers every region and hour of the horizon: capacity decisions for
each technology and corridor, hourly dispatch of every fleet, the electric and
heat balances per region and hour, the system-wide hydrogen balance per hour,
the renewable portfolio standard and the reliability margin. The objective
is the annual system cost net of by-product and hydrogen revenue, the annual
CO2 emissions, the cost with an emission cap, or the emissions with a cost
budget.
"""
import hashlib
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pulp

from hyplan.assemble import unit_costs
from hyplan.chain.devices import GENERATOR_OUTPUTS, ChainCoefficients, ec_output, ec_surplus_expression, hydrogen_burn
from hyplan.chain.storage import StorageVariables, hs_cop_block, storage_block
from hyplan.configuration import (
    ELECTRIC_STORAGE_KINDS,
    CreditRule,
    RegionSpec,
    ScenarioConfig,
    TechnologySpec,
    scenario_fingerprint,
)
from hyplan.flex.cluster import ClusterVariables, cluster_constraints, cluster_variables, default_initial_online
from hyplan.flex.unit_commitment import ModuleFleet, milp_constraints
from hyplan.hyplan_exception import InfeasibleScenarioError, ScenarioValidationError
from hyplan.solve.linear_program import Affine, LinearProgram, RowKey, VarKey

logger = logging.getLogger(__name__)

SeriesKey = tuple[str, str, str]

HEAT_SOURCE_KINDS = frozenset({"CHP", "EC", "HT", "FC", "EB", "HST"})


@dataclass(eq=False)
class PlanningModel:
    lp: LinearProgram
    # bidirectional: index[key] is the column of key, keys[column] its key
    index: dict[VarKey, int]
    keys: list[VarKey]
    scenario: ScenarioConfig
    mode: str
    epsilon: float | None
    augmentation: float
    commitment: str
    scenario_fingerprint: str
    fingerprint: str
    # hourly series per (quantity, region, technology), built from the variables
    series: dict[SeriesKey, list[Affine]]
    cost: Affine
    emissions: Affine

    def column(self, key: VarKey) -> int:
        return self.index[key]

    def describe(self) -> dict:
        return {**self.lp.describe(), "mode": self.mode, "epsilon": self.epsilon, "commitment": self.commitment}


def model_fingerprint(scenario_hash: str, mode: str, epsilon, augmentation: float, commitment: str) -> str:
    payload = f"{scenario_hash}|{mode}|{epsilon!r}|{augmentation!r}|{commitment}"
    return hashlib.sha256(payload.encode()).hexdigest()


def credit_series(rule: CreditRule, capacity_factor: np.ndarray, region_id: str) -> np.ndarray:
    """Hourly reliability credit of a renewable fleet per MW installed."""
    if rule == "equal-to-CF":
        return capacity_factor
    if isinstance(rule, dict):
        if region_id not in rule:
            return capacity_factor
        rule = rule[region_id]
    values = np.asarray(rule, dtype=float)
    if len(values) != len(capacity_factor):
        raise ScenarioValidationError([f"reserve_policy: credit series for {region_id} has {len(values)} values, expected {len(capacity_factor)}"])
    return values


@dataclass
class _RegionTerms:
    """Hourly left-hand sides collected while the fleets of one region are added."""

    horizon: int
    electric_supply: list = field(default_factory=list)
    electric_load: list = field(default_factory=list)
    heat_supply: list = field(default_factory=list)
    reliability_supply: list = field(default_factory=list)
    reliability_need: list = field(default_factory=list)
    electrolysis: list = field(default_factory=list)
    renewables: list = field(default_factory=list)
    has_heat_source: bool = False

    def __post_init__(self):
        for name in ("electric_supply", "electric_load", "heat_supply", "reliability_supply", "reliability_need", "electrolysis"):
            setattr(self, name, [pulp.LpAffineExpression() for _ in range(self.horizon)])
        self.renewables = [[] for _ in range(self.horizon)]


class _ModelBuilder:
    def __init__(self, scenario: ScenarioConfig, mode: str, epsilon: float | None, augmentation: float, commitment: str):
        self.scenario = scenario
        self.mode = mode
        self.epsilon = epsilon
        self.augmentation = augmentation
        self.commitment = commitment
        self.horizon = scenario.horizon_hours
        self.wrap = scenario.cyclic_operation
        try:
            self.chain = ChainCoefficients.from_scenario(scenario)
        except ValueError as error:
            raise ScenarioValidationError([f"technologies -> conversion\nensure {error}"]) from None
        self.beta = self.chain.beta
        self.weight = scenario.operation_weight
        self.lp = LinearProgram(name=scenario.name)
        self.index: dict[VarKey, int] = {}
        self.keys: list[VarKey] = []
        self.series: dict[SeriesKey, list[Affine]] = {}

        self.capital_terms = pulp.LpAffineExpression()
        self.operating_terms = pulp.LpAffineExpression()
        self.revenue_terms = pulp.LpAffineExpression()
        self.emission_terms = pulp.LpAffineExpression()

        self.hydrogen_supply = [pulp.LpAffineExpression() for _ in range(self.horizon)]
        self.hydrogen_use = [pulp.LpAffineExpression() for _ in range(self.horizon)]
        self.hydrogen_active = False
        self.rps_renewable = pulp.LpAffineExpression()
        self.rps_load = pulp.LpAffineExpression()
        self.rps_storage_net = pulp.LpAffineExpression()
        self.regions: dict[str, _RegionTerms] = {}

    ##########
    # Helpers
    ##########

    def add(self, key: VarKey, lower: float = 0.0, upper: float = math.inf, integer: bool = False) -> Affine:
        if key in self.index:
            raise ValueError(f"duplicate variable {key.name()}")
        expression = self.lp.add_variable(key.name(), lower, upper, integer)
        self.index[key] = len(self.keys)
        self.keys.append(key)
        return expression

    def hourly(self, quantity: str, region: str, technology: str, lower: float = 0.0, upper: float = math.inf) -> list[Affine]:
        return [self.add(VarKey(quantity, region, technology, t + 1), lower, upper) for t in range(self.horizon)]

    def record(self, quantity: str, region: str, technology: str, expressions) -> None:
        self.series[(quantity, region, technology)] = list(expressions)

    def row(self, family: str, constraint, region: str = "", technology: str = "", hour: int = 0) -> None:
        self.lp.add_constraint(constraint, RowKey(family, region, technology, hour))

    def capacity(self, region: RegionSpec, tech: TechnologySpec) -> Affine:
        existing = self.scenario.existing(region, tech)
        limit = self.scenario.limit(region, tech)
        if self.commitment == "binary" and tech.committed and limit != existing:
            raise ScenarioValidationError(
                [f"regions -> {region.id} -> build_limit\nensure build_limit equals existing_capacity for {tech.id} under binary commitment"]
            )
        installed = self.add(VarKey("capacity", region.id, tech.id), existing, limit)
        investment, fixed_om = unit_costs.capacity_cost(tech)
        self.capital_terms += investment * (installed - existing) + fixed_om * installed
        return installed

    def energy_capacity(self, region: RegionSpec, tech: TechnologySpec) -> Affine:
        existing = self.scenario.existing(region, tech) * tech.storage.existing_duration_hours
        rating = self.add(VarKey("energy_capacity", region.id, tech.id), existing, math.inf)
        investment, fixed_om = unit_costs.energy_capacity_cost(tech)
        self.capital_terms += investment * (rating - existing) + fixed_om * rating
        return rating

    ##########
    # Fleets
    ##########

    def committed_fleet(self, region: RegionSpec, tech: TechnologySpec, installed: Affine) -> ClusterVariables:
        existing = self.scenario.existing(region, tech)
        initial = default_initial_online(tech.flex, tech.kind, existing)
        if self.commitment == "binary":
            if existing > 0:
                fleet = ModuleFleet.splitting(existing, self.scenario.module_count)
                cluster, fragment = milp_constraints(self.add, tech.flex, fleet, self.horizon, self.wrap, initial, region.id, tech.id)
                self.lp.add_rows(fragment)
            else:
                idle = [pulp.LpAffineExpression() for _ in range(self.horizon)]
                cluster = ClusterVariables(idle, idle, idle, idle, 0.0)
        else:
            cluster = cluster_variables(self.add, self.horizon, installed, region.id, tech.id, initial)
            self.lp.add_rows(cluster_constraints(tech.flex, cluster, self.wrap, region.id, tech.id))
        self.record("online", region.id, tech.id, cluster.online)
        self.record("startup", region.id, tech.id, cluster.startup)
        self.record("shutdown", region.id, tech.id, cluster.shutdown)
        self.record("power", region.id, tech.id, cluster.dispatch)

        rate = unit_costs.variable_cost(tech, region)
        start_rate = unit_costs.startup_cost(tech)
        for t in range(self.horizon):
            self.operating_terms += rate * cluster.dispatch[t] + start_rate * cluster.startup[t]
        return cluster

    def thermal_unit(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        installed = self.capacity(region, tech)
        cluster = self.committed_fleet(region, tech, installed)
        factor = self.scenario.emission_factor(region, tech)
        heat = []
        for t in range(self.horizon):
            power = cluster.dispatch[t]
            terms.electric_supply[t] += power
            terms.reliability_supply[t] += tech.flex.max_load * cluster.online[t]
            self.emission_terms += factor * power
            if tech.kind == "CHP":
                heat.append(power * (tech.conversion.chp_heat_eff / tech.conversion.electric_eff))
                terms.heat_supply[t] += heat[-1]
        if tech.kind == "CHP":
            terms.has_heat_source = True
            self.record("heat_output", region.id, tech.id, heat)

    def electrolyser(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        installed = self.capacity(region, tech)
        cluster = self.committed_fleet(region, tech, installed)
        conversion = tech.conversion
        prices = self.scenario.price_book
        hydrogen, heat = [], []
        for t in range(self.horizon):
            power = cluster.dispatch[t]
            produced, recovered = ec_output(power, *self.chain.of(tech.id), self.beta)
            hydrogen.append(produced)
            heat.append(recovered)
            terms.electric_load[t] += power
            terms.heat_supply[t] += heat[-1]
            terms.reliability_need[t] += power
            terms.electrolysis[t] += power
            self.rps_load += power
            self.hydrogen_supply[t] += hydrogen[-1]
            self.operating_terms += (conversion.water_per_kg_h2 * prices.water) * hydrogen[-1]
            self.revenue_terms += (conversion.oxygen_per_kg_h2 * prices.oxygen) * hydrogen[-1]
        terms.has_heat_source = True
        self.hydrogen_active = True
        self.record("hydrogen_output", region.id, tech.id, hydrogen)
        self.record("heat_output", region.id, tech.id, heat)

    def hydrogen_generator(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        installed = self.capacity(region, tech)
        cluster = self.committed_fleet(region, tech, installed)
        output = GENERATOR_OUTPUTS[tech.kind]
        electric_eff, waste_heat_eff = self.chain.of(tech.id)
        hydrogen, heat = [], []
        for t in range(self.horizon):
            power = cluster.dispatch[t]
            hydrogen.append(hydrogen_burn(power, electric_eff, self.beta))
            heat.append(output(hydrogen[-1], electric_eff, waste_heat_eff, self.beta)[1])
            terms.electric_supply[t] += power
            terms.heat_supply[t] += heat[-1]
            terms.reliability_supply[t] += power
            self.rps_renewable += power
            self.hydrogen_use[t] += hydrogen[-1]
        terms.has_heat_source = True
        self.hydrogen_active = True
        self.record("hydrogen_input", region.id, tech.id, hydrogen)
        self.record("heat_output", region.id, tech.id, heat)

    def renewable(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        policy = self.scenario.reserve_policy
        installed = self.capacity(region, tech)
        if tech.kind == "WT":
            capacity_factor = region.series("wind_cf", self.horizon)
            credit = credit_series(policy.wind_credit, capacity_factor, region.id)
            error = policy.wind_error
        else:
            capacity_factor = region.series("solar_cf", self.horizon)
            credit = credit_series(policy.solar_credit, capacity_factor, region.id)
            error = policy.solar_error
        power = self.hourly("power", region.id, tech.id)
        rate = unit_costs.variable_cost(tech, region)
        for t in range(self.horizon):
            self.row("renewable_available", power[t] <= float(capacity_factor[t]) * installed, region.id, tech.id, t + 1)
            terms.electric_supply[t] += power[t]
            terms.reliability_supply[t] += float(credit[t]) * installed
            terms.reliability_need[t] += error * power[t]
            terms.renewables[t].append((float(capacity_factor[t]), installed, power[t]))
            self.rps_renewable += power[t]
            self.operating_terms += rate * power[t]
        self.record("power", region.id, tech.id, power)
        self.record("available", region.id, tech.id, [float(cf) * installed for cf in capacity_factor])

    def storage(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        """BES and HPS on the electric side, HST on the heat side."""
        installed = self.capacity(region, tech)
        rating = self.energy_capacity(region, tech)
        charge = self.hourly("charge", region.id, tech.id)
        discharge = self.hourly("discharge", region.id, tech.id)
        soc = self.hourly("soc", region.id, tech.id)
        variables = StorageVariables(charge, discharge, soc, energy_capacity=rating, power_capacity=installed)
        self.lp.add_rows(storage_block(tech.storage, variables, region.id, tech.id, self.wrap))
        rate = unit_costs.variable_cost(tech, region)
        electric = tech.kind in ELECTRIC_STORAGE_KINDS
        policy = self.scenario.reserve_policy
        reserve = None
        if electric and policy.enabled and policy.es_reserve_rule == "headroom":
            reserve = self.hourly("reserve", region.id, tech.id)
            self.record("reserve", region.id, tech.id, reserve)
        for t in range(self.horizon):
            net = discharge[t] - charge[t]
            self.operating_terms += rate * (charge[t] + discharge[t])
            if electric:
                terms.electric_supply[t] += net
                terms.reliability_supply[t] += discharge[t]
                self.rps_storage_net -= net
                if reserve is not None:
                    terms.reliability_supply[t] += reserve[t]
                    self.row("es_reserve_power", reserve[t] + discharge[t] <= installed, region.id, tech.id, t + 1)
                    self.row(
                        "es_reserve_energy",
                        reserve[t] + discharge[t] <= tech.storage.discharge_eff * soc[t],
                        region.id,
                        tech.id,
                        t + 1,
                    )
            else:
                terms.heat_supply[t] += net
        if not electric:
            terms.has_heat_source = True
        self.record("charge", region.id, tech.id, charge)
        self.record("discharge", region.id, tech.id, discharge)
        self.record("soc", region.id, tech.id, soc)

    def hydrogen_storage(self, region: RegionSpec, terms: _RegionTerms) -> None:
        vessels = self.scenario.available(region, "HS")
        compressors = self.scenario.available(region, "COP")
        if not vessels or not compressors:
            if vessels or compressors:
                logger.warning("Region %s: hydrogen storage needs both HS and COP; skipping %s", region.id, [t.id for t in vessels + compressors])
            return
        compressor = compressors[0]
        rating = self.capacity(region, compressor)
        compressor_power = self.hourly("compressor_power", region.id, compressor.id)
        fleets = []
        for tech in vessels:
            inventory_limit = self.capacity(region, tech)
            charge = self.hourly("charge", region.id, tech.id)
            discharge = self.hourly("discharge", region.id, tech.id)
            soc = self.hourly("soc", region.id, tech.id)
            fleets.append((tech.id, tech.storage, StorageVariables(charge, discharge, soc, energy_capacity=inventory_limit)))
            rate = unit_costs.variable_cost(tech, region)
            for t in range(self.horizon):
                self.hydrogen_supply[t] += discharge[t]
                self.hydrogen_use[t] += charge[t]
                self.operating_terms += rate * (charge[t] + discharge[t])
            self.record("charge", region.id, tech.id, charge)
            self.record("discharge", region.id, tech.id, discharge)
            self.record("soc", region.id, tech.id, soc)
        self.lp.add_rows(hs_cop_block(fleets, rating, compressor_power, compressor.conversion.cop_kwh_per_kg, region.id, self.wrap))
        for t in range(self.horizon):
            terms.electric_load[t] += compressor_power[t]
            terms.reliability_need[t] += compressor_power[t]
            self.rps_load += compressor_power[t]
        self.hydrogen_active = True
        self.record("compressor_power", region.id, compressor.id, compressor_power)

    def boiler(self, region: RegionSpec, terms: _RegionTerms, tech: TechnologySpec) -> None:
        installed = self.capacity(region, tech)
        power = self.hourly("power", region.id, tech.id)
        rate = unit_costs.variable_cost(tech, region)
        heat = []
        for t in range(self.horizon):
            self.row("eb_capacity", power[t] <= installed, region.id, tech.id, t + 1)
            heat.append(tech.conversion.electric_eff * power[t])
            terms.electric_load[t] += power[t]
            terms.heat_supply[t] += heat[-1]
            terms.reliability_need[t] += power[t]
            self.rps_load += power[t]
            self.operating_terms += rate * power[t]
        terms.has_heat_source = True
        self.record("power", region.id, tech.id, power)
        self.record("heat_output", region.id, tech.id, heat)

    def corridors(self) -> None:
        line = self.scenario.line_technology()
        for corridor in self.scenario.topology.corridors:
            a, b = corridor.from_region, corridor.to_region
            rating = self.add(VarKey("line_capacity", a, b), corridor.existing_capacity, corridor.capacity_limit)
            investment, fixed_om = unit_costs.line_cost(line, corridor)
            self.capital_terms += investment * (rating - corridor.existing_capacity) + fixed_om * rating
            flow = self.hourly("flow", a, b, lower=-math.inf)
            for t in range(self.horizon):
                self.row("line_limit_forward", flow[t] <= rating, a, b, t + 1)
                self.row("line_limit_reverse", -1.0 * flow[t] <= rating, a, b, t + 1)
                for region, sign in ((a, -1.0), (b, 1.0)):
                    self.regions[region].electric_supply[t] += sign * flow[t]
                    self.regions[region].reliability_supply[t] += sign * flow[t]
            self.record("flow", a, b, flow)

    ##########
    # Balances
    ##########

    def region_balances(self, region: RegionSpec, terms: _RegionTerms) -> None:
        demand = region.series("electric_demand", self.horizon)
        export = region.series("export_demand", self.horizon)
        heat_demand = region.series("heat_demand", self.horizon)
        policy = self.scenario.reserve_policy
        for t in range(self.horizon):
            self.row(
                "electric_balance",
                terms.electric_supply[t] - terms.electric_load[t] == float(demand[t] + export[t]),
                region.id,
                hour=t + 1,
            )
            if self.scenario.available(region, "EC"):
                self.row("ec_surplus", terms.electrolysis[t] <= ec_surplus_expression(terms.renewables[t]), region.id, hour=t + 1)
            if policy.enabled:
                self.row(
                    "reliability",
                    terms.reliability_supply[t] - terms.reliability_need[t]
                    >= float((1.0 + policy.demand_reserve_fraction) * demand[t] + export[t]),
                    region.id,
                    hour=t + 1,
                )
        if terms.has_heat_source or heat_demand.any():
            curtailment = self.hourly("heat_curtailment", region.id, "")
            for t in range(self.horizon):
                self.row("heat_balance", terms.heat_supply[t] - curtailment[t] == float(heat_demand[t]), region.id, hour=t + 1)
            self.record("heat_curtailment", region.id, "", curtailment)

    def hydrogen_balance(self) -> float:
        """Rows of the system-wide hydrogen balance; returns the total demand served (kg)."""
        demand = sum(self.scenario.hydrogen_demand(region) for region in self.scenario.regions)
        if not self.hydrogen_active and not np.any(demand):
            return 0.0
        for t in range(self.horizon):
            self.row("hydrogen_balance", self.hydrogen_supply[t] - self.hydrogen_use[t] == float(demand[t]), hour=t + 1)
        return float(np.sum(demand))

    def renewable_portfolio(self) -> None:
        gamma = self.scenario.rps_gamma
        if gamma is None:
            return
        fixed = sum(
            float(np.sum(region.series("electric_demand", self.horizon) + region.series("export_demand", self.horizon)))
            for region in self.scenario.regions
        )
        self.row("rps", self.rps_renewable - gamma * self.rps_load - gamma * self.rps_storage_net >= gamma * fixed)

    ##########
    # Checks
    ##########

    def check_structure(self) -> None:
        """Reject inputs no build can satisfy before anything is solved."""
        scenario = self.scenario
        hydrogen_demand = sum(float(np.sum(scenario.hydrogen_demand(region))) for region in scenario.regions)
        if hydrogen_demand > 0 and not any(scenario.available(region, "EC") for region in scenario.regions):
            raise InfeasibleScenarioError(
                "hydrogen demand cannot be served: no electrolyser is available in any region",
                {"hydrogen_demand_kg": hydrogen_demand},
            )
        for region in scenario.regions:
            demand = region.series("electric_demand", self.horizon) + region.series("export_demand", self.horizon)
            supply = np.zeros(self.horizon)
            for tech in scenario.available(region, "TU", "CHP", "HT", "FC"):
                supply += scenario.limit(region, tech) * tech.flex.max_load
            for tech in scenario.available(region, "BES", "HPS"):
                supply += scenario.limit(region, tech)
            for tech in scenario.available(region, "WT"):
                supply += scenario.limit(region, tech) * region.series("wind_cf", self.horizon)
            for tech in scenario.available(region, "PV"):
                supply += scenario.limit(region, tech) * region.series("solar_cf", self.horizon)
            for corridor in scenario.topology.corridors:
                if region.id in (corridor.from_region, corridor.to_region):
                    supply += corridor.capacity_limit
            short = np.flatnonzero(demand > supply + 1e-9 * (1.0 + np.abs(demand)))
            if short.size:
                t = int(short[0])
                raise InfeasibleScenarioError(
                    f"region {region.id}, hour {t + 1}: demand {demand[t]:g} MW exceeds the largest possible supply {supply[t]:g} MW",
                    {"region": region.id, "hour": t + 1, "demand_mw": float(demand[t]), "supply_mw": float(supply[t])},
                )
            heat_demand = region.series("heat_demand", self.horizon)
            if heat_demand.any() and not scenario.available(region, *HEAT_SOURCE_KINDS):
                t = int(np.flatnonzero(heat_demand)[0])
                raise InfeasibleScenarioError(
                    f"region {region.id}, hour {t + 1}: heat demand but no heat source is available",
                    {"region": region.id, "hour": t + 1},
                )

    ##########
    # Build
    ##########

    def build(self) -> PlanningModel:
        scenario = self.scenario
        self.check_structure()
        for region in scenario.regions:
            self.regions[region.id] = _RegionTerms(self.horizon)
        for region in scenario.regions:
            terms = self.regions[region.id]
            for tech in scenario.available(region, "TU", "CHP"):
                self.thermal_unit(region, terms, tech)
            for tech in scenario.available(region, "WT", "PV"):
                self.renewable(region, terms, tech)
            for tech in scenario.available(region, "EC"):
                self.electrolyser(region, terms, tech)
            for tech in scenario.available(region, "HT", "FC"):
                self.hydrogen_generator(region, terms, tech)
            for tech in scenario.available(region, "BES", "HPS", "HST"):
                self.storage(region, terms, tech)
            self.hydrogen_storage(region, terms)
            for tech in scenario.available(region, "EB"):
                self.boiler(region, terms, tech)
        self.corridors()
        for region in scenario.regions:
            self.region_balances(region, self.regions[region.id])
        served = self.hydrogen_balance()
        self.renewable_portfolio()

        revenue = self.revenue_terms + scenario.price_book.hydrogen * served
        cost = self.capital_terms + self.weight * (self.operating_terms - revenue)
        emissions = self.weight * self.emission_terms

        if self.mode == "min-cost":
            self.lp.set_objective(cost)
        elif self.mode == "min-co2":
            self.lp.set_objective(emissions)
        elif self.mode == "co2-under-budget":
            self.row("cost_budget", cost <= self.epsilon)
            self.lp.set_objective(emissions)
        else:
            if self.augmentation > 0:
                slack = self.add(VarKey("emission_slack"))
                self.row("emission_cap", emissions + slack == self.epsilon)
                self.lp.set_objective(cost - self.augmentation * slack)
            else:
                self.row("emission_cap", emissions <= self.epsilon)
                self.lp.set_objective(cost)

        lp = self.lp.canonical()
        scenario_hash = scenario_fingerprint(scenario)
        model = PlanningModel(
            lp=lp,
            index=self.index,
            keys=self.keys,
            scenario=scenario,
            mode=self.mode,
            epsilon=self.epsilon,
            augmentation=self.augmentation,
            commitment=self.commitment,
            scenario_fingerprint=scenario_hash,
            fingerprint=model_fingerprint(scenario_hash, self.mode, self.epsilon, self.augmentation, self.commitment),
            series=self.series,
            cost=cost,
            emissions=emissions,
        )
        logger.info(
            "Built %s (%s): %d variables, %d rows, %d nonzeros",
            lp.name,
            self.mode,
            lp.num_variables,
            lp.num_rows,
            lp.num_nonzeros,
        )
        return model


def build_planning_lp(
    scenario: ScenarioConfig,
    mode: str | None = None,
    epsilon: float | None = None,
    augmentation: float = 0.0,
    commitment: str | None = None,
) -> PlanningModel:
    """
    Build the planning LP for a validated scenario.

    ``mode`` defaults to the scenario's objective mode; in cost-under-cap mode
    the cap ``epsilon`` defaults to the scenario's emission cap. The
    co2-under-budget mode minimises emissions with total cost held to
    ``epsilon`` dollars; it settles ties between cost-optimal plans. A positive
    ``augmentation`` turns the cap into an equality with a nonnegative slack
    rewarded at that weight ($ per ton), which keeps capped optima efficient.
    ``commitment`` chooses the clustered relaxation ("relaxed") or exact
    per-module commitment ("binary", capacities must be fixed).
    """
    mode = mode or scenario.objective_mode
    commitment = commitment or scenario.commitment
    if mode not in ("min-cost", "min-co2", "cost-under-cap", "co2-under-budget"):
        raise ScenarioValidationError([f"objective_mode: unknown mode {mode!r}"])
    if mode == "co2-under-budget":
        if epsilon is None:
            raise ValueError("co2-under-budget mode needs a cost budget")
        augmentation = 0.0
    elif mode == "cost-under-cap":
        epsilon = scenario.emission_cap if epsilon is None else epsilon
        if epsilon is None:
            raise ScenarioValidationError(["emission_cap\nensure an emission cap is given for cost-under-cap mode"])
        if epsilon < 0:
            raise ScenarioValidationError([f"emission_cap\nensure the emission cap is nonnegative, found {epsilon}"])
    else:
        epsilon = None
        augmentation = 0.0
    if augmentation < 0:
        raise ValueError(f"augmentation weight must be nonnegative, got {augmentation}")
    return _ModelBuilder(scenario, mode, epsilon, float(augmentation), commitment).build()
