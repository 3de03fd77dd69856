"""
Plan solutions: extraction from a solved planning model, balance residuals
recomputed from the extracted series, and CSV output.
"""
import logging
import os
import pathlib
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import pulp

from hyplan.assemble.accounting import CostBreakdown, co2_total, cost_breakdown
from hyplan.assemble.planning_model import PlanningModel, SeriesKey, build_planning_lp
from hyplan.chain.devices import ec_surplus_bound
from hyplan.chain.storage import simulate_inventory
from hyplan.configuration import ELECTRIC_STORAGE_KINDS, ScenarioConfig
from hyplan.hyplan_exception import FingerprintMismatchError, InfeasibleScenarioError, SolutionImportError, SolverError
from hyplan.solve.solver import SolveStatus, solve

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"

# hourly quantities carried as series; module states go to their own table
SERIES_QUANTITIES = frozenset(
    {"online", "startup", "shutdown", "power", "charge", "discharge", "soc", "reserve", "compressor_power", "heat_curtailment", "flow"}
)
MODULE_QUANTITIES = frozenset({"module_on", "module_start", "module_stop", "module_power"})

ELECTRIC_SOURCES = ("TU", "CHP", "WT", "PV", "HT", "FC")
ELECTRIC_LOADS = ("EC", "EB")


@dataclass
class PlanSolution:
    scenario: ScenarioConfig
    mode: str
    epsilon: float | None
    fingerprint: str
    scenario_fingerprint: str
    objective: float
    capacities: pd.DataFrame
    lines: pd.DataFrame
    dispatch: pd.DataFrame
    modules: pd.DataFrame
    hydrogen_nodes: pd.DataFrame
    residuals: pd.DataFrame = None
    co2: float = 0.0
    renewable_curtailment: float = 0.0
    heat_curtailment: float = 0.0
    costs: CostBreakdown = None
    emission_slack: float = 0.0
    solve_seconds: float = 0.0
    warnings: list[str] = field(default_factory=list)
    values: dict[SeriesKey, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def horizon(self) -> int:
        return self.scenario.horizon_hours

    def series(self, quantity: str, region: str, technology: str = "") -> np.ndarray:
        """Hourly values of one series, zeros when the model has no such series."""
        return self.values.get((quantity, region, technology), np.zeros(self.horizon))

    def technologies(self, region: str, *kinds: str) -> list[str]:
        frame = self.capacities[self.capacities["region"] == region]
        if kinds:
            frame = frame[frame["kind"].isin(kinds)]
        return list(frame["technology"])

    def total(self, quantity: str, *kinds: str) -> float:
        """Sum over regions, matching technologies and hours."""
        return float(sum(np.sum(self.series(quantity, region.id, tech)) for region in self.scenario.regions for tech in self.technologies(region.id, *kinds)))

    def installed(self, region: str, technology: str) -> float:
        match = self.capacities[(self.capacities["region"] == region) & (self.capacities["technology"] == technology)]
        return float(match["installed"].iloc[0]) if len(match) else 0.0

    def max_relative_residual(self, balance: str) -> float:
        frame = self.residuals[self.residuals["balance"] == balance]
        return float(frame["relative"].abs().max()) if len(frame) else 0.0


def extract_solution(model: PlanningModel, result) -> PlanSolution:
    """
    Map an OPTIMAL result of ``model`` back onto capacities, lines, hourly
    series and module schedules, then attach residuals, emissions,
    curtailment and the cost breakdown.
    """
    if result.fingerprint != model.fingerprint:
        raise FingerprintMismatchError(
            "solve result does not belong to this planning model",
            {"model": model.fingerprint, "result": result.fingerprint},
        )
    if not result.optimal:
        raise SolverError(f"cannot extract a plan from a {result.status.value} result", {"status": result.status.value})
    x = None if result.primal is None else np.asarray(result.primal, dtype=float)
    if x is None or len(x) != model.lp.num_variables or np.isnan(x).any():
        missing = model.lp.num_variables if x is None else int(np.isnan(x).sum()) + abs(model.lp.num_variables - len(x))
        raise SolutionImportError(f"missing values for {missing} variable(s)", {"missing": missing})
    lower, upper = model.lp.variable_bounds()
    x = np.clip(x, lower, upper)

    scenario = model.scenario
    horizon = scenario.horizon_hours

    capacity_rows: dict[tuple[str, str], dict] = {}
    line_rows = []
    module_rows = []
    emission_slack = 0.0
    for column, key in enumerate(model.keys):
        value = float(x[column])
        if key.quantity in ("capacity", "energy_capacity"):
            region = scenario.region(key.region)
            tech = scenario.technology(key.technology)
            row = capacity_rows.setdefault(
                (key.region, key.technology),
                {
                    "region": key.region,
                    "technology": key.technology,
                    "kind": tech.kind,
                    "existing": scenario.existing(region, tech),
                    "installed": np.nan,
                    "energy_existing": np.nan,
                    "energy_installed": np.nan,
                },
            )
            if key.quantity == "capacity":
                row["installed"] = value
            else:
                row["energy_existing"] = scenario.existing(region, tech) * tech.storage.existing_duration_hours
                row["energy_installed"] = value
        elif key.quantity == "line_capacity":
            corridor = scenario.topology.corridor_between(key.region, key.technology)
            line_rows.append({"from": key.region, "to": key.technology, "existing": corridor.existing_capacity, "installed": value})
        elif key.quantity in MODULE_QUANTITIES:
            module_rows.append({"quantity": key.quantity, "region": key.region, "module": key.technology, "hour": key.hour, "value": value})
        elif key.quantity == "emission_slack":
            emission_slack = value
        elif key.quantity in SERIES_QUANTITIES and (key.quantity, key.region, key.technology) in model.series:
            pass
        else:
            raise ValueError(f"variable {key.name()} has no place in a plan solution")

    model.lp.assign(x)
    values = {key: np.array([pulp.value(expression) for expression in expressions], dtype=float) for key, expressions in model.series.items()}
    dispatch = pd.DataFrame(
        [
            {"quantity": quantity, "region": region, "technology": technology, "hour": t + 1, "value": float(series[t])}
            for (quantity, region, technology), series in values.items()
            for t in range(horizon)
        ],
        columns=["quantity", "region", "technology", "hour", "value"],
    )
    capacities = pd.DataFrame(
        list(capacity_rows.values()),
        columns=["region", "technology", "kind", "existing", "installed", "energy_existing", "energy_installed"],
    )
    capacities["new"] = capacities["installed"] - capacities["existing"]
    lines = pd.DataFrame(line_rows, columns=["from", "to", "existing", "installed"])
    lines["new"] = lines["installed"] - lines["existing"]
    modules = pd.DataFrame(module_rows, columns=["quantity", "region", "module", "hour", "value"])

    solution = PlanSolution(
        scenario=scenario,
        mode=model.mode,
        epsilon=model.epsilon,
        fingerprint=model.fingerprint,
        scenario_fingerprint=model.scenario_fingerprint,
        objective=float(model.lp.objective_value(x)),
        capacities=capacities,
        lines=lines,
        dispatch=dispatch,
        modules=modules,
        hydrogen_nodes=pd.DataFrame(),
        emission_slack=emission_slack,
        solve_seconds=float(result.seconds),
        values=values,
    )
    solution.hydrogen_nodes = hydrogen_nodes(solution)
    solution.residuals = balance_residuals(solution)
    solution.co2 = co2_total(solution)
    solution.renewable_curtailment, solution.heat_curtailment = curtailment(solution)
    solution.costs = cost_breakdown(solution)
    solution.warnings.extend(storage_overlap_warnings(solution))
    for warning in solution.warnings:
        logger.warning(warning)
    return solution


def hydrogen_nodes(solution: PlanSolution) -> pd.DataFrame:
    """Per region and hour: kg injected (EC output, HS discharge) and withdrawn (HT, FC, HS charge, demand)."""
    scenario = solution.scenario
    rows = []
    for region in scenario.regions:
        injection = np.zeros(solution.horizon)
        withdrawal = scenario.hydrogen_demand(region).copy()
        for tech in solution.technologies(region.id, "EC"):
            injection += solution.series("hydrogen_output", region.id, tech)
        for tech in solution.technologies(region.id, "HS"):
            injection += solution.series("discharge", region.id, tech)
            withdrawal += solution.series("charge", region.id, tech)
        for tech in solution.technologies(region.id, "HT", "FC"):
            withdrawal += solution.series("hydrogen_input", region.id, tech)
        rows.extend(
            {"region": region.id, "hour": t + 1, "injection": float(injection[t]), "withdrawal": float(withdrawal[t])}
            for t in range(solution.horizon)
        )
    return pd.DataFrame(rows, columns=["region", "hour", "injection", "withdrawal"])


def balance_residuals(solution: PlanSolution) -> pd.DataFrame:
    """
    Electric, heat and hydrogen balances and storage cycles evaluated on the
    extracted series. ``relative`` divides by the peak of the matching demand
    (at least 1).
    """
    scenario = solution.scenario
    horizon = solution.horizon
    rows = []
    peak_electric = max(1.0, max(float(np.max(r.series("electric_demand", horizon))) for r in scenario.regions))
    peak_heat = max(1.0, max(float(np.max(r.series("heat_demand", horizon))) for r in scenario.regions))
    hydrogen_demand = sum(scenario.hydrogen_demand(r) for r in scenario.regions)
    peak_hydrogen = max(1.0, float(np.max(hydrogen_demand)))

    for region in scenario.regions:
        k = region.id
        net = np.zeros(horizon)
        for tech in solution.technologies(k, *ELECTRIC_SOURCES):
            net += solution.series("power", k, tech)
        for tech in solution.technologies(k, *ELECTRIC_STORAGE_KINDS):
            net += solution.series("discharge", k, tech) - solution.series("charge", k, tech)
        for tech in solution.technologies(k, *ELECTRIC_LOADS):
            net -= solution.series("power", k, tech)
        for tech in solution.technologies(k, "COP"):
            net -= solution.series("compressor_power", k, tech)
        for corridor in scenario.topology.corridors:
            flow = solution.series("flow", corridor.from_region, corridor.to_region)
            if corridor.to_region == k:
                net += flow
            elif corridor.from_region == k:
                net -= flow
        net -= region.series("electric_demand", horizon) + region.series("export_demand", horizon)
        rows.extend(("electric", k, "", t + 1, net[t], net[t] / peak_electric) for t in range(horizon))

        if (("heat_curtailment", k, "")) in solution.values:
            heat = -solution.series("heat_curtailment", k) - region.series("heat_demand", horizon)
            for tech in solution.technologies(k, "CHP", "EC", "HT", "FC", "EB"):
                heat += solution.series("heat_output", k, tech)
            for tech in solution.technologies(k, "HST"):
                heat += solution.series("discharge", k, tech) - solution.series("charge", k, tech)
            rows.extend(("heat", k, "", t + 1, heat[t], heat[t] / peak_heat) for t in range(horizon))

        for tech_id in solution.technologies(k, "BES", "HPS", "HST", "HS"):
            if ("soc", k, tech_id) not in solution.values:
                continue
            params = scenario.technology(tech_id).storage
            soc = solution.series("soc", k, tech_id)
            charge, discharge = solution.series("charge", k, tech_id), solution.series("discharge", k, tech_id)
            simulated = simulate_inventory(charge, discharge, params, initial=soc[0])
            # the inventory after the last hour is only pinned when operation wraps
            target = np.append(soc[1:], soc[0]) if scenario.cyclic_operation else soc[1:]
            drift = simulated[1 : len(target) + 1] - target
            residual = float(drift[np.argmax(np.abs(drift))]) if drift.size else 0.0
            rows.append(("storage_cycle", k, tech_id, 0, residual, residual / max(1.0, float(np.max(soc)))))

    nodes = solution.hydrogen_nodes
    if len(nodes) and (np.any(nodes["injection"]) or np.any(nodes["withdrawal"])):
        hourly = nodes.groupby("hour")[["injection", "withdrawal"]].sum()
        for hour, entry in hourly.iterrows():
            residual = float(entry["injection"] - entry["withdrawal"])
            rows.append(("hydrogen", "", "", int(hour), residual, residual / peak_hydrogen))
    return pd.DataFrame(rows, columns=["balance", "region", "technology", "hour", "residual", "relative"])


def curtailment(solution: PlanSolution) -> tuple[float, float]:
    """(renewable MWh, heat MWh). Electrolysers run on surplus renewables, so their draw is not curtailed."""
    scenario = solution.scenario
    horizon = solution.horizon
    renewable = 0.0
    for region in scenario.regions:
        fleets = {}
        for kind, series in (("WT", "wind_cf"), ("PV", "solar_cf")):
            techs = solution.technologies(region.id, kind)
            installed = sum(solution.installed(region.id, tech) for tech in techs)
            dispatch = sum((solution.series("power", region.id, tech) for tech in techs), np.zeros(horizon))
            cf = region.series(series, horizon) if techs else np.zeros(horizon)
            fleets[kind] = (cf, installed, dispatch)
        surplus = ec_surplus_bound(*fleets["WT"], *fleets["PV"])
        renewable += float(np.sum(surplus))
        for tech in solution.technologies(region.id, "EC"):
            renewable -= float(np.sum(solution.series("power", region.id, tech)))
    heat = float(sum(np.sum(solution.series("heat_curtailment", region.id)) for region in scenario.regions))
    return max(renewable, 0.0), max(heat, 0.0)


def storage_overlap_warnings(solution: PlanSolution, tolerance: float = 1e-6) -> list[str]:
    """Hours in which a storage fleet both charges and discharges."""
    warnings = []
    for region in solution.scenario.regions:
        for tech in solution.technologies(region.id, "BES", "HPS", "HST", "HS"):
            overlap = np.minimum(solution.series("charge", region.id, tech), solution.series("discharge", region.id, tech))
            hours = np.flatnonzero(overlap > tolerance * (1.0 + solution.installed(region.id, tech)))
            if hours.size:
                warnings.append(
                    f"{region.id}/{tech}: simultaneous charge and discharge in {hours.size} hour(s), "
                    f"first at hour {hours[0] + 1}, largest overlap {overlap.max():.6g}"
                )
    return warnings


def write_solution_tables(solution: PlanSolution, out_dir: str | os.PathLike) -> list[pathlib.Path]:
    """Write the plan as flat CSV files; returns the paths written."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = {
        "capacities.csv": solution.capacities,
        "lines.csv": solution.lines,
        "dispatch.csv": solution.dispatch,
        "hydrogen_nodes.csv": solution.hydrogen_nodes,
        "residuals.csv": solution.residuals,
        "cost_breakdown.csv": solution.costs.table,
    }
    if len(solution.modules):
        tables["modules.csv"] = solution.modules
    summary = pd.DataFrame(
        [
            ("mode", solution.mode),
            ("epsilon", "" if solution.epsilon is None else repr(solution.epsilon)),
            ("objective", repr(solution.objective)),
            ("total_cost_usd", repr(solution.costs.net_total)),
            ("co2_tons", repr(solution.co2)),
            ("renewable_curtailment_mwh", repr(solution.renewable_curtailment)),
            ("heat_curtailment_mwh", repr(solution.heat_curtailment)),
            ("max_electric_residual", repr(solution.max_relative_residual("electric"))),
            ("max_heat_residual", repr(solution.max_relative_residual("heat"))),
            ("max_hydrogen_residual", repr(solution.max_relative_residual("hydrogen"))),
            ("scenario_fingerprint", solution.scenario_fingerprint),
        ],
        columns=["key", "value"],
    )
    tables["summary.csv"] = summary
    written = []
    for name, frame in tables.items():
        path = out_dir / name
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        written.append(path)
    if solution.warnings:
        path = out_dir / "warnings.txt"
        path.write_text("\n".join(solution.warnings) + "\n")
        written.append(path)
    return written


def solve_plan(
    scenario: ScenarioConfig,
    mode: str | None = None,
    epsilon: float | None = None,
    augmentation: float = 0.0,
    commitment: str | None = None,
    log=None,
    label: str = "",
) -> PlanSolution:
    """Build, solve with the bundled solver and extract one plan."""
    model = build_planning_lp(scenario, mode, epsilon, augmentation, commitment)
    result = solve(model.lp, scenario.solver, fingerprint=model.fingerprint, log=log, label=label or model.mode)
    if result.status is SolveStatus.INFEASIBLE:
        raise InfeasibleScenarioError(
            f"scenario {scenario.name} has no feasible plan in {model.mode} mode",
            {"mode": model.mode, "epsilon": model.epsilon, "solver": result.message},
        )
    if not result.optimal:
        raise SolverError(f"{model.mode} solve ended with status {result.status.value}", {"mode": model.mode, "solver": result.message})
    return extract_solution(model, result)
