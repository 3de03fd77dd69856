"""
Comparison of a clustered-relaxation plan with the exact per-module plan of
the same instance.
"""
import math
from dataclasses import dataclass

import pandas as pd
from tabulate import tabulate

from hyplan.configuration import COMMITTED_KINDS, REGION_SERIES, ScenarioConfig, dump_scenario, validate_scenario
from hyplan.hyplan_exception import FingerprintMismatchError

# kinds whose hourly electric output or draw is compared
COMPARED_KINDS = ("TU", "CHP", "EC", "HT", "FC", "WT", "PV", "EB")


@dataclass
class GapReport:
    # technology, relaxed, exact, relative_error (MWh over the horizon)
    totals: pd.DataFrame
    relaxed_objective: float
    exact_objective: float
    relaxed_seconds: float
    exact_seconds: float

    @property
    def max_relative_error(self) -> float:
        return float(self.totals["relative_error"].max()) if len(self.totals) else 0.0

    @property
    def objective_gap(self) -> float:
        """(exact - relaxed) / |exact|, nonnegative when the relaxation bound holds."""
        return (self.exact_objective - self.relaxed_objective) / max(abs(self.exact_objective), 1.0)

    @property
    def bound_holds(self) -> bool:
        return self.relaxed_objective <= self.exact_objective + 1e-7 * (1.0 + abs(self.exact_objective))

    @property
    def speedup(self) -> float:
        return self.exact_seconds / self.relaxed_seconds if self.relaxed_seconds > 0 else math.inf

    def within(self, threshold: float = 0.02) -> bool:
        return self.max_relative_error <= threshold and self.bound_holds

    def summary(self) -> dict:
        return {
            "max_relative_error": self.max_relative_error,
            "relaxed_objective": self.relaxed_objective,
            "exact_objective": self.exact_objective,
            "objective_gap": self.objective_gap,
            "bound_holds": self.bound_holds,
            "relaxed_seconds": self.relaxed_seconds,
            "exact_seconds": self.exact_seconds,
            "speedup": self.speedup,
        }

    def as_text(self) -> str:
        table = tabulate(self.totals.values.tolist(), headers=list(self.totals.columns), floatfmt=".6g")
        lines = [table, ""]
        lines.extend(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}" for key, value in self.summary().items())
        return "\n".join(lines)


def _technology_totals(solution) -> dict[str, float]:
    totals: dict[str, float] = {}
    for region in solution.scenario.regions:
        for tech in solution.technologies(region.id, *COMPARED_KINDS):
            totals[tech] = totals.get(tech, 0.0) + float(solution.series("power", region.id, tech).sum())
    return totals


def relaxation_gap(relaxed, exact) -> GapReport:
    """
    Per-technology energy totals of two plans of the same scenario, their
    largest relative difference and the objective gap.

    Totals below one millionth of the largest total count as zero.
    """
    if relaxed.scenario_fingerprint != exact.scenario_fingerprint:
        raise FingerprintMismatchError(
            "relaxed and exact plans were built from different scenarios",
            {"relaxed": relaxed.scenario_fingerprint, "exact": exact.scenario_fingerprint},
        )
    relaxed_totals, exact_totals = _technology_totals(relaxed), _technology_totals(exact)
    technologies = sorted(set(relaxed_totals) | set(exact_totals))
    scale = max([abs(value) for value in exact_totals.values()] + [1.0])
    rows = []
    for tech in technologies:
        r, e = relaxed_totals.get(tech, 0.0), exact_totals.get(tech, 0.0)
        difference = abs(r - e)
        floor = 1e-6 * scale
        error = 0.0 if difference <= floor else difference / max(abs(e), floor)
        rows.append((tech, r, e, error))
    return GapReport(
        totals=pd.DataFrame(rows, columns=["technology", "relaxed", "exact", "relative_error"]),
        relaxed_objective=relaxed.objective,
        exact_objective=exact.objective,
        relaxed_seconds=relaxed.solve_seconds,
        exact_seconds=exact.solve_seconds,
    )


def validation_instance(scenario: ScenarioConfig, hours: int | None = None, module_count: int | None = None) -> ScenarioConfig:
    """
    Dispatch-only copy of ``scenario`` for the relaxation check: the horizon
    cut to ``hours``, every build limit and corridor limit set to the existing
    capacity, and the module count of the exact commitment set.
    """
    hours = hours or scenario.validation.horizon_hours or scenario.horizon_hours
    module_count = module_count or scenario.validation.module_count
    if hours > scenario.horizon_hours:
        raise ValueError(f"validation horizon {hours} exceeds the scenario horizon {scenario.horizon_hours}")
    document = dump_scenario(scenario)
    document["horizon_hours"] = hours
    document["module_count"] = module_count
    for raw, region in zip(document["regions"], scenario.regions):
        for name in REGION_SERIES:
            if raw.get(name) is not None:
                raw[name] = raw[name][:hours]
        raw["build_limit"] = {tech.id: scenario.existing(region, tech) for tech in scenario.technologies if tech.kind != "LINE"}
    for corridor in document["topology"]["corridors"]:
        corridor["capacity_limit"] = corridor["existing_capacity"]
    policy = document["reserve_policy"]
    for credit in ("wind_credit", "solar_credit"):
        policy[credit] = _cut_credit(policy[credit], hours)
    frozen = validate_scenario(document)
    if not any(scenario.existing(region, tech) > 0 for region in frozen.regions for tech in frozen.available(region, *COMMITTED_KINDS)):
        raise ValueError("validation instance has no existing committed fleet to compare")
    return frozen


def _cut_credit(rule, hours: int):
    if isinstance(rule, list):
        return rule[:hours]
    if isinstance(rule, dict):
        return {region: values[:hours] for region, values in rule.items()}
    return rule
