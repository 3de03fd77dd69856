import numpy as np
import pandas as pd
import pytest

from conftest import make_document, make_scenario, make_wind_region
from hyplan.assemble.accounting import COMPONENT_ORDER, co2_total
from hyplan.assemble.planning_model import build_planning_lp
from hyplan.assemble.solution import extract_solution, solve_plan, write_solution_tables
from hyplan.configuration import validate_scenario
from hyplan.hyplan_exception import FingerprintMismatchError, InfeasibleScenarioError, ScenarioValidationError
from hyplan.solve.solution_file import import_solution, write_solution
from hyplan.solve.solver import solve


def test_model_size_for_one_committed_fleet():
    model = build_planning_lp(make_scenario(horizon=2))
    # installed capacity plus online, startup, shutdown and power per hour
    assert model.lp.num_variables == 9
    # clustered rows, then electric balance and reliability per hour
    assert model.lp.num_rows == 22 + 2 + 2
    assert model.lp.num_integer == 0

    open_ended = build_planning_lp(make_scenario(horizon=2, cyclic_operation=False))
    assert open_ended.lp.num_rows == 18 + 2 + 2

    no_reserve = build_planning_lp(make_scenario(horizon=2, reserve_policy={"enabled": False}))
    assert no_reserve.lp.num_rows == 24


def test_rows_are_in_canonical_order():
    model = build_planning_lp(make_scenario(horizon=3))
    families = [model.lp.keys[name].family for name in model.lp.constraints]
    assert families == sorted(families)
    again = build_planning_lp(make_scenario(horizon=3))
    assert model.fingerprint == again.fingerprint
    assert list(model.lp.constraints) == list(again.lp.constraints)


def test_thermal_only_plan():
    solution = solve_plan(make_scenario(horizon=4))
    # reserve margin of 5% above the 100 MW load
    assert solution.installed("R", "TU_M") == pytest.approx(105.0, rel=1e-6)
    assert solution.series("power", "R", "TU_M") == pytest.approx([100.0] * 4, rel=1e-6)
    assert solution.max_relative_residual("electric") <= 1e-6
    assert solution.co2 == pytest.approx(0.9 * 100 * 4, rel=1e-6)
    assert co2_total(solution, {"TU_M": 1.0}) == pytest.approx(400.0, rel=1e-6)
    assert solution.costs.net_total == pytest.approx(solution.objective, rel=1e-8)
    assert list(solution.costs.table["component"]) == list(COMPONENT_ORDER)
    assert solution.costs.component("C_TU") == pytest.approx(solution.costs.gross_total)
    assert solution.warnings == []


def test_operation_weight_scales_operating_terms():
    daily = solve_plan(make_scenario(horizon=4))
    yearly = solve_plan(make_scenario(horizon=4, operation_weight=365))
    assert yearly.co2 == pytest.approx(365 * daily.co2, rel=1e-6)
    assert yearly.costs.net_total == pytest.approx(yearly.objective, rel=1e-8)


def test_unreachable_inputs_are_rejected_before_solving():
    with pytest.raises(InfeasibleScenarioError, match="no electrolyser"):
        build_planning_lp(make_scenario(regions=[{"id": "R", "electric_demand": {"constant": 100}, "hydrogen_demand": {"constant": 10}, "fuel_prices": {"coal": 40}}]))

    capped = make_document(regions=[{"id": "R", "electric_demand": [100, 120, 100, 100], "build_limit": {"TU_M": 110}, "fuel_prices": {"coal": 40}}])
    with pytest.raises(InfeasibleScenarioError) as raised:
        build_planning_lp(validate_scenario(capped))
    assert raised.value.details["hour"] == 2

    with pytest.raises(InfeasibleScenarioError, match="no heat source"):
        build_planning_lp(make_scenario(regions=[{"id": "R", "electric_demand": {"constant": 100}, "heat_demand": {"constant": 5}, "fuel_prices": {"coal": 40}}]))


def test_objective_mode_arguments():
    scenario = make_scenario()
    with pytest.raises(ScenarioValidationError):
        build_planning_lp(scenario, mode="max-profit")
    with pytest.raises(ScenarioValidationError):
        build_planning_lp(scenario, mode="cost-under-cap")
    with pytest.raises(ScenarioValidationError):
        build_planning_lp(scenario, mode="cost-under-cap", epsilon=-1.0)
    capped = build_planning_lp(scenario, mode="cost-under-cap", epsilon=100.0, augmentation=1e-6)
    assert "emission_slack" in capped.lp.column_index()
    # epsilon and augmentation only matter under a cap
    assert build_planning_lp(scenario, mode="min-cost", epsilon=5.0).epsilon is None

    budgeted = build_planning_lp(scenario, mode="co2-under-budget", epsilon=1e6, augmentation=1.0)
    assert "cost_budget" in budgeted.lp.constraints
    assert budgeted.augmentation == 0.0
    with pytest.raises(ValueError, match="cost budget"):
        build_planning_lp(scenario, mode="co2-under-budget")


def test_emission_cap_below_the_only_fleet_is_infeasible():
    with pytest.raises(InfeasibleScenarioError):
        solve_plan(make_scenario(horizon=4), mode="cost-under-cap", epsilon=300.0)


def test_heat_from_electric_boiler():
    scenario = make_scenario(
        technologies=["TU_M", "EB"],
        regions=[{"id": "R", "electric_demand": {"constant": 100}, "heat_demand": {"constant": 19.8}, "fuel_prices": {"coal": 40}}],
    )
    solution = solve_plan(scenario)
    assert solution.series("heat_output", "R", "EB") == pytest.approx([19.8] * 4, rel=1e-6)
    assert solution.series("power", "R", "EB") == pytest.approx([20.0] * 4, rel=1e-6)
    assert solution.max_relative_residual("heat") <= 1e-6
    assert solution.max_relative_residual("electric") <= 1e-6
    assert solution.heat_curtailment == pytest.approx(0.0, abs=1e-6)


def test_wind_and_battery_plan():
    scenario = make_scenario(
        technologies=["TU_M", "WT", "BES"],
        regions=[make_wind_region(wind_cf=(0.1, 0.9, 0.2, 0.8))],
        rps_gamma=0.5,
    )
    solution = solve_plan(scenario)
    assert solution.max_relative_residual("electric") <= 1e-6
    assert solution.max_relative_residual("storage_cycle") <= 1e-6
    # storage losses count against the renewable share
    assert solution.total("charge", "BES") >= solution.total("discharge", "BES") - 1e-6
    assert solution.total("power", "WT") >= 0.5 * 400 - 1e-4
    assert solution.costs.net_total == pytest.approx(solution.objective, rel=1e-8)


def test_hydrogen_chain_plan():
    scenario = make_scenario(
        technologies=["TU_M", "WT", "AEC"],
        regions=[make_wind_region(hydrogen_demand={"constant": 450.0})],
    )
    solution = solve_plan(scenario)
    # 450 kg/h at 22.5 kg per MWh drawn
    assert solution.series("power", "R", "AEC") == pytest.approx([20.0] * 4, rel=1e-6)
    assert solution.series("hydrogen_output", "R", "AEC") == pytest.approx([450.0] * 4, rel=1e-6)
    assert solution.max_relative_residual("hydrogen") <= 1e-6
    assert solution.max_relative_residual("heat") <= 1e-6
    # the electrolyser runs on renewable surplus only
    wind_left = solution.series("available", "R", "WT") - solution.series("power", "R", "WT")
    assert np.all(solution.series("power", "R", "AEC") <= wind_left + 1e-6)
    assert solution.costs.hydrogen_revenue == pytest.approx(2.0 * 450 * 4)
    assert solution.costs.oxygen_revenue == pytest.approx(8 * 0.04 * 450 * 4, rel=1e-6)
    assert solution.costs.net_total == pytest.approx(solution.objective, rel=1e-8)
    nodes = solution.hydrogen_nodes
    assert list(nodes["injection"]) == pytest.approx(list(nodes["withdrawal"]), rel=1e-6)


def test_plan_tables(tmp_path):
    solution = solve_plan(make_scenario(horizon=4))
    written = write_solution_tables(solution, tmp_path)
    names = {path.name for path in written}
    assert {"capacities.csv", "lines.csv", "dispatch.csv", "hydrogen_nodes.csv", "residuals.csv", "cost_breakdown.csv", "summary.csv"} <= names
    assert "modules.csv" not in names
    summary = dict(pd.read_csv(tmp_path / "summary.csv", keep_default_na=False).values)
    assert summary["scenario_fingerprint"] == solution.scenario_fingerprint
    assert float(summary["total_cost_usd"]) == solution.costs.net_total
    dispatch = pd.read_csv(tmp_path / "dispatch.csv")
    power = dispatch[(dispatch["quantity"] == "power") & (dispatch["technology"] == "TU_M")]
    assert list(power["hour"]) == [1, 2, 3, 4]


def test_external_solution_round_trip(tmp_path):
    model = build_planning_lp(make_scenario(horizon=4))
    result = solve(model.lp, fingerprint=model.fingerprint)
    path = tmp_path / "plan.sol"
    write_solution(path, model.lp, result)
    imported = extract_solution(model, import_solution(path, model, tolerance=1e-6))
    assert imported.objective == pytest.approx(extract_solution(model, result).objective)

    with pytest.raises(FingerprintMismatchError):
        extract_solution(model, solve(model.lp))


def test_zero_demand_builds_nothing():
    solution = solve_plan(make_scenario(demand=0.0))
    assert solution.objective == pytest.approx(0.0, abs=1e-9)
    assert solution.installed("R", "TU_M") == pytest.approx(0.0, abs=1e-9)


def test_full_renewable_share_without_renewables_is_infeasible():
    scenario = make_scenario(
        technologies=["TU_M", "WT"],
        regions=[make_wind_region(build_limit={"WT": 0.0})],
        rps_gamma=1.0,
    )
    with pytest.raises(InfeasibleScenarioError):
        solve_plan(scenario)
