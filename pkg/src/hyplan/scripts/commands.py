"""
The work behind each ``hyplan`` subcommand. Every command writes its outputs
and a manifest.json into its output directory and prints a short summary.
"""
import hashlib
import logging
import os
import pathlib
import time

import numpy as np
import pandas as pd
from tabulate import tabulate

from hyplan.assemble.solution import CSV_FLOAT_FORMAT, solve_plan, write_solution_tables
from hyplan.configuration import (
    ScenarioConfig,
    dump_scenario,
    find_scenario,
    load_scenario,
    scenario_fingerprint,
    validate_scenario,
    with_updates,
)
from hyplan.flex.gap import relaxation_gap, validation_instance
from hyplan.hyplan_exception import FingerprintMismatchError, ScenarioValidationError
from hyplan.logger import SolveLog
from hyplan.pareto.frontier import frontier
from hyplan.pipeline.pipelines import pipeline_cost, plan_pipeline_flows
from hyplan.prep.prep_pipeline import PrepPipeline
from hyplan.prep.weather import region_inputs
from hyplan.report.heatmaps import write_report
from hyplan.scripts.manifest import RunManifest, file_hash

logger = logging.getLogger(__name__)

RESIDUAL_LIMIT = 1e-6
# technology sections a sweep parameter may name a field of
SWEEP_SECTIONS = ("cost", "conversion", "storage", "flex")


def prepare_scenario(path: str | os.PathLike, solver_overrides: dict | None = None) -> ScenarioConfig:
    """Load a scenario and apply command-line solver options on top of its ``solver:`` block."""
    scenario = load_scenario(path)
    overrides = {key: value for key, value in (solver_overrides or {}).items() if value is not None}
    if overrides:
        scenario = with_updates(scenario, solver={**scenario.solver.dict(), **overrides})
    return scenario


def _manifest(command, scenario_path, out_dir, input_hash, arguments=None, scenario=None) -> RunManifest:
    return RunManifest(
        command=command,
        scenario_path=str(find_scenario(scenario_path).resolve()) if scenario_path is not None else None,
        output_dir=str(out_dir),
        input_hash=input_hash,
        arguments=arguments or {},
        solver_options=scenario.solver.dict() if scenario is not None else {},
    )


def _solve_log(out_dir: pathlib.Path, compression: str | None) -> SolveLog:
    name = "solve_log.tsv.gz" if compression == "gzip" else "solve_log.tsv"
    return SolveLog(out_dir / name, compression=compression)


def cmd_prep(weather_dir, out_dir, params_path=None) -> pd.DataFrame:
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pipeline = PrepPipeline(PrepPipeline.load_parameters(params_path))
    summary = pipeline.execute(weather_dir, out_dir)

    digest = hashlib.sha256()
    sources = [path for source in region_inputs(weather_dir).values() for path in ([source] if source.is_file() else sorted(source.glob("*.csv")))]
    for path in sources + ([pathlib.Path(params_path)] if params_path else []):
        digest.update(path.name.encode())
        digest.update(file_hash(path).encode())
    _manifest("prep", None, out_dir, digest.hexdigest(), {"weather_dir": str(weather_dir), "params": str(params_path) if params_path else None}).write()
    return summary


def residual_report(solution) -> pd.DataFrame:
    """Largest relative residual per balance with a pass flag."""
    rows = []
    for balance in ("electric", "heat", "storage_cycle", "hydrogen"):
        worst = solution.max_relative_residual(balance)
        rows.append({"balance": balance, "max_relative_residual": worst, "pass": bool(worst <= RESIDUAL_LIMIT)})
    return pd.DataFrame(rows, columns=["balance", "max_relative_residual", "pass"])


def cmd_plan(scenario_path, out_dir, mode=None, epsilon=None, solver_overrides=None, solver_log=None):
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = prepare_scenario(scenario_path, solver_overrides)

    start = time.time()
    with _solve_log(out_dir, solver_log) as log:
        solution = solve_plan(scenario, mode=mode, epsilon=epsilon, log=log)
    write_solution_tables(solution, out_dir)
    report = residual_report(solution)
    report.to_csv(out_dir / "residual_report.csv", index=False, float_format=CSV_FLOAT_FORMAT)
    _manifest("plan", scenario_path, out_dir, scenario_fingerprint(scenario), {"mode": solution.mode, "epsilon": epsilon}, scenario).write()

    print(solution.costs.as_text())
    print(f"CO2: {solution.co2:.6g} t")
    print(tabulate(report.values.tolist(), headers=list(report.columns), floatfmt=".3g"))
    for warning in solution.warnings:
        print(f"warning: {warning}")
    print(f"Finished plan ({solution.mode}) in {time.time() - start:.1f} seconds")
    return solution


def cmd_pareto(scenario_path, out_dir, points=None, workers=None, solver_overrides=None, solver_log=None):
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = prepare_scenario(scenario_path, solver_overrides)

    start = time.time()
    with _solve_log(out_dir, solver_log) as log:
        result = frontier(scenario, n_points=points, workers=workers, log=log)
    result.write(out_dir)
    _manifest("pareto", scenario_path, out_dir, scenario_fingerprint(scenario), {"points": len(result.points)}, scenario).write()

    table = result.to_frame()
    print(tabulate(table.values.tolist(), headers=list(table.columns), floatfmt=".6g"))
    print(f"Finished pareto with {len(result.points)} points ({len(result.gaps)} gaps) in {time.time() - start:.1f} seconds")
    return result


def cmd_pipelines(run_dir, out_dir=None):
    """Plan pipelines for a finished plan run; refuses when the scenario changed since."""
    run_dir = pathlib.Path(run_dir)
    out_dir = pathlib.Path(out_dir) if out_dir else run_dir / "pipelines"
    manifest = RunManifest.read(run_dir)
    manifest.require("plan")
    scenario = load_scenario(manifest.scenario_path)
    manifest.require("plan", scenario_fingerprint(scenario))

    summary = pd.read_csv(run_dir / "summary.csv", keep_default_na=False).set_index("key")["value"]
    if summary.get("scenario_fingerprint") != manifest.input_hash:
        raise FingerprintMismatchError(
            f"{run_dir}/summary.csv does not belong to the run recorded in its manifest",
            {"expected": manifest.input_hash, "found": summary.get("scenario_fingerprint")},
        )
    nodes = pd.read_csv(run_dir / "hydrogen_nodes.csv", keep_default_na=False)

    start = time.time()
    plan = plan_pipeline_flows(nodes, scenario.topology, scenario.solver)
    plan.transport_cost = scenario.operation_weight * pipeline_cost(plan, scenario.pipeline.transport_rate, scenario.lhv_mj_per_kg)
    plan.write(out_dir, scenario.pipeline.transport_rate, scenario.lhv_mj_per_kg, scenario.operation_weight)
    share = plan.cost_share(float(summary["total_cost_usd"]))
    pd.DataFrame(
        [("objective_kg_km", repr(plan.objective)), ("transport_cost_usd", repr(plan.transport_cost)), ("cost_share", repr(share)), ("max_residual_kg", repr(plan.max_residual))],
        columns=["key", "value"],
    ).to_csv(out_dir / "pipeline_summary.csv", index=False)
    _manifest("pipelines", manifest.scenario_path, out_dir, manifest.input_hash, {"run_dir": str(run_dir)}, scenario).write()

    table = plan.summary(scenario.pipeline.transport_rate, scenario.lhv_mj_per_kg, scenario.operation_weight)
    print(tabulate(table.values.tolist(), headers=list(table.columns), floatfmt=".6g"))
    print(f"Transport cost {plan.transport_cost:,.0f} $ ({share:.3%} of system cost)")
    print(f"Finished pipelines for {len(plan.links)} links in {time.time() - start:.1f} seconds")
    return plan


def cmd_validate(scenario_path, out_dir, hours=None, module_count=None, solver_overrides=None, solver_log=None):
    """Relaxed against exact commitment on a dispatch-only cut of the scenario."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = prepare_scenario(scenario_path, solver_overrides)
    try:
        instance = validation_instance(scenario, hours, module_count)
    except ValueError as error:
        raise ScenarioValidationError([f"validation: {error}"]) from None

    with _solve_log(out_dir, solver_log) as log:
        relaxed = solve_plan(instance, commitment="relaxed", log=log, label="relaxed")
        exact = solve_plan(instance, commitment="binary", log=log, label="binary")
    report = relaxation_gap(relaxed, exact)
    report.totals.to_csv(out_dir / "gap_report.csv", index=False, float_format=CSV_FLOAT_FORMAT)
    (out_dir / "gap_summary.txt").write_text(report.as_text() + "\n")
    _manifest(
        "validate",
        scenario_path,
        out_dir,
        scenario_fingerprint(scenario),
        {"hours": instance.horizon_hours, "module_count": instance.module_count},
        scenario,
    ).write()

    print(report.as_text())
    print(f"Relaxation {'within' if report.within() else 'outside'} 2% of the exact commitment")
    return report


def scaled_scenario(scenario: ScenarioConfig, parameter: str, factor: float) -> ScenarioConfig:
    """
    Copy of ``scenario`` with one parameter multiplied by ``factor``.

    ``parameter`` is ``<kind or technology id>.<field>`` where the field lives
    in the technology's cost, conversion, storage or flex section, or
    ``price_book.<field>``.
    """
    selector, _, name = parameter.partition(".")
    if not name:
        raise ScenarioValidationError([f"sweep parameter {parameter!r}: expected <kind or technology id>.<field>"])
    document = dump_scenario(scenario)
    if selector == "price_book":
        if name not in document["price_book"]:
            raise ScenarioValidationError([f"sweep parameter {parameter!r}: price_book has no field {name!r}"])
        document["price_book"][name] *= factor
        return validate_scenario(document)

    matched = 0
    for tech in document["technologies"]:
        if selector not in (tech["id"], tech["kind"]):
            continue
        for section in SWEEP_SECTIONS:
            values = tech.get(section)
            if values is not None and isinstance(values.get(name), (int, float)) and not isinstance(values.get(name), bool):
                values[name] = values[name] * factor
                matched += 1
                break
    if not matched:
        raise ScenarioValidationError([f"sweep parameter {parameter!r}: no technology {selector!r} has a numeric field {name!r}"])
    return validate_scenario(document)


def _installed_by_kind(solution) -> dict[str, float]:
    capacities = solution.capacities
    return {kind: float(capacities.loc[capacities["kind"] == kind, "installed"].sum()) for kind in sorted(set(capacities["kind"]))}


def cmd_sweep(scenario_path, out_dir, parameters, delta=0.3, mode=None, solver_overrides=None, solver_log=None) -> pd.DataFrame:
    """
    Re-solve with each parameter scaled by 1 - delta and 1 + delta and tabulate
    the change in cost, emissions and installed capacity per kind against the
    unscaled plan.
    """
    if not parameters:
        raise ScenarioValidationError(["sweep: give at least one --param"])
    if not 0 < delta < 1:
        raise ScenarioValidationError([f"sweep: delta must lie in (0, 1), got {delta}"])
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = prepare_scenario(scenario_path, solver_overrides)

    start = time.time()
    runs = []
    with _solve_log(out_dir, solver_log) as log:
        baseline = solve_plan(scenario, mode=mode, log=log, label="baseline")
        runs.append(("baseline", 1.0, baseline))
        for parameter in parameters:
            for factor in (1.0 - delta, 1.0 + delta):
                variant = scaled_scenario(scenario, parameter, factor)
                runs.append((parameter, factor, solve_plan(variant, mode=mode, log=log, label=f"{parameter} x{factor:g}")))

    base_cost, base_co2 = baseline.costs.net_total, baseline.co2
    base_installed = _installed_by_kind(baseline)
    rows = []
    for parameter, factor, solution in runs:
        row = {
            "parameter": parameter,
            "factor": factor,
            "cost_usd": solution.costs.net_total,
            "cost_change": _relative_change(solution.costs.net_total, base_cost),
            "co2_tons": solution.co2,
            "co2_change": _relative_change(solution.co2, base_co2),
        }
        for kind, installed in _installed_by_kind(solution).items():
            row[f"installed_{kind}"] = installed
            row[f"installed_{kind}_change"] = _relative_change(installed, base_installed.get(kind, 0.0))
        rows.append(row)
    table = pd.DataFrame(rows)
    table.to_csv(out_dir / "sweep.csv", index=False, float_format=CSV_FLOAT_FORMAT)
    _manifest("sweep", scenario_path, out_dir, scenario_fingerprint(scenario), {"parameters": list(parameters), "delta": delta, "mode": baseline.mode}, scenario).write()

    shown = table[["parameter", "factor", "cost_usd", "cost_change", "co2_tons", "co2_change"]]
    print(tabulate(shown.values.tolist(), headers=list(shown.columns), floatfmt=".4g"))
    print(f"Finished sweep of {len(parameters)} parameters ({len(runs)} solves) in {time.time() - start:.1f} seconds")
    return table


def _relative_change(value: float, base: float) -> float:
    if base == 0:
        return 0.0 if value == 0 else np.inf
    return (value - base) / abs(base)


def cmd_report(run_dir):
    run_dir = pathlib.Path(run_dir)
    manifest = RunManifest.read(run_dir)
    manifest.require("plan")
    start_date = load_scenario(manifest.scenario_path).start_date if manifest.scenario_path else "2050-01-01"
    written = write_report(run_dir, start_date)
    _manifest("report", manifest.scenario_path, run_dir / "report", manifest.input_hash, {"run_dir": str(run_dir)}).write()
    print(f"Wrote {len(written)} report files to {run_dir / 'report'}")
    return written
