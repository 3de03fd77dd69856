import gzip
import json

import pandas as pd
import pytest
import yaml

from conftest import CONFIG_DIR, make_document, make_wind_region
from hyplan.scripts.run_hyplan import main


def run_failing(argv, capsys):
    with pytest.raises(SystemExit) as raised:
        main(argv)
    assert raised.value.code == 2
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_plan_then_pipelines_then_report(tmp_path):
    run = tmp_path / "demo"
    main(["plan", "--scenario", str(CONFIG_DIR / "demo_2region.yaml"), "--out", str(run)])
    for name in ("capacities.csv", "dispatch.csv", "hydrogen_nodes.csv", "residual_report.csv", "manifest.json", "solve_log.tsv"):
        assert (run / name).exists(), name
    residuals = pd.read_csv(run / "residual_report.csv")
    assert residuals["pass"].all()
    manifest = json.loads((run / "manifest.json").read_text())
    summary = pd.read_csv(run / "summary.csv", keep_default_na=False).set_index("key")["value"]
    assert manifest["command"] == "plan"
    assert manifest["input_hash"] == summary["scenario_fingerprint"]

    main(["pipelines", "--run", str(run)])
    for name in ("pipeline_flows.csv", "pipeline_capacities.csv", "pipeline_summary.csv", "manifest.json"):
        assert (run / "pipelines" / name).exists(), name

    main(["report", "--run", str(run)])
    assert (run / "report" / "cost_breakdown.txt").exists()
    assert (run / "report" / "heatmap_WT.svg").exists()


def test_bad_scenario_exits_with_every_problem(tmp_path, capsys):
    out = tmp_path / "bad"
    payload = run_failing(["plan", "--scenario", str(CONFIG_DIR / "test.bad.scenario.yaml"), "--out", str(out)], capsys)
    assert payload["error"] == "ScenarioValidationError"
    assert len(payload["details"]["errors"]) > 1
    assert json.loads((out / "error.json").read_text()) == payload


def test_pipelines_refuse_an_edited_scenario(tmp_path, capsys, write_scenario_file):
    path = write_scenario_file(make_document())
    run = tmp_path / "run"
    main(["plan", "--scenario", str(path), "--out", str(run), "--solver-log", "gzip"])
    with gzip.open(run / "solve_log.tsv.gz", "rt") as handle:
        assert handle.read()

    write_scenario_file(make_document(demand=120.0))
    payload = run_failing(["pipelines", "--run", str(run)], capsys)
    assert payload["error"] == "ManifestMismatchError"
    assert (run / "error.json").exists()


def test_report_needs_a_plan_run(tmp_path, capsys):
    payload = run_failing(["report", "--run", str(tmp_path)], capsys)
    assert payload["error"] == "ManifestMismatchError"


def test_sweep(tmp_path, capsys, write_scenario_file):
    path = write_scenario_file(make_document())
    out = tmp_path / "sweep"
    main(["sweep", "--scenario", str(path), "--out", str(out), "--param", "TU_M.capital", "--delta", "0.2"])
    table = pd.read_csv(out / "sweep.csv")
    assert list(table["parameter"]) == ["baseline", "TU_M.capital", "TU_M.capital"]
    assert list(table["factor"]) == pytest.approx([1.0, 0.8, 1.2])
    assert table.loc[1, "cost_change"] < 0 < table.loc[2, "cost_change"]
    assert list(table["installed_TU_change"]) == pytest.approx([0.0, 0.0, 0.0])

    payload = run_failing(["sweep", "--scenario", str(path), "--out", str(out), "--param", "TU_M.colour"], capsys)
    assert payload["error"] == "ScenarioValidationError"


def test_validate(tmp_path, write_scenario_file):
    document = make_document(
        horizon=6,
        technologies=[{"from": "TU_M", "flex": {"min_load": 0.2, "min_up": 1, "min_down": 1}}],
        regions=[{"id": "R", "electric_demand": {"constant": 100.0}, "fuel_prices": {"coal": 40.0}, "existing_capacity": {"TU_M": 200.0}, "build_limit": {"TU_M": 200.0}}],
    )
    path = write_scenario_file(document)
    out = tmp_path / "validate"
    main(["validate", "--scenario", str(path), "--out", str(out), "--hours", "4", "--modules", "2"])
    assert not pd.read_csv(out / "gap_report.csv").empty
    assert (out / "gap_summary.txt").read_text().strip()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["arguments"] == {"hours": 4, "module_count": 2}


def test_prep(tmp_path):
    weather = tmp_path / "weather"
    weather.mkdir()
    (weather / "A.csv").write_text("hour,wind_speed_50m,irradiance,ambient_temp\n1,7,800,20\n2,2,0,8\n")
    params = tmp_path / "params.yaml"
    params.write_text(yaml.safe_dump({"wind": {"hub_height": 50}}))
    out = tmp_path / "series"
    main(["prep", "--weather", str(weather), "--params", str(params), "--out", str(out)])
    assert len(pd.read_csv(out / "A_wind_cf.csv")) == 2
    assert json.loads((out / "manifest.json").read_text())["command"] == "prep"


def test_two_point_frontier_is_the_anchors(tmp_path, write_scenario_file):
    path = write_scenario_file(make_document(technologies=("TU_M", "WT"), regions=[make_wind_region()]))
    out = tmp_path / "pareto"
    main(["pareto", "--scenario", str(path), "--out", str(out), "--points", "2"])
    table = pd.read_csv(out / "frontier.csv")
    assert len(table) == 2
    assert table.loc[0, "emissions_tons"] > table.loc[1, "emissions_tons"]
    assert table.loc[0, "cost_usd"] <= table.loc[1, "cost_usd"]
