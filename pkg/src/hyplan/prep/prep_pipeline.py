import pathlib
import sys
import time

import numpy as np
import pandas as pd
import yaml
from tabulate import tabulate

from hyplan.hyplan_exception import PrepInputError
from hyplan.prep.heat_demand import HeatDemandStep
from hyplan.prep.solar import SolarStep
from hyplan.prep.weather import read_cell_weather, read_weather_csv, region_inputs
from hyplan.prep.wind import WindStep


class PrepPipeline:
    """
    Turns a weather directory into the hourly series a scenario consumes:
    per region ``<region>_wind_cf.csv``, ``<region>_solar_cf.csv`` and
    ``<region>_heat_demand.csv`` (``hour,value``), plus ``cf_summary.csv``
    with annual-average capacity factors.

    Configuration Example::

        wind: {hub_height: 100, max_slope: 20}
        solar: {noct: 45, max_slope: 5}
        heat_demand:
            regions:
                R1: {space_slope: 2.0, hot_water_base: 5.0}
    """

    stage_name = "prep_pipeline"
    steps = {"wind": WindStep, "solar": SolarStep, "heat_demand": HeatDemandStep}

    def __init__(self, parameters: dict | None = None):
        parameters = parameters or {}
        PrepPipeline.validate(parameters)
        self.wind = WindStep(parameters.get("wind") or {})
        self.solar = SolarStep(parameters.get("solar") or {})
        self.heat_demand = HeatDemandStep(parameters.get("heat_demand") or {})

    @staticmethod
    def validate(parameters: dict):
        """Check every step's parameters, print all errors to stderr and raise once."""
        unknown = sorted(set(parameters) - set(PrepPipeline.steps))
        errors = {"prep": [f"unknown section {name!r}" for name in unknown]} if unknown else {}
        for name, step_class in PrepPipeline.steps.items():
            step_errors = step_class.validate(parameters.get(name, {}) or {})
            if step_errors:
                errors[name] = step_errors
        if errors:
            for name, messages in errors.items():
                print(f"Validation errors in {name}:", file=sys.stderr)
                for message in messages:
                    print("\t" + message, file=sys.stderr)
            raise PrepInputError("Validation error in prep parameters: see stderr for details.", {"errors": errors})

    @staticmethod
    def load_parameters(path: str | pathlib.Path | None) -> dict:
        if path is None:
            return {}
        try:
            with open(path) as params_file:
                return yaml.safe_load(params_file) or {}
        except (OSError, yaml.YAMLError) as error:
            raise PrepInputError(f"cannot read prep parameters {path}: {error}", {"file": str(path)}) from None

    def region_series(self, region: str, source: pathlib.Path) -> dict[str, np.ndarray]:
        if source.is_dir():
            cells, weather = read_cell_weather(source)
            wind = self.wind.execute_cells(cells, weather)
            solar = self.solar.execute_cells(cells, weather)
            horizon = len(next(iter(weather.values())))
            mean_weather = pd.DataFrame({"ambient_temp": np.mean([frame["ambient_temp"].to_numpy() for frame in weather.values()], axis=0)})
            series = {
                "wind_cf": np.zeros(horizon) if wind is None else wind,
                "solar_cf": np.zeros(horizon) if solar is None else solar,
                "heat_demand": self.heat_demand.execute(region, mean_weather),
            }
            if wind is None or solar is None:
                print(f"Region {region}: no eligible cells for {'wind' if wind is None else 'solar'}; writing zeros")
            return series
        weather = read_weather_csv(source)
        return {
            "wind_cf": self.wind.execute(weather),
            "solar_cf": self.solar.execute(weather),
            "heat_demand": self.heat_demand.execute(region, weather),
        }

    def execute(self, weather_dir: str | pathlib.Path, out_dir: str | pathlib.Path) -> pd.DataFrame:
        """Write the series files and return the annual summary table."""
        inputs = region_inputs(weather_dir)
        out_dir = pathlib.Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        pipeline_start = time.time()
        summary = []
        for region, source in inputs.items():
            region_start = time.time()
            series = self.region_series(region, source)
            for name, values in series.items():
                frame = pd.DataFrame({"hour": np.arange(1, len(values) + 1), "value": values})
                frame.to_csv(out_dir / f"{region}_{name}.csv", index=False, float_format="%.10g")
            summary.append(
                {
                    "region": region,
                    "hours": len(series["wind_cf"]),
                    "wind_cf_mean": float(np.mean(series["wind_cf"])),
                    "solar_cf_mean": float(np.mean(series["solar_cf"])),
                    "heat_demand_mwh": float(np.sum(series["heat_demand"])),
                }
            )
            print(f"Region {region} took {time.time() - region_start:.3} seconds")

        summary = pd.DataFrame(summary, columns=["region", "hours", "wind_cf_mean", "solar_cf_mean", "heat_demand_mwh"])
        summary.to_csv(out_dir / "cf_summary.csv", index=False, float_format="%.10g")
        self.print_summary(summary, time.time() - pipeline_start)
        return summary

    def print_summary(self, summary: pd.DataFrame, elapsed_time: float | None = None):
        """Annual-average capacity factors per region."""
        print(tabulate(summary.values.tolist(), headers=list(summary.columns), floatfmt=".4f"))
        if elapsed_time is not None:
            print(f"Finished {PrepPipeline.stage_name} for {len(summary)} regions in {elapsed_time:.1f} seconds")
