"""
Hourly weather inputs.

A weather directory holds, per region, either ``<region>.csv`` or a
directory ``<region>/`` with ``cells.csv`` (``cell_id,slope,land_class``)
and one ``<cell_id>.csv`` per cell. Every weather CSV has the header
``hour,wind_speed_50m,irradiance,ambient_temp`` with hours 1..T.
"""
import pathlib
from dataclasses import dataclass

import numpy as np
import pandas as pd

from hyplan.hyplan_exception import PrepInputError

WEATHER_COLUMNS = ["hour", "wind_speed_50m", "irradiance", "ambient_temp"]
CELL_COLUMNS = ["cell_id", "slope", "land_class"]


@dataclass(frozen=True)
class WeatherSample:
    hour: int
    # m/s at 50 m
    wind_speed_50m: float
    # W/m2
    irradiance: float
    # degrees C
    ambient_temp: float

    def __post_init__(self):
        if self.wind_speed_50m < 0 or self.irradiance < 0:
            raise ValueError(f"hour {self.hour}: wind speed and irradiance must be nonnegative")


def read_weather_csv(path: str | pathlib.Path) -> pd.DataFrame:
    """Weather table indexed 0..T-1; malformed rows are reported with their line number."""
    path = pathlib.Path(path)
    try:
        frame = pd.read_csv(path, dtype=str)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise PrepInputError(f"{path}: cannot read weather file: {error}", {"file": str(path)}) from None
    if list(frame.columns) != WEATHER_COLUMNS:
        raise PrepInputError(
            f"{path}: expected header {','.join(WEATHER_COLUMNS)}, found {','.join(map(str, frame.columns))}",
            {"file": str(path), "line": 1},
        )
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    for position in range(len(numeric)):
        line = position + 2
        row = numeric.iloc[position]
        if row.isna().any():
            raise PrepInputError(f"{path}, line {line}: non-numeric or missing value", {"file": str(path), "line": line})
        if row["hour"] != position + 1:
            raise PrepInputError(f"{path}, line {line}: expected hour {position + 1}, found {frame.iloc[position]['hour']}", {"file": str(path), "line": line})
        if row["wind_speed_50m"] < 0 or row["irradiance"] < 0:
            raise PrepInputError(f"{path}, line {line}: wind speed and irradiance must be nonnegative", {"file": str(path), "line": line})
    if numeric.empty:
        raise PrepInputError(f"{path}: no weather rows", {"file": str(path)})
    numeric["hour"] = numeric["hour"].astype(int)
    return numeric


def read_cells(path: str | pathlib.Path) -> pd.DataFrame:
    path = pathlib.Path(path)
    try:
        cells = pd.read_csv(path, dtype={"cell_id": str, "land_class": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise PrepInputError(f"{path}: cannot read cell table: {error}", {"file": str(path)}) from None
    if list(cells.columns) != CELL_COLUMNS:
        raise PrepInputError(f"{path}: expected header {','.join(CELL_COLUMNS)}", {"file": str(path), "line": 1})
    slopes = pd.to_numeric(cells["slope"], errors="coerce")
    bad = np.flatnonzero(slopes.isna().to_numpy() | cells["land_class"].isna().to_numpy())
    if bad.size:
        line = int(bad[0]) + 2
        raise PrepInputError(f"{path}, line {line}: malformed cell row", {"file": str(path), "line": line})
    return cells.assign(slope=slopes)


def region_inputs(weather_dir: str | pathlib.Path) -> dict[str, pathlib.Path]:
    """Region id -> its weather CSV or cell directory, sorted by region id."""
    weather_dir = pathlib.Path(weather_dir)
    if not weather_dir.is_dir():
        raise PrepInputError(f"weather directory {weather_dir} does not exist", {"directory": str(weather_dir)})
    inputs = {}
    for entry in sorted(weather_dir.iterdir()):
        if entry.is_file() and entry.suffix == ".csv":
            inputs[entry.stem] = entry
        elif entry.is_dir() and (entry / "cells.csv").exists():
            inputs[entry.name] = entry
    if not inputs:
        raise PrepInputError(
            f"no weather inputs in {weather_dir}: expected <region>.csv files with header "
            f"{','.join(WEATHER_COLUMNS)}, or <region>/cells.csv with one <cell_id>.csv per cell",
            {"directory": str(weather_dir)},
        )
    return inputs


def read_cell_weather(directory: pathlib.Path) -> tuple[pd.DataFrame, dict[str, pd.DataFrame]]:
    """Cell table and the weather table of every listed cell, all of equal length."""
    cells = read_cells(directory / "cells.csv")
    weather = {}
    for cell_id in cells["cell_id"]:
        weather[cell_id] = read_weather_csv(directory / f"{cell_id}.csv")
    lengths = {len(frame) for frame in weather.values()}
    if len(lengths) > 1:
        raise PrepInputError(f"{directory}: cell weather files differ in length {sorted(lengths)}", {"directory": str(directory)})
    return cells, weather
