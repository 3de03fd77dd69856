"""
SVG reports of a solved plan: hour-of-day by month heatmaps per device
class, state-of-charge traces for storage, and the cost table.
"""
import logging
import pathlib

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from tabulate import tabulate  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids and no timestamp, so identical inputs give identical files
plt.rcParams["svg.hashsalt"] = "hyplan"
SVG_METADATA = {"Date": None, "Creator": None}

# (quantity, kinds) plotted as heatmaps
DEVICE_CLASSES = {
    "TU": ("power", ("TU", "CHP")),
    "WT": ("power", ("WT",)),
    "PV": ("power", ("PV",)),
    "EC": ("power", ("EC",)),
    "HT": ("power", ("HT",)),
    "FC": ("power", ("FC",)),
    "EB": ("power", ("EB",)),
    "ES_discharge": ("discharge", ("BES", "HPS")),
    "ES_charge": ("charge", ("BES", "HPS")),
    "HS_discharge": ("discharge", ("HS",)),
    "HS_charge": ("charge", ("HS",)),
    "HST_discharge": ("discharge", ("HST",)),
}
STORAGE_KINDS = ("BES", "HPS", "HST", "HS")


def hour_month_grid(values, start_date: str = "2050-01-01") -> np.ndarray:
    """12 x 24 array: mean of the values at each hour of day within each month, NaN where no hour falls."""
    values = np.asarray(values, dtype=float)
    stamps = pd.date_range(start_date, periods=len(values), freq="H")
    frame = pd.DataFrame({"month": stamps.month, "hour": stamps.hour, "value": values})
    means = frame.groupby(["month", "hour"])["value"].mean().unstack("hour")
    return means.reindex(index=range(1, 13), columns=range(24)).to_numpy()


def plot_heatmap(grid: np.ndarray, title: str, path: str | pathlib.Path, unit: str = "MW") -> pathlib.Path:
    figure, axes = plt.subplots(figsize=(8, 4))
    finite = grid[np.isfinite(grid)]
    low, high = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if high <= low:
        high = low + 1.0
    image = axes.imshow(grid, aspect="auto", origin="lower", cmap="viridis", vmin=low, vmax=high, extent=(-0.5, 23.5, 0.5, 12.5))
    axes.set_xlabel("hour of day")
    axes.set_ylabel("month")
    axes.set_title(title)
    figure.colorbar(image, ax=axes, label=unit)
    path = pathlib.Path(path)
    figure.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(figure)
    return path


def plot_soc(values, title: str, path: str | pathlib.Path, unit: str = "MWh") -> np.ndarray:
    """Line chart of a state-of-charge series; returns the plotted values."""
    values = np.asarray(values, dtype=float)
    figure, axes = plt.subplots(figsize=(8, 3))
    (line,) = axes.plot(np.arange(1, len(values) + 1), values, linewidth=0.8)
    axes.set_xlabel("hour")
    axes.set_ylabel(unit)
    axes.set_title(title)
    figure.savefig(pathlib.Path(path), format="svg", metadata=SVG_METADATA)
    plotted = np.asarray(line.get_ydata(), dtype=float)
    plt.close(figure)
    return plotted


def class_series(dispatch: pd.DataFrame, capacities: pd.DataFrame, quantity: str, kinds) -> np.ndarray | None:
    """Hourly sum over regions and technologies of the given kinds, None when the run has none."""
    technologies = set(capacities.loc[capacities["kind"].isin(kinds), "technology"])
    frame = dispatch[(dispatch["quantity"] == quantity) & dispatch["technology"].isin(technologies)]
    if frame.empty:
        return None
    return frame.groupby("hour")["value"].sum().sort_index().to_numpy()


def write_report(run_dir: str | pathlib.Path, start_date: str = "2050-01-01") -> list[pathlib.Path]:
    """
    Heatmaps, SOC traces and cost table for a plan run directory, written to
    ``<run_dir>/report``. Device classes without series are skipped with a
    warning.
    """
    run_dir = pathlib.Path(run_dir)
    out_dir = run_dir / "report"
    out_dir.mkdir(exist_ok=True)
    dispatch = pd.read_csv(run_dir / "dispatch.csv", keep_default_na=False)
    capacities = pd.read_csv(run_dir / "capacities.csv", keep_default_na=False)
    written = []

    for name, (quantity, kinds) in DEVICE_CLASSES.items():
        series = class_series(dispatch, capacities, quantity, kinds)
        if series is None:
            logger.warning("No %s series for %s in %s; skipping its heatmap", quantity, name, run_dir)
            continue
        unit = "kg/h" if name.startswith("HS") else "MW"
        written.append(plot_heatmap(hour_month_grid(series, start_date), f"{name} {quantity}", out_dir / f"heatmap_{name}.svg", unit))

    storage = capacities[capacities["kind"].isin(STORAGE_KINDS)]
    for row in storage.itertuples(index=False):
        frame = dispatch[(dispatch["quantity"] == "soc") & (dispatch["region"] == row.region) & (dispatch["technology"] == row.technology)]
        if frame.empty:
            logger.warning("No state-of-charge series for %s/%s; skipping", row.region, row.technology)
            continue
        path = out_dir / f"soc_{row.region}_{row.technology}.svg"
        plot_soc(frame.sort_values("hour")["value"].to_numpy(), f"{row.technology} state of charge, {row.region}", path, "kg" if row.kind == "HS" else "MWh")
        written.append(path)

    costs_path = run_dir / "cost_breakdown.csv"
    if costs_path.exists():
        costs = pd.read_csv(costs_path)
        path = out_dir / "cost_breakdown.txt"
        path.write_text(tabulate(costs.values.tolist(), headers=list(costs.columns), floatfmt=",.0f") + "\n")
        written.append(path)
    else:
        logger.warning("No cost breakdown in %s", run_dir)
    return written
