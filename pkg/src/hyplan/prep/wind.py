"""
Wind capacity factors from 50 m wind speeds.
"""
import numpy as np
import pandas as pd

from hyplan.prep.land import mask_cells

REFERENCE_HEIGHT = 50.0
SHEAR_EXPONENT = 1.0 / 7.0
# m/s, 1.5 MW class turbine
CUT_IN = 3.0
RATED = 11.0
CUT_OUT = 25.0


def extrapolate_wind_speed(v50, hub_height: float, shear_exponent: float = SHEAR_EXPONENT):
    """Power-law profile from the 50 m reference height to ``hub_height`` (m)."""
    if hub_height <= 0:
        raise ValueError(f"hub height must be positive, got {hub_height}")
    return np.asarray(v50, dtype=float) * (hub_height / REFERENCE_HEIGHT) ** shear_exponent


def wind_capacity_factor(v_hub, cut_in: float = CUT_IN, rated: float = RATED, cut_out: float = CUT_OUT):
    """
    Three-segment power curve: zero below cut-in, cubic rise to rated
    ((v^3 - ci^3) / (r^3 - ci^3)), full output to cut-out, zero beyond.
    """
    if not 0 <= cut_in < rated <= cut_out:
        raise ValueError(f"power curve needs 0 <= cut_in < rated <= cut_out, got {cut_in}, {rated}, {cut_out}")
    v = np.asarray(v_hub, dtype=float)
    rising = (v**3 - cut_in**3) / (rated**3 - cut_in**3)
    cf = np.where(v < cut_in, 0.0, np.where(v < rated, rising, np.where(v <= cut_out, 1.0, 0.0)))
    return np.clip(cf, 0.0, 1.0)


class WindStep:
    """
    Hourly wind capacity factor of a region.

    Configuration Example::

        # hub height (m) and power-law shear exponent
        hub_height: 100
        shear_exponent: 0.142857
        # power curve speeds (m/s)
        cut_in: 3
        rated: 11
        cut_out: 25
        # steepest eligible cell slope (degrees)
        max_slope: 20
    """

    name = "Wind Capacity Factor Step"

    def __init__(self, parameters):
        self.hub_height = parameters.get("hub_height", 100.0)
        self.shear_exponent = parameters.get("shear_exponent", SHEAR_EXPONENT)
        self.cut_in = parameters.get("cut_in", CUT_IN)
        self.rated = parameters.get("rated", RATED)
        self.cut_out = parameters.get("cut_out", CUT_OUT)
        self.max_slope = parameters.get("max_slope", 20.0)

    def execute(self, weather: pd.DataFrame) -> np.ndarray:
        v_hub = extrapolate_wind_speed(weather["wind_speed_50m"].to_numpy(), self.hub_height, self.shear_exponent)
        return wind_capacity_factor(v_hub, self.cut_in, self.rated, self.cut_out)

    def execute_cells(self, cells: pd.DataFrame, weather: dict[str, pd.DataFrame]) -> np.ndarray | None:
        """Mean over eligible cells, None when no cell is eligible."""
        eligible = [mask.cell_id for mask in mask_cells(cells, "wind", self.max_slope) if mask.eligible]
        if not eligible:
            return None
        return np.mean([self.execute(weather[cell_id]) for cell_id in eligible], axis=0)

    @staticmethod
    def validate(parameters):
        errors = []
        if parameters.get("hub_height", 100.0) <= 0:
            errors.append("hub_height must be positive")
        if not 0 <= parameters.get("shear_exponent", SHEAR_EXPONENT) <= 1:
            errors.append("shear_exponent must be between 0 and 1")
        cut_in, rated, cut_out = (parameters.get(key, default) for key, default in (("cut_in", CUT_IN), ("rated", RATED), ("cut_out", CUT_OUT)))
        if not 0 <= cut_in < rated <= cut_out:
            errors.append("the power curve needs 0 <= cut_in < rated <= cut_out")
        if parameters.get("max_slope", 20.0) < 0:
            errors.append("max_slope must be nonnegative")
        return errors
