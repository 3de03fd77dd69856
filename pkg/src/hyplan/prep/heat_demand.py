"""
Hourly heat demand from ambient temperature.
"""
import numpy as np
import pandas as pd

# degrees C
INDOOR_TEMPERATURE = 18.0


def heat_demand_series(temps, space_slope: float, hot_water_base: float, indoor_temperature: float = INDOOR_TEMPERATURE) -> np.ndarray:
    """MW: space heating proportional to the degrees below indoor temperature, plus a flat hot-water load."""
    if space_slope < 0 or hot_water_base < 0:
        raise ValueError("space_slope and hot_water_base must be nonnegative")
    temps = np.asarray(temps, dtype=float)
    return space_slope * np.maximum(0.0, indoor_temperature - temps) + hot_water_base


class HeatDemandStep:
    """
    Hourly heat demand per region.

    Configuration Example::

        indoor_temperature: 18
        # MW per degree C below indoor temperature, and flat MW
        regions:
            R1: {space_slope: 2.0, hot_water_base: 5.0}
        default: {space_slope: 0.0, hot_water_base: 0.0}
    """

    name = "Heat Demand Step"

    def __init__(self, parameters):
        self.indoor_temperature = parameters.get("indoor_temperature", INDOOR_TEMPERATURE)
        self.regions = parameters.get("regions", {})
        self.default = parameters.get("default", {"space_slope": 0.0, "hot_water_base": 0.0})

    def execute(self, region: str, weather: pd.DataFrame) -> np.ndarray:
        coefficients = self.regions.get(region, self.default)
        return heat_demand_series(
            weather["ambient_temp"].to_numpy(),
            coefficients.get("space_slope", 0.0),
            coefficients.get("hot_water_base", 0.0),
            self.indoor_temperature,
        )

    @staticmethod
    def validate(parameters):
        errors = []
        entries = dict(parameters.get("regions", {}))
        entries["default"] = parameters.get("default", {})
        for region, coefficients in entries.items():
            for key in ("space_slope", "hot_water_base"):
                if coefficients.get(key, 0.0) < 0:
                    errors.append(f"heat_demand -> {region} -> {key} must be nonnegative")
        return errors
