"""
Solar capacity factors from irradiance and ambient temperature.
"""
import numpy as np
import pandas as pd

from hyplan.prep.land import mask_cells

# W/m2 at standard test conditions
STC_IRRADIANCE = 1000.0
STC_TEMPERATURE = 25.0
# per degree C
TEMPERATURE_COEFFICIENT = -0.0045
# nominal operating cell temperature, degrees C
NOCT = 45.0


def cell_temperature(irradiance, ambient_temp, noct: float = NOCT):
    return np.asarray(ambient_temp, dtype=float) + np.asarray(irradiance, dtype=float) * (noct - 20.0) / 800.0


def solar_capacity_factor(irradiance, ambient_temp, temperature_coefficient: float = TEMPERATURE_COEFFICIENT, noct: float = NOCT):
    """Maximum-power-point output per unit of rated power, clamped to [0, 1]."""
    irradiance = np.asarray(irradiance, dtype=float)
    derate = 1.0 + temperature_coefficient * (cell_temperature(irradiance, ambient_temp, noct) - STC_TEMPERATURE)
    return np.clip(irradiance / STC_IRRADIANCE * derate, 0.0, 1.0)


class SolarStep:
    """
    Hourly solar capacity factor of a region.

    Configuration Example::

        temperature_coefficient: -0.0045
        noct: 45
        # steepest eligible cell slope (degrees)
        max_slope: 5
    """

    name = "Solar Capacity Factor Step"

    def __init__(self, parameters):
        self.temperature_coefficient = parameters.get("temperature_coefficient", TEMPERATURE_COEFFICIENT)
        self.noct = parameters.get("noct", NOCT)
        self.max_slope = parameters.get("max_slope", 5.0)

    def execute(self, weather: pd.DataFrame) -> np.ndarray:
        return solar_capacity_factor(weather["irradiance"].to_numpy(), weather["ambient_temp"].to_numpy(), self.temperature_coefficient, self.noct)

    def execute_cells(self, cells: pd.DataFrame, weather: dict[str, pd.DataFrame]) -> np.ndarray | None:
        eligible = [mask.cell_id for mask in mask_cells(cells, "solar", self.max_slope) if mask.eligible]
        if not eligible:
            return None
        return np.mean([self.execute(weather[cell_id]) for cell_id in eligible], axis=0)

    @staticmethod
    def validate(parameters):
        errors = []
        if parameters.get("temperature_coefficient", TEMPERATURE_COEFFICIENT) > 0:
            errors.append("temperature_coefficient must not be positive")
        if parameters.get("noct", NOCT) < 20:
            errors.append("noct must be at least 20 degrees C")
        if parameters.get("max_slope", 5.0) < 0:
            errors.append("max_slope must be nonnegative")
        return errors
