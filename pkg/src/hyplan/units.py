"""
Canonical units used throughout hyplan.

Internally every quantity is stored as: power in MW, energy in MWh, hydrogen
mass in kg, emissions in tons of CO2, money in USD and time as a 1-based hour
index. Configuration documents may annotate values with other units, e.g.
``"12.4 GW"`` or ``"35 CNY"``; :func:`parse_quantity` maps those onto the
canonical ones.
"""
import re

LHV_H2_MJ_PER_KG = 120.0
CNY_PER_USD = 6.8
KW_PER_MW = 1000.0
MJ_PER_MWH = 3600.0
HOURS_PER_YEAR = 8760

_SCALES = {
    "power": {"w": 1e-6, "kw": 1e-3, "mw": 1.0, "gw": 1e3, "tw": 1e6},
    "energy": {"kwh": 1e-3, "mwh": 1.0, "gwh": 1e3, "twh": 1e6},
    "mass": {"g": 1e-3, "kg": 1.0, "t": 1e3, "kt": 1e6, "mt": 1e9},
    "emissions": {"kg": 1e-3, "t": 1.0, "kt": 1e3, "mt": 1e6},
    "length": {"m": 1e-3, "km": 1.0},
    "money": {"usd": 1.0, "$": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s]*)\s*$")


def parse_quantity(value, dimension: str, currency_rate: float = CNY_PER_USD) -> float:
    """
    Convert ``value`` to the canonical unit of ``dimension``.

    Plain numbers are assumed to be canonical already. Strings are
    ``"<number> <unit>"``; for money the unit may carry a denominator
    (``"35 CNY/MWh"``) which is kept as is, only the currency is converted.
    Raises ValueError on anything unparseable.
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a {dimension} quantity, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a {dimension} quantity, got {value!r}")

    match = _QUANTITY.match(value)
    if match is None:
        raise ValueError(f"cannot parse {value!r} as a {dimension} quantity")
    number = float(match.group(1))
    unit = match.group(2).lower()
    if unit == "":
        return number

    if dimension == "money":
        currency = unit.split("/", 1)[0]
        if currency == "cny":
            return number / currency_rate
        unit = currency

    scales = _SCALES.get(dimension)
    if scales is None:
        raise ValueError(f"unknown dimension {dimension!r}")
    if unit not in scales:
        raise ValueError(f"unit {match.group(2)!r} is not a {dimension} unit (expected one of {sorted(scales)})")
    return number * scales[unit]


def hydrogen_kg_to_mwh(kg, lhv: float = LHV_H2_MJ_PER_KG):
    return kg * lhv / MJ_PER_MWH


def hydrogen_mwh_to_kg(mwh, lhv: float = LHV_H2_MJ_PER_KG):
    return mwh * MJ_PER_MWH / lhv


def hydrogen_kg_to_gwh(kg, lhv: float = LHV_H2_MJ_PER_KG):
    return hydrogen_kg_to_mwh(kg, lhv) / 1000.0
