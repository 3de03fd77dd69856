"""
Annualisation of capital costs.

All investment costs in a plan are expressed per year: capital is spread over
the equipment lifetime as an annuity at the configured interest rate.
"""
import math


def capital_recovery_factor(rate: float, lifetime: int) -> float:
    """Annuity factor rate(1+rate)^L / ((1+rate)^L - 1); 1/L at zero rate."""
    if lifetime < 1:
        raise ValueError(f"lifetime must be at least one year, got {lifetime}")
    if rate < 0:
        raise ValueError(f"interest rate must be nonnegative, got {rate}")
    if rate == 0:
        return 1.0 / lifetime
    # expm1 keeps (1+rate)^L - 1 accurate for tiny rates
    excess = math.expm1(lifetime * math.log1p(rate))
    if excess == 0.0:
        return 1.0 / lifetime
    return rate * (1.0 + excess) / excess


def amortized_cost(capital: float, lifetime: int, rate: float) -> float:
    """
    Equal yearly payment that repays ``capital`` over ``lifetime`` years.

    Units follow the capital: $/kW gives $/kW-year, $/kg gives $/kg-year.
    """
    if capital < 0:
        raise ValueError(f"capital must be nonnegative, got {capital}")
    return capital * capital_recovery_factor(rate, lifetime)


def annual_fixed_om(capital: float, fraction: float) -> float:
    """Fixed O&M per year given as a fraction of capital."""
    return capital * fraction


def present_value_of_annuity(payment: float, lifetime: int, rate: float) -> float:
    return sum(payment / (1.0 + rate) ** year for year in range(1, lifetime + 1))
