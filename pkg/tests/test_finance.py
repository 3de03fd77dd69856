import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyplan.finance import amortized_cost, annual_fixed_om, capital_recovery_factor, present_value_of_annuity
from hyplan.units import hydrogen_kg_to_gwh, hydrogen_kg_to_mwh, hydrogen_mwh_to_kg, parse_quantity


def test_amortized_cost_anchors():
    # AEC and SOEC capital at 7%
    assert amortized_cost(450, 25, 0.07) == pytest.approx(38.61, abs=0.01)
    assert amortized_cost(750, 20, 0.07) == pytest.approx(70.79, abs=0.01)


def test_zero_rate_spreads_capital_evenly():
    assert capital_recovery_factor(0.0, 20) == pytest.approx(1 / 20)
    assert amortized_cost(1000, 10, 0.0) == pytest.approx(100)


def test_one_year_lifetime_repays_with_interest():
    assert amortized_cost(100, 1, 0.07) == pytest.approx(107)


def test_bad_inputs():
    with pytest.raises(ValueError):
        capital_recovery_factor(0.07, 0)
    with pytest.raises(ValueError):
        capital_recovery_factor(-0.01, 10)
    with pytest.raises(ValueError):
        amortized_cost(-1, 10, 0.07)


@settings(max_examples=200)
@given(
    capital=st.floats(min_value=0, max_value=1e5),
    lifetime=st.integers(min_value=1, max_value=60),
    rate=st.floats(min_value=0, max_value=0.2),
)
def test_annuity_repays_capital(capital, lifetime, rate):
    payment = amortized_cost(capital, lifetime, rate)
    assert payment >= capital / lifetime - 1e-9 * (1 + capital)
    assert present_value_of_annuity(payment, lifetime, rate) == pytest.approx(capital, rel=1e-9, abs=1e-9)


def test_fixed_om_is_a_fraction_of_capital():
    assert annual_fixed_om(450, 0.05) == pytest.approx(22.5)


def test_parse_quantity():
    assert parse_quantity(12.0, "power") == 12.0
    assert parse_quantity("12.4 GW", "power") == pytest.approx(12400)
    assert parse_quantity("500 kW", "power") == pytest.approx(0.5)
    assert parse_quantity("680 t", "mass") == pytest.approx(680_000)
    assert parse_quantity("1.5 Mt", "emissions") == pytest.approx(1.5e6)
    assert parse_quantity("34 CNY", "money") == pytest.approx(5.0)
    assert parse_quantity("35 CNY/MWh", "money", currency_rate=7.0) == pytest.approx(5.0)
    assert parse_quantity("80.3 USD", "money") == pytest.approx(80.3)
    assert parse_quantity("40", "length") == 40.0


@pytest.mark.parametrize(
    "value, dimension",
    [("12 GWh", "power"), ("twelve MW", "power"), (True, "power"), ([1], "mass"), ("5 MW", "volume")],
)
def test_parse_quantity_rejects(value, dimension):
    with pytest.raises(ValueError):
        parse_quantity(value, dimension)


def test_hydrogen_energy_conversions():
    # 30 kg of hydrogen carries one MWh at 120 MJ/kg
    assert hydrogen_kg_to_mwh(30) == pytest.approx(1.0)
    assert hydrogen_mwh_to_kg(1.0) == pytest.approx(30)
    assert hydrogen_kg_to_gwh(1e6) == pytest.approx(100 / 3)
    assert math.isclose(hydrogen_mwh_to_kg(hydrogen_kg_to_mwh(7.5, 142), 142), 7.5)
