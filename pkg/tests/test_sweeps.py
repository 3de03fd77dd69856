import math

import pytest

from conftest import make_scenario, make_wind_region
from hyplan.assemble.solution import solve_plan

GAMMAS = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
CHAIN = ["TU_M", "WT", "AEC", "HS_cavern", "COP", "HT_M", "PEMFC"]


def close_or_below(later, earlier, rel=1e-6):
    return later <= earlier + rel * (1.0 + abs(earlier))


def wind_and_battery(**overrides):
    return make_scenario(
        technologies=["TU_M", "WT", "BES"],
        regions=[make_wind_region(wind_cf=(0.1, 0.9, 0.2, 0.8))],
        **overrides,
    )


def test_renewable_share_sweep():
    plans = [solve_plan(wind_and_battery(rps_gamma=gamma)) for gamma in GAMMAS]
    coal = [plan.total("power", "TU") for plan in plans]
    costs = [plan.costs.net_total for plan in plans]
    assert all(close_or_below(later, earlier) for earlier, later in zip(coal, coal[1:]))
    assert all(close_or_below(earlier, later) for earlier, later in zip(costs, costs[1:]))
    for gamma, plan in zip(GAMMAS, plans):
        assert plan.total("power", "WT", "PV") >= gamma * 400 - 1e-4
    assert coal[-1] == pytest.approx(0.0, abs=1e-6)
    assert plans[-1].co2 == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("gamma", [None, 0.5])
def test_cost_does_not_rise_with_the_wind_build_limit(gamma):
    # below 150 MW the wind cannot cover half the load
    limits = [150.0, 400.0, math.inf] if gamma else [0.0, 50.0, 150.0, 400.0, math.inf]
    costs = []
    for limit in limits:
        region = make_wind_region(wind_cf=(0.1, 0.9, 0.2, 0.8), build_limit={} if math.isinf(limit) else {"WT": limit})
        scenario = make_scenario(technologies=["TU_M", "WT", "BES"], regions=[region], rps_gamma=gamma)
        costs.append(solve_plan(scenario).costs.net_total)
    assert all(close_or_below(later, earlier) for earlier, later in zip(costs, costs[1:]))


def chain_scenario(*ablated, gamma=None):
    # no wind in hour 1, so only stored hydrogen can keep the coal unit off then
    return make_scenario(
        technologies=CHAIN,
        regions=[make_wind_region(wind_cf=(0.0, 0.9, 0.3, 0.8))],
        chain_ablation=list(ablated),
        rps_gamma=gamma,
    )


@pytest.mark.parametrize("ablated", [("EC",), ("HS",), ("COP",), ("HT",), ("FC",), ("HT", "FC")])
def test_removing_a_chain_link_never_helps(ablated):
    full_cost = solve_plan(chain_scenario()).costs.net_total
    cut_cost = solve_plan(chain_scenario(*ablated)).costs.net_total
    assert close_or_below(full_cost, cut_cost)

    full_co2 = solve_plan(chain_scenario(), mode="min-co2").co2
    cut_co2 = solve_plan(chain_scenario(*ablated), mode="min-co2").co2
    assert full_co2 == pytest.approx(0.0, abs=1e-6)
    assert close_or_below(full_co2, cut_co2)


@pytest.mark.parametrize("ablated", [("EC",), ("HS",), ("HT", "FC")])
def test_breaking_the_chain_brings_back_coal(ablated):
    full_co2 = solve_plan(chain_scenario(), mode="min-co2").co2
    cut_co2 = solve_plan(chain_scenario(*ablated), mode="min-co2").co2
    # the windless hour falls to coal once hydrogen cannot be made, kept or burned
    assert cut_co2 > full_co2 + 1.0


def test_full_renewable_share_runs_on_the_hydrogen_chain():
    plan = solve_plan(chain_scenario(gamma=1.0))
    assert plan.total("power", "TU") == pytest.approx(0.0, abs=1e-6)
    assert plan.co2 == pytest.approx(0.0, abs=1e-6)
    assert plan.total("power", "FC", "HT") >= 100.0 - 1e-4
    assert plan.max_relative_residual("hydrogen") <= 1e-6
