import networkx as nx
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_scenario, make_wind_region
from hyplan.assemble.solution import solve_plan
from hyplan.configuration import Topology
from hyplan.hyplan_exception import PipelineImbalanceError
from hyplan.pipeline.pipelines import PipelineLink, PipelinePlan, pipeline_cost, pipeline_links, plan_pipeline_flows, plan_pipelines


def make_nodes(entries):
    """``entries`` maps region to a list of (injection, withdrawal) per hour."""
    rows = [
        {"region": region, "hour": hour, "injection": injection, "withdrawal": withdrawal}
        for region, hours in entries.items()
        for hour, (injection, withdrawal) in enumerate(hours, start=1)
    ]
    return pd.DataFrame(rows)


def make_topology(*links, corridors=()):
    return Topology.parse_obj(
        {
            "hydrogen_adjacency": [{"from": a, "to": b, "length_km": length} for a, b, length in links],
            "corridors": [{"from": a, "to": b, "length_km": length} for a, b, length in corridors],
        }
    )


def test_pipeline_cost():
    link = PipelineLink("A", "B", 100.0)
    flows = pd.DataFrame([{"from": "A", "to": "B", "hour": 1, "flow_kg": 1e6}])
    plan = PipelinePlan(links=[link], flows=flows, objective=1e8)
    # 1e6 kg carries 33.3 GWh
    assert pipeline_cost(plan) == pytest.approx(8280.0)
    assert pipeline_cost(plan, rate=1.0) == pytest.approx(8280.0 / 2.484)
    with pytest.raises(ValueError):
        pipeline_cost(plan, rate=0.0)


def test_single_link():
    nodes = make_nodes({"A": [(10.0, 0.0), (0.0, 4.0)], "B": [(0.0, 10.0), (4.0, 0.0)]})
    plan = plan_pipeline_flows(nodes, make_topology(("A", "B", 100.0)))
    link = plan.links[0]
    assert list(plan.link_flows(link)) == pytest.approx([10.0, -4.0])
    assert plan.objective == pytest.approx(1400.0)
    assert plan.capacity(link) == pytest.approx(10.0)
    assert plan.max_residual <= 1e-9


def test_one_hour_one_link_objective():
    nodes = make_nodes({"A": [(10.0, 0.0)], "B": [(0.0, 10.0)]})
    assert plan_pipeline_flows(nodes, make_topology(("A", "B", 100.0))).objective == pytest.approx(1000.0)


def test_shortest_route_wins():
    nodes = make_nodes({"A": [(10.0, 0.0)], "B": [(0.0, 10.0)], "C": [(0.0, 0.0)]})
    topology = make_topology(("A", "B", 100.0), ("A", "C", 100.0), ("C", "B", 50.0))
    plan = plan_pipeline_flows(nodes, topology)
    direct, via_first, via_second = plan.links
    assert plan.objective == pytest.approx(1000.0)
    assert list(plan.link_flows(direct)) == pytest.approx([10.0])
    assert list(plan.link_flows(via_first)) == pytest.approx([0.0], abs=1e-9)
    assert list(plan.link_flows(via_second)) == pytest.approx([0.0], abs=1e-9)


def test_unbalanced_hour_is_rejected():
    nodes = make_nodes({"A": [(10.0, 0.0), (10.0, 0.0)], "B": [(0.0, 10.0), (0.0, 8.0)]})
    with pytest.raises(PipelineImbalanceError) as raised:
        plan_pipeline_flows(nodes, make_topology(("A", "B", 100.0)))
    assert raised.value.details["hour"] == 2
    assert raised.value.details["imbalance_kg"] == pytest.approx(2.0)


def test_stranded_group_is_rejected():
    nodes = make_nodes({"A": [(10.0, 0.0)], "B": [(0.0, 0.0)], "C": [(0.0, 0.0)], "D": [(0.0, 10.0)]})
    with pytest.raises(PipelineImbalanceError, match="no pipeline to the rest") as raised:
        plan_pipeline_flows(nodes, make_topology(("A", "B", 50.0), ("C", "D", 50.0)))
    assert raised.value.details["regions"] == ["A", "B"]


def test_balanced_isolated_groups_are_fine():
    nodes = make_nodes({"A": [(10.0, 0.0)], "B": [(0.0, 10.0)], "C": [(5.0, 0.0)], "D": [(0.0, 5.0)]})
    plan = plan_pipeline_flows(nodes, make_topology(("A", "B", 50.0), ("C", "D", 20.0)))
    assert plan.objective == pytest.approx(50.0 * 10 + 20.0 * 5)


def test_tolerance_level_residual_stays_in_its_group():
    # C's tiny surplus is within tolerance but has only D to go to
    nodes = make_nodes({"A": [(100.0, 0.0)], "B": [(0.0, 100.0)], "C": [(5e-5, 0.0)], "D": [(0.0, 0.0)]})
    plan = plan_pipeline_flows(nodes, make_topology(("A", "B", 50.0), ("C", "D", 20.0)))
    main, side = plan.links
    assert list(plan.link_flows(main)) == pytest.approx([100.0])
    assert list(plan.link_flows(side)) == pytest.approx([5e-5], abs=1e-7)
    assert plan.max_residual <= 1e-7


def test_group_residual_beyond_tolerance_is_an_imbalance():
    nodes = make_nodes({"A": [(100.0, 0.0)], "B": [(0.0, 100.001)], "C": [(0.001, 0.0)], "D": [(0.0, 0.0)]})
    with pytest.raises(PipelineImbalanceError, match="no pipeline to the rest") as raised:
        plan_pipeline_flows(nodes, make_topology(("A", "B", 50.0), ("C", "D", 20.0)))
    assert raised.value.details["imbalance_kg"] == pytest.approx(-0.001)


@st.composite
def connected_networks(draw):
    """3 or 4 regions on a chain plus random extra links, integer lengths and balanced integer injections."""
    count = draw(st.integers(min_value=3, max_value=4))
    regions = [f"N{k}" for k in range(count)]
    pairs = [(regions[k], regions[k + 1]) for k in range(count - 1)]
    extra = [(a, b) for k, a in enumerate(regions) for b in regions[k + 2:]]
    pairs += draw(st.lists(st.sampled_from(extra), unique=True)) if extra else []
    links = []
    for a, b in pairs:
        length = draw(st.integers(min_value=1, max_value=200))
        links.append((b, a, length) if draw(st.booleans()) else (a, b, length))
    hours = draw(st.integers(min_value=1, max_value=6))
    entries = {region: [] for region in regions}
    for _ in range(hours):
        net = draw(st.lists(st.integers(min_value=-50, max_value=50), min_size=count - 1, max_size=count - 1))
        net.append(-sum(net))
        for region, value in zip(regions, net):
            entries[region].append((float(max(value, 0)), float(max(-value, 0))))
    return entries, links


def min_cost_flow_objective(entries, links):
    """Least kg-km by network simplex, hour by hour, with each link usable both ways."""
    total = 0
    for t in range(len(next(iter(entries.values())))):
        graph = nx.DiGraph()
        for region, hours in entries.items():
            injection, withdrawal = hours[t]
            graph.add_node(region, demand=int(withdrawal - injection))
        for a, b, length in links:
            graph.add_edge(a, b, weight=length)
            graph.add_edge(b, a, weight=length)
        total += nx.min_cost_flow_cost(graph)
    return total


@settings(max_examples=40, deadline=None)
@given(network=connected_networks())
def test_flows_match_min_cost_flow(network):
    entries, links = network
    plan = plan_pipeline_flows(make_nodes(entries), make_topology(*links))
    assert plan.objective == pytest.approx(min_cost_flow_objective(entries, links), rel=1e-6, abs=1e-6)
    assert plan.max_residual <= 1e-6


def test_link_length_falls_back_to_corridor():
    topology = Topology.parse_obj(
        {
            "corridors": [{"from": "A", "to": "B", "length_km": 250.0}],
            "hydrogen_adjacency": [{"from": "B", "to": "A"}],
        }
    )
    assert pipeline_links(topology) == [PipelineLink("B", "A", 250.0)]


def test_links_need_node_data():
    nodes = make_nodes({"A": [(0.0, 0.0)], "B": [(0.0, 0.0)]})
    with pytest.raises(ValueError, match="without node data"):
        plan_pipeline_flows(nodes, make_topology(("A", "Z", 10.0)))


def test_plan_summary_and_files(tmp_path):
    nodes = make_nodes({"A": [(1e6, 0.0), (0.0, 0.0)], "B": [(0.0, 1e6), (0.0, 0.0)]})
    plan = plan_pipeline_flows(nodes, make_topology(("A", "B", 100.0)))
    summary = plan.summary()
    assert summary.loc[0, "capacity_kg_per_h"] == pytest.approx(1e6)
    assert summary.loc[0, "cost_usd_per_year"] == pytest.approx(8280.0)
    plan.transport_cost = 8280.0
    assert plan.cost_share(82800.0) == pytest.approx(0.1)

    plan.write(tmp_path)
    flows = pd.read_csv(tmp_path / "pipeline_flows.csv")
    assert list(flows.columns) == ["from", "to", "hour", "flow_kg"]
    assert len(flows) == 2
    assert (tmp_path / "pipeline_capacities.csv").exists()


def test_single_region_moves_nothing():
    nodes = make_nodes({"A": [(5.0, 5.0), (0.0, 0.0)]})
    plan = plan_pipeline_flows(nodes, make_topology())
    assert plan.links == []
    assert plan.objective == 0.0


def test_pipelines_for_a_solved_plan():
    scenario = make_scenario(
        technologies=["TU_M", "WT", "AEC"],
        regions=[
            make_wind_region("A"),
            make_wind_region("B", hydrogen_demand={"constant": 100.0}, build_limit={"WT": 0.0, "AEC": 0.0}),
        ],
        topology={"hydrogen_adjacency": [{"from": "A", "to": "B", "length_km": 100.0}]},
    )
    plan = plan_pipelines(solve_plan(scenario))
    # B cannot make hydrogen, so A ships its 100 kg/h every hour
    assert list(plan.link_flows(plan.links[0])) == pytest.approx([100.0] * 4, rel=1e-6)
    assert plan.objective == pytest.approx(100.0 * 100.0 * 4, rel=1e-6)
    assert plan.transport_cost == pytest.approx(pipeline_cost(plan), rel=1e-8)
