"""
Hydrogen pipelines planned after the main solve.

The main model balances hydrogen system-wide per hour; here each region's
hourly surplus or deficit is routed over the declared hydrogen links at
least total kg-km, and every link is sized to its peak hourly flow.
"""
import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd
import pulp
import scipy.sparse
import scipy.sparse.csgraph

from hyplan.configuration import Topology
from hyplan.hyplan_exception import PipelineImbalanceError, SolverError
from hyplan.solve.linear_program import LinearProgram, RowKey, VarKey, keyed_adder
from hyplan.solve.solver import solve
from hyplan.units import LHV_H2_MJ_PER_KG, hydrogen_kg_to_gwh

logger = logging.getLogger(__name__)

DEFAULT_TRANSPORT_RATE = 2.484
IMBALANCE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PipelineLink:
    from_region: str
    to_region: str
    length_km: float


@dataclass
class PipelinePlan:
    links: list[PipelineLink]
    # from, to, hour, flow_kg; positive flows run from -> to
    flows: pd.DataFrame
    # sum over hours and links of length * |flow| (kg km)
    objective: float
    # largest nodal residual (kg)
    max_residual: float = 0.0
    transport_cost: float = 0.0

    def link_flows(self, link: PipelineLink) -> np.ndarray:
        frame = self.flows[(self.flows["from"] == link.from_region) & (self.flows["to"] == link.to_region)]
        return frame.sort_values("hour")["flow_kg"].to_numpy()

    def capacity(self, link: PipelineLink) -> float:
        flows = self.link_flows(link)
        return float(np.abs(flows).max()) if flows.size else 0.0

    def summary(self, rate: float = DEFAULT_TRANSPORT_RATE, lhv: float = LHV_H2_MJ_PER_KG, weight: float = 1.0) -> pd.DataFrame:
        rows = []
        for link in self.links:
            moved = float(np.abs(self.link_flows(link)).sum())
            capacity = self.capacity(link)
            rows.append(
                {
                    "from": link.from_region,
                    "to": link.to_region,
                    "length_km": link.length_km,
                    "capacity_kg_per_h": capacity,
                    "capacity_gw": hydrogen_kg_to_gwh(capacity, lhv),
                    "cost_usd_per_year": weight * rate * link.length_km * hydrogen_kg_to_gwh(moved, lhv),
                }
            )
        return pd.DataFrame(rows, columns=["from", "to", "length_km", "capacity_kg_per_h", "capacity_gw", "cost_usd_per_year"])

    def cost_share(self, system_cost: float) -> float:
        return self.transport_cost / system_cost if system_cost else math.nan

    def write(self, out_dir: str | os.PathLike, rate: float = DEFAULT_TRANSPORT_RATE, lhv: float = LHV_H2_MJ_PER_KG, weight: float = 1.0) -> None:
        os.makedirs(out_dir, exist_ok=True)
        self.flows.to_csv(os.path.join(out_dir, "pipeline_flows.csv"), index=False, float_format="%.17g")
        self.summary(rate, lhv, weight).to_csv(os.path.join(out_dir, "pipeline_capacities.csv"), index=False, float_format="%.17g")


def pipeline_links(topology: Topology) -> list[PipelineLink]:
    """Hydrogen links with lengths; a link without one takes the electric corridor's length."""
    links = []
    for link in topology.hydrogen_adjacency:
        length = link.length_km
        if length is None:
            length = topology.corridor_between(link.from_region, link.to_region).length_km
        links.append(PipelineLink(link.from_region, link.to_region, float(length)))
    return links


def _net_injections(nodes: pd.DataFrame) -> tuple[list[str], np.ndarray]:
    """Regions in first-seen order and the (regions x hours) array of injection minus withdrawal."""
    required = {"region", "hour", "injection", "withdrawal"}
    if not required <= set(nodes.columns):
        raise ValueError(f"hydrogen node table needs columns {sorted(required)}, found {list(nodes.columns)}")
    regions = list(dict.fromkeys(nodes["region"]))
    table = nodes.assign(net=nodes["injection"] - nodes["withdrawal"]).pivot(index="region", columns="hour", values="net")
    table = table.reindex(regions).fillna(0.0)
    return regions, table.to_numpy(dtype=float)


def _check_balance(regions: list[str], hours: np.ndarray, net: np.ndarray, nodes: pd.DataFrame, links: list[PipelineLink]) -> np.ndarray:
    """
    Reject hours whose system total is not balanced, and imbalances inside a
    region group that no link connects to the rest. The numerical residual
    left in each connected group is absorbed at its largest withdrawing
    region so the nodal rows can hold exactly.
    """
    scale = nodes.groupby("hour")["injection"].sum().reindex(hours).to_numpy() + 1.0
    residual = net.sum(axis=0)
    bad = np.flatnonzero(np.abs(residual) > IMBALANCE_TOLERANCE * scale)
    if bad.size:
        t = int(bad[0])
        raise PipelineImbalanceError(
            f"hour {int(hours[t])}: hydrogen injections and withdrawals differ by {residual[t]:.6g} kg",
            {"hour": int(hours[t]), "imbalance_kg": float(residual[t])},
        )

    position = {region: k for k, region in enumerate(regions)}
    unknown = sorted({end for link in links for end in (link.from_region, link.to_region)} - set(position))
    if unknown:
        raise ValueError(f"hydrogen links reference regions without node data: {unknown}")
    graph = scipy.sparse.coo_matrix(
        (np.ones(len(links)), ([position[l.from_region] for l in links], [position[l.to_region] for l in links])),
        shape=(len(regions), len(regions)),
    )
    count, labels = scipy.sparse.csgraph.connected_components(graph, directed=False)
    net = net.copy()
    columns = np.arange(net.shape[1])
    for group in range(count):
        members = np.flatnonzero(labels == group)
        totals = net[members].sum(axis=0)
        stranded = np.flatnonzero(np.abs(totals) > IMBALANCE_TOLERANCE * scale)
        if stranded.size:
            t = int(stranded[0])
            names = [regions[k] for k in members]
            raise PipelineImbalanceError(
                f"hour {int(hours[t])}: regions {names} have a net hydrogen imbalance of {totals[t]:.6g} kg and no pipeline to the rest",
                {"hour": int(hours[t]), "regions": names, "imbalance_kg": float(totals[t])},
            )
        sink = members[np.argmin(net[members], axis=0)]
        net[sink, columns] -= totals
    return net


def plan_pipeline_flows(nodes: pd.DataFrame, topology: Topology, options=None) -> PipelinePlan:
    """
    Least kg-km flows meeting every region's hourly net injection, from a
    table with columns region, hour, injection, withdrawal (kg).

    All hours are stacked in one LP. A flow is split as m = m+ - m- with both
    parts nonnegative, so the objective sum of length * (m+ + m-) prices the
    absolute flow.
    """
    links = pipeline_links(topology)
    regions, net = _net_injections(nodes)
    hours = np.array(sorted(nodes["hour"].unique()), dtype=int)
    net = _check_balance(regions, hours, net, nodes, links)

    lp = LinearProgram(name="pipelines")
    add = keyed_adder(lp)
    forward = {(i, t): add(VarKey("flow_forward", link.from_region, link.to_region, int(hour))) for i, link in enumerate(links) for t, hour in enumerate(hours)}
    reverse = {(i, t): add(VarKey("flow_reverse", link.from_region, link.to_region, int(hour))) for i, link in enumerate(links) for t, hour in enumerate(hours)}
    objective = pulp.LpAffineExpression()
    for (i, t), variable in forward.items():
        objective += links[i].length_km * (variable + reverse[(i, t)])
    lp.set_objective(objective)
    for k, region in enumerate(regions):
        for t, hour in enumerate(hours):
            balance = pulp.LpAffineExpression()
            for i, link in enumerate(links):
                flow = forward[(i, t)] - reverse[(i, t)]
                if link.from_region == region:
                    balance -= flow
                elif link.to_region == region:
                    balance += flow
            if len(balance):
                lp.add_constraint(balance == float(-net[k, t]), RowKey("hydrogen_node", region, "", int(hour)))

    if lp.num_variables:
        result = solve(lp, options, label="pipelines")
        if not result.optimal:
            raise SolverError(f"pipeline flow problem ended with status {result.status.value}", {"solver": result.message})
        x = result.primal
    else:
        x = np.zeros(0)

    rows = []
    flow_values = np.zeros((len(links), len(hours)))
    for i, link in enumerate(links):
        for t, hour in enumerate(hours):
            flow_values[i, t] = x[lp.column(forward[(i, t)])] - x[lp.column(reverse[(i, t)])]
            rows.append({"from": link.from_region, "to": link.to_region, "hour": int(hour), "flow_kg": flow_values[i, t]})
    flows = pd.DataFrame(rows, columns=["from", "to", "hour", "flow_kg"])

    residual = net.copy()
    position = {region: k for k, region in enumerate(regions)}
    for i, link in enumerate(links):
        residual[position[link.from_region]] -= flow_values[i]
        residual[position[link.to_region]] += flow_values[i]
    plan = PipelinePlan(
        links=links,
        flows=flows,
        objective=float(sum(link.length_km * np.abs(flow_values[i]).sum() for i, link in enumerate(links))),
        max_residual=float(np.abs(residual).max()) if residual.size else 0.0,
    )
    logger.info("Pipelines: %d links over %d hours, %.6g kg km, largest nodal residual %.3g kg", len(links), len(hours), plan.objective, plan.max_residual)
    return plan


def pipeline_cost(plan: PipelinePlan, rate: float = DEFAULT_TRANSPORT_RATE, lhv: float = LHV_H2_MJ_PER_KG) -> float:
    """$ for moving the plan's flows: rate ($/km GWh) times length times the energy (LHV) carried."""
    if rate <= 0:
        raise ValueError(f"transport rate must be positive, got {rate}")
    return float(sum(rate * link.length_km * hydrogen_kg_to_gwh(np.abs(plan.link_flows(link)).sum(), lhv) for link in plan.links))


def plan_pipelines(solution, topology: Topology | None = None) -> PipelinePlan:
    """Pipeline plan for the hydrogen node table of a solved plan, with its annual transport cost."""
    scenario = solution.scenario
    plan = plan_pipeline_flows(solution.hydrogen_nodes, topology or scenario.topology, scenario.solver)
    plan.transport_cost = scenario.operation_weight * pipeline_cost(plan, scenario.pipeline.transport_rate, scenario.lhv_mj_per_kg)
    return plan
