"""
Cost / CO2 trade-off by the augmented epsilon-constraint method.

The two anchors bound the frontier: the cheapest plan made least-emitting at
its cost, and the least-emitting plan made cheapest at its emission level.
Interior points minimise cost under an emission cap taken from a grid between
the anchors' emissions; the cap row is an equality with a slack rewarded at a
small weight so that no capped optimum is weakly dominated.
"""
import concurrent.futures
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from hyplan.assemble.solution import PlanSolution, solve_plan
from hyplan.configuration import ScenarioConfig
from hyplan.hyplan_exception import HyplanException, InfeasibleScenarioError

logger = logging.getLogger(__name__)

FRONTIER_COLUMNS = ["epsilon", "emissions_tons", "cost_usd", "reduction_cost_usd_per_ton", "status"]


@dataclass
class ParetoPoint:
    epsilon: float
    emissions: float
    cost: float
    status: str = "optimal"
    reduction_cost: float = math.nan
    solution: PlanSolution | None = field(default=None, repr=False)
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.status == "optimal"

    def summary(self) -> dict:
        if self.solution is None:
            return {"epsilon": self.epsilon, "status": self.status, "message": self.message}
        solution = self.solution
        return {
            "epsilon": self.epsilon,
            "status": self.status,
            "emissions_tons": self.emissions,
            "cost_usd": self.cost,
            "renewable_curtailment_mwh": solution.renewable_curtailment,
            "heat_curtailment_mwh": solution.heat_curtailment,
            **{f"installed_{kind}": float(solution.capacities.loc[solution.capacities["kind"] == kind, "installed"].sum())
               for kind in sorted(set(solution.capacities["kind"]))},
        }


@dataclass
class ParetoFrontier:
    # sorted by emissions, highest first
    points: list[ParetoPoint]
    min_cost: ParetoPoint
    min_co2: ParetoPoint
    baseline: str

    @property
    def gaps(self) -> list[ParetoPoint]:
        return [point for point in self.points if not point.solved]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(p.epsilon, p.emissions, p.cost, p.reduction_cost, p.status) for p in self.points],
            columns=FRONTIER_COLUMNS,
        )

    def dominated(self, tolerance: float = 1e-6) -> list[tuple[int, int]]:
        """Pairs (i, j) of solved points where point i dominates point j."""
        pairs = []
        solved = [(i, p) for i, p in enumerate(self.points) if p.solved]
        for i, p in solved:
            for j, q in solved:
                if i == j:
                    continue
                cost_slack = tolerance * (1.0 + abs(q.cost))
                emission_slack = tolerance * (1.0 + abs(q.emissions))
                no_worse = p.cost <= q.cost + cost_slack and p.emissions <= q.emissions + emission_slack
                better = p.cost < q.cost - cost_slack or p.emissions < q.emissions - emission_slack
                if no_worse and better:
                    pairs.append((i, j))
        return pairs

    def write(self, out_dir: str | os.PathLike) -> None:
        """frontier.csv and pareto_points.csv (one summary row per point)."""
        os.makedirs(out_dir, exist_ok=True)
        self.to_frame().to_csv(os.path.join(out_dir, "frontier.csv"), index=False, float_format="%.17g")
        pd.DataFrame([point.summary() for point in self.points]).to_csv(
            os.path.join(out_dir, "pareto_points.csv"), index=False, float_format="%.17g"
        )


def _point(solution: PlanSolution, epsilon: float) -> ParetoPoint:
    return ParetoPoint(epsilon=epsilon, emissions=solution.co2, cost=solution.costs.net_total, solution=solution)


def compute_anchors(scenario: ScenarioConfig, log=None) -> tuple[PlanSolution, PlanSolution]:
    """
    (min-cost plan, min-CO2 plan). Both are lexicographic. The least cost is
    found first and emissions are minimised within that budget; the least
    emission level is found next and cost is minimised under that level.
    """
    tolerance = scenario.pareto.anchor_tolerance
    cheapest = solve_plan(scenario, "min-cost", log=log, label="anchor min-cost (cost)")
    budget = cheapest.objective + tolerance * (1.0 + abs(cheapest.objective))
    cheapest = solve_plan(scenario, "co2-under-budget", epsilon=budget, log=log, label="anchor min-cost (emissions)")
    cleanest = solve_plan(scenario, "min-co2", log=log, label="anchor min-co2 (emissions)")
    level = cleanest.co2 * (1.0 + tolerance) + tolerance
    cleanest = solve_plan(scenario, "cost-under-cap", epsilon=level, log=log, label="anchor min-co2 (cost)")
    logger.info(
        "Anchors: min-cost %.6g $ at %.6g t; min-CO2 %.6g $ at %.6g t",
        cheapest.costs.net_total,
        cheapest.co2,
        cleanest.costs.net_total,
        cleanest.co2,
    )
    return cheapest, cleanest


def epsilon_grid(high: float, low: float, points: int, spacing: str = "uniform") -> np.ndarray:
    """``points`` caps from ``high`` down to ``low`` inclusive."""
    if points < 2:
        raise ValueError(f"a frontier needs at least two points, got {points}")
    if spacing == "log":
        floor = max(low, 1e-9 * max(high, 1.0))
        grid = np.geomspace(high, floor, points)
        grid[-1] = low
        return grid
    return np.linspace(high, low, points)


def augmentation_weight(cheapest: PlanSolution, cleanest: PlanSolution, weight: float) -> float:
    """Slack reward in $/t: ``weight`` times the average abatement cost between the anchors (at least 1 $/t)."""
    span = cheapest.co2 - cleanest.co2
    scale = (cleanest.costs.net_total - cheapest.costs.net_total) / span if span > 0 else 0.0
    return weight * max(scale, 1.0)


def _solve_capped(scenario: ScenarioConfig, epsilon: float, augmentation: float) -> ParetoPoint:
    try:
        solution = solve_plan(scenario, "cost-under-cap", epsilon=epsilon, augmentation=augmentation, label=f"cap {epsilon!r}")
    except InfeasibleScenarioError as error:
        return ParetoPoint(epsilon=epsilon, emissions=math.nan, cost=math.nan, status="infeasible", message=error.message)
    except HyplanException as error:
        return ParetoPoint(epsilon=epsilon, emissions=math.nan, cost=math.nan, status="failed", message=error.message)
    return _point(solution, epsilon)


def reduction_cost(point: ParetoPoint, baseline: ParetoPoint) -> float:
    """Incremental cost per ton of CO2 avoided relative to ``baseline``; NaN at equal emissions."""
    avoided = baseline.emissions - point.emissions
    if not point.solved or abs(avoided) <= 1e-9 * (1.0 + abs(baseline.emissions)):
        return math.nan
    return (point.cost - baseline.cost) / avoided


def frontier(scenario: ScenarioConfig, n_points: int | None = None, workers: int | None = None, log=None) -> ParetoFrontier:
    """
    Frontier of ``n_points`` plans from the min-cost anchor (first) to the
    min-CO2 anchor (last). Interior caps that cannot be met are kept as
    points with status "infeasible". With zero spread between the anchors
    the frontier is the single min-cost point.
    """
    options = scenario.pareto
    n_points = n_points or options.points
    workers = workers or options.workers
    cheapest, cleanest = compute_anchors(scenario, log=log)
    first, last = _point(cheapest, cheapest.co2), _point(cleanest, cleanest.co2)
    high, low = cheapest.co2, cleanest.co2

    if high - low <= options.anchor_tolerance * (1.0 + high):
        points = [first]
    else:
        grid = epsilon_grid(high, low, n_points, options.spacing)
        weight = augmentation_weight(cheapest, cleanest, options.augmentation)
        interior = [float(epsilon) for epsilon in grid[1:-1]]
        if workers > 1 and interior:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                solved = list(pool.map(_solve_capped, [scenario] * len(interior), interior, [weight] * len(interior)))
        else:
            solved = [_solve_capped(scenario, epsilon, weight) for epsilon in interior]
        for point in solved:
            if not point.solved:
                logger.warning("Frontier point at cap %.6g t is %s: %s", point.epsilon, point.status, point.message)
        points = [first, *solved, last]

    baseline = last if options.reduction_baseline == "min-co2" else first
    for point in points:
        point.reduction_cost = reduction_cost(point, baseline)
    logger.info("Frontier: %d points, %d gaps", len(points), sum(not point.solved for point in points))
    return ParetoFrontier(points=points, min_cost=first, min_co2=last, baseline=options.reduction_baseline)
