import copy
import hashlib
import importlib.resources
import json
import math
import os
import pathlib
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import (
    BaseModel,
    Field,
    ValidationError,
    conint,
    confloat,
    constr,
    root_validator,
    validator,
)

from hyplan.hyplan_exception import ScenarioValidationError
from hyplan.units import CNY_PER_USD, LHV_H2_MJ_PER_KG, parse_quantity

SCHEMA_VERSION = 1

# Extra directories searched for scenario files and relative series paths.
CONFIG_SEARCH_PATH: list[str] = [
    path for path in os.environ.get("HYPLAN_CONFIG_PATH", "").split(os.pathsep) if path
]


def find_scenario(path: str | os.PathLike) -> pathlib.Path:
    """Locate a scenario file directly or along ``HYPLAN_CONFIG_PATH``."""
    candidate = pathlib.Path(path)
    if candidate.exists() or candidate.is_absolute():
        return candidate
    for directory in CONFIG_SEARCH_PATH:
        located = pathlib.Path(directory) / candidate
        if located.exists():
            return located
    return candidate


########################
#  General parameters  #
########################

Identifier = constr(regex=r"^[A-Za-z][A-Za-z0-9_]*$")
Fraction = confloat(ge=0, le=1)

TechnologyKind = Literal["TU", "CHP", "WT", "PV", "BES", "HPS", "EC", "HT", "FC", "HS", "COP", "EB", "HST", "LINE"]
ObjectiveMode = Literal["min-cost", "min-co2", "cost-under-cap"]
ChainLink = Literal["EC", "COP", "HS", "HT", "FC", "BES", "HPS", "hydrogen_demand"]

COMMITTED_KINDS = frozenset({"TU", "CHP", "EC", "HT", "FC"})
STORAGE_KINDS = frozenset({"BES", "HPS", "HS", "HST"})
ELECTRIC_STORAGE_KINDS = frozenset({"BES", "HPS"})
CONVERSION_KINDS = frozenset({"CHP", "EC", "HT", "FC", "COP", "EB"})
EMITTING_KINDS = frozenset({"TU", "CHP"})
MASS_RATED_KINDS = frozenset({"HS", "COP"})

REGION_SERIES = ("electric_demand", "export_demand", "heat_demand", "hydrogen_demand", "wind_cf", "solar_cf")


class FrozenModel(BaseModel):
    class Config:
        allow_mutation = False
        extra = "forbid"


class CostParams(FrozenModel):
    # $/kW, or $/kg for HS and $/kg-h for COP
    capital: confloat(ge=0)
    fixed_om_fraction: confloat(ge=0) = 0.0
    # $/kWh of output (or throughput for storage)
    variable_om: confloat(ge=0) = 0.0
    # $/kW started
    startup_cost: confloat(ge=0) = 0.0
    lifetime_years: conint(ge=1)
    interest_rate: confloat(ge=0) = 0.07
    # fuel units per MWh of electric output, priced by the region's fuel_prices
    fuel_use_per_mwh: confloat(ge=0) = 0.0


class FlexParams(FrozenModel):
    min_load: Fraction = 0.0
    max_load: Fraction = 1.0
    ramp_up: confloat(gt=0, le=1) = 1.0
    ramp_down: confloat(gt=0, le=1) = 1.0
    startup_ramp: Optional[confloat(gt=0, le=1)] = None
    shutdown_ramp: Optional[confloat(gt=0, le=1)] = None
    min_up: conint(ge=1) = 1
    min_down: conint(ge=1) = 1
    # MW online before hour 1 when operation is not cyclic
    initial_online: Optional[confloat(ge=0)] = None

    @root_validator(skip_on_failure=True)
    def check_load_range(cls, values):
        assert values["min_load"] <= values["max_load"], "ensure min_load <= max_load"
        for ramp in ("startup_ramp", "shutdown_ramp"):
            if values[ramp] is not None:
                assert values[ramp] >= values["min_load"], f"ensure {ramp} >= min_load"
        return values

    @property
    def effective_startup_ramp(self) -> float:
        if self.startup_ramp is not None:
            return self.startup_ramp
        return max(self.ramp_up, self.min_load)

    @property
    def effective_shutdown_ramp(self) -> float:
        if self.shutdown_ramp is not None:
            return self.shutdown_ramp
        return max(self.ramp_down, self.min_load)


class ConversionParams(FrozenModel):
    electric_eff: confloat(gt=0, le=1) = 1.0
    waste_heat_eff: Fraction = 0.0
    water_per_kg_h2: confloat(ge=0) = 9.0
    oxygen_per_kg_h2: confloat(ge=0) = 8.0
    cop_kwh_per_kg: confloat(ge=0) = 1.5
    chp_heat_eff: Fraction = 0.0


class StorageParams(FrozenModel):
    charge_eff: confloat(gt=0, le=1) = 1.0
    discharge_eff: confloat(gt=0, le=1) = 1.0
    loss_rate: confloat(ge=0, lt=1) = 0.0
    # $/kWh of energy rating for BES, HPS and HST; HS prices its kg rating through cost.capital
    energy_capital: confloat(ge=0) = 0.0
    # energy rating of existing plant, as hours at existing power rating
    existing_duration_hours: confloat(ge=0) = 0.0


class TechnologySpec(FrozenModel):
    id: Identifier
    kind: TechnologyKind
    label: str = ""
    stand_in: bool = False
    cost: CostParams
    flex: Optional[FlexParams] = None
    conversion: Optional[ConversionParams] = None
    storage: Optional[StorageParams] = None
    fuel: Optional[str] = None
    emission_factor: Optional[confloat(ge=0)] = None

    @root_validator(skip_on_failure=True)
    def check_kind_presence_rules(cls, values):
        kind = values["kind"]
        location = f"technologies -> {values['id']}"
        if kind in COMMITTED_KINDS:
            assert values["flex"] is not None, f"{location}\nensure flex parameters are given for a {kind} fleet"
        else:
            assert values["flex"] is None, f"{location}\nensure flex parameters are absent for non-committed kind {kind}"
        if kind in CONVERSION_KINDS:
            assert values["conversion"] is not None, f"{location}\nensure conversion parameters are given for kind {kind}"
        if kind in STORAGE_KINDS:
            assert values["storage"] is not None, f"{location}\nensure storage parameters are given for kind {kind}"
        else:
            assert values["storage"] is None, f"{location}\nensure storage parameters are absent for kind {kind}"
        if kind == "HS":
            assert values["storage"].loss_rate == 0, f"{location}\nensure HS loss_rate is 0"
        return values

    @property
    def committed(self) -> bool:
        return self.kind in COMMITTED_KINDS


class PriceBook(FrozenModel):
    # $/kg
    water: confloat(gt=0) = 0.01
    oxygen: confloat(gt=0) = 0.04
    hydrogen: confloat(gt=0) = 2.0
    # CNY per USD
    currency_rate: confloat(gt=0) = CNY_PER_USD


CreditRule = Union[Literal["equal-to-CF"], list[Fraction], dict[str, list[Fraction]]]


class ReservePolicy(FrozenModel):
    enabled: bool = True
    demand_reserve_fraction: Fraction = 0.05
    wind_error: Fraction = 0.10
    solar_error: Fraction = 0.05
    wind_credit: CreditRule = "equal-to-CF"
    solar_credit: CreditRule = "equal-to-CF"
    es_reserve_rule: Literal["headroom", "none"] = "headroom"


class Corridor(FrozenModel):
    from_region: Identifier = Field(..., alias="from")
    to_region: Identifier = Field(..., alias="to")
    length_km: confloat(gt=0)
    # MW
    existing_capacity: confloat(ge=0) = 0.0
    capacity_limit: confloat(ge=0) = math.inf
    # $/kW
    capital: confloat(ge=0) = 0.0

    class Config:
        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def check_capacity_range(cls, values):
        assert (
            values["existing_capacity"] <= values["capacity_limit"]
        ), f"topology -> corridors -> {values['from_region']}-{values['to_region']}\nensure existing_capacity <= capacity_limit"
        assert values["from_region"] != values["to_region"], "ensure corridors join two different regions"
        return values


class HydrogenLink(FrozenModel):
    from_region: Identifier = Field(..., alias="from")
    to_region: Identifier = Field(..., alias="to")
    length_km: Optional[confloat(gt=0)] = None

    class Config:
        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def check_distinct(cls, values):
        assert values["from_region"] != values["to_region"], "ensure hydrogen links join two different regions"
        return values


class Topology(FrozenModel):
    corridors: list[Corridor] = []
    hydrogen_adjacency: list[HydrogenLink] = []

    @validator("corridors", "hydrogen_adjacency")
    def check_unique_pairs(cls, links):
        pairs = [frozenset((link.from_region, link.to_region)) for link in links]
        assert len(set(pairs)) == len(pairs), "ensure every region pair is listed at most once"
        return links

    def corridor_between(self, a: str, b: str) -> Corridor | None:
        for corridor in self.corridors:
            if {corridor.from_region, corridor.to_region} == {a, b}:
                return corridor
        return None


class RegionSpec(FrozenModel):
    id: Identifier
    # MW
    electric_demand: list[confloat(ge=0)]
    export_demand: Optional[list[float]] = None
    heat_demand: Optional[list[confloat(ge=0)]] = None
    # kg/h
    hydrogen_demand: Optional[list[confloat(ge=0)]] = None
    wind_cf: Optional[list[float]] = None
    solar_cf: Optional[list[float]] = None
    # MW, kg for HS and kg/h for COP
    existing_capacity: dict[Identifier, confloat(ge=0)] = {}
    build_limit: dict[Identifier, confloat(ge=0)] = {}
    # $ per fuel unit
    fuel_prices: dict[str, confloat(ge=0)] = {}
    # t CO2 / MWh
    emission_factors: dict[Identifier, confloat(ge=0)] = {}
    # subset of technology ids available here; all when absent
    technologies: Optional[list[Identifier]] = None

    @validator("wind_cf", "solar_cf")
    def check_capacity_factors(cls, series, field):
        if series is not None:
            assert all(0.0 <= value <= 1.0 for value in series), f"{field.name}: capacity factor out of [0,1]"
        return series

    @root_validator(skip_on_failure=True)
    def check_existing_within_limit(cls, values):
        for tech, existing in values["existing_capacity"].items():
            limit = values["build_limit"].get(tech)
            if limit is not None:
                assert (
                    existing <= limit
                ), f"regions -> {values['id']}\nensure existing_capacity <= build_limit for {tech}"
        return values

    def series(self, name: str, horizon: int) -> np.ndarray:
        """Named hourly series as an array, zeros when not given."""
        values = getattr(self, name)
        if values is None:
            return np.zeros(horizon)
        return np.asarray(values, dtype=float)


class SolverOptions(FrozenModel):
    tolerance: confloat(gt=0, le=1e-3) = 1e-7
    max_iterations: conint(ge=1) = 1_000_000
    node_cap: conint(ge=1) = 100_000
    max_integer_variables: conint(ge=0) = 20_000
    mip_gap: confloat(ge=0) = 1e-6
    scaling: bool = True
    presolve: bool = True
    method: Literal["highs", "highs-ipm"] = "highs"
    time_limit: Optional[confloat(gt=0)] = None


class ParetoOptions(FrozenModel):
    points: conint(ge=2) = 8
    augmentation: confloat(ge=0) = 1e-6
    spacing: Literal["uniform", "log"] = "uniform"
    reduction_baseline: Literal["min-co2", "min-cost"] = "min-co2"
    # relative slack on the minimum emissions when fixing the min-CO2 anchor's cost
    anchor_tolerance: confloat(ge=0) = 1e-7
    workers: conint(ge=1) = 1


class PipelineOptions(FrozenModel):
    # $ per km per GWh of hydrogen (LHV) moved
    transport_rate: confloat(gt=0) = 2.484


class ValidationOptions(FrozenModel):
    module_count: conint(ge=1) = 2
    horizon_hours: Optional[conint(ge=2)] = None


########################
#  Full configuration  #
########################


class ScenarioConfig(FrozenModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    name: Identifier = "scenario"
    horizon_hours: conint(ge=2)
    start_date: str = "2050-01-01"
    regions: list[RegionSpec]
    technologies: list[TechnologySpec]
    topology: Topology = Topology()
    rps_gamma: Optional[Fraction] = None
    emission_cap: Optional[confloat(ge=0)] = None
    objective_mode: ObjectiveMode = "min-cost"
    price_book: PriceBook = PriceBook()
    reserve_policy: ReservePolicy = ReservePolicy()
    chain_ablation: set[ChainLink] = set()
    commitment: Literal["relaxed", "binary"] = "relaxed"
    module_count: conint(ge=1) = 2
    cyclic_operation: bool = True
    lhv_mj_per_kg: confloat(gt=0) = LHV_H2_MJ_PER_KG
    # multiplier on hourly operating costs, revenues and emissions (e.g. 365 for one representative day)
    operation_weight: confloat(gt=0) = 1.0
    solver: SolverOptions = SolverOptions()
    pareto: ParetoOptions = ParetoOptions()
    pipeline: PipelineOptions = PipelineOptions()
    validation: ValidationOptions = ValidationOptions()

    @validator("regions")
    def check_regions(cls, regions):
        ids = [region.id for region in regions]
        assert len(ids) > 0, "ensure at least one region is given"
        assert len(set(ids)) == len(ids), "ensure region ids are unique"
        return regions

    @validator("technologies")
    def check_technologies(cls, technologies):
        ids = [tech.id for tech in technologies]
        assert len(set(ids)) == len(ids), "ensure technology ids are unique"
        for kind in ("COP", "LINE"):
            assert sum(tech.kind == kind for tech in technologies) <= 1, f"ensure at most one {kind} technology"
        return technologies

    @root_validator(skip_on_failure=True)
    def check_series_lengths(cls, values):
        horizon = values["horizon_hours"]
        for region in values["regions"]:
            for name in REGION_SERIES:
                series = getattr(region, name)
                if series is not None:
                    assert (
                        len(series) == horizon
                    ), f"regions -> {region.id} -> {name}\nensure series length equals horizon_hours ({horizon}), found {len(series)}"
        return values

    @root_validator(skip_on_failure=True)
    def check_cross_references(cls, values):
        technologies = {tech.id: tech for tech in values["technologies"]}
        regions = {region.id for region in values["regions"]}
        for region in values["regions"]:
            location = f"regions -> {region.id}"
            referenced = set(region.existing_capacity) | set(region.build_limit) | set(region.emission_factors)
            referenced |= set(region.technologies or [])
            for tech in sorted(referenced):
                assert tech in technologies, f"{location}\nensure every technology referenced exists - unknown technology id {tech}"
            for tech in region.emission_factors:
                assert technologies[tech].kind in EMITTING_KINDS, f"{location}\nensure emission_factors only list TU or CHP technologies - {tech}"
            available = region.technologies if region.technologies is not None else list(technologies)
            for tech_id in available:
                tech = technologies[tech_id]
                if tech.kind in EMITTING_KINDS:
                    assert (
                        tech_id in region.emission_factors or tech.emission_factor is not None
                    ), f"{location}\nensure an emission factor is given for {tech_id}"
                if tech.fuel is not None:
                    assert tech.fuel in region.fuel_prices, f"{location}\nensure a fuel price is given for '{tech.fuel}' used by {tech_id}"

        for link in values["topology"].corridors + values["topology"].hydrogen_adjacency:
            for end in (link.from_region, link.to_region):
                assert end in regions, f"topology\nensure links reference existing regions - unknown region {end}"
        for link in values["topology"].hydrogen_adjacency:
            if link.length_km is None:
                assert (
                    values["topology"].corridor_between(link.from_region, link.to_region) is not None
                ), f"topology -> hydrogen_adjacency -> {link.from_region}-{link.to_region}\nensure a length_km is given when no electric corridor joins the pair"
        return values

    def technology(self, tech_id: str) -> TechnologySpec:
        for tech in self.technologies:
            if tech.id == tech_id:
                return tech
        raise KeyError(tech_id)

    def region(self, region_id: str) -> RegionSpec:
        for region in self.regions:
            if region.id == region_id:
                return region
        raise KeyError(region_id)

    def is_enabled(self, tech: TechnologySpec) -> bool:
        """False when the technology's chain link is ablated."""
        if tech.kind in self.chain_ablation:
            return False
        # without compression there is no way into or out of storage
        if tech.kind in ("HS", "COP") and ({"HS", "COP"} & self.chain_ablation):
            return False
        return True

    def available(self, region: RegionSpec, *kinds: str) -> list[TechnologySpec]:
        """Enabled technologies of the given kinds usable in ``region``, in declaration order."""
        allowed = set(region.technologies) if region.technologies is not None else None
        selected = []
        for tech in self.technologies:
            if tech.kind not in kinds or not self.is_enabled(tech):
                continue
            if allowed is not None and tech.id not in allowed:
                continue
            if tech.kind == "WT" and region.wind_cf is None:
                continue
            if tech.kind == "PV" and region.solar_cf is None:
                continue
            selected.append(tech)
        return selected

    def existing(self, region: RegionSpec, tech: TechnologySpec) -> float:
        return region.existing_capacity.get(tech.id, 0.0)

    def limit(self, region: RegionSpec, tech: TechnologySpec) -> float:
        return region.build_limit.get(tech.id, math.inf)

    def emission_factor(self, region: RegionSpec, tech: TechnologySpec) -> float:
        if tech.id in region.emission_factors:
            return region.emission_factors[tech.id]
        if tech.emission_factor is not None:
            return tech.emission_factor
        raise KeyError(f"no emission factor for {tech.id} in {region.id}")

    def hydrogen_demand(self, region: RegionSpec) -> np.ndarray:
        if "hydrogen_demand" in self.chain_ablation:
            return np.zeros(self.horizon_hours)
        return region.series("hydrogen_demand", self.horizon_hours)

    def line_technology(self) -> TechnologySpec:
        for tech in self.technologies:
            if tech.kind == "LINE":
                return tech
        return TechnologySpec(id="LINE", kind="LINE", cost=CostParams(capital=0.0, lifetime_years=40))


##########################
#  Document preparation  #
##########################


def load_library() -> dict:
    """The bundled parameter tables shipped as package data."""
    resource = importlib.resources.files("hyplan") / "data" / "parameters.yaml"
    return yaml.safe_load(resource.read_text())


def _deep_merge(base: dict, overrides: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _resolve_technologies(raw_technologies, errors: list[str]) -> list:
    library = None
    if raw_technologies == "bundled":
        library = load_library()
        return copy.deepcopy(library["technologies"])
    resolved = []
    for position, entry in enumerate(raw_technologies or []):
        if isinstance(entry, dict) and "from" in entry:
            library = library or load_library()
            bundled = {tech["id"]: tech for tech in library["technologies"]}
            source = entry["from"]
            if source not in bundled:
                errors.append(f"technologies -> {position}: unknown bundled technology {source!r}")
                continue
            overrides = {key: value for key, value in entry.items() if key != "from"}
            resolved.append(_deep_merge(bundled[source], overrides))
        else:
            resolved.append(entry)
    return resolved


def read_series_csv(path: pathlib.Path) -> list[float]:
    """Read an ``hour,value`` CSV with 1-based consecutive hours."""
    frame = pd.read_csv(path)
    if list(frame.columns) != ["hour", "value"]:
        raise ValueError(f"{path}: expected header 'hour,value', found {','.join(map(str, frame.columns))}")
    hours = pd.to_numeric(frame["hour"], errors="coerce")
    values = pd.to_numeric(frame["value"], errors="coerce")
    bad = frame.index[hours.isna() | values.isna()]
    if len(bad) > 0:
        raise ValueError(f"{path}: malformed row at line {bad[0] + 2}")
    if not np.array_equal(hours.to_numpy(), np.arange(1, len(frame) + 1)):
        raise ValueError(f"{path}: hours must run 1..{len(frame)} in order")
    return [float(value) for value in values]


def _resolve_series(value, horizon, base_dir: pathlib.Path | None, location: str, errors: list[str]):
    if value is None or isinstance(value, list):
        return value
    if isinstance(value, str):
        path = pathlib.Path(value)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            path = find_scenario(value)
        try:
            return read_series_csv(path)
        except (OSError, ValueError) as error:
            errors.append(f"{location}: {error}")
            return None
    if isinstance(value, dict):
        if not isinstance(horizon, int):
            errors.append(f"{location}: horizon_hours is required to expand {sorted(value)}")
            return None
        if set(value) == {"constant"}:
            return [float(value["constant"])] * horizon
        if "pattern" in value and set(value) <= {"pattern", "scale"}:
            pattern = [float(x) * float(value.get("scale", 1.0)) for x in value["pattern"]]
            if not pattern:
                errors.append(f"{location}: pattern is empty")
                return None
            return [pattern[hour % len(pattern)] for hour in range(horizon)]
    errors.append(f"{location}: cannot interpret series {value!r}")
    return None


def _normalize_units(document: dict, errors: list[str]) -> None:
    rate = document.get("price_book", {}).get("currency_rate", CNY_PER_USD)
    try:
        rate = parse_quantity(rate, "money")
    except ValueError:
        rate = CNY_PER_USD

    def convert(container: dict, key, dimension: str, location: str):
        if key in container and container[key] is not None:
            try:
                container[key] = parse_quantity(container[key], dimension, rate)
            except ValueError as error:
                errors.append(f"{location} -> {key}: {error}")

    kinds = {tech.get("id"): tech.get("kind") for tech in document.get("technologies", []) if isinstance(tech, dict)}
    for region in document.get("regions", []):
        location = f"regions -> {region.get('id')}"
        for field in ("existing_capacity", "build_limit"):
            for tech in list(region.get(field, {}) or {}):
                dimension = "mass" if kinds.get(tech) in MASS_RATED_KINDS else "power"
                convert(region[field], tech, dimension, f"{location} -> {field}")
        for fuel in list(region.get("fuel_prices", {}) or {}):
            convert(region["fuel_prices"], fuel, "money", f"{location} -> fuel_prices")
    convert(document, "emission_cap", "emissions", "scenario")
    for corridor in document.get("topology", {}).get("corridors", []) or []:
        location = f"topology -> corridors -> {corridor.get('from')}-{corridor.get('to')}"
        for key in ("existing_capacity", "capacity_limit"):
            convert(corridor, key, "power", location)
        convert(corridor, "length_km", "length", location)
        convert(corridor, "capital", "money", location)
    for link in document.get("topology", {}).get("hydrogen_adjacency", []) or []:
        convert(link, "length_km", "length", "topology -> hydrogen_adjacency")
    for key in ("water", "oxygen", "hydrogen"):
        convert(document.get("price_book", {}), key, "money", "price_book")
    for tech in document.get("technologies", []):
        if isinstance(tech, dict) and isinstance(tech.get("cost"), dict):
            for key in ("capital", "variable_om", "startup_cost"):
                convert(tech["cost"], key, "money", f"technologies -> {tech.get('id')} -> cost")


def _format_pydantic_errors(error: ValidationError) -> list[str]:
    messages = []
    for entry in error.errors():
        location = " -> ".join(str(part) for part in entry["loc"] if part != "__root__")
        message = entry["msg"]
        if message.startswith("Assertion failed, "):
            message = message[len("Assertion failed, "):]
        messages.append(f"{location}: {message}" if location else message)
    return messages


def validate_scenario(raw, base_dir: str | os.PathLike | None = None) -> ScenarioConfig:
    """
    Resolve and validate a scenario document.

    ``raw`` is the parsed YAML mapping (or an already validated scenario, in
    which case the result is an equal scenario). Series given as CSV paths,
    constants or tiled patterns are expanded, bundled technologies are merged,
    unit annotations are converted to canonical units and then every type
    invariant is checked. All problems found are reported together in a
    ScenarioValidationError.
    """
    if isinstance(raw, ScenarioConfig):
        raw = dump_scenario(raw)
    if not isinstance(raw, dict):
        raise ScenarioValidationError([f"expected a mapping at the top level, found {type(raw).__name__}"])

    errors: list[str] = []
    document = copy.deepcopy(raw)
    base = pathlib.Path(base_dir) if base_dir is not None else None

    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioValidationError([f"schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})"])

    if "technologies" in document:
        document["technologies"] = _resolve_technologies(document["technologies"], errors)
    if document.get("topology") == "bundled":
        document["topology"] = copy.deepcopy(load_library()["topology"])

    horizon = document.get("horizon_hours")
    for region in document.get("regions", []) or []:
        if not isinstance(region, dict):
            continue
        for name in REGION_SERIES:
            if name in region:
                region[name] = _resolve_series(region[name], horizon, base, f"regions -> {region.get('id')} -> {name}", errors)

    _normalize_units(document, errors)

    scenario = None
    try:
        scenario = ScenarioConfig.parse_obj(document)
    except ValidationError as error:
        errors.extend(_format_pydantic_errors(error))
    if errors:
        raise ScenarioValidationError(errors)
    return scenario


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    located = find_scenario(path)
    try:
        with open(located) as scenario_file:
            raw = yaml.safe_load(scenario_file)
    except OSError as error:
        raise ScenarioValidationError([f"cannot read scenario {path}: {error}"]) from None
    except yaml.YAMLError as error:
        raise ScenarioValidationError([f"{path}: not a valid YAML document: {error}"]) from None
    return validate_scenario(raw, base_dir=located.parent)


def dump_scenario(scenario: ScenarioConfig) -> dict:
    """Plain-data form of a validated scenario; validating it again gives an equal scenario."""
    document = scenario.dict(by_alias=True)
    document["chain_ablation"] = sorted(scenario.chain_ablation)
    return document


def write_scenario(scenario: ScenarioConfig, path: str | os.PathLike) -> None:
    with open(path, "w") as scenario_file:
        yaml.safe_dump(dump_scenario(scenario), scenario_file, sort_keys=False)


def scenario_fingerprint(scenario: ScenarioConfig) -> str:
    canonical = json.dumps(dump_scenario(scenario), sort_keys=True, allow_nan=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def with_updates(scenario: ScenarioConfig, **updates) -> ScenarioConfig:
    """Validated copy of ``scenario`` with top-level fields replaced."""
    document = dump_scenario(scenario)
    for key, value in updates.items():
        document[key] = value.dict(by_alias=True) if isinstance(value, BaseModel) else value
    return validate_scenario(document)
