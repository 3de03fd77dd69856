import copy
import pathlib

import pytest
import yaml

from hyplan.configuration import validate_scenario

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "config"


def make_document(horizon=4, technologies=("TU_M",), demand=100.0, **overrides):
    """Raw one-region scenario document; ``regions`` entries in overrides replace the default region."""
    document = {
        "name": "test",
        "horizon_hours": horizon,
        "regions": [
            {
                "id": "R",
                "electric_demand": demand if isinstance(demand, list) else {"constant": demand},
                "fuel_prices": {"coal": 40.0},
            }
        ],
        "technologies": [tech if isinstance(tech, dict) else {"from": tech} for tech in technologies],
    }
    document.update(copy.deepcopy(overrides))
    return document


def make_scenario(horizon=4, technologies=("TU_M",), demand=100.0, **overrides):
    return validate_scenario(make_document(horizon, technologies, demand, **overrides))


def make_wind_region(region_id="R", demand=100.0, wind_cf=(0.3, 0.5, 0.4, 0.6), **fields):
    region = {
        "id": region_id,
        "electric_demand": {"constant": demand},
        "wind_cf": {"pattern": list(wind_cf)},
        "fuel_prices": {"coal": 40.0},
    }
    region.update(fields)
    return region


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def document_factory():
    return make_document


@pytest.fixture
def write_scenario_file(tmp_path):
    """Write a raw scenario document to a YAML file under tmp_path and return its path."""

    def write(document, name="scenario.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(document, sort_keys=False))
        return path

    return write
