"""Fog overlay gateway selection, functional-area clustering and simulation."""

import json as _json

from ._smartfog import (
    CapacityError,
    ChurnRejected,
    ConfigError,
    ConflictError,
    ContractError,
    IoError,
    NumericalError,
    Overlay,
    SmartFogError,
    TopologyError,
    betweenness,
    build_overlay,
    non_dominated_sort,
    select_gateways,
)
from . import _smartfog


def functional_areas(overlay, areas, k, seed):
    """Functional areas as a list of {gateway, area_type, members} dicts."""
    return _json.loads(_smartfog.functional_areas_json(overlay, list(areas), k, seed))


def simulate(overlay, mode, seed, config=None):
    """One simulated run. `config` uses the experiment config keys (workload, areas, clusters, ...)."""
    return _smartfog.simulate(overlay, mode, seed, _json.dumps(config or {}))


def run_experiment(config):
    """Full sweep; writes results.csv and summary.csv under config["output_dir"]."""
    return _smartfog.run_experiment(_json.dumps(config))


__all__ = [
    "CapacityError",
    "ChurnRejected",
    "ConfigError",
    "ConflictError",
    "ContractError",
    "IoError",
    "NumericalError",
    "Overlay",
    "SmartFogError",
    "TopologyError",
    "betweenness",
    "build_overlay",
    "functional_areas",
    "non_dominated_sort",
    "run_experiment",
    "select_gateways",
    "simulate",
]
