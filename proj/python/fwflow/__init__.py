"""Frank-Wolfe solvers with multistep and LMO-averaged discretizations."""

import json

from ._core import (
    averaging_weights,
    certificate,
    fit_power_law,
    flow_bound,
    generators,
    solvers,
    zigzag_energy,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "averaging_weights",
    "certificate",
    "fit_power_law",
    "flow_bound",
    "generators",
    "run",
    "solvers",
    "zigzag_energy",
]


def run(config):
    """Run one experiment. `config` is a dict with the same keys as the JSON config files."""
    return _run_experiment(json.dumps(config))
