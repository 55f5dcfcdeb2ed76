"""Perturb-and-MAP sampling and log-partition bounds for discrete pairwise models."""

import json as _json

from ._pmap import (
    Error,
    InvalidInput,
    Model,
    StateSpaceTooLarge,
    approx_samples,
    assignment_index,
    gibbs_samples,
    gumbel_max_samples,
    joint_distribution,
    log_partition,
    lower_bound_expected,
    lower_bound_probable,
    solve_map,
    spin_glass,
    unbiased_samples,
    upper_bound,
    vertex_marginals,
)
from ._pmap import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(spec):
    """Run an experiment from a dict spec; returns (csv_text, sidecar_dict)."""
    csv, sidecar = _run_experiment(_json.dumps(spec))
    return csv, _json.loads(sidecar)


__all__ = [
    "Error",
    "InvalidInput",
    "Model",
    "StateSpaceTooLarge",
    "approx_samples",
    "assignment_index",
    "gibbs_samples",
    "gumbel_max_samples",
    "joint_distribution",
    "log_partition",
    "lower_bound_expected",
    "lower_bound_probable",
    "run_experiment",
    "solve_map",
    "spin_glass",
    "unbiased_samples",
    "upper_bound",
    "vertex_marginals",
]
