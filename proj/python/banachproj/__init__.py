"""Metric projections onto convex sets in finite-dimensional l_p spaces.

Sets are plain dicts, e.g. {"type": "ball", "center": [0, 0], "radius": 1};
vectors are anything numpy can turn into a float array.
"""

import json

import numpy as np

from . import _core
from ._core import ConfigError, DomainError, InfeasibleSet, NonConvergence, SpaceMismatch

__all__ = [
    "ConfigError",
    "DomainError",
    "InfeasibleSet",
    "NonConvergence",
    "SpaceMismatch",
    "certified_projection",
    "derivative",
    "duality_map",
    "estimate_moduli",
    "inverse_duality_map",
    "norm",
    "numdiff",
    "project",
    "psi",
    "run_config",
    "variational_residual",
    "xi",
]


def _vec(x):
    return np.ascontiguousarray(x, dtype=float)


def norm(x, p):
    return _core.norm(_vec(x), p)


def duality_map(x, p):
    return _core.duality_map(_vec(x), p)


def inverse_duality_map(phi, p):
    """Inverse of the duality map; phi lives in the dual of l_p."""
    return _core.inverse_duality_map(_vec(phi), p)


def psi(x, v, p):
    return _core.psi(_vec(x), _vec(v), p)


def xi(x, v, p):
    """Returns (value, converged)."""
    return _core.xi(_vec(x), _vec(v), p)


def project(set_, x, p):
    return _core.project(json.dumps(set_), _vec(x), p)


def certified_projection(set_, x, p):
    return json.loads(_core.certified_projection(json.dumps(set_), _vec(x), p))


def variational_residual(set_, x, u, p):
    return _core.variational_residual(json.dumps(set_), _vec(x), _vec(u), p)


def derivative(set_, x, v, p):
    return json.loads(_core.derivative(json.dumps(set_), _vec(x), _vec(v), p))


def numdiff(set_, x, v, p):
    return json.loads(_core.numdiff(json.dumps(set_), _vec(x), _vec(v), p))


def estimate_moduli(p, n=2, budget=100000, seed=0, threads=0):
    """threads=0 uses BANACHPROJ_THREADS or the hardware concurrency."""
    return json.loads(_core.estimate_moduli(p, n, budget, seed, threads))


def run_config(config):
    """Runs a CLI config dict. Returns (exit_code, output); output is the parsed
    JSON report, or raw text for CSV-producing commands."""
    code, out, err = _core.run_config(json.dumps(config))
    try:
        return code, json.loads(out) if out else err
    except json.JSONDecodeError:
        return code, out
