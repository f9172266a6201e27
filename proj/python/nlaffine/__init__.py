"""Nonlinear affine processes with jumps.

Configs may be given as a dict, a JSON string or a path to a JSON file.
"""

import json
import os

from . import _core
from ._core import CflError, ConfigError, Error, levy_norm, matrix_sqrt, path_seed

__all__ = [
    "CflError",
    "ConfigError",
    "Error",
    "canonical_config",
    "check",
    "config_hash",
    "levy_norm",
    "lower_bound",
    "matrix_sqrt",
    "path_seed",
    "run",
    "solve",
]


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        with open(config, encoding="utf-8") as f:
            return f.read()
    return config


def canonical_config(config):
    return json.loads(_core.canonical_config(_text(config)))


def config_hash(config):
    return _core.config_hash(_text(config))


def solve(config, threads=1):
    """Grid solution of the nonlinear PIDE: times, nodes, values[layer, node]."""
    return _core.solve(_text(config), threads)


def lower_bound(config, threads=1, seed=None):
    """Monte Carlo lower bound: max over vertices of the constant-parameter means."""
    return _core.lower_bound(_text(config), threads, seed)


def check(config):
    return json.loads(_core.check(_text(config)))


def run(command, *args, out_dir=".", threads=0, seed=None, force=False, interpolate=False):
    """Same as the CLI subcommand; returns (exit_code, log)."""
    return _core.run_command(command, [os.fspath(a) for a in args], os.fspath(out_dir), threads, seed, force,
                             interpolate)
