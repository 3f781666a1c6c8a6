"""Weighted model sets, amalgam norms and diffraction of cut-and-project combs.

Schemes, weights and boxes are given in the same shape as the JSON config
files, e.g. ``{"preset": "golden"}``, ``{"kind": "gaussian", "sigma": 0.6}``,
``[-10, 10]``.
"""

import json
from pathlib import Path

from . import _core
from ._core import CapacityError, ConfigError, QcdiffError, UnsupportedWeightError

__all__ = [
    "CapacityError", "ConfigError", "QcdiffError", "UnsupportedWeightError",
    "analytic_diffraction", "command_names", "enumerate_points", "materialize",
    "psf_verify", "run_command", "run_config", "scheme_info",
]


def _j(obj):
    return obj if isinstance(obj, str) and obj.lstrip().startswith(("{", "[")) else json.dumps(obj)


def scheme_info(scheme):
    """Basis, dual basis, dimensions and density of a scheme."""
    return _core.scheme_info(_j(scheme))


def enumerate_points(scheme, physical_box, internal_box):
    """List of (x, y, integer coords) with x, y inside the closed boxes."""
    return _core.enumerate_points(_j(scheme), _j(physical_box), _j(internal_box))


def materialize(scheme, weight, box, tail_eps=1e-12):
    """Points and complex weights of the weighted model set on a physical box."""
    return _core.materialize(_j(scheme), _j(weight), _j(box), tail_eps)


def analytic_diffraction(scheme, weight, freq_box, amp_eps, allow_non_w0=False):
    """Bragg peaks (frequency, internal, amplitude, intensity) in freq_box."""
    return _core.analytic_diffraction(_j(scheme), _j(weight), _j(freq_box), amp_eps, allow_non_w0)


def psf_verify(scheme, g, h, radius):
    """Truncated Poisson summation residual against its error bound."""
    return _core.psf_verify(_j(scheme), _j(g), _j(h), radius)


def command_names():
    return list(_core.command_names())


def run_command(command, config, out_dir=None, config_dir="", max_n=0, seed=None):
    """Runs a CLI command on a config dict; returns command, pass, checks, report."""
    out = None if out_dir is None else str(out_dir)
    return json.loads(_core.run_command(command, _j(config), out, str(config_dir), max_n, seed))


def run_config(path, out_dir=None, max_n=0, seed=None):
    """Loads a config file and runs the command it names."""
    path = Path(path)
    config = json.loads(path.read_text())
    return run_command(config["command"], config, out_dir, path.parent, max_n, seed)
