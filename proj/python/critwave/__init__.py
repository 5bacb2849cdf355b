"""Numerics for the energy-critical exponential wave equation on the unit square."""

import json

from ._critwave import *  # noqa: F401,F403
from ._critwave import run_experiment as _run_experiment

__version__ = version()  # noqa: F405


def experiment(name, seed=None, **params):
    """Runs an experiment and returns its summary as a dict.

    Scalar parameters are promoted to one-element lists.
    """
    lists = {k: [float(x) for x in (v if isinstance(v, (list, tuple)) else [v])] for k, v in params.items()}
    args = (name, lists) if seed is None else (name, lists, seed)
    return json.loads(_run_experiment(*args))
