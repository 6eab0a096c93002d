"""Python front end for the sudakov C++ core.

Models and families are plain dicts in the same shape as the CLI configs,
e.g. ``{"builtin": "gaussian_iid", "n": 8}``; reports come back as dicts.
"""

import json as _json

from . import _core
from ._core import (
    DomainError,
    ModelError,
    PreconditionError,
    bernoulli_pnorm_exact,
    builtin_names,
    command_names,
    gluskin_kwapien_bound,
    hitczenko_norm,
    sauer_exact_count,
)

__all__ = [
    "DomainError",
    "ModelError",
    "PreconditionError",
    "bernoulli_pnorm_exact",
    "builtin_names",
    "command_names",
    "gluskin_kwapien_bound",
    "hitczenko_norm",
    "isotropy",
    "minoration",
    "pnorm",
    "run_command",
    "sauer_exact_count",
    "solve_common_witness",
    "solve_witness",
    "vc_dimension",
]


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def run_command(command, config, seed=0, budget=100000):
    """Runs a CLI subcommand in-process; returns {"report", "csv", "passed"}."""
    return _json.loads(_core.run_command(command, _dump(config), seed, budget))


def pnorm(model, t, p, seed=0, budget=100000):
    """||<t, X>||_p with its method and interval."""
    return _json.loads(_core.pnorm(_dump(model), list(map(float, t)), float(p), seed, budget))


def solve_witness(model, t, p, floor=0.0):
    return _json.loads(_core.solve_witness(_dump(model), list(map(float, t)), float(p), float(floor)))


def solve_common_witness(model, t, classes, p):
    return _json.loads(_core.solve_common_witness(_dump(model), list(map(float, t)), classes, float(p)))


def vc_dimension(sets, n, cap=8):
    return _json.loads(_core.vc_dimension([sorted(s) for s in sets], n, cap))


def minoration(model, family, p, seed=0, budget=100000):
    return _json.loads(_core.minoration(_dump(model), _dump(family), float(p), seed, budget))


def isotropy(model, samples=100000, seed=0):
    return _json.loads(_core.isotropy(_dump(model), samples, seed))
