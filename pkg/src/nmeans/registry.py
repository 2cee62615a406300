"""Look up 2-means by the names used on the command line and in configs."""

from __future__ import annotations

import numpy as np

from . import iterated
from . import operator as op
from . import scalar
from .core import MeanSpec
from .exceptions import ParameterError

SPACES = ("scalar", "spd")

# generator functions for quasi:<name>, each with its inverse
QUASI_GENERATORS = {
    "identity": (lambda x: x, lambda y: y),
    "log": (np.log, np.exp),
    "exp": (np.exp, np.log),
    "sqrt": (np.sqrt, np.square),
    "square": (np.square, np.sqrt),
    "reciprocal": (np.reciprocal, np.reciprocal),
    "cbrt": (np.cbrt, lambda y: y * y * y),
}


def _max(points, tol=None):
    return np.maximum(points[0], points[1])


def _left(points, tol=None):
    return np.array(points[0], dtype=float, copy=True)


def _fixture(evaluate, name, space):
    return MeanSpec(arity=2, evaluate=evaluate, space=space, name=name)


def scalar_mean(name: str) -> MeanSpec:
    kind, _, arg = name.partition(":")
    if kind == "arithmetic":
        return scalar.arithmetic_mean()
    if kind == "geometric":
        return scalar.geometric_mean()
    if kind == "harmonic":
        return scalar.harmonic_mean()
    if kind == "logarithmic":
        return scalar.logarithmic_mean()
    if kind == "power":
        return scalar.power_mean(_number(arg, name))
    if kind == "weighted":
        return scalar.weighted_affine_mean(_number(arg, name))
    if kind == "quasi":
        try:
            f, f_inv = QUASI_GENERATORS[arg]
        except KeyError:
            raise ParameterError(
                f"unknown quasi-arithmetic generator {arg!r}; "
                f"expected one of {sorted(QUASI_GENERATORS)}"
            ) from None
        return scalar.quasi_arithmetic_mean(f, f_inv, name)
    if kind in ("agm", "hgm"):
        nu = scalar.arithmetic_mean("log_absolute") if kind == "agm" else scalar.harmonic_mean()
        return iterated.compose(scalar.geometric_mean(), nu, "iterated", name=kind)
    if kind == "max":
        return _fixture(_max, "max", scalar.REALS)
    if kind == "left":
        return _fixture(_left, "left", scalar.REALS)
    raise ParameterError(f"unknown scalar mean {name!r}")


def spd_mean(name: str) -> MeanSpec:
    builders = {
        "arithmetic": op.arithmetic_mean,
        "geometric": op.geometric_mean,
        "harmonic": op.harmonic_mean,
        "logarithmic": iterated.logarithmic_mean,
        "agm": iterated.agm_mean,
        "hgm": iterated.hgm_mean,
    }
    if name == "left":
        return _fixture(_left, "left", op.SPD)
    try:
        return builders[name]()
    except KeyError:
        raise ParameterError(
            f"mean {name!r} is not available for SPD matrices; "
            f"expected one of {sorted(builders)}"
        ) from None


def get_mean(name: str, space: str = "scalar") -> MeanSpec:
    """Build the 2-mean called ``name`` on ``space`` (``"scalar"`` or ``"spd"``)."""
    if space == "scalar":
        return scalar_mean(name)
    if space == "spd":
        return spd_mean(name)
    raise ParameterError(f"unknown space {space!r}; expected one of {SPACES}")


def _number(text, name):
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except ValueError:
        raise ParameterError(f"bad numeric parameter in {name!r}") from None
