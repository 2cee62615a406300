"""Two-variable means on the positive reals.

Every function here is a numpy ufunc-style expression, so it works on plain
floats and on arrays of any shape.  The ``*_mean`` constructors wrap them as
:class:`~nmeans.core.MeanSpec` objects ready for extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Certificate, MeanSpec, MetricSpace
from .exceptions import ParameterError, ValidationError

_EPS = np.finfo(float).eps
# below this |log(b/a)| the closed form of the logarithmic mean loses digits
_LOG_SERIES_BAND = 1e-6


def as_positive(x):
    """Return ``x`` as a float array, rejecting nonpositive entries."""
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise ValidationError(f"expected positive reals, got {x!r}")
    return arr


def _abs_noise(points):
    scale = max(float(np.max(np.abs(p))) for p in points)
    return 32 * _EPS * scale


def _log_noise(points):
    scale = max(float(np.max(np.abs(np.log(p)))) for p in points)
    return 32 * _EPS * (1.0 + scale)


REALS = MetricSpace(
    name="absolute",
    distance=lambda x, y: np.abs(np.subtract(x, y)),
    default_tol=1e-12,
    noise=_abs_noise,
    spread=lambda b: np.max(b, axis=0) - np.min(b, axis=0),
)

POSITIVE_REALS = MetricSpace(
    name="log_absolute",
    distance=lambda x, y: np.abs(np.log(x) - np.log(y)),
    default_tol=1e-12,
    noise=_log_noise,
    spread=lambda b: np.log(np.max(b, axis=0) / np.min(b, axis=0)),
    max_spread=lambda b: np.log(np.max(np.max(b, axis=0) / np.min(b, axis=0))),
)

SCALAR_METRICS = {"absolute": REALS, "log_absolute": POSITIVE_REALS}


def scalar_space(kind: str) -> MetricSpace:
    try:
        return SCALAR_METRICS[kind]
    except KeyError:
        raise ParameterError(
            f"unknown scalar metric {kind!r}; expected one of {sorted(SCALAR_METRICS)}"
        ) from None


@dataclass(frozen=True)
class RepresentingFunction:
    """Scalar function ``f`` with ``f(1) = 1`` that induces a 2-mean.

    ``f`` must accept numpy arrays.  The induced scalar mean is
    ``x * f(y / x)``; on matrices it is the Kubo-Ando mean (see
    :func:`nmeans.operator.kubo_ando_mean`).
    """

    f: Callable
    label: str = "f"

    def __call__(self, x):
        return self.f(x)

    def check(self, grid=None, tol=1e-12):
        """Validate ``f(1) = 1`` and monotonicity on ``grid``; raise on failure."""
        one = float(self.f(np.array(1.0)))
        if abs(one - 1.0) > tol:
            raise ValidationError(f"{self.label}(1) = {one}, expected 1")
        if grid is None:
            grid = np.geomspace(1e-3, 1e3, 601)
        values = np.asarray(self.f(np.asarray(grid, dtype=float)))
        drops = np.diff(values)
        if np.any(drops < -tol * np.maximum(1.0, np.abs(values[1:]))):
            i = int(np.argmin(drops))
            raise ValidationError(
                f"{self.label} decreases between {grid[i]} and {grid[i + 1]}"
            )
        return self

    def mean(self, x, y):
        x = np.asarray(x, dtype=float)
        return x * self.f(np.asarray(y, dtype=float) / x)


def arithmetic(x, y):
    out = np.add(x, y, dtype=float)
    out *= 0.5
    return out


def geometric(x, y):
    return np.sqrt(np.multiply(x, y, dtype=float))


def harmonic(x, y):
    out = np.multiply(x, y, dtype=float)
    out /= np.add(x, y)
    out *= 2
    return out


def logarithmic_closed_form(a, b):
    """``(b - a) / (log b - log a)``, continuously extended by ``a`` at ``a = b``.

    Near the diagonal the quotient is replaced by ``a * (1 + u/2 + u**2/12)``
    with ``u = log(b/a)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = np.log(b) - np.log(a)
    small = np.abs(u) < _LOG_SERIES_BAND
    safe_u = np.where(small, 1.0, u)
    closed = (b - a) / safe_u
    series = a * (1 + u / 2 + u * u / 12)
    out = np.where(small, series, closed)
    return out if out.ndim else float(out)


def weighted_affine(s: float):
    """``(x, y) -> s*x + (1-s)*y`` for ``0 < s < 1``."""
    if not 0 < s < 1:
        raise ParameterError(f"weight must lie in (0, 1), got {s}")

    def mean(x, y):
        return s * np.asarray(x, dtype=float) + (1 - s) * np.asarray(y, dtype=float)

    return mean


def quasi_arithmetic(f: Callable, f_inv: Callable):
    """``f_inv((f(x) + f(y)) / 2)`` for a strictly monotone ``f``."""

    def mean(x, y):
        acc = np.array(f(np.asarray(x, dtype=float)), dtype=float)
        acc += f(np.asarray(y, dtype=float))
        acc *= 0.5
        value = f_inv(acc)
        if not np.all(np.isfinite(value)):
            raise ValidationError("quasi-arithmetic inverse produced a non-finite value")
        return value

    return mean


_POWER_KERNELS = {
    0: (np.log, np.exp),
    1: (lambda x: x, lambda y: y),
    2: (np.square, np.sqrt),
    -1: (np.reciprocal, np.reciprocal),
    0.5: (np.sqrt, np.square),
    1 / 3: (np.cbrt, lambda y: np.multiply(y, y) * y),
}


def power_functions(alpha: float):
    """Generator ``x**alpha`` and its inverse; ``alpha = 0`` means ``log``."""
    if alpha in _POWER_KERNELS:
        return _POWER_KERNELS[alpha]
    return (lambda x: np.power(x, alpha)), (lambda y: np.power(y, 1.0 / alpha))


def power_closed_form(xs, alpha: float):
    """Power mean of any number of arguments, for checking towers."""
    xs = np.asarray(xs, dtype=float)
    f, f_inv = power_functions(alpha)
    return f_inv(np.mean(f(xs), axis=0))


def interval_rho(n: float) -> float:
    """Contraction constant of the scalar arithmetic mean on ``[1/n, n]``.

    Under the log metric, ``|log((a+b)/(a+c))| <= sup b/(a+b) * |log(b/c)|``
    and the supremum over the interval is ``n**2 / (n**2 + 1)``.  By the
    inversion isometry the same constant serves the harmonic mean.
    """
    if n < 1:
        raise ParameterError("interval parameter must be >= 1")
    return n * n / (n * n + 1)


def _binary(fn):
    def evaluate(points, tol=None):
        return fn(points[0], points[1])

    return evaluate


def make_scalar_mean(
    fn, name, metric="absolute", symmetric=True, rho=None, certificate=None, **meta
) -> MeanSpec:
    return MeanSpec(
        arity=2,
        evaluate=_binary(fn),
        space=scalar_space(metric),
        symmetric=symmetric,
        rho=rho,
        name=name,
        certificate=certificate,
        meta=meta,
    )


def arithmetic_mean(metric: str = "absolute") -> MeanSpec:
    # |(x+z)/2 - (y+z)/2| = |x-y|/2 globally; under the log metric only on intervals
    rho = 0.5 if metric == "absolute" else None
    return make_scalar_mean(arithmetic, "arithmetic", metric, rho=rho)


def geometric_mean(metric: str = "log_absolute") -> MeanSpec:
    # the log metric makes sqrt(xy) the midpoint, hence 1/2-contractive
    rho = 0.5 if metric == "log_absolute" else None
    return make_scalar_mean(geometric, "geometric", metric, rho=rho)


def harmonic_mean(metric: str = "log_absolute") -> MeanSpec:
    return make_scalar_mean(harmonic, "harmonic", metric)


def weighted_affine_mean(s: float) -> MeanSpec:
    rho = max(s, 1 - s)
    return make_scalar_mean(
        weighted_affine(s),
        f"weighted:{s:g}",
        "absolute",
        symmetric=s == 0.5,
        rho=rho,
        certificate=Certificate(rho=rho),
    )


def quasi_arithmetic_mean(f, f_inv, label="quasi", metric="absolute") -> MeanSpec:
    return make_scalar_mean(quasi_arithmetic(f, f_inv), label, metric)


def power_mean(alpha: float, metric: str = "absolute") -> MeanSpec:
    f, f_inv = power_functions(alpha)
    return quasi_arithmetic_mean(f, f_inv, f"power:{alpha:g}", metric)


def logarithmic_mean(metric: str = "log_absolute") -> MeanSpec:
    return make_scalar_mean(logarithmic_closed_form, "logarithmic", metric)


ARITHMETIC_F = RepresentingFunction(lambda x: (1 + x) / 2, "arithmetic")
GEOMETRIC_F = RepresentingFunction(np.sqrt, "geometric")
HARMONIC_F = RepresentingFunction(lambda x: 2 * x / (1 + x), "harmonic")
LOGARITHMIC_F = RepresentingFunction(lambda x: logarithmic_closed_form(1.0, x), "logarithmic")
