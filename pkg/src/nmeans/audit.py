"""Sampled property audits for means and their extensions.

Each check draws a reproducible batch of samples, evaluates a property on
the whole batch at once and reports the worst-case margin (nonnegative means
the property held everywhere, up to its slack) together with the sample that
came closest to violating it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import operator as op
from . import registry, scalar, spd
from .core import MeanSpec, n_mean
from .exceptions import ParameterError
from .iterated import agm_mean, logarithmic_mean

METRIC_SLACK = 1e-9
ORDER_SLACK = 1e-8


@dataclass
class AuditResult:
    property: str
    passed: bool
    margin: float
    witness: Any = None

    def as_dict(self) -> dict:
        return {
            "property": self.property,
            "pass": bool(self.passed),
            "margin": float(self.margin),
            "witness": _jsonable(self.witness),
        }


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _result(name, margins, slack, samples):
    """``margins`` is per sample; the property holds where ``margin >= -slack``."""
    margins = np.atleast_1d(np.asarray(margins, dtype=float))
    i = int(np.argmin(margins))
    worst = float(margins[i])
    witness = {"sample": i, "points": [np.asarray(s)[i] for s in samples]}
    return AuditResult(name, worst >= -slack, worst, witness)


def _spd_margin(lower, upper):
    """Per-sample smallest eigenvalue of ``upper - lower``."""
    return np.linalg.eigvalsh(spd.symmetrize(upper - lower))[..., 0]


# --- Thompson metric ------------------------------------------------------


def thompson_checks(rng, samples, dim, interval_n=4.0) -> list:
    d = spd.thompson_distance
    draw = lambda: spd.random_spd(rng, dim, interval_n, size=samples)  # noqa: E731
    a, b, c, e = draw(), draw(), draw(), draw()
    out = []
    out.append(_result("thompson symmetry", -np.abs(d(a, b) - d(b, a)), METRIC_SLACK, (a, b)))
    out.append(
        _result("thompson triangle", d(a, b) + d(b, c) - d(a, c), METRIC_SLACK, (a, b, c))
    )
    out.append(_result("thompson identity", -d(a, a), METRIC_SLACK, (a,)))
    out.append(
        _result("thompson (i) translation", d(b, c) - d(a + b, a + c), METRIC_SLACK, (a, b, c))
    )
    a2 = a + spd.random_psd(rng, dim, size=samples)
    out.append(
        _result(
            "thompson (ii) order",
            d(a + b, a + c) - d(a2 + b, a2 + c),
            METRIC_SLACK,
            (a, a2, b, c),
        )
    )
    r = np.exp(rng.uniform(-3, 3, samples))[:, None, None]
    out.append(
        _result("thompson (iii) scaling", -np.abs(d(r * a, r * b) - d(a, b)), METRIC_SLACK, (a, b))
    )
    out.append(
        _result(
            "thompson (iv) sums",
            np.maximum(d(a, c), d(b, e)) - d(a + b, c + e),
            METRIC_SLACK,
            (a, b, c, e),
        )
    )
    ia, ib = np.linalg.inv(a), np.linalg.inv(b)
    out.append(
        _result("thompson (v) inversion", -np.abs(d(ia, ib) - d(a, b)), METRIC_SLACK, (a, b))
    )
    return out


def geometric_checks(rng, samples, dim, interval_n=4.0) -> list:
    d = spd.thompson_distance
    a, b, c = (spd.random_spd(rng, dim, interval_n, size=samples) for _ in range(3))
    ac, bc, ab = op.op_geometric(a, c), op.op_geometric(b, c), op.op_geometric(a, b)
    return [
        _result("geometric convexity", d(a, b) / 2 - d(ac, bc), METRIC_SLACK, (a, b, c)),
        _result(
            "geometric midpoint",
            -np.maximum(np.abs(d(a, ab) - d(a, b) / 2), np.abs(d(ab, b) - d(a, b) / 2)),
            METRIC_SLACK,
            (a, b),
        ),
    ]


# --- generic mean properties ----------------------------------------------


def _draw(space, rng, shape, dim, interval_n):
    if space == "spd":
        return spd.random_spd(rng, dim, interval_n, size=shape)
    return np.exp(rng.uniform(-np.log(interval_n), np.log(interval_n), shape))


def _bump(space, rng, x, dim):
    """A sample that dominates ``x`` in the (Löwner) order."""
    if space == "spd":
        return x + spd.random_psd(rng, dim, 0.5, size=x.shape[:-2])
    return x * np.exp(rng.uniform(0, 0.5, x.shape))


def mean_checks(mean: MeanSpec, space, rng, samples, dim, interval_n=4.0) -> list:
    n = mean.arity
    xs = _draw(space, rng, (n, samples), dim, interval_n)
    dist = mean.space.distance
    out = []
    same = mean(*([xs[0]] * n))
    out.append(_result(f"{mean.name} idempotent", -dist(same, xs[0]), METRIC_SLACK, (xs[0],)))
    value = mean(*xs)
    if mean.symmetric:
        perm = rng.permutation(n)
        out.append(
            _result(
                f"{mean.name} symmetric",
                -dist(value, mean(*xs[perm])),
                METRIC_SLACK,
                tuple(xs),
            )
        )
    ys = _bump(space, rng, xs, dim)
    upper = mean(*ys)
    if space == "spd":
        mono = _spd_margin(value, upper)
    else:
        mono = upper - value
    out.append(_result(f"{mean.name} monotone", mono, ORDER_SLACK, tuple(xs) + tuple(ys)))
    # nonexpansive: d(mean(x), mean(z)) <= max_i d(x_i, z_i)
    zs = _draw(space, rng, (n, samples), dim, interval_n)
    zs = np.where(rng.random((n, samples) + (1,) * (zs.ndim - 2)) < 0.5, xs, zs)
    lhs = dist(value, mean(*zs))
    rhs = np.max(np.stack([dist(x, z) for x, z in zip(xs, zs)]), axis=0)
    out.append(
        _result(f"{mean.name} nonexpansive", rhs - lhs, METRIC_SLACK, tuple(xs) + tuple(zs))
    )
    return out


def order_transport_checks(space, n, rng, samples, dim, interval_n=4.0, names=None) -> list:
    """``lower_n <= upper_n`` for pairs of means with ``lower <= upper``."""
    pairs = names or [("geometric", "arithmetic")]
    xs = _draw(space, rng, (n, samples), dim, interval_n)
    out = []
    for low_name, high_name in pairs:
        low = n_mean(_named(low_name, space), n)
        high = n_mean(_named(high_name, space), n)
        lo, hi = low(*xs), high(*xs)
        margin = _spd_margin(lo, hi) if space == "spd" else hi - lo
        out.append(_result(f"{low_name}_{n} <= {high_name}_{n}", margin, ORDER_SLACK, tuple(xs)))
    return out


def _named(name, space):
    if space == "spd" and name == "logarithmic":
        return logarithmic_mean()
    if space == "spd" and name == "agm":
        return agm_mean()
    return registry.get_mean(name, space)


def contraction_check(mean: MeanSpec, interval_n, samples, seed, dim) -> AuditResult:
    est = op.certify_contraction(
        mean, spd.OrderInterval(interval_n), samples=samples, seed=seed, dim=dim
    )
    return AuditResult(
        f"{mean.name} coordinatewise contraction on [I/{interval_n:g}, {interval_n:g}I]",
        est.rho < 1,
        1 - est.rho,
        {"rho_estimate": est.rho, "points": list(est.witness)},
    )


def scalar_contraction_check(mean: MeanSpec, interval_n, samples, seed) -> AuditResult:
    rng = np.random.default_rng(seed)
    a, b, c = np.exp(rng.uniform(-np.log(interval_n), np.log(interval_n), (3, samples)))
    # interval certificates are stated in the log metric, whatever the mean's own metric
    d = scalar.POSITIVE_REALS.distance
    den = d(b, c)
    ratio = np.where(den > 1e-12, d(mean(a, b), mean(a, c)) / np.maximum(den, 1e-300), 0.0)
    i = int(np.argmax(ratio))
    return AuditResult(
        f"{mean.name} coordinatewise contraction on [1/{interval_n:g}, {interval_n:g}]",
        ratio[i] < 1,
        1 - float(ratio[i]),
        {"rho_estimate": float(ratio[i]), "points": [a[i], b[i], c[i]]},
    )


def run_audit(
    mean_name: str,
    space: str,
    arity: int = 3,
    samples: int = 20,
    seed: int = 0,
    dim: int = 3,
    interval_n: float | None = None,
    tol: float | None = None,
    max_iter: int | None = None,
    variant: str = "beta",
) -> list:
    """Run every audit that applies to ``mean_name`` on ``space``; return results."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    if arity < 2:
        raise ParameterError("arity must be >= 2")
    interval_n = 4.0 if interval_n is None else float(interval_n)
    rng = np.random.default_rng(seed)
    base = registry.get_mean(mean_name, space)
    kwargs = {"tol": tol, "max_iter": max_iter, "variant": variant}
    mean = n_mean(base, arity, **kwargs)
    results = []
    if space == "spd":
        results += thompson_checks(rng, samples, dim, interval_n)
        results += geometric_checks(rng, samples, dim, interval_n)
        results.append(contraction_check(base, interval_n, max(samples, 50), seed, dim))
    else:
        results.append(scalar_contraction_check(base, interval_n, max(samples, 50), seed))
    results += mean_checks(mean, space, rng, samples, dim, interval_n)
    n = max(arity, 3)
    pairs = [("geometric", "arithmetic")]
    if mean_name in ("logarithmic", "agm"):
        pairs.append(("logarithmic", "agm"))
    results += order_transport_checks(space, n, rng, samples, dim, interval_n, pairs)
    return results
