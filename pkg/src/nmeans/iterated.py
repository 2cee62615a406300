"""Iterated and skewed iterated compositions of two 2-means.

Starting from ``x1 = lam(a, b)`` and ``y1 = nu(a, b)``:

* iterated:  ``x' = lam(x, y)``,  ``y' = nu(x, y)``
* skewed:    ``y' = nu(x, y)``,   ``x' = lam(x, y')``

Both pairs of sequences meet when ``lam`` is a convex (midpoint) mean and
``nu`` is nonexpansive.  Geometric with arithmetic gives the Gauss AGM
(iterated) and the logarithmic mean (skewed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import operator as op
from .core import DEFAULT_MAX_ITER, MeanSpec
from .exceptions import ConvergenceError, ParameterError

KINDS = ("iterated", "skewed")


@dataclass
class CompositionResult:
    limit: Any
    partner: Any
    iterations: int
    gaps: list = field(default_factory=list)
    converged: bool = True


def iterate_composition(lam, nu, a, b, kind="iterated", tol=1e-12, max_iter=DEFAULT_MAX_ITER):
    """Run the coupled iteration and return the full record.

    ``gaps[n]`` is the distance between the two sequences after step ``n+1``;
    iteration stops once it is at most ``tol``.  ``limit`` is the ``lam``
    sequence's last value.
    """
    if kind not in KINDS:
        raise ParameterError(f"unknown composition kind {kind!r}; expected {KINDS}")
    space = lam.space
    stop = max(tol, space.resolution([a, b]))
    x, y = lam(a, b), nu(a, b)
    gap = space.dist(x, y)
    gaps = [gap]
    iterations = 1
    while gap > stop and iterations < max_iter:
        if kind == "iterated":
            x, y = lam(x, y), nu(x, y)
        else:
            y = nu(x, y)
            x = lam(x, y)
        iterations += 1
        gap = space.dist(x, y)
        gaps.append(gap)
    return CompositionResult(x, y, iterations, gaps, gap <= stop)


def compose(
    lam: MeanSpec,
    nu: MeanSpec,
    kind: str = "iterated",
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    name: str | None = None,
) -> MeanSpec:
    """The 2-mean ``lam * nu`` (or its skewed variant) as a :class:`MeanSpec`.

    ``lam`` should be convex and ``nu`` nonexpansive.  The declared
    contraction constant is ``max(1/2, rho(nu))`` when ``nu`` declares one.
    """
    if lam.arity != 2 or nu.arity != 2:
        raise ParameterError("compositions are defined for 2-means")
    if kind not in KINDS:
        raise ParameterError(f"unknown composition kind {kind!r}; expected {KINDS}")
    default_tol = lam.tol if tol is None else tol

    def evaluate(points, tol=None):
        result = iterate_composition(
            lam, nu, points[0], points[1], kind, tol or default_tol, max_iter
        )
        if not result.converged:
            raise ConvergenceError(
                f"{kind} composition did not close the gap ({result.gaps[-1]:.3e})",
                last=(result.limit, result.partner),
                residual=result.gaps[-1],
            )
        return result.limit

    rho = None if nu.rho is None else max(0.5, nu.rho)
    sep = "*s" if kind == "skewed" else "*"
    return MeanSpec(
        arity=2,
        evaluate=evaluate,
        space=lam.space,
        symmetric=lam.symmetric and nu.symmetric,
        rho=rho,
        name=name or f"{lam.name}{sep}{nu.name}",
        tolerance=default_tol,
        max_iter=max_iter,
        meta={"kind": kind, "parts": (lam, nu)},
    )


_G = op.geometric_mean()
_A = op.arithmetic_mean()
_H = op.harmonic_mean()


def agm_mean(tol=None) -> MeanSpec:
    return compose(_G, _A, "iterated", tol, name="agm")


def hgm_mean(tol=None) -> MeanSpec:
    return compose(_G, _H, "iterated", tol, name="hgm")


def logarithmic_mean(tol=None) -> MeanSpec:
    # skewed: arithmetic updates first, then geometric sees the new value
    return compose(_G, _A, "skewed", tol, name="logarithmic")


_AGM = agm_mean()
_HGM = hgm_mean()
_LOG = logarithmic_mean()


def agm(a, b, tol=None):
    """Operator arithmetic-geometric (Gauss) mean."""
    return _AGM(a, b, tol=tol)


def hgm(a, b, tol=None):
    """Operator harmonic-geometric mean."""
    return _HGM(a, b, tol=tol)


def logarithmic_op(a, b, tol=None):
    """Operator logarithmic mean as the skewed composition of ``#`` and ``(A+B)/2``."""
    return _LOG(a, b, tol=tol)
