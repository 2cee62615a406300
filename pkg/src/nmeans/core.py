"""Space-agnostic machinery for extending k-means to (k+1)-means.

A k-mean is wrapped in a :class:`MeanSpec` together with the metric space it
lives on.  The barycentric operator replaces each coordinate of a (k+1)-tuple
by the k-mean of the remaining coordinates; when its powers drive the tuple
to a constant one, the common value is the extended (k+1)-mean.

Elements are numpy arrays whose trailing ``space.element_ndim`` axes are the
element itself (``()`` for scalars, ``(d, d)`` for matrices).  Any leading
axes are batch axes and are carried through every operation, so a single
call evaluates the mean on many tuples at once.  The barycentric step relies
on this: the k+1 coordinate-deleted subtuples are stacked into one batch and
the k-mean is called once.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np

from .exceptions import ConvergenceError, DimensionError, ParameterError

VARIANTS = ("beta", "beta_star")
DEFAULT_MAX_ITER = 10_000


@lru_cache(maxsize=None)
def _pairs(m):
    return np.triu_indices(m, 1)


@lru_cache(maxsize=None)
def _deletion_index(m):
    """``idx[j, i]``: position of argument ``j`` once coordinate ``i`` is deleted."""
    i = np.arange(m)[None, :]
    j = np.arange(m - 1)[:, None]
    return j + (j >= i)


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A metric space whose elements are (batched) numpy arrays.

    Parameters
    ----------
    name : str
        Label used in reports.
    distance : callable
        ``distance(x, y)`` returning the distance between corresponding
        elements of two batches, as an array over the batch axes.
    element_ndim : int
        Number of trailing axes that make up one element.
    default_tol : float
        Convergence tolerance used when a caller passes none.
    equality_tol : float
        Two elements closer than this are treated as equal.
    noise : callable, optional
        ``noise(points)`` estimating the distance below which floating point
        round-off dominates; iterations never demand more than this.
    spread : callable, optional
        Fast per-batch-element diameter of a stacked tuple (reducing axis 0),
        for metrics where it has a closed form; otherwise all pairs are
        compared.
    max_spread : callable, optional
        Fast overall diameter of a stacked tuple, as a float.  Lets a metric
        apply a monotone transform (such as ``log``) once instead of per
        element.
    """

    name: str
    distance: Callable[[Any, Any], Any]
    element_ndim: int = 0
    default_tol: float = 1e-12
    equality_tol: float = 1e-12
    noise: Callable[[Sequence[Any]], float] | None = None
    spread: Callable[[Any], Any] | None = None
    max_spread: Callable[[Any], float] | None = None

    def stack(self, points):
        arrays = [np.asarray(p, dtype=float) for p in points]
        return np.stack(np.broadcast_arrays(*arrays))

    def unstack(self, batch):
        return list(batch)

    def take(self, batch, index):
        """Select entries of a stacked tuple along its first axis."""
        return batch[index]

    def dist(self, x, y) -> float:
        """Largest distance over the batch axes, as a float."""
        return float(np.max(self.distance(x, y)))

    def spread_each(self, batch):
        """Diameter of a stacked tuple, separately for every batch element."""
        if self.spread is not None:
            return self.spread(batch)
        i, j = _pairs(len(batch))
        return np.max(self.distance(batch[i], batch[j]), axis=0)

    def diameter(self, batch) -> float:
        """Largest pairwise distance within a stacked tuple."""
        if self.max_spread is not None:
            return float(self.max_spread(batch))
        return float(np.max(self.spread_each(batch)))

    def resolution(self, points) -> float:
        if self.noise is None:
            return 0.0
        return float(self.noise(points))


@dataclass(frozen=True, eq=False)
class ProductSpace(MetricSpace):
    """Cartesian product of metric spaces under the sup metric.

    Elements are tuples with one component per factor.
    """

    factors: tuple = ()

    def stack(self, points):
        return tuple(
            f.stack([p[i] for p in points]) for i, f in enumerate(self.factors)
        )

    def unstack(self, batch):
        parts = [f.unstack(b) for f, b in zip(self.factors, batch)]
        return [tuple(items) for items in zip(*parts)]

    def take(self, batch, index):
        return tuple(f.take(b, index) for f, b in zip(self.factors, batch))

    def spread_each(self, batch):
        return np.maximum.reduce(
            [np.asarray(f.spread_each(b)) for f, b in zip(self.factors, batch)]
        )


def product_space(left: MetricSpace, right: MetricSpace) -> ProductSpace:
    def distance(x, y):
        return np.maximum(left.distance(x[0], y[0]), right.distance(x[1], y[1]))

    return ProductSpace(
        name=f"{left.name}x{right.name}",
        distance=distance,
        element_ndim=-1,
        default_tol=max(left.default_tol, right.default_tol),
        equality_tol=max(left.equality_tol, right.equality_tol),
        factors=(left, right),
    )


@dataclass(frozen=True, eq=False)
class Certificate:
    """Where coordinatewise contractivity of a mean has been certified.

    ``interval_n`` is ``None`` for a global certificate; otherwise the
    certificate covers the order interval ``[(1/n), n]`` (scalars) or
    ``[(1/n)I, nI]`` (matrices).
    """

    rho: float
    interval_n: int | None = None
    source: str = "proven"


@dataclass(frozen=True, eq=False)
class MeanSpec:
    """A k-ary mean bound to the metric space it operates on.

    ``evaluate(points, tol)`` receives a sequence of ``arity`` elements and an
    optional tolerance (means defined by an iteration honour it, closed forms
    ignore it).  Instances are callable: ``mean(x, y, z)``.
    """

    arity: int
    evaluate: Callable[[Sequence[Any], float | None], Any]
    space: MetricSpace
    symmetric: bool = False
    rho: float | None = None
    name: str = "mean"
    tolerance: float | None = None
    max_iter: int = DEFAULT_MAX_ITER
    base: "MeanSpec | None" = None
    variant: str = "beta"
    certificate: Certificate | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 2:
            raise ParameterError(f"arity must be >= 2, got {self.arity}")
        if self.rho is not None and not 0 < self.rho < 1:
            raise ParameterError(f"declared rho must lie in (0, 1), got {self.rho}")
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown variant {self.variant!r}")

    def __call__(self, *points, tol=None):
        if len(points) != self.arity:
            raise DimensionError(
                f"{self.name} takes {self.arity} arguments, got {len(points)}"
            )
        return self.evaluate(points, tol)

    @property
    def tol(self) -> float:
        return self.space.default_tol if self.tolerance is None else self.tolerance

    def with_certificate(self, certificate: Certificate) -> "MeanSpec":
        return replace(self, certificate=certificate)


@dataclass
class ConvergenceReport:
    """Audit record of one power-convergence run.

    ``diameter_trace[n]`` is the diameter of the n-th iterate, so the trace
    has ``iterations + 1`` entries.  ``tolerance`` is the stopping threshold
    actually used (the requested one, raised to the round-off floor if
    necessary).
    """

    iterations: int
    diameter_trace: list
    limit: Any
    converged: bool
    tolerance: float
    terminal: list = field(default_factory=list, repr=False)
    variant: str = "beta"
    element_trace: list | None = field(default=None, repr=False)

    def bound_trace(self, k: int, rho: float) -> list:
        """The a priori bound ``k * rho**n * diameter_trace[0]`` per iteration."""
        d0 = self.diameter_trace[0]
        return [k * rho**n * d0 for n in range(len(self.diameter_trace))]


def diameter(space: MetricSpace, points: Sequence[Any]) -> float:
    """Largest pairwise distance among ``points`` (worst case over the batch)."""
    return space.diameter(space.stack(points))


def tuple_distance(space: MetricSpace, xs: Sequence[Any], ys: Sequence[Any]) -> float:
    """Sup metric on tuples: ``max_i d(x_i, y_i)``."""
    if len(xs) != len(ys):
        raise DimensionError("tuples of different length")
    return max(space.dist(x, y) for x, y in zip(xs, ys))


def _check_tuple(mean: MeanSpec, points: Sequence[Any]):
    if len(points) < 2:
        raise DimensionError("a point tuple needs at least two entries")
    if len(points) != mean.arity + 1:
        raise DimensionError(
            f"barycentric step of a {mean.arity}-mean needs {mean.arity + 1} "
            f"points, got {len(points)}"
        )


def _step(mean: MeanSpec, batch, tol=None, reverse=False):
    space = mean.space
    idx = _deletion_index(mean.arity + 1)
    result = mean.evaluate([space.take(batch, row) for row in idx], tol)
    return space.take(result, slice(None, None, -1)) if reverse else result


def barycentric_step(mean: MeanSpec, points: Sequence[Any], tol=None) -> list:
    """One application of the barycentric operator.

    Entry ``i`` of the result is ``mean`` applied to ``points`` with
    coordinate ``i`` deleted.
    """
    _check_tuple(mean, points)
    space = mean.space
    return space.unstack(_step(mean, space.stack(points), tol))


def barycentric_step_star(mean: MeanSpec, points: Sequence[Any], tol=None) -> list:
    """Barycentric operator with reversed deletion order.

    Entry ``i`` (1-based) deletes coordinate ``k + 2 - i``, which is the
    reversal of :func:`barycentric_step`.
    """
    _check_tuple(mean, points)
    space = mean.space
    return space.unstack(_step(mean, space.stack(points), tol, reverse=True))


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def power_converge(
    mean: MeanSpec,
    points: Sequence[Any],
    tol: float | None = None,
    max_iter: int | None = None,
    variant: str = "beta",
    inner_tol: float | None = None,
    record_elements: bool = False,
) -> ConvergenceReport:
    """Iterate the barycentric operator until the tuple collapses.

    Stops once the diameter drops to ``tol`` or after ``max_iter`` steps.
    The k-mean is evaluated with ``inner_tol`` (default ``tol / 10``) so that
    an iteratively defined k-mean does not eat the whole error budget.
    Non-convergence is reported through ``converged=False``, not raised.

    With batched elements the diameter is the worst over the batch; pass
    ``record_elements=True`` to also keep every batch element's own diameter
    per iteration in ``element_trace``.
    """
    _check_variant(variant)
    _check_tuple(mean, points)
    tol = mean.space.default_tol if tol is None else tol
    if tol <= 0:
        raise ParameterError("tolerance must be positive")
    max_iter = mean.max_iter if max_iter is None else max_iter
    inner_tol = tol / 10 if inner_tol is None else inner_tol

    space = mean.space
    stop = max(tol, space.resolution(points))
    reverse = variant == "beta_star"
    batch = space.stack(points)

    def measure(batch):
        if not record_elements:
            return space.diameter(batch)
        each = np.asarray(space.spread_each(batch), dtype=float)
        elements.append(each)
        return float(np.max(each))

    elements = []
    delta = measure(batch)
    trace = [delta]
    iterations = 0
    while delta > stop and iterations < max_iter:
        batch = _step(mean, batch, inner_tol, reverse)
        iterations += 1
        delta = measure(batch)
        trace.append(delta)
    entries = space.unstack(batch)
    return ConvergenceReport(
        iterations=iterations,
        diameter_trace=trace,
        limit=entries[0],
        converged=delta <= stop,
        tolerance=stop,
        terminal=entries,
        variant=variant,
        element_trace=elements if record_elements else None,
    )


def beta_extend(
    mean: MeanSpec,
    tol: float | None = None,
    max_iter: int | None = None,
    variant: str = "beta",
) -> MeanSpec:
    """The (k+1)-mean obtained as the power limit of the barycentric operator.

    The returned mean keeps a reference to ``mean`` (``.base``), inherits its
    symmetry flag, declared contraction constant and certificate.  Evaluating
    it raises :class:`ConvergenceError` (carrying the report) when the
    iteration does not settle.
    """
    _check_variant(variant)
    max_iter = mean.max_iter if max_iter is None else max_iter
    default_tol = mean.tol if tol is None else tol

    def evaluate(points, tol=None):
        report = power_converge(mean, points, tol or default_tol, max_iter, variant)
        if not report.converged:
            raise ConvergenceError(
                f"{mean.name}: barycentric iteration did not converge in "
                f"{report.iterations} steps (diameter {report.diameter_trace[-1]:.3e})",
                report=report,
                last=report.limit,
                residual=report.diameter_trace[-1],
            )
        return report.limit

    suffix = "" if variant == "beta" else "*"
    return MeanSpec(
        arity=mean.arity + 1,
        evaluate=evaluate,
        space=mean.space,
        symmetric=mean.symmetric,
        rho=mean.rho,
        name=f"{mean.name.split('[')[0]}[{mean.arity + 1}{suffix}]",
        tolerance=default_tol,
        max_iter=max_iter,
        base=mean,
        variant=variant,
        certificate=mean.certificate,
        meta=dict(mean.meta),
    )


def extension_report(
    extension: MeanSpec, *points, tol=None, record_elements=False
) -> ConvergenceReport:
    """Evaluate a β-extension and return the full :class:`ConvergenceReport`."""
    if extension.base is None:
        raise ParameterError(f"{extension.name} is not a barycentric extension")
    return power_converge(
        extension.base,
        points,
        extension.tol if tol is None else tol,
        extension.max_iter,
        extension.variant,
        record_elements=record_elements,
    )


def extend_tower(
    mean: MeanSpec,
    target_arity: int,
    tol: float | None = None,
    max_iter: int | None = None,
    variant: str = "beta",
) -> list:
    """Inductively extend ``mean`` up to ``target_arity``.

    Returns the means of arity ``mean.arity + 1`` through ``target_arity``;
    each entry is the extension of the one before it.
    """
    if target_arity <= mean.arity:
        raise ParameterError(
            f"target arity must exceed {mean.arity}, got {target_arity}"
        )
    tower = []
    current = mean
    for _ in range(mean.arity + 1, target_arity + 1):
        current = beta_extend(current, tol, max_iter, variant)
        tower.append(current)
    return tower


def n_mean(mean: MeanSpec, n: int, **kwargs) -> MeanSpec:
    """The ``n``-ary member of the tower over ``mean`` (``mean`` itself if n matches)."""
    if n == mean.arity:
        return mean
    return extend_tower(mean, n, **kwargs)[-1]


def beta_invariance_residual(
    extension: MeanSpec, base: MeanSpec, points: Sequence[Any], tol=None
) -> float:
    """``d(ext(x), ext(beta_base(x)))``; zero certifies β-invariance at ``x``."""
    if extension.arity != base.arity + 1:
        raise DimensionError("extension must have arity base.arity + 1")
    stepped = barycentric_step(base, points, tol)
    return extension.space.dist(extension(*points, tol=tol), extension(*stepped, tol=tol))


def stable_extension_residual(
    extension: MeanSpec, base: MeanSpec, anchor: Sequence[Any], tol=None
) -> float:
    """``d(ext(a_1..a_k, base(a)), base(a))``."""
    if extension.arity != base.arity + 1:
        raise DimensionError("extension must have arity base.arity + 1")
    if len(anchor) != base.arity:
        raise DimensionError(f"anchor must have {base.arity} entries")
    m = base(*anchor, tol=tol)
    return extension.space.dist(extension(*anchor, m, tol=tol), m)


def stable_reduce(
    mean: MeanSpec,
    anchor: Sequence[Any],
    tol: float | None = None,
    max_iter: int | None = None,
    start=None,
):
    """Fixed point of ``x -> mean(anchor, x)``.

    ``mean`` must carry a declared contraction constant; the map is then a
    contraction and the fixed point is unique.  The iteration stops when the
    step is small enough that the contraction bound places the iterate within
    ``tol`` of the fixed point.
    """
    if mean.rho is None:
        raise ParameterError(f"{mean.name} has no declared contraction constant")
    if len(anchor) != mean.arity - 1:
        raise DimensionError(f"anchor must have {mean.arity - 1} entries")
    tol = mean.tol if tol is None else tol
    max_iter = mean.max_iter if max_iter is None else max_iter
    space = mean.space
    # d(x_{n+1}, x*) <= rho/(1-rho) * d(x_{n+1}, x_n)
    step_tol = max(tol * (1 - mean.rho) / mean.rho, space.resolution(anchor))
    x = anchor[0] if start is None else start
    residual = np.inf
    for _ in range(max_iter):
        nxt = mean(*anchor, x, tol=tol / 10)
        residual = space.dist(nxt, x)
        x = nxt
        if residual <= step_tol:
            return x
    raise ConvergenceError(
        f"stable reduction of {mean.name} did not converge (step {residual:.3e})",
        last=x,
        residual=residual,
    )


def product_mean(left: MeanSpec, right: MeanSpec) -> MeanSpec:
    """Componentwise mean on the product space with the sup metric."""
    if left.arity != right.arity:
        raise DimensionError("product of means with different arities")
    space = product_space(left.space, right.space)

    def evaluate(points, tol=None):
        return (
            left.evaluate([p[0] for p in points], tol),
            right.evaluate([p[1] for p in points], tol),
        )

    rho = None
    if left.rho is not None and right.rho is not None:
        rho = max(left.rho, right.rho)
    return MeanSpec(
        arity=left.arity,
        evaluate=evaluate,
        space=space,
        symmetric=left.symmetric and right.symmetric,
        rho=rho,
        name=f"{left.name}x{right.name}",
    )


def homomorphism_residual(
    g: Callable[[Any], Any], mu: MeanSpec, nu: MeanSpec, points: Sequence[Any], tol=None
) -> float:
    """``d_Y(g(mu(x)), nu(g(x_1), ..., g(x_k)))``."""
    if mu.arity != nu.arity:
        raise DimensionError("homomorphism check needs equal arities")
    lhs = g(mu(*points, tol=tol))
    rhs = nu(*[g(p) for p in points], tol=tol)
    return nu.space.dist(lhs, rhs)
