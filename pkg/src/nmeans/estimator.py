"""scikit-learn style facade over the extension engine.

>>> est = NMean(mean="geometric").fit([1.0, 4.0, 16.0])
>>> round(float(est.mean_), 9)
4.0
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import registry
from .core import DEFAULT_MAX_ITER, VARIANTS, extension_report, n_mean
from .exceptions import DimensionError, ParameterError, ValidationError
from .scalar import REALS
from .spd import check_spd


def check_elements(X, space: str = "scalar", positive: bool = True) -> np.ndarray:
    """Validate a sequence of elements and return it as one float array.

    Scalars come as shape ``(n,)``; SPD matrices as ``(n, d, d)``.
    """
    if space not in registry.SPACES:
        raise ParameterError(f"unknown space {space!r}")
    X = check_array(X, ensure_2d=False, allow_nd=True, dtype=float)
    if space == "scalar":
        if X.ndim != 1:
            raise DimensionError(f"scalar inputs must be 1-d, got shape {X.shape}")
        if positive and not np.all(X > 0):
            raise ValidationError("scalar inputs must be positive")
        return X
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise DimensionError(f"matrix inputs must have shape (n, d, d), got {X.shape}")
    return check_spd(X)


def check_params(space, variant, tol, max_iter):
    if space not in registry.SPACES:
        raise ParameterError(f"unknown space {space!r}")
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    if tol is not None and not tol > 0:
        raise ParameterError("tol must be positive")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")


class NMean(TransformerMixin, BaseEstimator):
    """Barycentric n-mean of the rows of ``X``.

    Parameters
    ----------
    mean : str
        Name of the 2-mean, as understood by :func:`nmeans.registry.get_mean`.
    space : {"scalar", "spd"}
    variant : {"beta", "beta_star"}
    tol : float, optional
        Defaults to the space's tolerance (1e-12 scalar, 1e-10 SPD).
    max_iter : int

    Attributes
    ----------
    mean_ : float or ndarray
        The n-mean of the fitted elements.
    report_ : ConvergenceReport or None
        ``None`` when only two elements were given (no iteration needed).
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, mean="arithmetic", space="scalar", variant="beta", tol=None,
                 max_iter=DEFAULT_MAX_ITER):
        self.mean = mean
        self.space = space
        self.variant = variant
        self.tol = tol
        self.max_iter = max_iter

    def _base(self):
        return registry.get_mean(self.mean, self.space)

    def fit(self, X, y=None):
        check_params(self.space, self.variant, self.tol, self.max_iter)
        base = self._base()
        X = check_elements(X, self.space, positive=base.space is not REALS)
        n = X.shape[0]
        if n < 2:
            raise DimensionError(f"need at least 2 elements, got {n}")
        points = list(X)
        if n == base.arity:
            self.mean_ = base(*points, tol=self.tol)
            self.report_ = None
            self.n_iter_ = 0
            self.converged_ = True
        else:
            ext = n_mean(base, n, tol=self.tol, max_iter=self.max_iter, variant=self.variant)
            report = extension_report(ext, *points)
            self.mean_ = report.limit
            self.report_ = report
            self.n_iter_ = report.iterations
            self.converged_ = report.converged
        self.n_elements_ = n
        self.metric_ = base.space
        return self

    def transform(self, X):
        """Distance of each element of ``X`` to the fitted mean, shape ``(n, 1)``."""
        check_is_fitted(self, "mean_")
        X = check_elements(X, self.space, positive=self.metric_ is not REALS)
        d = self.metric_.distance(X, self.mean_)
        return np.asarray(d, dtype=float).reshape(-1, 1)
