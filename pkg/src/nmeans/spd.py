"""Dense symmetric positive-definite matrix kernel.

All routines accept stacks of matrices (shape ``(..., d, d)``) and broadcast
over the leading axes.  Returned symmetric matrices are re-symmetrized so
round-off does not accumulate over long iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MetricSpace
from .exceptions import DimensionError, ParameterError, ValidationError

MAX_DIM = 64
SYMMETRY_TOL = 1e-10
DEFINITENESS_FLOOR = 1e-12
_EPS = np.finfo(float).eps


def symmetrize(a):
    return (a + np.swapaxes(a, -1, -2)) / 2


def _square(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if a.shape[-1] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[-1]} exceeds the limit of {MAX_DIM}")
    return a


def _same_dim(a, b):
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def check_symmetric(a, tol=SYMMETRY_TOL):
    a = _square(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - np.swapaxes(a, -1, -2))))
    if asym > tol * scale:
        raise DimensionError(f"matrix is not symmetric (asymmetry {asym:.3e})")
    return a


def check_spd(a, sym_tol=SYMMETRY_TOL, floor=DEFINITENESS_FLOOR):
    """Validate a (stack of) symmetric positive-definite matrix; return it symmetrized.

    The definiteness test is relative: the smallest eigenvalue must exceed
    ``floor`` times the largest.
    """
    a = symmetrize(check_symmetric(a, sym_tol))
    w = np.linalg.eigvalsh(a)
    lo, hi = w[..., 0], w[..., -1]
    bad = ~(lo > floor * np.abs(hi))
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        value = float(np.atleast_1d(lo)[tuple(idx)])
        raise ValidationError(f"matrix is not positive definite (eigenvalue {value:.6g})")
    return a


def jacobi_eigh(a, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of one symmetric matrix.

    Sweeps until the off-diagonal Frobenius norm falls below ``tol`` times
    the initial Frobenius norm.  Returns eigenvalues in descending order and
    the matching orthonormal eigenvectors as columns.
    """
    a = symmetrize(check_symmetric(a)).copy()
    if a.ndim != 2:
        raise DimensionError("jacobi_eigh works on a single matrix")
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        # summed directly; ||A||^2 - ||diag||^2 cancels catastrophically near convergence
        off = np.sqrt(2 * np.sum(np.triu(a, 1) ** 2))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                with np.errstate(over="ignore"):
                    theta = (a[q, q] - a[p, p]) / (2 * apq)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta**2 would overflow; t ~ 1/(2 theta) to working precision
                    t = 1 / (2 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def sym_eigen(a, method="lapack"):
    """Eigendecomposition ``A = V diag(w) V^T`` with ``w`` descending.

    ``method="lapack"`` uses :func:`numpy.linalg.eigh` and accepts stacks;
    ``method="jacobi"`` uses :func:`jacobi_eigh` on a single matrix.
    """
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ParameterError(f"unknown eigensolver {method!r}; expected 'lapack' or 'jacobi'")
    a = symmetrize(check_symmetric(a))
    w, v = np.linalg.eigh(a)
    return w[..., ::-1], v[..., ::-1]


def _eigh(a):
    return np.linalg.eigh(symmetrize(a))


def _reassemble(w, v):
    return symmetrize((v * w[..., None, :]) @ np.swapaxes(v, -1, -2))


def matrix_function(a, f):
    """``V diag(f(w)) V^T`` for symmetric ``A = V diag(w) V^T``.

    ``f`` must be vectorized over numpy arrays.
    """
    w, v = _eigh(_square(a))
    with np.errstate(invalid="ignore", divide="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise ValidationError("matrix function undefined on the spectrum")
    return _reassemble(fw, v)


def sqrtm(a):
    return matrix_function(a, np.sqrt)


def invsqrtm(a):
    return matrix_function(a, lambda w: 1 / np.sqrt(w))


def inv(a):
    return symmetrize(np.linalg.inv(_square(a)))


def logm(a):
    return matrix_function(a, np.log)


def expm(a):
    return matrix_function(a, np.exp)


def loewner_leq(a, b, slack=0.0) -> bool:
    """``A <= B`` in Löwner order: smallest eigenvalue of ``B - A`` is >= -slack."""
    a, b = _square(a), _square(b)
    _same_dim(a, b)
    return bool(np.all(np.linalg.eigvalsh(symmetrize(b - a))[..., 0] >= -slack))


def loewner_margin(a, b) -> float:
    """Smallest eigenvalue of ``B - A`` (worst over a stack); >= 0 iff ``A <= B``."""
    return float(np.min(np.linalg.eigvalsh(symmetrize(np.asarray(b) - np.asarray(a)))[..., 0]))


def inv_cholesky(a):
    """``L^{-1}`` for the Cholesky factor ``A = L L^T`` (stacks allowed)."""
    try:
        return np.linalg.inv(np.linalg.cholesky(a))
    except np.linalg.LinAlgError:
        raise ValidationError("matrix is not positive definite") from None


def _relative_eigvals(a, b):
    """Eigenvalues of ``B^{-1/2} A B^{-1/2}``, ascending.

    Computed from the congruent matrix ``L^{-1} A L^{-T}`` with ``B = L L^T``,
    which has the same spectrum and stays symmetric, at a fraction of the
    cost of a square root.
    """
    a, b = _square(a), _square(b)
    _same_dim(a, b)
    li = inv_cholesky(b)
    return np.linalg.eigvalsh(symmetrize(li @ a @ np.swapaxes(li, -1, -2)))


def _log_extremes(w):
    return np.maximum(np.log(w[..., -1]), -np.log(w[..., 0]))


def m_ratio(a, b):
    """``M(A/B) = inf{t > 0 : A <= t B}``, the top eigenvalue of ``B^{-1/2} A B^{-1/2}``."""
    return _relative_eigvals(a, b)[..., -1]


def thompson_distance(a, b):
    """``max(log M(A/B), log M(B/A))``; an array over any stack axes."""
    return _log_extremes(_relative_eigvals(a, b))


def order_unit_norm(a):
    """``inf{t >= 0 : -tI <= A <= tI}``, the largest absolute eigenvalue."""
    a = check_symmetric(a)
    w = np.linalg.eigvalsh(symmetrize(a))
    return np.max(np.abs(w), axis=-1)


@dataclass(frozen=True)
class OrderInterval:
    """The order interval ``[(1/n) I, n I]``."""

    n: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("order interval parameter must be >= 1")

    def contains(self, a, slack=1e-10) -> bool:
        w = np.linalg.eigvalsh(symmetrize(_square(a)))
        return bool(np.all(w[..., 0] >= 1 / self.n - slack) and np.all(w[..., -1] <= self.n + slack))

    @classmethod
    def containing(cls, points) -> "OrderInterval":
        """Smallest integer ``n`` whose interval holds every matrix in ``points``."""
        lo, hi = np.inf, 0.0
        for p in points:
            w = np.linalg.eigvalsh(symmetrize(np.asarray(p, dtype=float)))
            lo = min(lo, float(np.min(w[..., 0])))
            hi = max(hi, float(np.max(w[..., -1])))
        return cls(int(np.ceil(max(hi, 1 / lo, 1.0) - 1e-12)))


def random_spd(rng, dim, interval_n=4.0, size=()):
    """``Q^T D Q`` with Haar-ish orthogonal ``Q`` and log-uniform ``D`` in ``[1/n, n]``."""
    size = (size,) if np.isscalar(size) else tuple(size)
    g = rng.standard_normal(size + (dim, dim))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[..., None, :]
    logn = np.log(interval_n)
    d = np.exp(rng.uniform(-logn, logn, size + (dim,)))
    return symmetrize(np.swapaxes(q, -1, -2) @ (d[..., :, None] * q))


def random_psd(rng, dim, scale=1.0, size=(), rank=None):
    size = (size,) if np.isscalar(size) else tuple(size)
    rank = dim if rank is None else rank
    g = rng.standard_normal(size + (dim, rank)) * scale / np.sqrt(rank)
    return symmetrize(g @ np.swapaxes(g, -1, -2))


def _thompson_spread(batch):
    """Thompson diameter of stacked tuples, factoring each entry only once."""
    li = inv_cholesky(batch)
    lit = np.swapaxes(li, -1, -2)
    m = len(batch)
    i, j = np.triu_indices(m, 1)
    w = np.linalg.eigvalsh(symmetrize(li[j] @ batch[i] @ lit[j]))
    return np.max(_log_extremes(w), axis=0)


def _thompson_noise(points):
    dim = np.shape(points[0])[-1]
    return 64 * _EPS * dim


SPD = MetricSpace(
    name="thompson",
    distance=thompson_distance,
    element_ndim=2,
    default_tol=1e-10,
    equality_tol=1e-10,
    noise=_thompson_noise,
    spread=_thompson_spread,
)
