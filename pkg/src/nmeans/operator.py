"""Operator means of positive-definite matrices under the Thompson metric."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import Certificate, MeanSpec
from .exceptions import ParameterError, ValidationError
from .scalar import (
    ARITHMETIC_F,
    GEOMETRIC_F,
    HARMONIC_F,
    LOGARITHMIC_F,
    RepresentingFunction,
)
from .spd import (
    SPD,
    OrderInterval,
    _eigh,
    _reassemble,
    _same_dim,
    _square,
    random_spd,
    symmetrize,
)

# empirical contraction estimates are inflated by this factor before use
CERTIFICATE_MARGIN = 1.05


def _pair(a, b):
    a, b = _square(a), _square(b)
    _same_dim(a, b)
    return a, b


def op_arithmetic(a, b):
    a, b = _pair(a, b)
    return symmetrize((a + b) / 2)


def op_harmonic(a, b):
    a, b = _pair(a, b)
    return symmetrize(2 * np.linalg.inv(np.linalg.inv(a) + np.linalg.inv(b)))


def _congruence_mean(a, b, f):
    """``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}``.

    Any factor ``A = S S^T`` gives the same result as ``S f(S^{-1} B S^{-T}) S^T``
    (the two differ by an orthogonal change of basis inside ``f``), so the
    Cholesky factor stands in for the square root.
    """
    try:
        s = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise ValidationError("first argument is not positive definite") from None
    si = np.linalg.inv(s)
    wm, vm = _eigh(si @ b @ np.swapaxes(si, -1, -2))
    fw = np.asarray(f(wm), dtype=float)
    if not np.all(np.isfinite(fw)) or np.any(fw <= 0):
        raise ValidationError("representing function failed on the relative spectrum")
    return symmetrize(s @ _reassemble(fw, vm) @ np.swapaxes(s, -1, -2))


def op_geometric(a, b):
    """``A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``."""
    a, b = _pair(a, b)
    return _congruence_mean(a, b, np.sqrt)


def kubo_ando(f: RepresentingFunction | callable, a, b):
    a, b = _pair(a, b)
    return _congruence_mean(a, b, f)


def _binary(fn):
    def evaluate(points, tol=None):
        return fn(points[0], points[1])

    return evaluate


def make_operator_mean(fn, name, symmetric=True, rho=None, certificate=None, **meta):
    return MeanSpec(
        arity=2,
        evaluate=_binary(fn),
        space=SPD,
        symmetric=symmetric,
        rho=rho,
        name=name,
        certificate=certificate,
        meta=meta,
    )


def arithmetic_mean() -> MeanSpec:
    return make_operator_mean(op_arithmetic, "arithmetic", representing=ARITHMETIC_F)


def harmonic_mean() -> MeanSpec:
    return make_operator_mean(op_harmonic, "harmonic", representing=HARMONIC_F)


def geometric_mean() -> MeanSpec:
    # convex mean for the Thompson metric: 1/2-contractive everywhere
    return make_operator_mean(
        op_geometric,
        "geometric",
        rho=0.5,
        certificate=Certificate(rho=0.5),
        representing=GEOMETRIC_F,
    )


def kubo_ando_mean(f: RepresentingFunction, check=True) -> MeanSpec:
    """Operator mean with representing function ``f``."""
    if not isinstance(f, RepresentingFunction):
        f = RepresentingFunction(f)
    if check:
        f.check()
    return make_operator_mean(
        lambda a, b: kubo_ando(f, a, b),
        f"kubo_ando:{f.label}",
        symmetric=False,
        representing=f,
    )


def logarithmic_kubo_ando(a, b):
    """Operator logarithmic mean through its representing function ``(x-1)/log x``."""
    return kubo_ando(LOGARITHMIC_F, a, b)


def left_trivial(a, b):
    return np.array(a, dtype=float, copy=True)


def right_trivial(a, b):
    return np.array(b, dtype=float, copy=True)


@dataclass
class ContractionEstimate:
    """Empirical coordinatewise contraction constant and the triple attaining it."""

    rho: float
    witness: tuple
    interval: OrderInterval
    samples: int

    def certificate(self, margin=CERTIFICATE_MARGIN) -> Certificate:
        rho = self.rho * margin
        if not rho < 1:
            raise ParameterError(f"estimated rho {self.rho:.4f} gives no contraction")
        return Certificate(rho=rho, interval_n=self.interval.n, source="empirical")


def certify_contraction(
    mean: MeanSpec,
    interval: OrderInterval,
    samples: int = 200,
    seed: int = 0,
    dim: int = 3,
    coordinate: int = 1,
) -> ContractionEstimate:
    """Sup of ``d(mean(A, B), mean(A, C)) / d(B, C)`` over sampled triples.

    Triples are drawn from ``interval``; ``coordinate=0`` varies the first
    argument instead of the second.  The estimate is reported as found, even
    when it is not below 1.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    a = random_spd(rng, dim, interval.n, size=samples)
    b = random_spd(rng, dim, interval.n, size=samples)
    # half the C's are close to B so the local (derivative) regime is probed too
    c = random_spd(rng, dim, interval.n, size=samples)
    near = symmetrize(b + 0.05 * (c - b))
    c = np.where((np.arange(samples) % 2 == 0)[:, None, None], c, near)
    if coordinate == 1:
        left, right = mean(a, b), mean(a, c)
    else:
        left, right = mean(b, a), mean(c, a)
    num = SPD.distance(left, right)
    den = SPD.distance(b, c)
    ratio = np.where(den > 1e-12, num / np.maximum(den, 1e-300), 0.0)
    i = int(np.argmax(ratio))
    return ContractionEstimate(
        rho=float(ratio[i]),
        witness=(a[i], b[i], c[i]),
        interval=interval,
        samples=samples,
    )


def certified(mean: MeanSpec, interval: OrderInterval, samples=200, seed=0, dim=3) -> MeanSpec:
    """Copy of ``mean`` carrying an empirical certificate on ``interval``.

    The declared ``rho`` is set from the certificate so diameter bounds can be
    asserted; it is only meaningful for tuples inside ``interval``.
    """
    cert = certify_contraction(mean, interval, samples, seed, dim).certificate()
    return replace(mean, certificate=cert, rho=cert.rho)
