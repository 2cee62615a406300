import numpy as np
import pytest

from nmeans import operator as op
from nmeans import spd
from nmeans.exceptions import ConvergenceError, ParameterError
from nmeans.iterated import (
    agm,
    agm_mean,
    compose,
    hgm,
    iterate_composition,
    logarithmic_mean,
    logarithmic_op,
)
from nmeans.scalar import logarithmic_closed_form
from oracles import AGM_24_6, gauss_agm, gauss_hgm

d = spd.thompson_distance


def test_agm_diag_matches_oracle():
    out = agm(np.diag([24.0, 1.0]), np.diag([6.0, 1.0]))
    np.testing.assert_allclose(out, np.diag([AGM_24_6, 1.0]), atol=1e-9)


def test_hgm_commuting():
    out = hgm(np.diag([2.0, 3.0]), np.diag([8.0, 3.0]))
    np.testing.assert_allclose(out, np.diag([gauss_hgm(2.0, 8.0), 3.0]), rtol=1e-10)


def test_logarithmic_on_one_by_one(rng):
    a, b = np.exp(rng.uniform(-2, 2, size=(2, 20)))
    out = logarithmic_op(a[:, None, None], b[:, None, None])[:, 0, 0]
    np.testing.assert_allclose(out, logarithmic_closed_form(a, b), rtol=1e-10)


def test_logarithmic_matches_kubo_ando(rng):
    a, b = spd.random_spd(rng, 4, 4.0, size=(2, 10))
    assert np.max(d(logarithmic_op(a, b), op.logarithmic_kubo_ando(a, b))) < 1e-8


def test_skew_order_matters():
    # updating the geometric sequence first lands on a different mean
    a, b = np.array([[4.0]]), np.array([[1.0]])
    G, A = op.geometric_mean(), op.arithmetic_mean()
    wrong = iterate_composition(A, G, a, b, kind="skewed", tol=1e-13).limit
    right = logarithmic_op(a, b, tol=1e-13)
    assert right[0, 0] == pytest.approx(logarithmic_closed_form(4.0, 1.0), rel=1e-11)
    assert abs(wrong[0, 0] - right[0, 0]) > 1e-3


def test_iterated_vs_skewed_differ():
    a, b = np.array([[24.0]]), np.array([[6.0]])
    assert agm(a, b, tol=1e-13)[0, 0] == pytest.approx(gauss_agm(24.0, 6.0), rel=1e-12)
    assert logarithmic_op(a, b)[0, 0] < agm(a, b)[0, 0]


def test_composition_record():
    G, A = op.geometric_mean(), op.arithmetic_mean()
    res = iterate_composition(G, A, np.diag([1.0, 9.0]), np.eye(2), tol=1e-12)
    assert res.converged
    assert res.iterations == len(res.gaps)
    assert res.gaps[-1] <= 1e-12
    assert all(g2 <= g1 for g1, g2 in zip(res.gaps, res.gaps[1:]))


def test_composition_nonconvergence_raises():
    mean = compose(op.geometric_mean(), op.arithmetic_mean(), max_iter=2)
    with pytest.raises(ConvergenceError):
        mean(np.diag([1.0, 100.0]), np.eye(2))


def test_compose_validation():
    G, A = op.geometric_mean(), op.arithmetic_mean()
    with pytest.raises(ParameterError):
        compose(G, A, "twisted")
    with pytest.raises(ParameterError):
        iterate_composition(G, A, np.eye(2), np.eye(2), kind="twisted")


def test_compose_metadata():
    m = logarithmic_mean()
    assert m.name == "logarithmic"
    assert m.meta["kind"] == "skewed"
    assert m.symmetric
    assert agm_mean().rho is None


def test_log_mean_is_symmetric(rng):
    a, b = spd.random_spd(rng, 3, size=(2, 5))
    assert np.max(d(logarithmic_op(a, b), logarithmic_op(b, a))) < 1e-9
