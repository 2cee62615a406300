"""Sanity checks on the stdlib oracles themselves."""

import math

import pytest

from oracles import AGM_24_6, WEIGHTED_BETA, WEIGHTED_BETA_STAR, gauss_agm, gauss_hgm, log_mean


def test_gauss_agm_fixes_13_digits():
    assert gauss_agm(24.0, 6.0) == pytest.approx(AGM_24_6, rel=1e-13)


def test_gauss_agm_between_geometric_and_arithmetic():
    value = gauss_agm(24.0, 6.0)
    assert math.sqrt(24 * 6) < value < (24 + 6) / 2


def test_gauss_agm_elliptic_identity():
    # AGM(1, sqrt 2) is the reciprocal of Gauss's constant 0.8346268416740731...
    assert 1 / gauss_agm(1.0, math.sqrt(2.0)) == pytest.approx(0.8346268416740731, rel=1e-14)


def test_hgm_reciprocal_duality():
    assert gauss_hgm(2.0, 8.0) == pytest.approx(1 / gauss_agm(0.5, 0.125), rel=1e-15)


def test_log_mean_values():
    assert log_mean(1.0, math.e) == pytest.approx(math.e - 1, rel=1e-15)
    assert log_mean(3.0, 3.0) == 3.0


@pytest.mark.parametrize("weights", [WEIGHTED_BETA, WEIGHTED_BETA_STAR])
def test_weights_sum_to_one(weights):
    assert sum(weights) == pytest.approx(1.0, abs=1e-15)


def test_weighted_beta_fixed_point():
    # the extension m3 is invariant under beta: m3(x,y,z) = m3(m(y,z), m(x,z), m(x,y))
    a, b, c = WEIGHTED_BETA
    s = 2 / 3
    coef = [0.0, 0.0, 0.0]
    for w, (i, j) in zip((a, b, c), ((1, 2), (0, 2), (0, 1))):
        coef[i] += w * s
        coef[j] += w * (1 - s)
    assert coef == pytest.approx([a, b, c], abs=1e-15)


def test_weighted_beta_star_fixed_point():
    # beta* reverses beta: the first entry deletes the last coordinate
    a, b, c = WEIGHTED_BETA_STAR
    s = 2 / 3
    coef = [0.0, 0.0, 0.0]
    for w, (i, j) in zip((a, b, c), ((0, 1), (0, 2), (1, 2))):
        coef[i] += w * s
        coef[j] += w * (1 - s)
    assert coef == pytest.approx([a, b, c], abs=1e-15)
