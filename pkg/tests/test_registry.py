import numpy as np
import pytest

from nmeans.exceptions import ParameterError
from nmeans.registry import QUASI_GENERATORS, get_mean
from oracles import gauss_agm, gauss_hgm


@pytest.mark.parametrize(
    "name, expected",
    [
        ("arithmetic", 5.0),
        ("geometric", 4.0),
        ("harmonic", 3.2),
        ("power:2", np.sqrt(34.0)),
        ("weighted:2/3", 4.0),
        ("quasi:log", 4.0),
        ("quasi:identity", 5.0),
        ("logarithmic", 6 / np.log(4)),
        ("max", 8.0),
        ("left", 2.0),
    ],
)
def test_scalar_means(name, expected):
    assert get_mean(name)(2.0, 8.0) == pytest.approx(expected, rel=1e-12)


def test_scalar_compositions():
    assert get_mean("agm")(24.0, 6.0) == pytest.approx(gauss_agm(24.0, 6.0), rel=1e-11)
    assert get_mean("hgm")(2.0, 8.0) == pytest.approx(gauss_hgm(2.0, 8.0), rel=1e-11)


@pytest.mark.parametrize("name", ["cbrt", "sqrt", "square", "reciprocal", "exp"])
def test_quasi_generators_invert(name):
    f, f_inv = QUASI_GENERATORS[name]
    x = np.array([0.5, 1.0, 3.0])
    np.testing.assert_allclose(f_inv(f(x)), x)
    mean = get_mean(f"quasi:{name}")
    assert 0.5 <= mean(0.5, 3.0) <= 3.0


@pytest.mark.parametrize("name", ["arithmetic", "geometric", "harmonic", "logarithmic", "agm", "hgm", "left"])
def test_spd_means_idempotent(name):
    a = np.array([[2.0, 0.3], [0.3, 1.0]])
    np.testing.assert_allclose(get_mean(name, "spd")(a, a), a, atol=1e-9)


@pytest.mark.parametrize(
    "name, space",
    [("median", "scalar"), ("quasi:sin", "scalar"), ("power:x", "scalar"), ("weighted:2", "scalar"),
     ("power:2", "spd"), ("geometric", "complex")],
)
def test_unknown_names(name, space):
    with pytest.raises(ParameterError):
        get_mean(name, space)
