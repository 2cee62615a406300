import numpy as np
import pytest

from nmeans import spd
from nmeans.exceptions import DimensionError, ValidationError

d = spd.thompson_distance


def test_sym_eigen_examples():
    w, v = spd.sym_eigen(np.diag([3.0, 1.0]))
    assert w == pytest.approx([3.0, 1.0])
    np.testing.assert_allclose(np.abs(v), np.eye(2))
    w, _ = spd.sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert w == pytest.approx([3.0, 1.0])
    w, _ = spd.sym_eigen(np.eye(4))
    assert w == pytest.approx([1.0] * 4)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("dim", [1, 2, 5, 12, 32])
def test_sym_eigen_reconstruction(method, dim, rng):
    g = rng.standard_normal((dim, dim))
    a = (g + g.T) / 2
    w, v = spd.sym_eigen(a, method=method)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(v.T @ v - np.eye(dim))) <= 1e-12
    rel = np.linalg.norm(v @ np.diag(w) @ v.T - a) / max(np.linalg.norm(a), 1e-300)
    assert rel <= 1e-10


def test_jacobi_agrees_with_lapack(rng):
    g = rng.standard_normal((8, 8))
    a = g @ g.T
    w_j, _ = spd.jacobi_eigh(a)
    w_l, _ = spd.sym_eigen(a)
    np.testing.assert_allclose(w_j, w_l, rtol=1e-12, atol=1e-12)


def test_sym_eigen_rejects_nonsymmetric():
    with pytest.raises(DimensionError):
        spd.sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sym_eigen_unknown_method():
    with pytest.raises(ValueError):
        spd.sym_eigen(np.eye(2), method="qr")


def test_matrix_functions():
    np.testing.assert_allclose(spd.sqrtm(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    np.testing.assert_allclose(spd.logm(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
    np.testing.assert_allclose(spd.expm(np.zeros((2, 2))), np.eye(2))


def test_sqrt_squares_back(rng):
    a = spd.random_spd(rng, 6, 10.0)
    s = spd.sqrtm(a)
    assert np.linalg.norm(s @ s - a) <= 1e-10 * np.linalg.norm(a)
    np.testing.assert_allclose(s, s.T, atol=0)
    np.testing.assert_allclose(spd.invsqrtm(a) @ s, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(spd.inv(a) @ a, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(spd.expm(spd.logm(a)), a, rtol=1e-10, atol=1e-12)


def test_matrix_function_undefined():
    with pytest.raises(ValueError):
        spd.matrix_function(-np.eye(2), np.log)


def test_loewner():
    assert spd.loewner_leq(np.eye(2), 2 * np.eye(2))
    assert not spd.loewner_leq(2 * np.eye(2), np.eye(2))
    assert not spd.loewner_leq(np.diag([1.0, 3.0]), np.diag([2.0, 2.0]))
    assert spd.loewner_leq(np.eye(2), np.eye(2) - 1e-12, slack=1e-10)
    with pytest.raises(DimensionError):
        spd.loewner_leq(np.eye(2), np.eye(3))


def test_m_ratio_examples():
    a = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert spd.m_ratio(a, a) == pytest.approx(1.0)
    assert spd.m_ratio(np.diag([2.0, 8.0]), np.diag([1.0, 2.0])) == pytest.approx(4.0)
    assert spd.m_ratio(3.5 * np.eye(3), np.eye(3)) == pytest.approx(3.5)


def test_m_ratio_is_infimum(rng):
    a = spd.random_spd(rng, 5, size=50)
    b = spd.random_spd(rng, 5, size=50)
    lam = spd.m_ratio(a, b)[:, None, None]
    margin = np.linalg.eigvalsh(lam * b - a)[:, 0]
    assert np.all(margin >= -1e-10)
    shrunk = np.linalg.eigvalsh(lam * (1 - 1e-6) * b - a)[:, 0]
    assert np.all(shrunk < 0)


def test_thompson_examples():
    a = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert d(a, a) == pytest.approx(0.0, abs=1e-15)
    assert d(np.eye(3), 5 * np.eye(3)) == pytest.approx(np.log(5))
    with pytest.raises(DimensionError):
        d(np.eye(2), np.eye(3))


def test_thompson_commuting_is_sup_log_ratio():
    a, b = np.diag([1.0, 10.0, 3.0]), np.diag([2.0, 1.0, 3.0])
    assert d(a, b) == pytest.approx(np.log(10))


def test_order_unit_norm():
    assert spd.order_unit_norm(np.eye(3)) == 1.0
    assert spd.order_unit_norm(np.diag([-3.0, 2.0])) == 3.0
    assert spd.order_unit_norm(np.zeros((2, 2))) == 0.0


def test_check_spd():
    np.testing.assert_array_equal(spd.check_spd(np.eye(2)), np.eye(2))
    with pytest.raises(ValidationError, match="eigenvalue"):
        spd.check_spd(np.diag([1.0, -1.0]))
    with pytest.raises(ValidationError):
        spd.check_spd(np.diag([1.0, 1e-14]))
    with pytest.raises(DimensionError):
        spd.check_spd(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        spd.check_spd(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        spd.check_spd(np.eye(65))


def test_definiteness_floor_is_relative():
    # scaling must not change the verdict
    a = np.diag([1.0, 1e-9])
    spd.check_spd(a)
    spd.check_spd(1e-20 * a)
    spd.check_spd(1e20 * a)


def test_order_interval():
    iv = spd.OrderInterval(4)
    assert iv.contains(np.eye(3))
    assert iv.contains(np.diag([0.25, 4.0]))
    assert not iv.contains(np.diag([0.2, 1.0]))
    assert spd.OrderInterval.containing([np.diag([0.3, 2.5]), np.eye(2)]).n == 4
    with pytest.raises(ValueError):
        spd.OrderInterval(0.5)


def test_random_spd_in_interval(rng):
    a = spd.random_spd(rng, 4, 3.0, size=(10, 2))
    assert a.shape == (10, 2, 4, 4)
    assert spd.OrderInterval(3).contains(a)


def test_random_psd(rng):
    p = spd.random_psd(rng, 4, size=20, rank=2)
    w = np.linalg.eigvalsh(p)
    assert np.all(w >= -1e-12)
    assert np.all(np.abs(w[:, :2]) < 1e-12)


class TestThompsonLemma:
    """Sampled checks of the metric inequalities on the SPD cone."""

    N = 200

    def draw(self, rng, dim=4):
        return spd.random_spd(rng, dim, 5.0, size=self.N)

    def test_triangle_and_symmetry(self, rng):
        a, b, c = self.draw(rng), self.draw(rng), self.draw(rng)
        np.testing.assert_allclose(d(a, b), d(b, a), atol=1e-12)
        assert np.all(d(a, c) <= d(a, b) + d(b, c) + 1e-12)

    def test_translation(self, rng):
        a, b, c = self.draw(rng), self.draw(rng), self.draw(rng)
        assert np.all(d(a + b, a + c) <= d(b, c) + 1e-12)

    def test_order_reversal(self, rng):
        a1, b, c = self.draw(rng), self.draw(rng), self.draw(rng)
        a2 = a1 + spd.random_psd(rng, 4, size=self.N)
        assert np.all(d(a1 + b, a1 + c) >= d(a2 + b, a2 + c) - 1e-12)

    def test_scaling(self, rng):
        a, b = self.draw(rng), self.draw(rng)
        r = np.exp(rng.uniform(-5, 5, self.N))[:, None, None]
        np.testing.assert_allclose(d(r * a, r * b), d(a, b), atol=1e-11)

    def test_sums(self, rng):
        a, b, c, e = (self.draw(rng) for _ in range(4))
        assert np.all(d(a + b, c + e) <= np.maximum(d(a, c), d(b, e)) + 1e-12)

    def test_inversion(self, rng):
        a, b = self.draw(rng), self.draw(rng)
        np.testing.assert_allclose(d(np.linalg.inv(a), np.linalg.inv(b)), d(a, b), atol=1e-11)
