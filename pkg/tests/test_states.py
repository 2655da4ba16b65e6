import numpy as np
import pytest

from weaktomo import (
    NotPositiveSemidefinite,
    TransientState,
    density_matrix,
    maximally_mixed,
    pure_state,
    random_density_matrix,
)


class TestDensityMatrix:
    def test_canonicalizes(self):
        rho = density_matrix(np.array([[0.5, 0.25], [0.25, 0.5 + 4e-11]]))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(rho, rho.conj().T)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            density_matrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPositiveSemidefinite):
            density_matrix(np.diag([1.2, -0.2]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            density_matrix(np.array([[0.5, 0.3], [0.0, 0.5]]))


class TestPureState:
    def test_normalizes(self):
        rho = pure_state([2.0, 0.0])
        np.testing.assert_allclose(rho, np.diag([1.0, 0.0]), atol=1e-15)

    def test_superposition(self):
        rho = pure_state(np.array([1.0, 1.0]))
        np.testing.assert_allclose(rho, np.full((2, 2), 0.5), atol=1e-15)

    def test_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            pure_state([0.0, 0.0])


class TestRandomDensityMatrix:
    def test_rank_one_is_pure(self):
        w = np.linalg.eigvalsh(random_density_matrix(2, 1, seed=3))
        assert w[-1] == pytest.approx(1.0, abs=1e-12)
        assert abs(w[0]) < 1e-12

    def test_full_rank_is_mixed(self):
        w = np.linalg.eigvalsh(random_density_matrix(2, 2, seed=3))
        assert np.all(w > 1e-6)

    @pytest.mark.parametrize("dim,rank", [(3, 2), (4, 2), (5, 3)])
    def test_rank_controls_spectrum(self, dim, rank):
        w = np.linalg.eigvalsh(random_density_matrix(dim, rank, seed=17))
        assert np.all(np.abs(w[: dim - rank]) < 1e-12)
        assert np.all(w[dim - rank:] > 1e-12)

    def test_deterministic(self):
        a = random_density_matrix(3, 2, seed=99)
        b = random_density_matrix(3, 2, seed=99)
        np.testing.assert_array_equal(a, b)

    def test_seed_sensitivity(self):
        assert not np.array_equal(
            random_density_matrix(3, 2, seed=1), random_density_matrix(3, 2, seed=2)
        )

    def test_valid_state(self):
        rho = random_density_matrix(6, 4, seed=8)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho)[0] >= -1e-12

    @pytest.mark.parametrize("rank", [0, 5])
    def test_rank_out_of_range(self, rank):
        with pytest.raises(ValueError):
            random_density_matrix(4, rank, seed=0)


class TestMaximallyMixed:
    def test_value(self):
        np.testing.assert_allclose(maximally_mixed(3), np.eye(3) / 3)


class TestTransientState:
    def test_computes_diagnostics(self):
        t = TransientState(np.array([[1.0, 0.5], [0.5, 0.0]]))
        assert t.min_eigenvalue == pytest.approx((1 - np.sqrt(2)) / 2, abs=1e-12)
        assert t.negativity == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-12)
        assert not t.is_positive()
        assert t.dim == 2

    def test_positive_state(self):
        t = TransientState(np.eye(2) / 2)
        assert t.negativity == 0.0
        assert t.is_positive()

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            TransientState(np.diag([1.0, 0.5]))

    def test_immutable(self):
        t = TransientState(np.eye(2) / 2)
        with pytest.raises(ValueError):
            t.matrix[0, 0] = 9.0
