import numpy as np
import pytest

from weaktomo import (
    build_frame,
    catalog,
    outcome_probabilities,
)
from weaktomo.catalog import CATALOG_NAMES, random_basis_povm, random_strong_povm


class TestDoubleSlit:
    def test_final_probabilities_balanced(self):
        sc = catalog("double-slit", epsilon=0.1)
        p = outcome_probabilities(sc.final, sc.initial_state)
        np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-12)

    def test_structure(self):
        sc = catalog("double-slit", epsilon=0.1)
        assert sc.final.labels == ("path1", "path2")
        assert sc.family.n_outcomes == 6
        assert sc.second_final is not None
        np.testing.assert_allclose(sc.initial_state, np.full((2, 2), 0.5), atol=1e-15)


class TestQubitScenarios:
    @pytest.mark.parametrize("name", ["pauli6-qubit", "sic-qubit"])
    def test_generic_state_does_not_commute(self, name):
        sc = catalog(name, epsilon=0.05)
        rho = sc.initial_state
        for e in sc.final.elements:
            assert np.linalg.norm(rho @ e - e @ rho) > 1e-3
        for f in sc.family.strong.elements:
            assert np.linalg.norm(rho @ f - f @ rho) > 1e-4

    def test_sic_frame_informationally_complete(self):
        sc = catalog("sic-qubit", epsilon=0.05)
        frame = build_frame(sc.family)
        assert sc.family.n_outcomes == 4
        assert frame.rank == 4
        assert frame.complete


class TestRandomScenario:
    def test_deterministic(self):
        a = catalog("random", epsilon=0.2, dim=3, rank=2, seed=7)
        b = catalog("random", epsilon=0.2, dim=3, rank=2, seed=7)
        np.testing.assert_array_equal(a.initial_state, b.initial_state)
        np.testing.assert_array_equal(a.family.strong.elements, b.family.strong.elements)
        np.testing.assert_array_equal(a.final.elements, b.final.elements)
        np.testing.assert_array_equal(a.second_final.elements, b.second_final.elements)

    def test_default_outcome_count(self):
        sc = catalog("random", epsilon=0.2, dim=3, rank=1, seed=1)
        assert sc.family.n_outcomes == 9
        assert sc.final.n_outcomes == 3

    def test_outcomes_override(self):
        sc = catalog("random", epsilon=0.2, dim=2, rank=2, n_outcomes=7, seed=1)
        assert sc.family.n_outcomes == 7

    def test_complete_with_probability_one(self):
        for seed in range(5):
            sc = catalog("random", epsilon=0.1, dim=3, rank=2, seed=seed)
            assert build_frame(sc.family).complete

    def test_missing_params(self):
        with pytest.raises(ValueError):
            catalog("random", epsilon=0.2, dim=3)


class TestCatalogDispatch:
    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            catalog("triple-slit", epsilon=0.1)

    @pytest.mark.parametrize("name", [n for n in CATALOG_NAMES if n != "random"])
    def test_all_builtins_buildable(self, name):
        sc = catalog(name, epsilon=0.3)
        assert sc.family.epsilon == 0.3
        assert sc.dim == 2

    def test_at_strength(self):
        sc = catalog("sic-qubit", epsilon=0.3).at_strength(0.001)
        assert sc.family.epsilon == 0.001
        assert sc.final is not None


class TestRandomPovmFactories:
    def test_strong_povm_valid(self):
        povm = random_strong_povm(4, 16, seed=3)
        assert povm.n_outcomes == 16
        total = povm.elements.sum(axis=0)
        np.testing.assert_allclose(total, np.eye(4), atol=1e-12)

    def test_basis_povm_projective(self):
        povm = random_basis_povm(3, seed=5)
        for e in povm.elements:
            np.testing.assert_allclose(e @ e, e, atol=1e-12)
        np.testing.assert_allclose(povm.elements.sum(axis=0), np.eye(3), atol=1e-12)
