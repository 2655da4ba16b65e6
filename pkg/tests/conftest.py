import numpy as np
import pytest

from weaktomo import rng


def random_hermitian(seed: int, dim: int) -> np.ndarray:
    g = rng.complex_normal(rng.generator(seed), (dim, dim))
    return (g + g.conj().T) / 2


def random_psd(seed: int, dim: int) -> np.ndarray:
    g = rng.complex_normal(rng.generator(seed), (dim, dim))
    return g @ g.conj().T


@pytest.fixture
def pauli():
    return {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
