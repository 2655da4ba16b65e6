"""State constructors and the unit-trace-but-possibly-negative state type."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .linalg import as_hermitian, hermitian_part, negativity
from .errors import NotPositiveSemidefinite

TRACE_ATOL = 1e-10
MIN_EIGENVALUE_ATOL = -1e-10


def density_matrix(a: np.ndarray | list) -> np.ndarray:
    """Validate and canonicalize a density matrix.

    Hermiticity within 1e-10 (then symmetrized exactly), trace within 1e-10
    of 1 (then renormalized exactly), smallest eigenvalue >= -1e-10.
    """
    m = as_hermitian(a)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"trace {tr!r} deviates from 1 by more than {TRACE_ATOL:.1e}")
    m = m / tr
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < MIN_EIGENVALUE_ATOL:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {lo:.3e} < {MIN_EIGENVALUE_ATOL:.1e}")
    return m


def pure_state(vector: np.ndarray | list) -> np.ndarray:
    """Density matrix |v><v| / <v|v> of a state vector."""
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if v.size < 2:
        raise ValueError("state vectors need dimension >= 2")
    norm = float(np.vdot(v, v).real)
    if norm <= 0.0:
        raise ValueError("cannot normalize the zero vector")
    return np.outer(v, v.conj()) / norm


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


def random_density_matrix(dim: int, rank: int, seed: int) -> np.ndarray:
    """Random state G G† / Tr{G G†} with G a seeded dim x rank complex Gaussian.

    Deterministic for fixed (dim, rank, seed); the stream is the pinned
    Philox/Box-Muller policy from the rng module.
    """
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = rng.complex_normal(rng.generator(seed), (dim, rank))
    m = g @ g.conj().T
    return hermitian_part(m / np.trace(m).real)


@dataclass(frozen=True)
class TransientState:
    """Hermitian unit-trace state of a post-selected sub-ensemble.

    Unlike a density matrix it may carry negative eigenvalues; their total
    weight is the ``negativity`` field.
    """

    matrix: np.ndarray
    min_eigenvalue: float = field(default=0.0)
    negativity: float = field(default=0.0)

    def __post_init__(self):
        m = as_hermitian(self.matrix)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"transient state trace {tr!r} deviates from 1 beyond {TRACE_ATOL:.1e}")
        m = m / tr
        m.setflags(write=False)
        lo, neg = negativity(m)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "min_eigenvalue", lo)
        object.__setattr__(self, "negativity", neg)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_positive(self, atol: float = -MIN_EIGENVALUE_ATOL) -> bool:
        return self.min_eigenvalue >= -atol
