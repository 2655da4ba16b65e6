"""Built-in measurement scenarios.

A scenario bundles everything one protocol run needs: initial state, weak
POVM family, final POVM, and optionally a second final POVM for joint
quasi-probability studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .linalg import hermitian_part
from .povm import StrongPovm, WeakPovmFamily, build_family, pauli6_povm, sic_qubit_povm
from .states import pure_state, random_density_matrix

CATALOG_NAMES = ("double-slit", "pauli6-qubit", "sic-qubit", "random")

# Tilted pure state used by the generic qubit scenarios; deliberately
# non-commuting with both the Z-basis final measurement and the weak family.
_TILT_THETA = np.pi / 3
_TILT_PHI = np.pi / 5


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ScenarioBundle:
    name: str
    initial_state: np.ndarray
    family: WeakPovmFamily
    final: StrongPovm | None
    second_final: StrongPovm | None = None

    def __post_init__(self):
        object.__setattr__(self, "initial_state", _freeze(np.asarray(self.initial_state)))

    @property
    def dim(self) -> int:
        return self.family.dim

    def at_strength(self, epsilon: float) -> "ScenarioBundle":
        return ScenarioBundle(
            self.name, self.initial_state, self.family.at_strength(epsilon), self.final, self.second_final
        )


def _z_basis_povm(labels=("z0", "z1")) -> StrongPovm:
    return StrongPovm.from_projectors([np.array([1.0, 0.0]), np.array([0.0, 1.0])], labels)


def _x_basis_povm(labels=("plus", "minus")) -> StrongPovm:
    s = 1.0 / np.sqrt(2.0)
    return StrongPovm.from_projectors([np.array([s, s]), np.array([s, -s])], labels)


def _tilted_qubit_state() -> np.ndarray:
    v = np.array(
        [np.cos(_TILT_THETA / 2), np.exp(1j * _TILT_PHI) * np.sin(_TILT_THETA / 2)],
        dtype=np.complex128,
    )
    return pure_state(v)


def random_strong_povm(dim: int, n_outcomes: int, seed: int, labels=()) -> StrongPovm:
    """Random POVM: Wishart pieces A_m = G G† whitened by their sum.

    F_m = T A_m T with T = (sum_m A_m)^{-1/2}, so completeness holds exactly
    and every element is PSD. With n_outcomes >= d² the induced frame is
    informationally complete with probability 1.
    """
    gen = rng.generator(seed)
    pieces = []
    for _ in range(n_outcomes):
        g = rng.complex_normal(gen, (dim, dim))
        pieces.append(g @ g.conj().T)
    total = hermitian_part(sum(pieces))
    w, v = np.linalg.eigh(total)
    whiten = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    elems = np.stack([hermitian_part(whiten @ a @ whiten) for a in pieces])
    return StrongPovm(elems, labels)


def random_basis_povm(dim: int, seed: int, prefix: str = "f") -> StrongPovm:
    """Projective POVM onto the eigenbasis of a random Hermitian matrix."""
    gen = rng.generator(seed)
    h = hermitian_part(rng.complex_normal(gen, (dim, dim)))
    _, v = np.linalg.eigh(h)
    return StrongPovm.from_projectors(
        [v[:, k] for k in range(dim)], tuple(f"{prefix}{k}" for k in range(dim))
    )


def catalog(
    name: str,
    *,
    epsilon: float,
    dim: int | None = None,
    rank: int | None = None,
    n_outcomes: int | None = None,
    seed: int | None = None,
) -> ScenarioBundle:
    """Build a named scenario.

    double-slit : equal superposition over two paths, Pauli-6 weak family in
                  the path basis, which-path final projectors, fringe basis as
                  the second final POVM.
    pauli6-qubit: tilted pure state, Pauli-6 weak family, Z final, X second.
    sic-qubit   : tilted pure state, tetrahedral SIC weak family, Z final,
                  X second. Generic: nothing commutes, so back-action and
                  weak-limit bias are both visible.
    random      : takes dim, rank, n_outcomes (default d²) and seed; derives
                  state / weak POVM / finals from sub-streams 0..3 of seed.
    """
    if name == "double-slit":
        state = pure_state(np.array([1.0, 1.0]) / np.sqrt(2.0))
        family = build_family(pauli6_povm(), epsilon)
        final = _z_basis_povm(labels=("path1", "path2"))
        return ScenarioBundle(name, state, family, final, _x_basis_povm(("fringe+", "fringe-")))
    if name == "pauli6-qubit":
        return ScenarioBundle(
            name, _tilted_qubit_state(), build_family(pauli6_povm(), epsilon),
            _z_basis_povm(), _x_basis_povm(),
        )
    if name == "sic-qubit":
        return ScenarioBundle(
            name, _tilted_qubit_state(), build_family(sic_qubit_povm(), epsilon),
            _z_basis_povm(), _x_basis_povm(),
        )
    if name == "random":
        if dim is None or rank is None or seed is None:
            raise ValueError("random scenarios need dim, rank, and seed")
        m = n_outcomes if n_outcomes is not None else dim * dim
        state = random_density_matrix(dim, rank, rng.derive_stream(seed, 0))
        strong = random_strong_povm(dim, m, rng.derive_stream(seed, 1))
        family = build_family(strong, epsilon)
        final = random_basis_povm(dim, rng.derive_stream(seed, 2), prefix="f")
        second = random_basis_povm(dim, rng.derive_stream(seed, 3), prefix="g")
        return ScenarioBundle(name, state, family, final, second)
    raise ValueError(f"unknown scenario {name!r}; choose from {CATALOG_NAMES}")
