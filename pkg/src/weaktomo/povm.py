"""Variable-strength POVM families.

A strong POVM {F_m} plus positive weights {q_m} (summing to 1) and a strength
parameter eps define the interpolated family

    E_m(eps) = (q_m * 1 + eps * F_m) / (1 + eps),

which is PSD and complete for every eps >= 0, reduces to q_m * 1 at eps = 0,
and tends to F_m as eps -> infinity. In the product form
E_m = w_m (1 + eps S_m) the pieces are w_m = q_m / (1 + eps) and
S_m = F_m / q_m, so sum w_m = 1/(1+eps) and sum w_m S_m = 1/(1+eps) hold
identically. This is one valid realization of the constraint pair; the
default weights are q_m = Tr{F_m} / d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWeights, DimensionMismatch, ZeroWeightOutcome
from .linalg import as_hermitian, hermitian_part, sqrt_psd
from .states import density_matrix

COMPLETENESS_ATOL = 1e-9
PSD_ATOL = -1e-10
WEIGHT_SUM_ATOL = 1e-12

EXACT = "exact"
LINEARIZED = "linearized"


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StrongPovm:
    """A POVM: PSD Hermitian elements summing to the identity."""

    elements: np.ndarray            # (M, d, d) complex
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        elems = np.asarray(self.elements, dtype=np.complex128)
        if elems.ndim != 3 or elems.shape[1] != elems.shape[2]:
            raise DimensionMismatch(f"elements must have shape (M, d, d), got {elems.shape}")
        if elems.shape[0] < 1:
            raise ValueError("a POVM needs at least one element")
        elems = np.stack([as_hermitian(e) for e in elems])
        for idx, e in enumerate(elems):
            lo = float(np.linalg.eigvalsh(e)[0])
            if lo < PSD_ATOL:
                raise ValueError(f"element {idx} is not PSD (min eigenvalue {lo:.3e})")
        total = elems.sum(axis=0)
        dev = float(np.linalg.norm(total - np.eye(elems.shape[1])))
        if dev > COMPLETENESS_ATOL:
            raise ValueError(f"completeness violated: ||sum F - 1|| = {dev:.3e}")
        labels = tuple(self.labels) if self.labels else tuple(f"m{i}" for i in range(elems.shape[0]))
        if len(labels) != elems.shape[0]:
            raise ValueError(f"{elems.shape[0]} elements but {len(labels)} labels")
        object.__setattr__(self, "elements", _freeze(elems))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}; have {self.labels}") from None

    @classmethod
    def from_projectors(cls, vectors, labels: tuple[str, ...] = ()) -> "StrongPovm":
        """Projective POVM onto an orthonormal set of vectors."""
        mats = []
        for v in vectors:
            v = np.asarray(v, dtype=np.complex128).reshape(-1)
            mats.append(np.outer(v, v.conj()) / np.vdot(v, v).real)
        return cls(np.stack(mats), labels)

    @classmethod
    def trivial(cls, dim: int) -> "StrongPovm":
        """The single-outcome POVM {1}."""
        return cls(np.eye(dim, dtype=np.complex128)[None, :, :], ("all",))


@dataclass(frozen=True)
class WeakPovmFamily:
    """Strong POVM with outcome weights and a strength parameter."""

    strong: StrongPovm
    weights: np.ndarray             # q_m, positive, summing to 1
    epsilon: float

    def __post_init__(self):
        q = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if q.size != self.strong.n_outcomes:
            raise BadWeights(f"{self.strong.n_outcomes} outcomes but {q.size} weights")
        if np.any(q <= 0.0):
            raise BadWeights("all weights must be positive")
        if abs(q.sum() - 1.0) > WEIGHT_SUM_ATOL:
            raise BadWeights(f"weights sum to {q.sum()!r}, not 1 within {WEIGHT_SUM_ATOL:.1e}")
        if self.epsilon < 0.0:
            raise ValueError(f"strength must be nonnegative, got {self.epsilon}")
        object.__setattr__(self, "weights", _freeze(q))
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def dim(self) -> int:
        return self.strong.dim

    @property
    def n_outcomes(self) -> int:
        return self.strong.n_outcomes

    @property
    def labels(self) -> tuple[str, ...]:
        return self.strong.labels

    @property
    def scaled_weights(self) -> np.ndarray:
        """w_m = q_m / (1 + eps); these sum to 1/(1+eps)."""
        return self.weights / (1.0 + self.epsilon)

    def signal_operator(self, m: int) -> np.ndarray:
        """S_m = F_m / q_m, the strength-independent operator whose expectation the outcome reads out."""
        return self.strong.elements[m] / self.weights[m]

    def signal_operators(self) -> np.ndarray:
        return self.strong.elements / self.weights[:, None, None]

    def element(self, m: int) -> np.ndarray:
        """E_m(eps) = (q_m * 1 + eps * F_m) / (1 + eps)."""
        if not 0 <= m < self.n_outcomes:
            raise IndexError(f"outcome index {m} out of range [0, {self.n_outcomes})")
        eye = np.eye(self.dim)
        return (self.weights[m] * eye + self.epsilon * self.strong.elements[m]) / (1.0 + self.epsilon)

    def elements(self) -> np.ndarray:
        eye = np.eye(self.dim)[None, :, :]
        return (self.weights[:, None, None] * eye + self.epsilon * self.strong.elements) / (1.0 + self.epsilon)

    def at_strength(self, epsilon: float) -> "WeakPovmFamily":
        return WeakPovmFamily(self.strong, self.weights, epsilon)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        return outcome_probabilities(self, rho)


@dataclass(frozen=True)
class MeasurementOperatorSet:
    """Measurement operators M_m of a family, exact or linearized.

    Exact: M_m = principal root of E_m(eps), so M_m† M_m = E_m(eps).
    Linearized: M_m = sqrt(w_m) (1 + eps/2 S_m), accurate to O(eps²) and
    carrying no completeness guarantee.
    """

    mode: str
    operators: np.ndarray           # (M, d, d)
    family: WeakPovmFamily

    def __post_init__(self):
        if self.mode not in (EXACT, LINEARIZED):
            raise ValueError(f"mode must be {EXACT!r} or {LINEARIZED!r}, got {self.mode!r}")
        object.__setattr__(self, "operators", _freeze(np.asarray(self.operators, dtype=np.complex128)))

    @property
    def n_outcomes(self) -> int:
        return self.operators.shape[0]


def build_family(
    strong: StrongPovm,
    epsilon: float,
    weights: np.ndarray | list | None = None,
) -> WeakPovmFamily:
    """Attach weights and a strength to a strong POVM.

    Omitted weights default to q_m = Tr{F_m} / d, which sum to 1 by
    completeness; a traceless element then has no valid weight.
    """
    if strong.n_outcomes < 2:
        raise ValueError("a weak family needs at least two outcomes")
    if weights is None:
        traces = np.einsum("mii->m", strong.elements).real
        if np.any(traces < 1e-12):
            bad = [strong.labels[i] for i in np.nonzero(traces < 1e-12)[0]]
            raise ZeroWeightOutcome(f"zero-trace elements cannot take default weights: {bad}")
        weights = traces / strong.dim
    return WeakPovmFamily(strong, weights, epsilon)


def measurement_operators(family: WeakPovmFamily, mode: str = EXACT) -> MeasurementOperatorSet:
    """Derive the measurement operators of a family in the requested mode."""
    if mode == EXACT:
        ops = np.stack([sqrt_psd(family.element(m)) for m in range(family.n_outcomes)])
    elif mode == LINEARIZED:
        eye = np.eye(family.dim)
        half = 0.5 * family.epsilon
        ops = np.stack(
            [
                np.sqrt(w) * (eye + half * s)
                for w, s in zip(family.scaled_weights, family.signal_operators())
            ]
        )
    else:
        raise ValueError(f"mode must be {EXACT!r} or {LINEARIZED!r}, got {mode!r}")
    return MeasurementOperatorSet(mode, ops, family)


def _effect(measure: WeakPovmFamily | StrongPovm | np.ndarray, m: int | None) -> np.ndarray:
    if isinstance(measure, WeakPovmFamily):
        return measure.element(m)
    if isinstance(measure, StrongPovm):
        return measure.elements[m]
    return np.asarray(measure, dtype=np.complex128)


def outcome_probability(
    measure: WeakPovmFamily | StrongPovm | np.ndarray,
    m: int | None,
    rho: np.ndarray,
) -> float:
    """p(m) = Re Tr{E_m rho}, clipped to [0, 1].

    ``measure`` may be a weak family (uses E_m(eps)), a strong POVM (uses
    F_m), or a bare effect matrix (m ignored).
    """
    rho = density_matrix(rho)
    e = _effect(measure, m)
    if e.shape != rho.shape:
        raise DimensionMismatch(f"effect shape {e.shape} vs state shape {rho.shape}")
    p = float(np.einsum("ij,ji->", e, rho).real)
    if p < -1e-12 or p > 1.0 + 1e-12:
        raise ValueError(f"probability {p!r} outside [0, 1] beyond tolerance")
    return min(max(p, 0.0), 1.0)


def outcome_probabilities(
    measure: WeakPovmFamily | StrongPovm,
    rho: np.ndarray,
) -> np.ndarray:
    """All outcome probabilities of a family or strong POVM against a state."""
    rho = density_matrix(rho)
    elems = measure.elements() if isinstance(measure, WeakPovmFamily) else measure.elements
    if elems.shape[1:] != rho.shape:
        raise DimensionMismatch(f"element shape {elems.shape[1:]} vs state shape {rho.shape}")
    p = np.einsum("mij,ji->m", elems, rho).real
    return np.clip(p, 0.0, 1.0)


def paulis() -> dict[str, np.ndarray]:
    """The three Pauli matrices keyed 'x', 'y', 'z'."""
    return {
        "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
        "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    }


def pauli6_povm() -> StrongPovm:
    """Six-outcome qubit POVM F_{i,s} = (1 + s sigma_i) / 6."""
    eye = np.eye(2, dtype=np.complex128)
    elems, labels = [], []
    for name, sigma in paulis().items():
        for sign, tag in ((1.0, "+"), (-1.0, "-")):
            elems.append((eye + sign * sigma) / 6.0)
            labels.append(f"{name}{tag}")
    return StrongPovm(np.stack(elems), tuple(labels))


def sic_qubit_povm() -> StrongPovm:
    """Tetrahedral qubit SIC POVM, F_m = |psi_m><psi_m| / 2."""
    kets = [np.array([1.0, 0.0], dtype=np.complex128)]
    for k in range(3):
        kets.append(
            np.array([1.0 / np.sqrt(3.0), np.sqrt(2.0 / 3.0) * np.exp(2j * np.pi * k / 3.0)])
        )
    elems = np.stack([np.outer(v, v.conj()) / 2.0 for v in kets])
    elems = np.stack([hermitian_part(e) for e in elems])
    return StrongPovm(elems, ("t0", "t1", "t2", "t3"))
