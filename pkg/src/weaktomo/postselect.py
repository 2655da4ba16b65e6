"""Closed-form post-selection: transient states, the outcome decomposition,
and joint quasi-probabilities with their consistency identities.

Post-selecting outcome f with effect P on a state rho leaves the
sub-ensemble state

    R = (rho P + P rho) / (2 Tr{rho P}),

Hermitian with unit trace but possibly negative eigenvalues. The full state
decomposes as rho = sum_f p(f) R_f over any complete final POVM, and the
symmetrized joint assignment Re Tr{P Q rho} for two effects agrees with
either measurement order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, InvalidEffect, ZeroProbabilityPostselection
from .linalg import as_hermitian, hermitian_part
from .linalg import negativity as eigen_negativity
from .povm import StrongPovm
from .states import TransientState, density_matrix

ZERO_PROBABILITY = 1e-12
EFFECT_ATOL = 1e-9


def _as_effect(a: np.ndarray, what: str = "effect") -> np.ndarray:
    """Validate a final-measurement effect: Hermitian, PSD, below the identity."""
    e = as_hermitian(a)
    w = np.linalg.eigvalsh(e)
    if w[0] < -EFFECT_ATOL:
        raise InvalidEffect(f"{what} is not PSD (min eigenvalue {w[0]:.3e})")
    if w[-1] > 1.0 + EFFECT_ATOL:
        raise InvalidEffect(f"{what} exceeds the identity (max eigenvalue {w[-1]:.3e})")
    return e


@dataclass(frozen=True)
class PostselectionReport:
    """One post-selected outcome: its probability and sub-ensemble state."""

    label: str
    probability: float
    transient: TransientState

    @property
    def min_eigenvalue(self) -> float:
        return self.transient.min_eigenvalue

    @property
    def negativity(self) -> float:
        return self.transient.negativity


@dataclass(frozen=True)
class DecompositionResult:
    """Per-outcome reports, the residual of their weighted sum, and skipped labels."""

    reports: tuple[PostselectionReport, ...]
    residual: float
    skipped: tuple[str, ...] = ()


class OrderIndependenceResult(NamedTuple):
    max_order_deviation: float      # |weak-g-then-f minus weak-f-then-g|
    max_joint_deviation: float      # |either order minus the symmetrized product trace|


def transient_state(rho: np.ndarray, effect: np.ndarray, label: str = "f") -> PostselectionReport:
    """Sub-ensemble state conditioned on a later outcome with the given effect."""
    rho = density_matrix(rho)
    e = _as_effect(effect)
    if e.shape != rho.shape:
        raise DimensionMismatch(f"effect shape {e.shape} vs state shape {rho.shape}")
    p = float(np.einsum("ij,ji->", rho, e).real)
    if p <= ZERO_PROBABILITY:
        raise ZeroProbabilityPostselection(
            f"outcome {label!r} has probability {p!r}; conditioning is undefined"
        )
    mat = hermitian_part(rho @ e + e @ rho) / (2.0 * p)
    return PostselectionReport(label=label, probability=p, transient=TransientState(mat))


def decompose_by_postselection(rho: np.ndarray, final: StrongPovm) -> DecompositionResult:
    """Split a state into transient states weighted by final-outcome probabilities.

    Outcomes with probability <= 1e-12 carry zero weight in the sum; they are
    skipped and recorded. The residual ||rho - sum_f p(f) R_f|| is a pure
    roundoff quantity.
    """
    rho = density_matrix(rho)
    if final.dim != rho.shape[0]:
        raise DimensionMismatch(f"POVM dim {final.dim} vs state dim {rho.shape[0]}")
    reports: list[PostselectionReport] = []
    skipped: list[str] = []
    total = np.zeros_like(rho)
    for m in range(final.n_outcomes):
        label = final.labels[m]
        p = float(np.einsum("ij,ji->", rho, final.elements[m]).real)
        if p <= ZERO_PROBABILITY:
            skipped.append(label)
            continue
        report = transient_state(rho, final.elements[m], label=label)
        reports.append(report)
        total = total + report.probability * report.transient.matrix
    residual = float(np.linalg.norm(rho - total))
    return DecompositionResult(tuple(reports), residual, tuple(skipped))


def joint_quasi_probability(rho: np.ndarray, effect_a: np.ndarray, effect_b: np.ndarray) -> float:
    """Order-free joint assignment Tr{(B A + A B) rho} / 2 = Re Tr{A B rho}.

    May be negative for non-commuting effects; values are reported unclipped.
    """
    rho = density_matrix(rho)
    a = _as_effect(effect_a, "first effect")
    b = _as_effect(effect_b, "second effect")
    if a.shape != rho.shape or b.shape != rho.shape:
        raise DimensionMismatch("effect and state dimensions differ")
    return float(np.einsum("ij,jk,ki->", a, b, rho).real)


def order_independence_check(
    rho: np.ndarray, final_a: StrongPovm, final_b: StrongPovm
) -> OrderIndependenceResult:
    """Verify that the joint assignment is independent of measurement order.

    For every outcome pair, the weighted conditional p(f) Tr{B_g R_f} is
    computed without forming R_f, as Tr{B_g (rho A_f + A_f rho)} / 2, so
    zero-probability outcomes contribute their (vanishing) unnormalized
    weight instead of dividing by zero. Both orders and the symmetrized
    product trace agree analytically; the returned maxima are roundoff.
    """
    rho = density_matrix(rho)
    if final_a.dim != rho.shape[0] or final_b.dim != rho.shape[0]:
        raise DimensionMismatch("POVM and state dimensions differ")
    max_order = 0.0
    max_joint = 0.0
    for ea in final_a.elements:
        for eb in final_b.elements:
            ab = float(np.trace(eb @ (rho @ ea + ea @ rho)).real) / 2.0
            ba = float(np.trace(ea @ (rho @ eb + eb @ rho)).real) / 2.0
            joint = float(np.einsum("ij,jk,ki->", ea, eb, rho).real)
            max_order = max(max_order, abs(ab - ba))
            max_joint = max(max_joint, abs(ab - joint))
    return OrderIndependenceResult(max_order, max_joint)


def negativity(a: np.ndarray) -> tuple[float, float]:
    """(min eigenvalue, total negative-eigenvalue weight) of a Hermitian matrix."""
    return eigen_negativity(a)
