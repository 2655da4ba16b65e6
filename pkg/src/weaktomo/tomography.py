"""Linear-inversion tomography through reciprocal (dual) operator frames.

The signal operators S_m of a weak family span a subspace of Hermitian
operator space; their Gram matrix G[n,m] = Tr{S_n S_m} defines canonical
duals L_m = sum_n pinv(G)[m,n] S_n. For any Hermitian A in the span,
sum_m Tr{S_m A} L_m = A, and when the frame is informationally complete
(rank d²) that reconstructs arbitrary states. Measured probabilities enter
through the strength-independent coefficients

    c_m = (p(m) - w_m) / (eps * w_m)  =  Tr{S_m rho}   (exact data).

No positivity is imposed anywhere: post-selected statistics legitimately
reconstruct to operators with negative eigenvalues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadConditionalData,
    FrameIncomplete,
    InconsistentProbabilities,
    StrengthZeroNotInvertible,
)
from .linalg import hermitian_part
from .povm import WeakPovmFamily, _freeze
from .states import TransientState

PROBABILITY_SUM_WARN = 1e-8
PROBABILITY_SUM_MAX = 1e-3
CONDITIONAL_TRACE_MAX = 1e-6


@dataclass(frozen=True)
class TomographyFrame:
    """Signal operators of a family with their Gram matrix and canonical duals."""

    family: WeakPovmFamily
    gram: np.ndarray                # (M, M) real symmetric
    duals: np.ndarray               # (M, d, d) complex Hermitian
    singular_values: np.ndarray     # of the Gram matrix, descending
    rank: int
    complete: bool
    rank_tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "gram", _freeze(np.asarray(self.gram)))
        object.__setattr__(self, "duals", _freeze(np.asarray(self.duals)))
        object.__setattr__(self, "singular_values", _freeze(np.asarray(self.singular_values)))

    @property
    def dim(self) -> int:
        return self.family.dim

    @property
    def n_outcomes(self) -> int:
        return self.family.n_outcomes


def build_frame(family: WeakPovmFamily, rank_tolerance: float = 1e-8) -> TomographyFrame:
    """Gram matrix, rank, and pseudoinverse duals of a family's signal operators.

    Incomplete frames are returned flagged (complete=False), not rejected.
    The pseudoinverse truncates singular values below
    rank_tolerance * sigma_max, making the rank decision scale-free.
    """
    sig = family.signal_operators()
    gram = np.einsum("nij,mji->nm", sig, sig).real
    gram = (gram + gram.T) / 2
    w, v = np.linalg.eigh(gram)     # symmetric PSD: eigenvalues are singular values
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    cutoff = rank_tolerance * max(w[0], 0.0)
    keep = w > cutoff
    rank = int(keep.sum())
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    gram_pinv = (v * inv) @ v.T
    duals = np.einsum("mn,nij->mij", gram_pinv, sig)
    duals = np.stack([hermitian_part(d) for d in duals])
    return TomographyFrame(
        family=family,
        gram=gram,
        duals=duals,
        singular_values=w,
        rank=rank,
        complete=rank == family.dim ** 2,
        rank_tolerance=rank_tolerance,
    )


def coefficients_from_probabilities(frame: TomographyFrame, probabilities) -> np.ndarray:
    """Invert outcome probabilities to the coefficients c_m = (p_m - w_m)/(eps w_m).

    Exact data gives c_m = Tr{S_m rho}. The vector must be normalized within
    1e-8; deviations up to 1e-3 are tolerated with a warning (finite-sample
    frequencies), anything worse is rejected.
    """
    family = frame.family
    if family.epsilon == 0.0:
        raise StrengthZeroNotInvertible("strength-0 statistics are state-independent")
    p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
    if p.size != frame.n_outcomes:
        raise InconsistentProbabilities(
            f"{frame.n_outcomes} outcomes but {p.size} probabilities"
        )
    dev = abs(p.sum() - 1.0)
    if dev > PROBABILITY_SUM_MAX:
        raise InconsistentProbabilities(
            f"probabilities sum to {p.sum()!r}; deviation {dev:.3e} exceeds {PROBABILITY_SUM_MAX:.1e}"
        )
    if dev > PROBABILITY_SUM_WARN:
        warnings.warn(
            f"probability sum deviates by {dev:.3e}; treating as finite-sample data",
            stacklevel=2,
        )
    w = family.scaled_weights
    return (p - w) / (family.epsilon * w)


def reconstruct(frame: TomographyFrame, probabilities) -> np.ndarray:
    """Reconstruct a Hermitian operator from outcome probabilities.

    Exact probabilities of a state rho return rho to within roundoff,
    independently of the family strength. The output is symmetrized but not
    positivity-checked: post-selected or sampled data may reconstruct to
    operators with negative eigenvalues, which is the point.
    """
    if not frame.complete:
        raise FrameIncomplete(
            f"frame rank {frame.rank} < {frame.dim ** 2}; cannot invert", rank=frame.rank
        )
    coeff = coefficients_from_probabilities(frame, probabilities)
    return hermitian_part(np.einsum("m,mij->ij", coeff, frame.duals))


def reconstruct_conditional(frame: TomographyFrame, conditional_probabilities) -> TransientState:
    """Reconstruct the state of a post-selected sub-ensemble.

    Conditional probabilities p(m | f) feed the same linear inversion; the
    result is renormalized to unit trace when within 1e-6 and wrapped with
    its negativity diagnostics.
    """
    mat = reconstruct(frame, conditional_probabilities)
    tr = float(np.trace(mat).real)
    if abs(tr - 1.0) > CONDITIONAL_TRACE_MAX:
        raise BadConditionalData(
            f"conditional statistics reconstruct to trace {tr!r} "
            f"(deviation beyond {CONDITIONAL_TRACE_MAX:.1e}); input is inconsistent"
        )
    return TransientState(mat / tr)
