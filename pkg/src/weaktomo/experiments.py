"""Sequential-measurement dynamics, Monte Carlo sampling, and scaling sweeps.

Exact dynamics propagates the state through the measurement operators,
p(m, f) = Tr{P_f M_m rho M_m†}; its f-marginal differs from Tr{P_f rho} by
the O(eps²) back-action. The linearized table instead applies the weak POVM
symmetrically, p(m, f) = Tr{P_f (rho E_m + E_m rho)} / 2, whose f-marginal
is exactly Tr{P_f rho}. Feeding conditional columns of either table through
the tomography frame realizes the operational protocol end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .catalog import ScenarioBundle
from .errors import (
    DimensionMismatch,
    EmptyPostselection,
    SamplingFromQuasiDistribution,
    TooFewSweepPoints,
)
from .linalg import trace_distance
from .povm import (
    EXACT,
    MeasurementOperatorSet,
    StrongPovm,
    _freeze,
    measurement_operators,
)
from .postselect import transient_state
from .states import TransientState, density_matrix
from .tomography import TomographyFrame, build_frame, reconstruct, reconstruct_conditional

NEGATIVE_CELL_TOL = -1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Joint table p(m, f) over weak outcomes (rows) and final outcomes (columns)."""

    probabilities: np.ndarray       # (M, F) real
    mode: str
    weak_labels: tuple[str, ...]
    final_labels: tuple[str, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.shape != (len(self.weak_labels), len(self.final_labels)):
            raise DimensionMismatch(
                f"table shape {p.shape} vs labels ({len(self.weak_labels)}, {len(self.final_labels)})"
            )
        if self.mode == EXACT:
            if p.min() < NEGATIVE_CELL_TOL:
                raise ValueError(f"exact-mode cell {p.min():.3e} below {NEGATIVE_CELL_TOL:.1e}")
            p = np.clip(p, 0.0, None)
            total = p.sum()
            if abs(total - 1.0) > 1e-10:
                raise ValueError(f"exact-mode table sums to {total!r}, not 1 within 1e-10")
        object.__setattr__(self, "probabilities", _freeze(p))

    @property
    def has_negative_cells(self) -> bool:
        return bool(self.probabilities.min() < 0.0)

    def weak_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def final_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=0)

    def conditional_on_final(self, f: int) -> np.ndarray:
        """p(m | f): column f normalized by the final-outcome probability."""
        col = self.probabilities[:, f]
        total = col.sum()
        if total <= 1e-300:
            raise EmptyPostselection(f"final outcome {self.final_labels[f]!r} has zero probability")
        return col / total


@dataclass(frozen=True)
class SampleSummary:
    """Multinomial counts over the joint outcome grid."""

    counts: np.ndarray              # (M, F) integers
    total: int
    seed: int
    weak_labels: tuple[str, ...]
    final_labels: tuple[str, ...]

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if int(c.sum()) != self.total:
            raise ValueError(f"counts sum to {int(c.sum())}, expected {self.total}")
        object.__setattr__(self, "counts", _freeze(c))


@dataclass(frozen=True)
class SweepPoint:
    parameter: float
    error: float
    min_eigenvalue: float
    negativity: float


@dataclass(frozen=True)
class SweepResult:
    """Error metric against a closed-form reference along one swept axis."""

    axis: str                       # "epsilon" or "samples"
    points: tuple[SweepPoint, ...]
    fitted_slope: float
    fit_intercept: float
    fit_range: tuple[float, float]
    mode: str
    scenario: str
    postselect_label: str | None
    fixed_epsilon: float | None = None
    fixed_samples: int | None = None
    repeats: int = 1
    seed: int | None = None


def joint_distribution(
    rho: np.ndarray, weak: MeasurementOperatorSet, final: StrongPovm
) -> JointDistribution:
    """Joint probabilities of a weak outcome followed by a final outcome."""
    rho = density_matrix(rho)
    if weak.operators.shape[1] != rho.shape[0] or final.dim != rho.shape[0]:
        raise DimensionMismatch("state, weak set, and final POVM dimensions differ")
    if weak.mode == EXACT:
        after = np.einsum("mij,jk,mlk->mil", weak.operators, rho, weak.operators.conj())
    else:
        elems = weak.family.elements()
        after = 0.5 * (np.einsum("ij,mjk->mik", rho, elems) + np.einsum("mij,jk->mik", elems, rho))
    table = np.einsum("fij,mji->mf", final.elements, after).real
    return JointDistribution(table, weak.mode, weak.family.labels, final.labels)


def backaction_deficit(
    rho: np.ndarray, weak: MeasurementOperatorSet, final: StrongPovm
) -> float:
    """Max over f of |sum_m p(m, f) - Tr{P_f rho}| under exact dynamics.

    Zero when everything commutes; otherwise quadratic in the strength.
    """
    if weak.mode != EXACT:
        raise ValueError("back-action is a property of the exact dynamics; pass an exact-mode set")
    dist = joint_distribution(rho, weak, final)
    direct = np.einsum("fij,ji->f", final.elements, density_matrix(rho)).real
    return float(np.abs(dist.final_marginal() - direct).max())


def sample(dist: JointDistribution, n: int, seed: int) -> SampleSummary:
    """Multinomial draw of n outcomes over the joint cells, deterministic in seed."""
    p = dist.probabilities
    if p.min() < NEGATIVE_CELL_TOL:
        raise SamplingFromQuasiDistribution(
            f"cell {p.min():.3e} is negative; quasi-distributions cannot be sampled"
        )
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    flat = np.clip(p, 0.0, None).ravel()
    flat = flat / flat.sum()
    counts = rng.generator(seed).multinomial(n, flat).reshape(p.shape)
    return SampleSummary(counts, n, seed, dist.weak_labels, dist.final_labels)


def estimate_transient(summary: SampleSummary, frame: TomographyFrame, f: int | str) -> TransientState:
    """Protocol estimate of a post-selected state from sampled joint counts.

    Conditional frequencies of the post-selected column feed the frame
    inversion; raises EmptyPostselection when the column has no counts.
    """
    if isinstance(f, str):
        f = summary.final_labels.index(f)
    col = summary.counts[:, f].astype(np.float64)
    total = col.sum()
    if total < 1:
        raise EmptyPostselection(
            f"no samples landed in final outcome {summary.final_labels[f]!r}"
        )
    return reconstruct_conditional(frame, col / total)


def fit_loglog(
    xs, ys, fit_range: tuple[float, float] | None = None
) -> tuple[float, float, tuple[float, float]]:
    """Least-squares slope and intercept of log10(y) against log10(x).

    Returns (slope, intercept, (lo, hi)) where the closed interval [lo, hi]
    selects the fitted points.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    lo, hi = fit_range if fit_range is not None else (float(xs.min()), float(xs.max()))
    mask = (xs >= lo) & (xs <= hi)
    if mask.sum() < 4:
        raise TooFewSweepPoints(f"slope fit needs >= 4 points in range, got {int(mask.sum())}")
    if np.any(ys[mask] <= 0.0):
        raise ValueError("log-log fit needs positive error values")
    slope, intercept = np.polyfit(np.log10(xs[mask]), np.log10(ys[mask]), 1)
    return float(slope), float(intercept), (lo, hi)


def _postselect_index(final: StrongPovm, postselect: int | str | None) -> int | None:
    if postselect is None:
        return None
    if isinstance(postselect, str):
        return final.index_of(postselect)
    if not 0 <= postselect < final.n_outcomes:
        raise IndexError(f"final outcome index {postselect} out of range")
    return int(postselect)


def _reference_state(scenario: ScenarioBundle, f: int | None) -> np.ndarray:
    """Closed-form target: the transient state for outcome f, or the input state."""
    if f is None:
        return np.asarray(scenario.initial_state)
    report = transient_state(
        scenario.initial_state, scenario.final.elements[f], label=scenario.final.labels[f]
    )
    return report.transient.matrix


def _estimate_at(
    scenario: ScenarioBundle,
    frame: TomographyFrame,
    mode: str,
    f: int | None,
    n: int | None,
    seed: int | None,
) -> np.ndarray:
    """One protocol run: exact or sampled statistics, optionally post-selected."""
    weak = measurement_operators(frame.family, mode)
    dist = joint_distribution(scenario.initial_state, weak, scenario.final)
    if n is None:
        if f is None:
            return reconstruct(frame, dist.weak_marginal())
        return reconstruct_conditional(frame, dist.conditional_on_final(f)).matrix
    summary = sample(dist, n, seed)
    if f is None:
        freqs = summary.counts.sum(axis=1).astype(np.float64) / summary.total
        return reconstruct(frame, freqs)
    return estimate_transient(summary, frame, f).matrix


def sweep_epsilon(
    scenario: ScenarioBundle,
    epsilons,
    mode: str = EXACT,
    n: int | None = None,
    seed: int | None = None,
    postselect: int | str | None = 0,
    fit_range: tuple[float, float] | None = None,
    rank_tolerance: float = 1e-8,
) -> SweepResult:
    """Reconstruction error against the closed form across measurement strengths.

    Without sampling (n=None) the points isolate the strength-induced bias:
    exact dynamics shows the linear weak-limit bias, linearized dynamics is
    flat at roundoff. With sampling, point k draws from the sub-stream
    derive_stream(seed, k).
    """
    if scenario.final is None:
        raise ValueError("sweeps need a scenario with a final POVM")
    epsilons = sorted(float(e) for e in epsilons)
    if len(epsilons) < 4:
        raise TooFewSweepPoints(f"need >= 4 strengths, got {len(epsilons)}")
    if n is not None and seed is None:
        raise ValueError("sampled sweeps need a seed")
    f = _postselect_index(scenario.final, postselect)
    reference = _reference_state(scenario, f)
    points = []
    for k, eps in enumerate(epsilons):
        bundle = scenario.at_strength(eps)
        frame = build_frame(bundle.family, rank_tolerance)
        point_seed = rng.derive_stream(seed, k) if n is not None else None
        estimate = _estimate_at(bundle, frame, mode, f, n, point_seed)
        err = trace_distance(estimate, reference)
        lo, neg = _spectral_diagnostics(estimate)
        points.append(SweepPoint(eps, err, lo, neg))
    slope, intercept, used_range = fit_loglog(
        [p.parameter for p in points], [max(p.error, 1e-300) for p in points], fit_range
    )
    return SweepResult(
        axis="epsilon",
        points=tuple(points),
        fitted_slope=slope,
        fit_intercept=intercept,
        fit_range=used_range,
        mode=mode,
        scenario=scenario.name,
        postselect_label=scenario.final.labels[f] if f is not None else None,
        fixed_samples=n,
        repeats=1,
        seed=seed,
    )


def sweep_samples(
    scenario: ScenarioBundle,
    epsilon: float,
    ns,
    seed: int,
    repeats: int = 20,
    mode: str = EXACT,
    postselect: int | str | None = 0,
    fit_range: tuple[float, float] | None = None,
    rank_tolerance: float = 1e-8,
) -> SweepResult:
    """RMSE of the sampled protocol across sample counts at fixed strength.

    Point k, repeat r draws from derive_stream(derive_stream(seed, k), r), so
    points and repeats may run in any order or concurrently. The error for
    each point is the root mean square of the trace distances over repeats.
    """
    if scenario.final is None:
        raise ValueError("sweeps need a scenario with a final POVM")
    ns = sorted(int(n) for n in ns)
    if len(ns) < 4:
        raise TooFewSweepPoints(f"need >= 4 sample counts, got {len(ns)}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    bundle = scenario.at_strength(epsilon)
    frame = build_frame(bundle.family, rank_tolerance)
    f = _postselect_index(scenario.final, postselect)
    reference = _reference_state(scenario, f)
    weak = measurement_operators(bundle.family, mode)
    dist = joint_distribution(bundle.initial_state, weak, bundle.final)
    points = []
    for k, n in enumerate(ns):
        point_seed = rng.derive_stream(seed, k)
        sq_errors, lows, negs = [], [], []
        for r in range(repeats):
            summary = sample(dist, n, rng.derive_stream(point_seed, r))
            if f is None:
                freqs = summary.counts.sum(axis=1).astype(np.float64) / summary.total
                estimate = reconstruct(frame, freqs)
            else:
                estimate = estimate_transient(summary, frame, f).matrix
            sq_errors.append(trace_distance(estimate, reference) ** 2)
            lo, neg = _spectral_diagnostics(estimate)
            lows.append(lo)
            negs.append(neg)
        points.append(
            SweepPoint(float(n), float(np.sqrt(np.mean(sq_errors))), float(np.mean(lows)), float(np.mean(negs)))
        )
    slope, intercept, used_range = fit_loglog(
        [p.parameter for p in points], [p.error for p in points], fit_range
    )
    return SweepResult(
        axis="samples",
        points=tuple(points),
        fitted_slope=slope,
        fit_intercept=intercept,
        fit_range=used_range,
        mode=mode,
        scenario=scenario.name,
        postselect_label=scenario.final.labels[f] if f is not None else None,
        fixed_epsilon=float(epsilon),
        repeats=repeats,
        seed=seed,
    )


def _spectral_diagnostics(matrix: np.ndarray) -> tuple[float, float]:
    w = np.linalg.eigvalsh(matrix)
    return float(w[0]), float(-w[w < 0.0].sum())
