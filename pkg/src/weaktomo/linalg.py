"""Dense complex-matrix algebra for small Hilbert spaces (d <= ~32).

Operators are plain ``numpy.ndarray`` of complex128. Hermitian inputs are
symmetrized once at the boundary (``as_hermitian``) and kept canonical from
then on; all tolerances below assume entries of order unity, which holds for
states and POVM elements.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EigendecompositionError, NotPositiveSemidefinite

HERMITICITY_ATOL = 1e-10
PSD_CLIP = -1e-10


def as_operator(a: np.ndarray | list) -> np.ndarray:
    """Coerce to a square complex128 matrix with d >= 2."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimensionMismatch("dimension 1 operators are rejected; need d >= 2")
    return m


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A†)/2."""
    return (a + a.conj().T) / 2


def as_hermitian(a: np.ndarray | list, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Validate Hermiticity within ``atol`` and return the exactly symmetrized matrix."""
    m = as_operator(a)
    asym = np.abs(m - m.conj().T).max()
    if asym > atol:
        raise ValueError(f"matrix is not Hermitian: max |A - A†| = {asym:.3e} > {atol:.1e}")
    return hermitian_part(m)


def check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"operand shapes differ: {a.shape} vs {b.shape}")


def eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    Returns (eigenvalues, eigenvectors) with A = V diag(w) V†; the
    reconstruction residual is verified and reported on failure.
    """
    m = hermitian_part(as_operator(a))
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(f"eigensolver did not converge: {exc}") from exc
    residual = float(np.linalg.norm((v * w) @ v.conj().T - m))
    scale = max(1.0, float(np.linalg.norm(m)))
    if residual > 1e-9 * scale:
        raise EigendecompositionError(
            f"eigendecomposition residual {residual:.3e} exceeds tolerance", residual=residual
        )
    return w, v


def sqrt_psd(a: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Eigenvalues in [-1e-10, 0) are clipped to 0; anything lower raises
    NotPositiveSemidefinite.
    """
    w, v = eigh(a)
    if w[0] < PSD_CLIP:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {w[0]:.3e} < {PSD_CLIP:.1e}")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return hermitian_part(root)


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt pairing Re Tr{A B} of two Hermitian operators."""
    a = as_operator(a)
    b = as_operator(b)
    check_same_dim(a, b)
    return float(np.einsum("ij,ji->", a, b).real)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of A - B (both Hermitian)."""
    a = as_operator(a)
    b = as_operator(b)
    check_same_dim(a, b)
    diff = hermitian_part(a - b)
    # canonicalize the overall sign so both argument orders diagonalize the
    # same matrix and symmetry holds exactly, not just to roundoff
    for entry in diff.ravel():
        if entry.real != 0.0:
            diff = diff if entry.real > 0.0 else -diff
            break
        if entry.imag != 0.0:
            diff = diff if entry.imag > 0.0 else -diff
            break
    w = np.linalg.eigvalsh(diff)
    return float(0.5 * np.abs(w).sum())


def negativity(a: np.ndarray) -> tuple[float, float]:
    """(smallest eigenvalue, sum of |negative eigenvalues|) of a Hermitian matrix."""
    w = np.linalg.eigvalsh(hermitian_part(as_operator(a)))
    neg = float(-w[w < 0.0].sum())
    return float(w[0]), neg
