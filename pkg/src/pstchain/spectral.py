"""Eigendecomposition of single-excitation operators and exact unitary
propagation.

The spectral form ``exp(-i H t) = V exp(-i L t) V^dag`` is exact, so all
transfer amplitudes produced here are limited only by the accuracy of the
eigensolver. Tridiagonal operators take a dedicated fast path; dense
symmetric (or Hermitian, for phased networks) operators fall back to a
general solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .chain import ChainSpec, SingleExcitationMatrix, build_h1

SYMMETRY_TOL = 1e-12
DEGENERACY_RTOL = 1e-9


class DegenerateSpectrumError(ValueError):
    """Raised by operations that require a non-degenerate spectrum."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns.

    The sign convention (first significant component of each eigenvector is
    real positive) makes end amplitudes reproducible across platforms.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.flags.writeable = False
        self.eigenvectors.flags.writeable = False

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    v = vectors.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        mags = np.abs(col)
        top = mags.max()
        idx = int(np.argmax(mags > 1e-8 * top))
        pivot = col[idx]
        if np.iscomplexobj(v):
            v[:, k] = col * (np.conj(pivot) / abs(pivot))
        elif pivot < 0:
            v[:, k] = -col
    return v


def diagonalize(operator) -> SpectralDecomposition:
    """Diagonalize a single-excitation operator.

    Accepts a :class:`SingleExcitationMatrix` (tridiagonal fast path), a
    :class:`ChainSpec`, or a dense symmetric/Hermitian ndarray. The residual
    ``max|M v - lambda v|`` is checked against ``1e-10 * max|M|``.
    """
    if isinstance(operator, ChainSpec):
        operator = build_h1(operator)
    if isinstance(operator, SingleExcitationMatrix):
        diag = np.asarray(operator.diagonal, dtype=float)
        off = np.asarray(operator.offdiagonal, dtype=float)
        if operator.dimension == 1:
            lam = diag.copy()
            vec = np.ones((1, 1))
        else:
            lam, vec = scipy.linalg.eigh_tridiagonal(diag, off)
        dense = operator.to_dense()
    else:
        dense = np.asarray(operator)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError("operator must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(dense))))
        if np.max(np.abs(dense - dense.conj().T)) > SYMMETRY_TOL * scale:
            raise ValueError("operator is not symmetric/Hermitian")
        lam, vec = np.linalg.eigh(dense)
    vec = _fix_signs(vec)
    scale = max(np.max(np.abs(dense)), 1e-300)
    residual = np.max(np.abs(dense @ vec - vec * lam[None, :]))
    if residual > 1e-10 * scale:
        raise ArithmeticError(f"eigendecomposition residual {residual:.3e} too large")
    lam = np.ascontiguousarray(lam, dtype=float)
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=vec)


def degenerate_gaps(sd: SpectralDecomposition, rtol: float = DEGENERACY_RTOL) -> list[int]:
    """Indices i where eigenvalues i and i+1 are closer than rtol * spread."""
    lam = sd.eigenvalues
    spread = lam[-1] - lam[0]
    if spread <= 0:
        return list(range(len(lam) - 1))
    gaps = np.diff(lam)
    return [int(i) for i in np.nonzero(gaps < rtol * spread)[0]]


def is_degenerate(sd: SpectralDecomposition, rtol: float = DEGENERACY_RTOL) -> bool:
    return bool(degenerate_gaps(sd, rtol))


def propagate(sd: SpectralDecomposition, v, t: float) -> np.ndarray:
    """Evolve amplitude vector ``v`` for time ``t``: V exp(-i L t) V^dag v."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (sd.dimension,):
        raise ValueError(f"amplitude vector must have length {sd.dimension}")
    phases = np.exp(-1j * sd.eigenvalues * t)
    vec = sd.eigenvectors
    return vec @ (phases * (vec.conj().T @ v))


def gamma(sd: SpectralDecomposition, source: int, target: int, t):
    """Transfer amplitude <target| exp(-i H t) |source> for 1-based sites.

    ``t`` may be a scalar or an array of times; the return matches its shape.
    """
    n = sd.dimension
    if not (1 <= source <= n and 1 <= target <= n):
        raise ValueError(f"sites must lie in 1..{n}")
    w = sd.eigenvectors[target - 1, :] * np.conj(sd.eigenvectors[source - 1, :])
    t_arr = np.asarray(t, dtype=float)
    out = np.exp(-1j * np.multiply.outer(t_arr, sd.eigenvalues)) @ w
    if t_arr.ndim == 0:
        return complex(out)
    return out


def amplitude_profile(sd: SpectralDecomposition, source: int, t: float) -> np.ndarray:
    """All site amplitudes at time t for an excitation starting on ``source``."""
    e = np.zeros(sd.dimension, dtype=complex)
    e[source - 1] = 1.0
    return propagate(sd, e, t)
