"""Chain designers: the analytic transfer family, the sequential-storage
chain, spectrum-driven inverse-eigenvalue reconstruction, near-uniform
designs, and a Newton iteration for parametrized Hamiltonians.

Designers emit spectra on integer lattices so the natural transfer time is
pi (pi/2 for the storage chain). Callers wanting other time scales rescale
couplings via :func:`pstchain.chain.rescale`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .certify import certify_pst, end_weights
from .chain import ChainSpec, chain, uniform_chain
from .spectral import DegenerateSpectrumError, diagonalize


class ReconstructionError(ValueError):
    """Inverse-eigenvalue reconstruction missed its target tolerance."""


class DesignError(ValueError):
    """A design procedure produced an inadmissible intermediate result."""


class SingularSystemError(RuntimeError):
    """The Newton linear system could not be solved."""


class DivergenceError(RuntimeError):
    """The Newton iteration increased its residual on consecutive steps."""


def analytic_chain(n: int) -> ChainSpec:
    """Couplings J_k = sqrt(k (n-k)) / 2 with zero fields.

    The single-excitation matrix is the angular-momentum x-rotation
    generator for spin (n-1)/2, with unit-spaced spectrum, so transfer is
    perfect at t0 = pi for every n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    k = np.arange(1, n)
    return chain(0.5 * np.sqrt(k * (n - k)))


def sequential_storage_chain(n: int) -> ChainSpec:
    """Non-symmetric chain with equal end weights 1/n and spectrum
    -n+1, -n+3, ..., n-1.

    The input amplitude gamma_1 vanishes at every multiple of t_r = pi/n
    except full revivals at multiples of 2 t0 = pi, so n qubits can be
    stored sequentially through site 1.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    k = np.arange(1, n)
    j_sq = k ** 2 * (n - k) * (n + k) / ((2 * k - 1.0) * (2 * k + 1.0))
    return chain(np.sqrt(j_sq))


STORAGE_T0 = math.pi / 2.0


def storage_cycle_times(n: int) -> tuple[float, float]:
    """(t_r, full cycle 2*t0) for the sequential storage chain."""
    return math.pi / n, 2.0 * STORAGE_T0


@dataclass(frozen=True)
class TargetSpectrum:
    """Strictly ascending target eigenvalues, optionally antisymmetric
    (lambda_n = -lambda_{N+1-n}), which forces zero fields on the result."""

    eigenvalues: tuple[float, ...]
    antisymmetric: bool = False

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", tuple(float(x) for x in lam))
        if lam.size < 2:
            raise ValueError("target spectrum needs at least two eigenvalues")
        if np.any(np.diff(lam) <= 0):
            raise DegenerateSpectrumError("target spectrum must be strictly ascending")
        if self.antisymmetric:
            spread = lam[-1] - lam[0]
            if np.max(np.abs(lam + lam[::-1])) > 1e-12 * spread:
                raise ValueError("spectrum does not satisfy lambda_n = -lambda_{N+1-n}")


def target_spectrum(values, antisymmetric: bool | None = None) -> TargetSpectrum:
    """Build a target spectrum, auto-detecting antisymmetry when unspecified."""
    lam = np.asarray(values, dtype=float)
    if antisymmetric is None:
        spread = lam[-1] - lam[0] if lam.size > 1 else 1.0
        antisymmetric = bool(np.max(np.abs(lam + lam[::-1])) <= 1e-12 * max(spread, 1e-300))
    return TargetSpectrum(eigenvalues=tuple(lam), antisymmetric=antisymmetric)


def _lanczos_from_weights(lam: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi matrix with spectrum ``lam`` and end weights ``w``.

    Three-term recurrence on the diagonal operator seeded with sqrt(w),
    with full reorthogonalization (loss of orthogonality is the known
    failure mode of the bare recursion).
    """
    n = lam.size
    q = np.zeros((n, n))
    q[:, 0] = np.sqrt(w)
    alpha = np.zeros(n)
    beta = np.zeros(n - 1)
    for j in range(n):
        v = lam * q[:, j]
        alpha[j] = q[:, j] @ v
        v = v - alpha[j] * q[:, j]
        if j > 0:
            v = v - beta[j - 1] * q[:, j - 1]
        for _ in range(2):
            v -= q[:, : j + 1] @ (q[:, : j + 1].T @ v)
        if j < n - 1:
            norm = np.linalg.norm(v)
            if norm < 1e-13 * max(1.0, np.max(np.abs(lam))):
                raise ReconstructionError("recurrence broke down (near-degenerate target)")
            beta[j] = norm
            q[:, j + 1] = v / norm
    return alpha, beta


def chain_from_spectrum(target: TargetSpectrum) -> ChainSpec:
    """Unique mirror-symmetric positive-coupling chain with the given spectrum.

    End weights come from the characteristic-polynomial derivative; the
    orthogonal-polynomial recursion then recovers the tridiagonal entries.
    The reconstruction is verified by re-diagonalization before returning.
    """
    lam = np.asarray(target.eigenvalues, dtype=float)
    w = end_weights(lam)
    alpha, beta = _lanczos_from_weights(lam, w)
    spread = lam[-1] - lam[0]
    if target.antisymmetric:
        worst = float(np.max(np.abs(alpha)))
        if worst > 1e-9 * spread:
            raise ReconstructionError(f"fields failed to vanish (max {worst:.3e})")
        alpha = np.zeros_like(alpha)
    result = chain(beta, alpha)
    achieved = diagonalize(result).eigenvalues
    residual = float(np.max(np.abs(achieved - lam)))
    if residual > 1e-8 * max(1.0, spread):
        raise ReconstructionError(f"spectrum residual {residual:.3e} too large")
    return result


def _snap(value: float, parity: int) -> int:
    """Nearest integer of the given parity; ties break toward zero."""
    lo = parity + 2 * math.floor((value - parity) / 2.0)
    hi = lo + 2
    dlo, dhi = value - lo, hi - value
    if abs(dlo - dhi) < 1e-12:
        return lo if abs(lo) <= abs(hi) else hi
    return lo if dlo < dhi else hi


def near_uniform_chain(n: int, slack: float) -> tuple[ChainSpec, float]:
    """Perturb the uniform chain onto the nearest admissible transfer lattice.

    The uniform-chain eigenvalues -2 cos(k pi / (n+1)) move (each by at most
    the lattice unit ``slack * delta``, delta the minimal spacing) onto
    points whose consecutive gaps are odd multiples of the unit. Only the
    upper half is snapped; antisymmetry is restored by reflection so the
    fields vanish. Returns the chain and the largest coupling deviation
    from 1. If the uniform chain already transfers perfectly (n <= 3) it is
    returned unchanged.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < slack <= 1.0:
        raise ValueError("slack must lie in (0, 1]")
    base = uniform_chain(n)
    if certify_pst(base).perfect:
        return base, 0.0
    lam = -2.0 * np.cos(np.arange(1, n + 1) * math.pi / (n + 1))
    delta = float(np.min(np.diff(lam)))
    unit = slack * delta

    half = lam[n // 2 + n % 2:] / unit
    snapped = []
    prev = None
    for j, v in enumerate(half, start=1):
        if n % 2 == 1:
            target = _snap(v, j % 2)
            point = float(target)
        else:
            if j == 1:
                kf = math.floor(v - 0.5)
                k = min((kf, kf + 1),
                        key=lambda c: (abs(v - (c + 0.5)), abs(c + 0.5)))
                anchor = k
            else:
                k = _snap(v - 0.5, (anchor + j - 1) % 2)
            point = k + 0.5
        if prev is not None and point <= prev:
            raise DesignError(
                f"lattice rounding produced a non-monotone spectrum at index {j} "
                f"(slack {slack} too large)")
        if point <= 0:
            raise DesignError(f"lattice rounding collapsed eigenvalue {j} onto the centre")
        snapped.append(point)
        prev = point
    upper = unit * np.asarray(snapped)
    if n % 2 == 1:
        full = np.concatenate((-upper[::-1], [0.0], upper))
    else:
        full = np.concatenate((-upper[::-1], upper))
    result = chain_from_spectrum(TargetSpectrum(tuple(full), antisymmetric=True))
    cert = certify_pst(result)
    if not cert.perfect:
        raise DesignError(f"snapped spectrum failed certification: {cert.reason}")
    deviation = float(np.max(np.abs(result.coupling_array() - 1.0)))
    return result, deviation


@dataclass(frozen=True)
class ParametrizedFamily:
    """Symmetric single-excitation matrix H(r) with analytic derivatives.

    ``evaluate(r)`` returns the matrix, ``derivative(r, i)`` its partial
    with respect to parameter i.
    """

    dimension: int
    n_params: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray, int], np.ndarray]


def coupling_family(n: int) -> ParametrizedFamily:
    """Tridiagonal family parametrized by its n-1 couplings; fields fixed at 0."""

    def evaluate(r: np.ndarray) -> np.ndarray:
        m = np.zeros((n, n))
        idx = np.arange(n - 1)
        m[idx, idx + 1] = r
        m[idx + 1, idx] = r
        return m

    def derivative(r: np.ndarray, i: int) -> np.ndarray:
        m = np.zeros((n, n))
        m[i, i + 1] = 1.0
        m[i + 1, i] = 1.0
        return m

    return ParametrizedFamily(dimension=n, n_params=n - 1,
                              evaluate=evaluate, derivative=derivative)


def nnn_coupling_family(n: int) -> ParametrizedFamily:
    """Couplings plus a single next-nearest coupling between sites 1 and 3."""

    base = coupling_family(n)

    def evaluate(r: np.ndarray) -> np.ndarray:
        m = base.evaluate(r[: n - 1])
        m[0, 2] = m[2, 0] = r[n - 1]
        return m

    def derivative(r: np.ndarray, i: int) -> np.ndarray:
        if i < n - 1:
            return base.derivative(r[: n - 1], i)
        m = np.zeros((n, n))
        m[0, 2] = m[2, 0] = 1.0
        return m

    return ParametrizedFamily(dimension=n, n_params=n,
                              evaluate=evaluate, derivative=derivative)


def validate_family(family: ParametrizedFamily, r0, rng=None,
                    step: float = 1e-6, tol: float = 1e-5) -> None:
    """Check the analytic derivatives against central finite differences."""
    rng = np.random.default_rng(rng)
    r0 = np.asarray(r0, dtype=float)
    for _ in range(3):
        r = r0 + 0.05 * rng.standard_normal(family.n_params)
        for i in range(family.n_params):
            e = np.zeros(family.n_params)
            e[i] = step
            fd = (family.evaluate(r + e) - family.evaluate(r - e)) / (2.0 * step)
            err = np.max(np.abs(fd - family.derivative(r, i)))
            if err > tol:
                raise ValueError(f"derivative {i} fails finite-difference check ({err:.3e})")


@dataclass(frozen=True)
class NewtonResult:
    parameters: np.ndarray
    residuals: tuple[float, ...]
    iterations: int
    converged: bool


def newton_iep(family: ParametrizedFamily, target: TargetSpectrum, r0,
               max_iter: int = 50, tol: float = 1e-10) -> NewtonResult:
    """Newton iteration driving the spectrum of H(r) onto the target.

    Each step solves M dr = b where b holds the eigenvalue errors and
    column i of M is the diagonal of U^T (dH/dr_i) U in the current
    eigenbasis; eigenvector corrections drop out of the diagonal. The
    linear solve is least-squares (mirror-symmetric families are
    rank-deficient but consistent). A step that increases the residual is
    halved up to 10 times; two consecutive increases abort.
    """
    validate_family(family, r0)
    lam_target = np.asarray(target.eigenvalues, dtype=float)
    if lam_target.size != family.dimension:
        raise ValueError("target size must match the family dimension")
    r = np.asarray(r0, dtype=float).copy()
    if r.size != family.n_params:
        raise ValueError("r0 size must match the family parameter count")

    def residual_of(params: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        sd = diagonalize(family.evaluate(params))
        return float(np.max(np.abs(sd.eigenvalues - lam_target))), sd.eigenvalues, sd.eigenvectors

    res, lam, u = residual_of(r)
    history = [res]
    increases = 0
    iterations = 0
    while res > tol and iterations < max_iter:
        b = lam_target - lam
        m = np.empty((family.dimension, family.n_params))
        for i in range(family.n_params):
            m[:, i] = np.einsum("ij,jk,ik->i", u.T, family.derivative(r, i), u.T)
        dr, _, rank, sv = np.linalg.lstsq(m, b, rcond=None)
        if not np.all(np.isfinite(dr)) or rank == 0:
            cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else math.inf
            raise SingularSystemError(f"linear system unusable (cond ~ {cond:.3e})")
        step = dr
        for _ in range(11):
            new_res, new_lam, new_u = residual_of(r + step)
            if new_res < res:
                break
            step = 0.5 * step
        if new_res >= res:
            increases += 1
            if increases >= 2:
                raise DivergenceError(
                    f"residual increased on consecutive steps (stuck at {res:.3e})")
        else:
            increases = 0
        r = r + step
        res, lam, u = new_res, new_lam, new_u
        history.append(res)
        iterations += 1
    return NewtonResult(parameters=r, residuals=tuple(history),
                        iterations=iterations, converged=res <= tol)
