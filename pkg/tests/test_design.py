import math

import numpy as np
import pytest

from pstchain import (analytic_chain, certify_pst, chain_from_spectrum,
                      coupling_family, diagonalize, end_weights, gamma,
                      mirror_symmetry_check, near_uniform_chain, newton_iep,
                      nnn_coupling_family, sequential_storage_chain, target_spectrum,
                      uniform_chain, validate_family)
from pstchain.design import ParametrizedFamily, TargetSpectrum


# --- analytic family ------------------------------------------------------

def test_analytic_two_sites():
    assert analytic_chain(2).couplings == (0.5,)


def test_analytic_four_sites():
    assert np.allclose(analytic_chain(4).couplings, [math.sqrt(3) / 2, 1.0, math.sqrt(3) / 2])


def test_analytic_six_central_coupling():
    assert analytic_chain(6).couplings[2] == pytest.approx(1.5)


def test_analytic_rejects_small_n():
    with pytest.raises(ValueError):
        analytic_chain(1)


@pytest.mark.parametrize("n", [2, 3, 8, 16, 33, 64, 128])
def test_analytic_unit_gap_lattice(n):
    lam = diagonalize(analytic_chain(n)).eigenvalues
    assert np.max(np.abs(np.diff(lam) - 1.0)) < 1e-8


# --- sequential storage ---------------------------------------------------

def test_storage_two_sites():
    spec = sequential_storage_chain(2)
    assert np.allclose(spec.couplings, [1.0])
    assert np.allclose(diagonalize(spec).eigenvalues, [-1.0, 1.0])


def test_storage_three_sites_spectrum():
    spec = sequential_storage_chain(3)
    j1, j2 = spec.couplings
    # oracle: B = 0 three-site chain has eigenvalues 0, +-sqrt(J1^2 + J2^2)
    edge = math.sqrt(j1 ** 2 + j2 ** 2)
    assert edge == pytest.approx(2.0)
    assert np.allclose(diagonalize(spec).eigenvalues, [-2.0, 0.0, 2.0], atol=1e-14)


def test_storage_equal_end_weights():
    for n in (3, 7, 12):
        sd = diagonalize(sequential_storage_chain(n))
        assert np.allclose(sd.eigenvectors[0, :] ** 2, 1.0 / n, atol=1e-9)


def test_storage_input_amplitude_zeros():
    for n in (2, 5, 9, 16):
        sd = diagonalize(sequential_storage_chain(n))
        t_r = math.pi / n
        times = t_r * np.arange(1, n)
        assert np.max(np.abs(gamma(sd, 1, 1, times))) < 1e-9
        assert abs(gamma(sd, 1, 1, math.pi)) == pytest.approx(1.0, abs=1e-9)


# --- spectrum reconstruction ----------------------------------------------

def test_reconstruct_two_levels():
    spec = chain_from_spectrum(target_spectrum([-0.5, 0.5]))
    assert np.allclose(spec.couplings, [0.5])
    assert np.allclose(spec.fields, [0.0, 0.0])


def test_reconstruct_analytic_four():
    spec = chain_from_spectrum(target_spectrum([-1.5, -0.5, 0.5, 1.5]))
    assert np.allclose(spec.couplings, analytic_chain(4).couplings, atol=1e-12)
    assert np.allclose(spec.fields, 0.0, atol=1e-12)


def test_reconstruct_evenly_spaced_three_is_symmetric_chain():
    spec = chain_from_spectrum(target_spectrum([-2.0, 0.0, 2.0]))
    assert np.allclose(spec.couplings, [math.sqrt(2.0), math.sqrt(2.0)], atol=1e-12)
    # distinct from the equal-weight storage chain with the same spectrum
    assert not np.allclose(spec.couplings, sequential_storage_chain(3).couplings)


def test_reconstruction_roundtrip_random_antisymmetric():
    rng = np.random.default_rng(20)
    for _ in range(50):
        n = int(rng.integers(2, 33))
        half = np.sort(rng.uniform(0.05, 3.0, n // 2))
        gaps = np.diff(np.concatenate(([0.0], half)))
        half = np.cumsum(np.maximum(gaps, 6e-3)) + 6e-3 * np.arange(1, n // 2 + 1)
        lam = np.concatenate((-half[::-1], [0.0], half)) if n % 2 else \
            np.concatenate((-half[::-1], half))
        spread = lam[-1] - lam[0]
        spec = chain_from_spectrum(TargetSpectrum(tuple(lam), antisymmetric=True))
        achieved = diagonalize(spec).eigenvalues
        assert np.max(np.abs(achieved - lam)) < 1e-8 * max(1.0, spread)
        assert np.max(np.abs(spec.field_array())) < 1e-9 * spread
        assert np.all(spec.coupling_array() > 0)
        assert mirror_symmetry_check(spec, tol=1e-7 * max(1.0, np.max(spec.coupling_array())))


def _moment_reconstruct(lam, weights):
    """Independent oracle: solve for fields/couplings from the moments
    <1|H^m|1> = sum_n w_n lam_n^m, peeling one new entry per moment order."""
    n = len(lam)
    moments = [float(np.sum(weights * lam ** m)) for m in range(2 * n)]
    fields = []
    couplings = []

    def mu_zero(m):
        t = np.zeros((n, n))
        for i, b in enumerate(fields):
            t[i, i] = b
        for i, j in enumerate(couplings):
            t[i, i + 1] = t[i + 1, i] = j
        v = np.zeros(n)
        v[0] = 1.0
        for _ in range(m):
            v = t @ v
        return v[0]

    for k in range(1, n + 1):
        prod = np.prod(np.array(couplings, dtype=float) ** 2) if couplings else 1.0
        fields.append(0.0)
        fields[-1] = (moments[2 * k - 1] - mu_zero(2 * k - 1)) / prod
        if k < n:
            couplings.append(0.0)
            j_sq = (moments[2 * k] - mu_zero(2 * k)) / prod
            couplings[-1] = math.sqrt(j_sq)
    return np.array(couplings), np.array(fields)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_reconstruction_matches_moment_oracle(n):
    rng = np.random.default_rng(30 + n)
    lam = np.sort(rng.uniform(-1.5, 1.5, n))
    while np.min(np.diff(lam)) < 0.2:
        lam = np.sort(rng.uniform(-1.5, 1.5, n))
    spec = chain_from_spectrum(target_spectrum(lam, antisymmetric=False))
    j_oracle, b_oracle = _moment_reconstruct(lam, end_weights(lam))
    assert np.max(np.abs(spec.coupling_array() - j_oracle)) < 1e-6
    assert np.max(np.abs(spec.field_array() - b_oracle)) < 1e-6


# --- near-uniform design ---------------------------------------------------

def test_near_uniform_two_sites_already_uniform():
    spec, deviation = near_uniform_chain(2, 0.37)
    assert spec == uniform_chain(2)
    assert deviation == 0.0


def test_near_uniform_five_sites():
    spec, deviation = near_uniform_chain(5, 0.5)
    cert = certify_pst(spec)
    assert cert.perfect
    # acceptance is the certificate; the deviation just has to stay modest
    assert deviation < 0.5
    assert np.max(np.abs(spec.field_array())) < 1e-9


def test_near_uniform_31_reproduces_figure_chain():
    spec, deviation = near_uniform_chain(31, 0.5)
    cert = certify_pst(spec)
    assert cert.perfect
    sd = diagonalize(spec)
    assert abs(gamma(sd, 1, 31, cert.t0)) >= 1.0 - 1e-8
    assert deviation < 0.5


def test_near_uniform_deviation_shrinks_with_slack():
    _, dev_tight = near_uniform_chain(8, 0.1)
    _, dev_loose = near_uniform_chain(8, 0.5)
    assert dev_tight <= dev_loose + 1e-12


def test_near_uniform_rejects_bad_slack():
    with pytest.raises(ValueError):
        near_uniform_chain(5, 0.0)
    with pytest.raises(ValueError):
        near_uniform_chain(5, 1.5)


# --- Newton iteration -------------------------------------------------------

def test_newton_reaches_analytic_four_from_uniform():
    target = target_spectrum([-1.5, -0.5, 0.5, 1.5])
    family = coupling_family(4)
    result = newton_iep(family, target, np.ones(3), max_iter=8, tol=1e-10)
    assert result.converged
    assert result.iterations <= 8
    assert np.allclose(np.abs(result.parameters), analytic_chain(4).couplings, atol=1e-8)
    final = diagonalize(family.evaluate(result.parameters)).eigenvalues
    assert np.max(np.abs(final - np.asarray(target.eigenvalues))) <= 1e-10


def test_newton_fixed_point_takes_zero_iterations():
    family = coupling_family(5)
    r0 = np.array([0.7, 1.1, 1.1, 0.7])
    lam = diagonalize(family.evaluate(r0)).eigenvalues
    result = newton_iep(family, target_spectrum(lam, antisymmetric=False), r0)
    assert result.iterations == 0
    assert result.converged


def test_newton_next_nearest_family():
    rng = np.random.default_rng(42)
    family = nnn_coupling_family(5)
    r_star = np.concatenate((rng.uniform(0.8, 1.2, 4), [0.15]))
    lam = diagonalize(family.evaluate(r_star)).eigenvalues
    r0 = r_star + rng.normal(0.0, 1e-2, 5)
    result = newton_iep(family, target_spectrum(lam, antisymmetric=False), r0, tol=1e-9)
    assert result.converged
    final = diagonalize(family.evaluate(result.parameters)).eigenvalues
    assert np.max(np.abs(final - lam)) <= 1e-8
    # the spectrum does not pin the parameters exactly (gauge freedom along
    # the isospectral manifold); recovery is to the order of the perturbation
    assert np.max(np.abs(np.abs(result.parameters) - np.abs(r_star))) < 0.05


def test_newton_quadratic_convergence():
    target = target_spectrum(diagonalize(analytic_chain(8)).eigenvalues, antisymmetric=True)
    result = newton_iep(coupling_family(8), target, np.ones(7), tol=1e-12)
    res = [r for r in result.residuals if r > 1e-13]
    assert result.converged
    # once the error is small, each step squares it (up to a stable constant)
    small = [r for r in res if r < res[0] / 10.0]
    assert len(small) >= 2
    for r_k, r_next in zip(small, small[1:]):
        assert r_next <= 100.0 * r_k ** 2 / small[0] * small[0]  # C fitted at first small step
        assert r_next < 0.1 * r_k


def test_validate_family_catches_wrong_derivative():
    base = coupling_family(3)
    bad = ParametrizedFamily(dimension=3, n_params=2, evaluate=base.evaluate,
                             derivative=lambda r, i: 2.0 * base.derivative(r, i))
    with pytest.raises(ValueError):
        validate_family(bad, np.ones(2))
