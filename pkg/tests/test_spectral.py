import math

import numpy as np
import pytest

from pstchain import (analytic_chain, amplitude_profile, build_h1, chain, diagonalize,
                      gamma, is_degenerate, propagate, uniform_chain)

from oracles import expm_evolve


def test_two_level_eigenvalues():
    sd = diagonalize(chain([0.5]))
    assert np.allclose(sd.eigenvalues, [-0.5, 0.5])


def test_analytic_four_site_spectrum():
    sd = diagonalize(analytic_chain(4))
    assert np.allclose(sd.eigenvalues, [-1.5, -0.5, 0.5, 1.5], atol=1e-13)


def test_uniform_four_site_spectrum_value():
    sd = diagonalize(uniform_chain(4))
    expected = sorted(-2.0 * math.cos(k * math.pi / 5.0) for k in range(1, 5))
    assert np.allclose(sd.eigenvalues, expected, atol=1e-13)
    assert np.allclose(np.abs(sd.eigenvalues), [1.6180339887498949, 0.6180339887498949,
                                                0.6180339887498949, 1.6180339887498949][::1],
                       atol=1e-10)


def test_eigenvector_orthonormality_and_signs():
    rng = np.random.default_rng(3)
    spec = chain(rng.uniform(0.2, 1.4, 15), rng.uniform(-1, 1, 16))
    sd = diagonalize(spec)
    v = sd.eigenvectors
    assert np.max(np.abs(v.T @ v - np.eye(16))) < 1e-12
    for k in range(16):
        col = v[:, k]
        first = col[np.abs(col) > 1e-8 * np.abs(col).max()][0]
        assert first > 0


def test_reconstruction_quality():
    rng = np.random.default_rng(4)
    spec = chain(rng.uniform(0.2, 1.4, 31), rng.uniform(-1, 1, 32))
    m = build_h1(spec).to_dense()
    sd = diagonalize(spec)
    recon = sd.eigenvectors @ np.diag(sd.eigenvalues) @ sd.eigenvectors.T
    assert np.max(np.abs(recon - m)) <= 1e-10 * np.max(np.abs(m))


def test_dense_input_requires_symmetry():
    with pytest.raises(ValueError):
        diagonalize(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_degeneracy_detection():
    # two identical decoupled blocks share their spectrum
    m = np.kron(np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert is_degenerate(diagonalize(m))
    assert not is_degenerate(diagonalize(uniform_chain(5)))


def test_propagate_identity_at_time_zero():
    sd = diagonalize(analytic_chain(5))
    v = np.arange(1.0, 6.0) + 1j
    v = v / np.linalg.norm(v)
    assert np.allclose(propagate(sd, v, 0.0), v, atol=1e-14)


def test_two_level_closed_form():
    sd = diagonalize(chain([0.5]))
    e1 = np.array([1.0, 0.0], dtype=complex)
    for t in (0.3, 1.0, 2.7, math.pi):
        out = propagate(sd, e1, t)
        assert np.allclose(out, [math.cos(t / 2.0), -1j * math.sin(t / 2.0)], atol=1e-12)


def test_analytic_three_site_transfer_at_pi():
    sd = diagonalize(analytic_chain(3))
    e1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    out = propagate(sd, e1, math.pi)
    assert abs(abs(out[2]) - 1.0) < 1e-12
    assert np.max(np.abs(out[:2])) < 1e-12


def test_gamma_self_at_zero():
    sd = diagonalize(uniform_chain(6))
    assert gamma(sd, 2, 2, 0.0) == pytest.approx(1.0)


def test_gamma_analytic_end_amplitude_law():
    for n in (3, 6):
        sd = diagonalize(analytic_chain(n))
        times = np.linspace(0.0, math.pi, 301)
        got = gamma(sd, 1, 1, times)
        assert np.max(np.abs(got - np.cos(times / 2.0) ** (n - 1))) < 1e-12


def test_uniform_four_never_transfers_perfectly():
    sd = diagonalize(uniform_chain(4))
    times = np.arange(0.0, 50.0, 1e-3)
    assert np.max(np.abs(gamma(sd, 1, 4, times))) < 1.0 - 1e-3


def test_gamma_mirror_transpose_symmetry():
    sd = diagonalize(analytic_chain(7))
    times = np.linspace(0.1, 9.0, 40)
    assert np.allclose(gamma(sd, 2, 5, times), gamma(sd, 5, 2, times), atol=1e-12)


def test_unitarity_on_random_chains():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 65))
        spec = chain(rng.uniform(0.2, 1.5, n - 1), rng.uniform(-1.0, 1.0, n))
        sd = diagonalize(spec)
        src = int(rng.integers(1, n + 1))
        for t in rng.uniform(0.0, 30.0, 20):
            profile = amplitude_profile(sd, src, t)
            assert abs(np.vdot(profile, profile).real - 1.0) < 1e-10


def test_spectral_propagation_matches_expm():
    rng = np.random.default_rng(8)
    for n in (3, 9, 16):
        spec = chain(rng.uniform(0.2, 1.5, n - 1), rng.uniform(-1.0, 1.0, n))
        m = build_h1(spec).to_dense()
        sd = diagonalize(spec)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = v / np.linalg.norm(v)
        for t in (0.5, 4.2):
            assert np.max(np.abs(propagate(sd, v, t) - expm_evolve(m, v, t))) < 1e-9


def test_out_of_range_site_raises():
    sd = diagonalize(uniform_chain(3))
    with pytest.raises(ValueError):
        gamma(sd, 0, 3, 1.0)
    with pytest.raises(ValueError):
        gamma(sd, 1, 4, 1.0)
