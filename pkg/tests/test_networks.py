import math

import numpy as np
import pytest

from pstchain import (ClockProgram, NetworkSpec, amplifier_sim, analytic_chain,
                      chain, clock_computer, diagonalize, hypercube,
                      network_operator, product_network, rescale, star_network,
                      theta_entangler)
from pstchain.networks import (amplifier_dense_check, amplifier_dense_hamiltonian,
                               clock_hamiltonian, star_symmetric_sector,
                               w_phase_rotation, wall_basis_vector)

from oracles import expm_evolve


# --- product lattices ---------------------------------------------------------

def test_product_2x2_equals_hypercube_d2():
    n2 = analytic_chain(2)
    net = product_network(n2, n2)
    cube = hypercube(2)
    assert np.allclose(network_operator(net), network_operator(cube))


def test_product_3x2_corner_transfer_expm_oracle():
    net = product_network(analytic_chain(3), analytic_chain(2))
    op = network_operator(net)
    e = np.zeros(6, dtype=complex)
    e[0] = 1.0  # vertex (1,1)
    out = expm_evolve(op, e, math.pi)
    assert abs(abs(out[5]) - 1.0) < 1e-8  # vertex (3,2)
    # interior transfers mirror as well: (2,1) -> (2,2)
    e = np.zeros(6, dtype=complex)
    e[2] = 1.0
    out = expm_evolve(op, e, math.pi)
    assert abs(abs(out[3]) - 1.0) < 1e-8


def test_product_spectrum_additivity():
    a, b = analytic_chain(3), analytic_chain(4)
    net = product_network(a, b)
    lam_a = diagonalize(a).eigenvalues
    lam_b = diagonalize(b).eigenvalues
    expected = np.sort((lam_a[:, None] + lam_b[None, :]).ravel())
    got = np.sort(np.linalg.eigvalsh(network_operator(net)))
    assert np.max(np.abs(got - expected)) < 1e-10


def test_product_rejects_mismatched_t0():
    fast = rescale(analytic_chain(2), 2.0)  # t0 = pi/2
    with pytest.raises(ValueError):
        product_network(analytic_chain(3), fast)


def test_product_rejects_fields():
    with pytest.raises(ValueError):
        product_network(chain([0.5], [0.1, 0.1]), analytic_chain(2))


# --- hypercube ------------------------------------------------------------------

def test_hypercube_d1_is_two_site_chain():
    net = hypercube(1)
    assert np.allclose(network_operator(net), [[0.0, 0.5], [0.5, 0.0]])


def test_hypercube_d3_antipodal_transfer():
    net = hypercube(3)
    op = network_operator(net)
    e = np.zeros(8, dtype=complex)
    e[0] = 1.0
    out = expm_evolve(op, e, math.pi)
    assert abs(abs(out[7]) - 1.0) < 1e-8


def test_hypercube_cap(monkeypatch):
    monkeypatch.setenv("PST_DENSE_CAP", "4")
    with pytest.raises(ValueError):
        hypercube(5)


# --- star networks -----------------------------------------------------------------

def test_star_single_branch_is_plain_transfer():
    rep = star_network(analytic_chain(4), 1)
    assert rep.w_state_fidelity >= 1.0 - 1e-8
    assert rep.network.n_vertices == 4


def test_star_two_branches_bell():
    rep = star_network(analytic_chain(4), 2)
    assert rep.w_state_fidelity >= 1.0 - 1e-8
    assert np.allclose(np.abs(rep.leaf_amplitudes), 1.0 / math.sqrt(2.0), atol=1e-8)


def test_star_three_branches_w_state_expm_oracle():
    rep = star_network(analytic_chain(2), 3)
    net = rep.network
    assert net.n_vertices == 4
    op = network_operator(net)
    e = np.zeros(4, dtype=complex)
    e[0] = 1.0
    out = expm_evolve(op, e, math.pi)
    assert np.allclose(np.abs(out[1:]), 1.0 / math.sqrt(3.0), atol=1e-8)
    assert abs(out[0]) < 1e-8


def test_star_w_phase_rotation_traps_state():
    m = 3
    rep = star_network(analytic_chain(2), m)
    rotation = w_phase_rotation(m, 1)
    psi = np.zeros(rep.network.n_vertices, dtype=complex)
    psi[1:] = rotation * rep.leaf_amplitudes
    op = network_operator(rep.network)
    for t in (0.7, 2.0, math.pi):
        out = expm_evolve(op, psi, t)
        assert abs(out[0]) < 1e-8  # never couples back to the hub
        overlap = abs(np.vdot(psi, out))
        assert overlap == pytest.approx(1.0, abs=1e-8)  # eigenstate: trapped


def test_star_symmetric_sector_equals_branch():
    branch = analytic_chain(5)
    rep = star_network(branch, 4)
    projected = star_symmetric_sector(rep.network, branch, 4)
    from pstchain import build_h1

    assert np.max(np.abs(projected - build_h1(branch).to_dense())) < 1e-12


# --- theta entangler ------------------------------------------------------------------

def test_theta_quarter_pi_restores_transfer():
    rep = theta_entangler(analytic_chain(5), math.pi / 4.0)
    assert abs(rep.amplitude_first) < 1e-8
    assert abs(abs(rep.amplitude_last) - 1.0) < 1e-8
    # couplings restored exactly: sqrt(2) cos(pi/4) = 1
    op = network_operator(rep.network)
    from pstchain import build_h1

    assert np.max(np.abs(op - build_h1(analytic_chain(5)).to_dense())) < 1e-12


def test_theta_eighth_pi_maximal_entanglement():
    rep = theta_entangler(analytic_chain(5), math.pi / 8.0)
    assert abs(abs(rep.amplitude_first) - 1.0 / math.sqrt(2.0)) < 1e-8
    assert abs(abs(rep.amplitude_last) - 1.0 / math.sqrt(2.0)) < 1e-8
    assert rep.residual_elsewhere < 1e-8


def test_theta_general_angle_amplitudes_and_oracle():
    theta = 0.3
    base = analytic_chain(5)
    rep = theta_entangler(base, theta)
    # sector bookkeeping: amplitudes (cos 2theta, sin 2theta) up to a phase
    assert abs(abs(rep.amplitude_first) - abs(math.cos(2 * theta))) < 1e-8
    assert abs(abs(rep.amplitude_last) - abs(math.sin(2 * theta))) < 1e-8
    norm = abs(rep.amplitude_first) ** 2 + abs(rep.amplitude_last) ** 2
    assert norm == pytest.approx(1.0, abs=1e-10)
    op = network_operator(rep.network)
    e = np.zeros(5, dtype=complex)
    e[0] = 1.0
    out = expm_evolve(op, e, math.pi)
    assert abs(out[0] - rep.amplitude_first) < 1e-8
    assert abs(out[4] - rep.amplitude_last) < 1e-8
    # the two amplitudes share the global phase: their ratio is real positive
    ratio = rep.amplitude_last / rep.amplitude_first
    assert abs(ratio.imag) < 1e-8


def test_theta_rejects_even_chains():
    with pytest.raises(ValueError):
        theta_entangler(analytic_chain(4), math.pi / 8.0)


# --- amplifier ------------------------------------------------------------------

def test_amplifier_analytic_six_peak_and_revival():
    spec = analytic_chain(6)
    t0 = math.pi
    res = amplifier_sim(spec, 1, np.asarray([t0, 2.0 * t0, 3.0 * t0]))
    assert res.target_probability[0] >= 1.0 - 1e-8
    assert abs(res.wall_amplitudes[1, 1]) ** 2 >= 1.0 - 1e-8  # revival of |~1>
    assert res.target_probability[2] >= 1.0 - 1e-8


def test_amplifier_two_site_rabi():
    res = amplifier_sim(np.asarray([1.0]), 1, np.linspace(0.0, 2.0 * math.pi, 9))
    # two-level flopping between walls 1 and 2 at frequency J
    expected = np.sin(np.linspace(0.0, 2.0 * math.pi, 9)) ** 2
    assert np.allclose(res.target_probability, expected, atol=1e-10)


def test_amplifier_wall_basis_matches_dense():
    worst = amplifier_dense_check(analytic_chain(8), 1,
                                  np.linspace(0.0, 2.0 * math.pi, 9))
    assert worst < 1e-9


def test_amplifier_dense_closure():
    # the full Hamiltonian never maps a wall state out of the wall ladder
    j = analytic_chain(6).coupling_array()
    h = amplifier_dense_hamiltonian(j)
    n = 6
    ladder = np.stack([wall_basis_vector(n, w) for w in range(n + 1)])
    for w in range(n + 1):
        image = h @ wall_basis_vector(n, w)
        residue = image - ladder.T @ (ladder.conj() @ image)
        assert np.max(np.abs(residue)) < 1e-12


def test_amplifier_superposition_input():
    spec = analytic_chain(4)
    alpha, beta = 0.6, 0.8
    psi0 = np.zeros(5, dtype=complex)
    psi0[0] = alpha
    psi0[1] = beta
    res = amplifier_sim(spec, psi0, np.asarray([math.pi]))
    # |~0> is stationary; the signal component amplifies fully
    assert abs(res.wall_amplitudes[0, 0]) ** 2 == pytest.approx(alpha ** 2, abs=1e-10)
    assert res.target_probability[0] == pytest.approx(beta ** 2, abs=1e-8)


def test_amplifier_rejects_fields():
    with pytest.raises(ValueError):
        amplifier_sim(chain([1.0, 1.0], [0.2, 0.0, 0.2]), 1, np.asarray([1.0]))


# --- clock computer ------------------------------------------------------------

def test_clock_identity_gates_pure_transfer():
    n = 4
    gates = tuple(np.eye(2, dtype=complex) for _ in range(n - 1))
    psi = np.array([0.6, 0.8j])
    res = clock_computer(ClockProgram(chain=analytic_chain(n), gates=gates), psi)
    assert res.fidelity >= 1.0 - 1e-8
    assert abs(abs(np.vdot(psi, res.output)) - 1.0) < 1e-8
    assert res.dense_verified


def test_clock_two_steps_single_gate_dense_oracle():
    rng = np.random.default_rng(21)
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, _ = np.linalg.qr(z)
    prog = ClockProgram(chain=analytic_chain(2), gates=(q,))
    psi = np.array([1.0, 0.0], dtype=complex)
    res = clock_computer(prog, psi)
    assert res.fidelity >= 1.0 - 1e-8
    assert abs(abs(np.vdot(q @ psi, res.output)) - 1.0) < 1e-8
    # independent dense check
    h = clock_hamiltonian(prog)
    start = np.zeros(4, dtype=complex)
    start[:2] = psi
    out = expm_evolve(h, start, math.pi)
    assert abs(abs(np.vdot(q @ psi, out[2:])) - 1.0) < 1e-8


def test_clock_gate_sequence_composition():
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
    s = np.diag([1.0, 1j])
    gates = (h, s, h)
    psi = np.array([1.0, 0.0], dtype=complex)
    res = clock_computer(ClockProgram(chain=analytic_chain(4), gates=gates), psi)
    target = h @ s @ h @ psi
    assert res.fidelity >= 1.0 - 1e-8
    assert abs(abs(np.vdot(target, res.output)) - 1.0) < 1e-8


def test_clock_random_programs():
    rng = np.random.default_rng(22)
    for _ in range(12):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(2, 5))
        gates = []
        for _ in range(n - 1):
            z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            q, _ = np.linalg.qr(z)
            gates.append(q)
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        res = clock_computer(ClockProgram(chain=analytic_chain(n), gates=tuple(gates)),
                             psi)
        target = psi
        for g in gates:
            target = g @ target
        assert abs(abs(np.vdot(target, res.output)) - 1.0) < 1e-8


def test_clock_rejects_non_unitary_gates():
    with pytest.raises(ValueError):
        ClockProgram(chain=analytic_chain(2), gates=(np.array([[1.0, 0.0], [0.0, 2.0]]),))


def test_network_spec_validation():
    with pytest.raises(ValueError):
        NetworkSpec(n_vertices=2, edges=((0, 2, 1.0),), potentials=(0.0, 0.0), labels={})
    with pytest.raises(ValueError):
        NetworkSpec(n_vertices=2, edges=(), potentials=(0.0,), labels={})
    net = NetworkSpec(n_vertices=2, edges=((0, 1, 1.0 + 0.5j), (0, 1, 2.0)),
                      potentials=(0.0, 0.0), labels={})
    with pytest.raises(ValueError):
        network_operator(net)


def test_complex_phased_network_is_hermitian():
    net = NetworkSpec(n_vertices=3, edges=((0, 1, 1.0j), (1, 2, 1.0)),
                      potentials=(0.0, 0.0, 0.0), labels={})
    op = network_operator(net)
    assert np.max(np.abs(op - op.conj().T)) == 0.0
    sd = diagonalize(op)
    assert sd.eigenvalues.shape == (3,)
