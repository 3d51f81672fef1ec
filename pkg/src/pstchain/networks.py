"""Beyond-1D constructions and Hamiltonian gadgets built from perfect
transfer chains: product lattices and hypercubes, star networks for Bell
and W states, the two-coupling entangler, the domain-wall signal
amplifier, and the clock Hamiltonian that runs a gate sequence by pure
time evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import PstCertificate, certify_pst
from .chain import ChainSpec
from .fermionic import dense_cap, dense_evolve
from .spectral import diagonalize, propagate


@dataclass(frozen=True)
class NetworkSpec:
    """Weighted graph whose one-excitation operator generalizes a chain.

    Edge weights may be complex (phased couplings); Hermiticity is enforced
    when the operator is built. ``labels`` names distinguished vertices
    (0-based indices).
    """

    n_vertices: int
    edges: tuple[tuple[int, int, complex], ...]
    potentials: tuple[float, ...]
    labels: dict

    def __post_init__(self):
        object.__setattr__(self, "edges",
                           tuple((int(u), int(v), complex(w)) for u, v, w in self.edges))
        object.__setattr__(self, "potentials", tuple(float(p) for p in self.potentials))
        if len(self.potentials) != self.n_vertices:
            raise ValueError("need one potential per vertex")
        for u, v, w in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ValueError("edge weights must be finite")


def network_operator(net: NetworkSpec) -> np.ndarray:
    """Hermitian one-excitation matrix of the network."""
    dim = net.n_vertices
    op = np.zeros((dim, dim), dtype=complex)
    op[np.arange(dim), np.arange(dim)] = net.potentials
    for u, v, w in net.edges:
        if op[u, v] != 0 and abs(op[u, v] - w) > 0:
            raise ValueError(f"conflicting duplicate edge ({u}, {v})")
        op[u, v] = w
        op[v, u] = np.conj(w)
    if np.isrealobj(op) or np.max(np.abs(op.imag)) == 0.0:
        return op.real
    return op


def network_to_dict(net: NetworkSpec) -> dict:
    return {
        "n_vertices": net.n_vertices,
        "edges": [{"u": u, "v": v, "re": w.real, "im": w.imag} for u, v, w in net.edges],
        "potentials": list(net.potentials),
        "labels": dict(net.labels),
    }


def chain_network(spec: ChainSpec) -> NetworkSpec:
    """A chain viewed as a path graph."""
    edges = tuple((i, i + 1, complex(j)) for i, j in enumerate(spec.couplings))
    return NetworkSpec(n_vertices=spec.n, edges=edges, potentials=spec.fields,
                       labels={"input": 0, "output": spec.n - 1})


def _require_perfect_zero_field(spec: ChainSpec, who: str) -> PstCertificate:
    if np.max(np.abs(spec.field_array()), initial=0.0) > 1e-12:
        raise ValueError(f"{who} requires zero fields")
    cert = certify_pst(spec)
    if not cert.perfect:
        raise ValueError(f"{who}: chain does not transfer perfectly ({cert.reason})")
    return cert


def _verify_transfer(op: np.ndarray, source: int, target: int, t0: float,
                     what: str) -> complex:
    sd = diagonalize(op)
    e = np.zeros(op.shape[0], dtype=complex)
    e[source] = 1.0
    amp = propagate(sd, e, t0)[target]
    if abs(amp) < 1.0 - 1e-8:
        raise ArithmeticError(f"{what}: transfer verification failed (|amp| = {abs(amp):.12f})")
    return complex(amp)


def product_network(a: ChainSpec, b: ChainSpec) -> NetworkSpec:
    """Grid of two perfect chains sharing a transfer time.

    The two directions evolve independently (the spectrum is the pairwise
    sum), so an excitation at (i, j) reaches the diagonally opposite vertex
    at t0. Vertex (i, j) (0-based) maps to index i * M + j.
    """
    cert_a = _require_perfect_zero_field(a, "product_network")
    cert_b = _require_perfect_zero_field(b, "product_network")
    if abs(cert_a.t0 - cert_b.t0) > 1e-9 * cert_a.t0:
        raise ValueError(f"transfer times differ: {cert_a.t0} vs {cert_b.t0}")
    n, m = a.n, b.n
    edges = []
    for i in range(n - 1):
        for j in range(m):
            edges.append((i * m + j, (i + 1) * m + j, complex(a.couplings[i])))
    for i in range(n):
        for j in range(m - 1):
            edges.append((i * m + j, i * m + j + 1, complex(b.couplings[j])))
    net = NetworkSpec(n_vertices=n * m, edges=tuple(edges),
                      potentials=(0.0,) * (n * m),
                      labels={"input": 0, "output": n * m - 1})
    _verify_transfer(network_operator(net), 0, n * m - 1, cert_a.t0, "product_network")
    return net


def hypercube(d: int) -> NetworkSpec:
    """d-fold product of the two-site chain: a uniformly coupled hypercube
    with all edge weights 1/2 and antipodal transfer at pi."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if d > dense_cap():
        raise ValueError(f"2^{d} vertices exceed the dense cap ({dense_cap()})")
    dim = 1 << d
    edges = []
    for v in range(dim):
        for bit in range(d):
            u = v ^ (1 << bit)
            if u > v:
                edges.append((v, u, 0.5 + 0.0j))
    net = NetworkSpec(n_vertices=dim, edges=tuple(edges), potentials=(0.0,) * dim,
                      labels={"input": 0, "output": dim - 1})
    _verify_transfer(network_operator(net), 0, dim - 1, math.pi, "hypercube")
    return net


@dataclass(frozen=True)
class StarReport:
    network: NetworkSpec
    t0: float
    leaf_amplitudes: np.ndarray
    w_state_fidelity: float


def star_network(branch: ChainSpec, m: int) -> StarReport:
    """M copies of a perfect chain sharing their first spin.

    The shared hub couples to each branch with J_1 / sqrt(M); the symmetric
    sector then reproduces the branch chain exactly, so a hub excitation
    becomes the uniform superposition over the M branch ends at t0 (a Bell
    state for M = 2, a W state in general).
    """
    if m < 1:
        raise ValueError("need at least one branch")
    cert = certify_pst(branch)
    if not cert.perfect:
        raise ValueError(f"branch chain does not transfer perfectly ({cert.reason})")
    n = branch.n
    edges = []
    potentials = [branch.fields[0]]
    ends = []

    def vid(b: int, s: int) -> int:
        # site s (2..n) of branch b; hub is vertex 0
        return 1 + b * (n - 1) + (s - 2)

    for b in range(m):
        edges.append((0, vid(b, 2), complex(branch.couplings[0] / math.sqrt(m))))
        for s in range(2, n):
            edges.append((vid(b, s), vid(b, s + 1), complex(branch.couplings[s - 1])))
        ends.append(vid(b, n))
    for b in range(m):
        for s in range(2, n + 1):
            potentials.append(branch.fields[s - 1])
    net = NetworkSpec(n_vertices=1 + m * (n - 1), edges=tuple(edges),
                      potentials=tuple(potentials),
                      labels={"hub": 0, **{f"end_{b}": e for b, e in enumerate(ends)}})
    op = network_operator(net)
    sd = diagonalize(op)
    e = np.zeros(net.n_vertices, dtype=complex)
    e[0] = 1.0
    final = propagate(sd, e, cert.t0)
    leaf = final[ends]
    w_target = np.full(m, 1.0 / math.sqrt(m))
    fidelity = float(abs(w_target @ leaf) ** 2)
    if fidelity < 1.0 - 1e-8:
        raise ArithmeticError(f"star network W-state verification failed ({fidelity:.12f})")
    return StarReport(network=net, t0=cert.t0, leaf_amplitudes=leaf,
                      w_state_fidelity=fidelity)


def w_phase_rotation(m: int, k: int) -> np.ndarray:
    """Per-leaf phase gates exp(2 pi i k j / M) turning the symmetric W
    output of a star into its k-th phased sibling.

    Applied after the evolution (as instantaneous local rotations). For
    k != 0 on a two-site-branch star the result no longer couples to the
    hub, so it stays trapped on the leaves under further evolution.
    """
    if not 0 <= k < m:
        raise ValueError("k must lie in 0..M-1")
    return np.exp(2j * math.pi * k * np.arange(m) / m)


def star_symmetric_sector(net: NetworkSpec, branch: ChainSpec, m: int) -> np.ndarray:
    """Project the star operator onto the branch-symmetric states; equals
    the branch one-excitation matrix."""
    n = branch.n
    op = network_operator(net)
    dim = net.n_vertices
    basis = np.zeros((dim, n))
    basis[0, 0] = 1.0
    for s in range(2, n + 1):
        for b in range(m):
            basis[1 + b * (n - 1) + (s - 2), s - 1] = 1.0 / math.sqrt(m)
    return basis.T @ op @ basis


@dataclass(frozen=True)
class ThetaEntanglerReport:
    network: NetworkSpec
    t0: float
    theta: float
    amplitude_first: complex
    amplitude_last: complex
    residual_elsewhere: float


def theta_entangler(spec: ChainSpec, theta: float) -> ThetaEntanglerReport:
    """Split the output of an odd perfect chain between its two ends.

    Replacing the two central couplings by sqrt(2) cos(theta) J_N and
    sqrt(2) sin(theta) J_N leaves the symmetric and antisymmetric sector
    chains unchanged, so after t0 an excitation on site 1 ends as
    cos(2 theta) on site 1 plus sin(2 theta) on site 2N+1 (global phase
    aside). theta = pi/4 restores plain transfer; theta = pi/8 leaves a
    maximally entangled pair of ends.
    """
    if spec.n % 2 == 0:
        raise ValueError("the base chain must have odd length")
    if not 0.0 < theta < math.pi / 2.0:
        raise ValueError("theta must lie in (0, pi/2)")
    cert = certify_pst(spec)
    if not cert.perfect:
        raise ValueError(f"base chain does not transfer perfectly ({cert.reason})")
    half = (spec.n - 1) // 2
    j = list(spec.couplings)
    j[half - 1] = math.sqrt(2.0) * math.cos(theta) * spec.couplings[half - 1]
    j[half] = math.sqrt(2.0) * math.sin(theta) * spec.couplings[half]
    edges = tuple((i, i + 1, complex(w)) for i, w in enumerate(j))
    net = NetworkSpec(n_vertices=spec.n, edges=edges, potentials=spec.fields,
                      labels={"input": 0, "output": spec.n - 1})
    op = network_operator(net)
    e = np.zeros(spec.n, dtype=complex)
    e[0] = 1.0
    final = propagate(diagonalize(op), e, cert.t0)
    middle = np.delete(final, [0, spec.n - 1])
    return ThetaEntanglerReport(network=net, t0=cert.t0, theta=theta,
                                amplitude_first=complex(final[0]),
                                amplitude_last=complex(final[-1]),
                                residual_elsewhere=float(np.max(np.abs(middle), initial=0.0)))


# ---------------------------------------------------------------------------
# Signal amplifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplifierResult:
    times: np.ndarray
    wall_amplitudes: np.ndarray    # (len(times), N+1) amplitudes over wall states
    target_probability: np.ndarray
    mean_signal: np.ndarray
    majority_probability: np.ndarray


def _wall_operator(couplings: np.ndarray) -> np.ndarray:
    """Hopping operator on the domain-wall ladder 0..N; the empty state is
    decoupled and the 1..N block is the zero-field chain."""
    n = couplings.size + 1
    op = np.zeros((n + 1, n + 1))
    for i in range(1, n):
        op[i, i + 1] = op[i + 1, i] = couplings[i - 1]
    return op


def amplifier_couplings(spec_or_couplings) -> np.ndarray:
    if isinstance(spec_or_couplings, ChainSpec):
        if np.max(np.abs(spec_or_couplings.field_array()), initial=0.0) > 1e-12:
            raise ValueError("amplifier requires zero fields")
        return spec_or_couplings.coupling_array()
    return np.asarray(spec_or_couplings, dtype=float)


def amplifier_sim(spec_or_couplings, input_state, times) -> AmplifierResult:
    """Evolve the signal-amplifier Hamiltonian in the domain-wall basis.

    Walls |~n> = 1^n 0^(N-n) form a ladder the Hamiltonian hops along with
    the chain couplings, so a one-site signal |~1> grows to the fully
    flipped |~N> at t0. ``input_state`` is a wall index (0..N) or an
    (N+1)-vector of wall amplitudes.
    """
    j = amplifier_couplings(spec_or_couplings)
    n = j.size + 1
    op = _wall_operator(j)
    if np.isscalar(input_state):
        psi0 = np.zeros(n + 1, dtype=complex)
        psi0[int(input_state)] = 1.0
    else:
        psi0 = np.asarray(input_state, dtype=complex)
        if psi0.shape != (n + 1,):
            raise ValueError(f"wall superposition must have length {n + 1}")
    times = np.asarray(times, dtype=float)
    w, u = np.linalg.eigh(op)
    coeff = u.conj().T @ psi0
    amps = np.exp(-1j * np.multiply.outer(times, w)) * coeff[None, :] @ u.T
    probs = np.abs(amps) ** 2
    walls = np.arange(n + 1)
    return AmplifierResult(
        times=times,
        wall_amplitudes=amps,
        target_probability=probs[:, n],
        mean_signal=probs @ walls / n,
        majority_probability=probs[:, walls > n / 2].sum(axis=1),
    )


def amplifier_dense_hamiltonian(spec_or_couplings) -> np.ndarray:
    """Full 2^N matrix of the amplifier Hamiltonian
    sum_n J_n K_{n+1}, K_m = X_m (1 - Z_{m-1} Z_{m+1}) / 2 with Z_{N+1} = 1."""
    j = amplifier_couplings(spec_or_couplings)
    n = j.size + 1
    if n > dense_cap():
        raise ValueError(f"{n} sites exceed the dense cap ({dense_cap()})")
    dim = 1 << n
    h = np.zeros((dim, dim))
    for idx in range(dim):
        bits = [(idx >> (n - 1 - s)) & 1 for s in range(n)]
        for m in range(2, n + 1):  # K_m weighted by J_{m-1}
            zl = 1 - 2 * bits[m - 2]
            zr = 1 - 2 * bits[m] if m < n else 1
            factor = 0.5 * (1 - zl * zr)
            if factor != 0.0:
                jdx = idx ^ (1 << (n - m))
                h[jdx, idx] += j[m - 2] * factor
    if np.max(np.abs(h - h.T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise ArithmeticError("amplifier Hamiltonian failed to come out symmetric")
    return h


def wall_basis_vector(n: int, wall: int) -> np.ndarray:
    """Dense 2^N vector of the wall state 1^wall 0^(N-wall)."""
    psi = np.zeros(1 << n, dtype=complex)
    idx = 0
    for s in range(wall):
        idx |= 1 << (n - 1 - s)
    psi[idx] = 1.0
    return psi


def amplifier_dense_check(spec_or_couplings, input_wall: int, times) -> float:
    """Max deviation between wall-basis evolution and the full 2^N evolution."""
    j = amplifier_couplings(spec_or_couplings)
    n = j.size + 1
    h = amplifier_dense_hamiltonian(j)
    result = amplifier_sim(j, input_wall, times)
    worst = 0.0
    for i, t in enumerate(np.asarray(times, dtype=float)):
        dense = dense_evolve(h, wall_basis_vector(n, input_wall), t)
        for wall in range(n + 1):
            amp = dense @ wall_basis_vector(n, wall).conj()
            worst = max(worst, abs(amp - result.wall_amplitudes[i, wall]))
        # all weight must stay inside the wall ladder
        ladder = sum(abs(dense @ wall_basis_vector(n, wall).conj()) ** 2
                     for wall in range(n + 1))
        worst = max(worst, abs(1.0 - ladder))
    return worst


# ---------------------------------------------------------------------------
# Clock computer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClockProgram:
    """A perfect chain driving a gate list U_1..U_{N-1} on a d-dim register."""

    chain: ChainSpec
    gates: tuple[np.ndarray, ...]

    def __post_init__(self):
        gates = tuple(np.asarray(g, dtype=complex) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        if len(gates) != self.chain.n - 1:
            raise ValueError("need exactly N-1 gates for an N-step clock")
        d = gates[0].shape[0] if gates else 1
        for g in gates:
            if g.shape != (d, d):
                raise ValueError("all gates must act on the same register dimension")
            if np.max(np.abs(g.conj().T @ g - np.eye(d))) > 1e-12:
                raise ValueError("gates must be unitary")

    @property
    def register_dim(self) -> int:
        return self.gates[0].shape[0] if self.gates else 1


@dataclass(frozen=True)
class ClockResult:
    output: np.ndarray
    fidelity: float
    t0: float
    dense_verified: bool


def clock_hamiltonian(prog: ClockProgram) -> np.ndarray:
    """Dense (N d) x (N d) matrix: hopping J_n |n+1><n| tensor U_n plus the
    clock potentials."""
    n = prog.chain.n
    d = prog.register_dim
    h = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        h[i * d:(i + 1) * d, i * d:(i + 1) * d] = prog.chain.fields[i] * np.eye(d)
    for i in range(n - 1):
        block = prog.chain.couplings[i] * prog.gates[i]
        h[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] = block
        h[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = block.conj().T
    return h


def clock_computer(prog: ClockProgram, psi_in) -> ClockResult:
    """Run the gate sequence by evolving |1>_clock tensor psi for t0.

    The clock Hamiltonian is the chain conjugated by W = sum_n |n><n|
    tensor U_{n-1}..U_1, so the fast path propagates the clock amplitudes
    alone and applies the accumulated product. For register sizes up to
    N d = 512 the result is verified against direct dense evolution.
    """
    cert = certify_pst(prog.chain)
    if not cert.perfect:
        raise ValueError(f"clock chain does not transfer perfectly ({cert.reason})")
    psi_in = np.asarray(psi_in, dtype=complex)
    d = prog.register_dim
    if psi_in.shape != (d,) or abs(np.linalg.norm(psi_in) - 1.0) > 1e-10:
        raise ValueError("register input must be a normalized d-vector")
    n = prog.chain.n
    sd = diagonalize(prog.chain)
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    clock_amps = propagate(sd, e1, cert.t0)
    products = [np.eye(d, dtype=complex)]
    for g in prog.gates:
        products.append(g @ products[-1])
    total = np.zeros(n * d, dtype=complex)
    for i in range(n):
        total[i * d:(i + 1) * d] = clock_amps[i] * (products[i] @ psi_in)

    target_reg = products[-1] @ psi_in
    target = np.zeros(n * d, dtype=complex)
    target[(n - 1) * d:] = target_reg
    fidelity = float(abs(np.vdot(target, total)) ** 2)

    dense_verified = False
    if n * d <= 512:
        h = clock_hamiltonian(prog)
        start = np.zeros(n * d, dtype=complex)
        start[:d] = psi_in
        direct = dense_evolve(h, start, cert.t0)
        if np.max(np.abs(direct - total)) > 1e-8:
            raise ArithmeticError("clock fast path disagrees with dense evolution")
        dense_verified = True
    if fidelity < 1.0 - 1e-8:
        raise ArithmeticError(f"clock transfer fidelity too low ({fidelity:.12f})")
    out = total[(n - 1) * d:]
    return ClockResult(output=out / np.linalg.norm(out), fidelity=fidelity,
                       t0=cert.t0, dense_verified=dense_verified)
