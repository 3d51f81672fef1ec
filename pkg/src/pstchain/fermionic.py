"""Multi-excitation dynamics on chains.

The excitation-preserving chain maps onto non-interacting fermions, so a
k-excitation state is a wedge (Slater) combination of single-particle
amplitude vectors and evolves orbital by orbital under the one-excitation
propagator, up to exchange signs. This module carries that calculus, the
2^N brute-force oracle used to validate it, the protocol simulations built
on top (entanglement generation, initialization-free transfer, sequential
storage, entanglement distribution), and the pairing transformation that
diagonalizes general quadratic fermion Hamiltonians, including the
transverse-Ising identification.

Dense-oracle sizes are capped at ``PST_DENSE_CAP`` sites (default 12).

Basis convention for dense 2^N vectors: site 1 is the most significant bit,
so the basis index of a configuration with excited site set S is
``sum(2^(N-s) for s in S)``. Ascending-site ordered creation operators map
onto computational basis states with no extra sign.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .certify import PstCertificate, certify_pst
from .chain import ChainSpec
from .spectral import diagonalize, gamma

DEFAULT_DENSE_CAP = 12


def dense_cap() -> int:
    value = os.environ.get("PST_DENSE_CAP")
    return int(value) if value else DEFAULT_DENSE_CAP


def _check_cap(n: int) -> None:
    cap = dense_cap()
    if n > cap:
        raise ValueError(f"{n} sites exceed the dense oracle cap ({cap})")


def _require_fermionic(spec: ChainSpec) -> None:
    if spec.statistics != "fermionic":
        raise ValueError("operation requires fermionic statistics "
                         "(bosonic excitations carry no exchange signs)")


# ---------------------------------------------------------------------------
# Slater states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlaterState:
    """Antisymmetrized multi-excitation state.

    ``orbitals`` rows are orthonormal single-particle amplitude vectors in
    insertion order; ``coefficient`` carries the wedge norm of the raw
    constructor input together with every accumulated exchange/ordering
    phase. Linearly dependent input collapses to the zero state
    (``coefficient == 0``), the exclusion principle.
    """

    orbitals: np.ndarray  # (k, n) complex
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self):
        self.orbitals.flags.writeable = False

    @property
    def n_sites(self) -> int:
        return self.orbitals.shape[1]

    @property
    def n_orbitals(self) -> int:
        return self.orbitals.shape[0]

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0

    @property
    def norm(self) -> float:
        return abs(self.coefficient)

    @property
    def phase(self) -> complex:
        if self.is_zero:
            raise ValueError("zero state has no phase")
        return self.coefficient / abs(self.coefficient)


def slater_state(vectors, coefficient: complex = 1.0) -> SlaterState:
    """Wedge the given single-particle vectors into a SlaterState.

    Orbitals are orthonormalized by Gram-Schmidt; the removed norms multiply
    into the coefficient, so ``norm**2`` of a two-vector state equals
    ``1 - |<b|a>|^2`` for unit inputs.
    """
    raw = np.array([np.asarray(v, dtype=complex) for v in vectors])
    if raw.ndim != 2:
        raise ValueError("orbitals must share a common length")
    k, n = raw.shape
    if k > n:
        return SlaterState(orbitals=np.zeros((k, n), dtype=complex), coefficient=0.0)
    q = np.zeros((k, n), dtype=complex)
    coef = complex(coefficient)
    for j in range(k):
        v = raw[j]
        for _ in range(2):
            v = v - q[:j].T @ (q[:j].conj() @ v)
        r = np.linalg.norm(v)
        if r <= 1e-12 * max(1.0, np.linalg.norm(raw[j])):
            return SlaterState(orbitals=np.zeros((k, n), dtype=complex), coefficient=0.0)
        q[j] = v / r
        coef *= r
    return SlaterState(orbitals=q, coefficient=coef)


def basis_slater(n: int, sites, coefficient: complex = 1.0) -> SlaterState:
    """Slater state with excitations on the given 1-based sites, in order."""
    vecs = []
    for s in sites:
        e = np.zeros(n, dtype=complex)
        e[s - 1] = 1.0
        vecs.append(e)
    return slater_state(vecs, coefficient)


def sort_to_site_order(state: SlaterState, tol: float = 1e-8) -> tuple[SlaterState, tuple[int, ...]]:
    """Re-sort single-site orbitals into ascending site order.

    Requires every orbital to be supported on one site (within ``tol``).
    Per-orbital phases and the permutation sign move into the coefficient;
    returns the normalized state and the ascending 1-based site labels.
    """
    if state.is_zero:
        raise ValueError("cannot sort the zero state")
    sites = []
    phases = []
    for row in state.orbitals:
        idx = int(np.argmax(np.abs(row)))
        if abs(abs(row[idx]) - 1.0) > tol or np.linalg.norm(np.delete(row, idx)) > tol:
            raise ValueError("orbital is not supported on a single site")
        sites.append(idx)
        phases.append(row[idx])
    order = np.argsort(sites)
    sign = _permutation_sign(order)
    k, n = state.orbitals.shape
    orbitals = np.zeros((k, n), dtype=complex)
    for new, old in enumerate(order):
        orbitals[new, sites[old]] = 1.0
    coef = state.coefficient * sign * np.prod(phases)
    return (SlaterState(orbitals=orbitals, coefficient=coef),
            tuple(sites[o] + 1 for o in order))


def _permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def evolve_slater(spec: ChainSpec, state: SlaterState, t: float) -> SlaterState:
    """Propagate every orbital with the one-excitation propagator.

    Exact for the excitation-preserving chain: overlaps between orbitals are
    preserved, and the exchange structure rides along in the wedge.
    """
    _require_fermionic(spec)
    if state.n_sites != spec.n:
        raise ValueError("orbital length must match the chain")
    if state.is_zero:
        return state
    sd = diagonalize(spec)
    phases = np.exp(-1j * sd.eigenvalues * t)
    v = sd.eigenvectors
    orbitals = (v @ (phases[:, None] * (v.conj().T @ state.orbitals.T))).T
    return SlaterState(orbitals=orbitals, coefficient=state.coefficient)


def slater_to_dense(state: SlaterState) -> np.ndarray:
    """Expand a Slater state into the 2^N computational-basis vector.

    The amplitude on excited-site set S (ascending) is the coefficient times
    the determinant of the orbital components on S.
    """
    n = state.n_sites
    _check_cap(n)
    k = state.n_orbitals
    psi = np.zeros(1 << n, dtype=complex)
    if state.is_zero:
        return psi
    if k == 0:
        psi[0] = state.coefficient
        return psi
    for subset in itertools.combinations(range(n), k):
        amp = np.linalg.det(state.orbitals[:, subset])
        if amp != 0:
            idx = sum(1 << (n - 1 - s) for s in subset)
            psi[idx] = state.coefficient * amp
    return psi


# ---------------------------------------------------------------------------
# Dense 2^N oracle
# ---------------------------------------------------------------------------

def basis_index(n: int, sites) -> int:
    """Index of the configuration with the given 1-based sites excited."""
    return sum(1 << (n - s) for s in sites)


def dense_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Full 2^N matrix of the chain Hamiltonian in the number convention
    (vacuum energy zero, one-excitation block equal to the tridiagonal)."""
    _require_fermionic(spec)
    n = spec.n
    _check_cap(n)
    dim = 1 << n
    h = np.zeros((dim, dim))
    fields = spec.fields
    couplings = spec.couplings
    masks = [1 << (n - 1 - s) for s in range(n)]
    for idx in range(dim):
        diag = 0.0
        for s in range(n):
            if idx & masks[s]:
                diag += fields[s]
        h[idx, idx] = diag
        for b in range(n - 1):
            occ1 = bool(idx & masks[b])
            occ2 = bool(idx & masks[b + 1])
            if occ1 != occ2:
                jdx = idx ^ (masks[b] | masks[b + 1])
                h[idx, jdx] = couplings[b]
    return h


def dense_evolve(spec_or_matrix, psi, t: float) -> np.ndarray:
    """Brute-force evolution by full diagonalization.

    Accepts a chain (its 2^N matrix is built on the fly) or any dense
    Hermitian matrix; norm is preserved to eigensolver accuracy.
    """
    if isinstance(spec_or_matrix, ChainSpec):
        h = dense_hamiltonian(spec_or_matrix)
    else:
        h = np.asarray(spec_or_matrix)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (h.shape[0],):
        raise ValueError("state dimension does not match the Hamiltonian")
    w, u = np.linalg.eigh(h)
    return u @ (np.exp(-1j * w * t) * (u.conj().T @ psi))


def reduced_density_matrix(psi: np.ndarray, keep_sites, n: int) -> np.ndarray:
    """Partial trace of |psi><psi| down to the given 1-based sites."""
    keep = [s - 1 for s in keep_sites]
    tensor = np.asarray(psi, dtype=complex).reshape((2,) * n)
    rest = [a for a in range(n) if a not in keep]
    tensor = np.transpose(tensor, keep + rest)
    mat = tensor.reshape(1 << len(keep), -1)
    return mat @ mat.conj().T


def entanglement_entropy_bits(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits of a density matrix."""
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-15]
    return float(-np.sum(evals * np.log2(evals)))


# ---------------------------------------------------------------------------
# Protocols
# ---------------------------------------------------------------------------

def _require_perfect(spec: ChainSpec) -> PstCertificate:
    cert = certify_pst(spec)
    if not cert.perfect:
        raise ValueError(f"chain does not transfer perfectly: {cert.reason}")
    return cert


@dataclass(frozen=True)
class EntanglementReport:
    t0: float
    end_pair_rho: np.ndarray
    entropy_bits: float
    target_fidelity: float


def entanglement_generation(spec: ChainSpec, t: float | None = None) -> EntanglementReport:
    """Evolve |+> |0..0> |+> for t0 and report the end-pair state.

    The two boundary excitations swap ends; only the doubly-excited
    component picks up the exchange sign, leaving the end pair in the
    maximally entangled state (|00>+|01>+|10>-|11>)/2 up to the local
    arrival phases, which are undone before the fidelity is computed.
    """
    cert = _require_perfect(spec)
    n = spec.n
    _check_cap(n)
    if t is None:
        t = cert.t0
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 0.5
    psi[basis_index(n, [1])] = 0.5
    psi[basis_index(n, [n])] = 0.5
    psi[basis_index(n, [1, n])] = 0.5
    out = dense_evolve(spec, psi, t)
    rho = reduced_density_matrix(out, [1, n], n)
    phase = np.conj(cert.arrival_phase)
    correction = np.kron(np.diag([1.0, phase]), np.diag([1.0, phase]))
    rho_fixed = correction @ rho @ correction.conj().T
    target = 0.5 * np.array([1, 1, 1, -1], dtype=complex)
    fidelity = float(np.real(target.conj() @ rho_fixed @ target))
    entropy = entanglement_entropy_bits(reduced_density_matrix(out, [1], n))
    return EntanglementReport(t0=cert.t0, end_pair_rho=rho,
                              entropy_bits=entropy, target_fidelity=fidelity)


@dataclass(frozen=True)
class InitFreeReport:
    fidelity: float
    fidelity_by_outcome: tuple[float, float]
    outcome_probabilities: tuple[float, float]


def initfree_transfer(spec: ChainSpec, alpha: complex, beta: complex,
                      junk) -> InitFreeReport:
    """Transfer alpha|01> + beta|10> encoded on sites (1, 2) regardless of
    the state of the rest of the chain.

    ``junk`` is a bit string (or sequence) of length N-2 giving the
    excitations on sites 3..N. Both excitation states of the encoding carry
    the same excitation parity, so the exchange phases against the junk
    register are common and the encoded qubit arrives clean on sites
    (N-1, N). Readout measures site N-1 in the X basis and applies Z on
    site N for the minus outcome; both outcomes are decoded and reported.
    """
    cert = _require_perfect(spec)
    n = spec.n
    _check_cap(n)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise ValueError("input amplitudes must be normalized")
    bits = [int(b) for b in junk]
    if len(bits) != n - 2 or any(b not in (0, 1) for b in bits):
        raise ValueError("junk must be a bit string of length n - 2")
    junk_sites = [s + 3 for s, b in enumerate(bits) if b]

    first = np.zeros(n, dtype=complex)
    first[1] = alpha
    first[0] = beta
    vectors = [first] + [_unit(n, s) for s in junk_sites]
    state = evolve_slater(spec, slater_state(vectors), cert.t0)
    psi = slater_to_dense(state)

    # The arrival phase and the exchange sign against the junk register are
    # common to both encoded components, hence global; no correction needed.
    target = np.array([alpha, beta], dtype=complex)
    fids = []
    probs = []
    for outcome in (+1, -1):
        proj = _x_projector(psi, site=n - 1, n=n, outcome=outcome)
        prob = float(np.vdot(proj, proj).real)
        probs.append(prob)
        if prob < 1e-14:
            fids.append(1.0)
            continue
        proj = proj / math.sqrt(prob)
        if outcome == -1:
            proj = _apply_z(proj, site=n, n=n)
        rho = reduced_density_matrix(proj, [n], n)
        fids.append(float(np.real(target.conj() @ rho @ target)))
    return InitFreeReport(fidelity=min(fids), fidelity_by_outcome=tuple(fids),
                          outcome_probabilities=tuple(probs))


def _unit(n: int, site: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[site - 1] = 1.0
    return e


def _x_projector(psi: np.ndarray, site: int, n: int, outcome: int) -> np.ndarray:
    mask = 1 << (n - site)
    idx = np.arange(psi.size)
    flipped = psi[idx ^ mask]
    return 0.5 * (psi + outcome * flipped)


def _apply_z(psi: np.ndarray, site: int, n: int) -> np.ndarray:
    mask = 1 << (n - site)
    signs = np.where(np.arange(psi.size) & mask, -1.0, 1.0)
    return psi * signs


@dataclass(frozen=True)
class StorageSimReport:
    output_state: np.ndarray          # joint state of the k output registers
    cz_pairs: tuple[tuple[int, int], ...]
    z_corrections: tuple[int, ...]    # Z power applied to each register at readout
    readout_steps: tuple[int, ...]    # removal time of each register, in units of t_r
    fidelity_vs_prediction: float
    predicted_state: np.ndarray


def sequential_storage_sim(spec: ChainSpec, inputs, readout_order) -> StorageSimReport:
    """Write qubits onto site 1 at multiples of t_r, read them back at chosen
    revivals, and compare against the controlled-phase prediction.

    ``readout_order`` is "same", "reverse", or a permutation of write
    indices. Removing a qubit applies a controlled phase with every qubit
    still stored that was written later; the revived |1> amplitude carries a
    known sign per full cycle, which the readout undoes (recorded in
    ``z_corrections``). Reverse order therefore returns the inputs exactly,
    and same order applies a controlled phase between every pair.
    """
    n = spec.n
    t_r = math.pi / n
    states = [np.asarray(s, dtype=complex) for s in inputs]
    k = len(states)
    if k == 0 or k > n:
        raise ValueError(f"number of inputs must lie in 1..{n}")
    for s in states:
        if s.shape != (2,) or abs(np.linalg.norm(s) - 1.0) > 1e-10:
            raise ValueError("inputs must be normalized single-qubit states")
    if n + k > 16:
        raise ValueError("joint register exceeds the simulable size")
    _check_cap(n)

    sd = diagonalize(spec)
    revivals = np.abs(gamma(sd, 1, 1, t_r * np.arange(1, n)))
    if np.max(revivals) > 1e-8:
        raise ValueError("chain does not null the input amplitude at multiples of t_r")

    if readout_order == "same":
        order = list(range(k))
    elif readout_order == "reverse":
        order = list(range(k - 1, -1, -1))
    else:
        order = [int(i) for i in readout_order]
        if sorted(order) != list(range(k)):
            raise ValueError("readout_order must be a permutation of the write indices")

    # Joint state: registers (most significant) then chain sites.
    dim_regs = 1 << k
    dim_chain = 1 << n
    joint = np.zeros((dim_regs, dim_chain), dtype=complex)
    joint[0, 0] = 1.0
    for j, s in enumerate(states):
        joint = _write_register(joint, j, s, k)

    w, u = np.linalg.eigh(dense_hamiltonian(spec))
    u_step = u @ (np.exp(-1j * w * t_r)[:, None] * u.conj().T)

    def evolve_steps(m: int) -> None:
        nonlocal joint
        for _ in range(m):
            joint = joint @ u_step.T

    def swap_register(j: int) -> None:
        nonlocal joint
        joint = _swap_reg_site1(joint, j, k, n)

    # Writes: register j swaps onto the (empty) input spin at step j.
    now = 0
    for j in range(k):
        swap_register(j)
        if j < k - 1:
            evolve_steps(1)
            now += 1

    cz_pairs = []
    z_corr = [0] * k
    steps = [0] * k
    remaining = set(range(k))
    for s in order:
        target_step = s + n * (max(now - s, 0) // n + 1)
        evolve_steps(target_step - now)
        now = target_step
        swap_register(s)
        remaining.discard(s)
        periods = (target_step - s) // n
        z_corr[s] = (periods * (n + 1)) % 2
        if z_corr[s]:
            joint = _apply_reg_z(joint, s, k)
        steps[s] = target_step
        for m in remaining:
            if m > s:
                cz_pairs.append((s, m))

    chain_weight = float(np.sum(np.abs(joint[:, 1:]) ** 2))
    if chain_weight > 1e-8:
        raise ArithmeticError("chain failed to empty after all readouts")
    output = joint[:, 0]
    output = output / np.linalg.norm(output)

    predicted = states[0]
    for s in states[1:]:
        predicted = np.kron(predicted, s)
    for (a, b) in cz_pairs:
        predicted = _apply_cz(predicted, a, b, k)
    fidelity = float(abs(np.vdot(predicted, output)) ** 2)
    return StorageSimReport(output_state=output, cz_pairs=tuple(cz_pairs),
                            z_corrections=tuple(z_corr), readout_steps=tuple(steps),
                            fidelity_vs_prediction=fidelity, predicted_state=predicted)


def _write_register(joint: np.ndarray, j: int, state: np.ndarray, k: int) -> np.ndarray:
    """Load a fresh qubit state onto register j (which must hold |0>)."""
    reg = np.arange(joint.shape[0])
    bit = 1 << (k - 1 - j)
    hi = (reg & bit) != 0
    out = np.zeros_like(joint)
    out[~hi] = state[0] * joint[~hi]
    out[hi] = state[1] * joint[reg[hi] ^ bit]
    return out


def _swap_reg_site1(joint: np.ndarray, j: int, k: int, n: int) -> np.ndarray:
    reg_bit = 1 << (k - 1 - j)
    site_bit = 1 << (n - 1)
    regs = np.arange(joint.shape[0])[:, None]
    sites = np.arange(joint.shape[1])[None, :]
    rb = (regs & reg_bit) != 0
    sb = (sites & site_bit) != 0
    swap = rb ^ sb
    src_reg = np.where(swap, regs ^ reg_bit, regs)
    src_site = np.where(swap, sites ^ site_bit, sites)
    return joint[src_reg, src_site]


def _apply_reg_z(joint: np.ndarray, j: int, k: int) -> np.ndarray:
    bit = 1 << (k - 1 - j)
    signs = np.where(np.arange(joint.shape[0]) & bit, -1.0, 1.0)
    return joint * signs[:, None]


def _apply_cz(state: np.ndarray, a: int, b: int, k: int) -> np.ndarray:
    idx = np.arange(state.size)
    both = ((idx >> (k - 1 - a)) & 1) & ((idx >> (k - 1 - b)) & 1)
    return state * np.where(both == 1, -1.0, 1.0)


@dataclass(frozen=True)
class DistributionReport:
    bell_fidelity: float
    t0: float
    arrival_phase: complex


def entanglement_distribution_sim(spec: ChainSpec) -> DistributionReport:
    """Share a Bell pair by sending half of it down the chain.

    An uncoupled ancilla holds the other half; after t0 the receiving site
    (with its known arrival phase undone) is maximally entangled with the
    ancilla. Works in the {vacuum, one-excitation} sector, so any chain
    length is fine.
    """
    cert = _require_perfect(spec)
    fid = bell_fidelity_curve(spec, np.asarray([cert.t0]))[0]
    return DistributionReport(bell_fidelity=float(fid), t0=cert.t0,
                              arrival_phase=cert.arrival_phase)


def bell_fidelity_curve(spec: ChainSpec, times) -> np.ndarray:
    """Best-case Bell fidelity (phase correction allowed) at each time."""
    sd = diagonalize(spec)
    amps = np.abs(gamma(sd, 1, spec.n, np.asarray(times, dtype=float)))
    return ((1.0 + amps) / 2.0) ** 2


# ---------------------------------------------------------------------------
# Bosonic contrast
# ---------------------------------------------------------------------------

def two_boson_transfer(spec: ChainSpec, source_pair, target_pair, t: float) -> complex:
    """Amplitude between normalized two-boson states |i,j> under the
    harmonic-oscillator chain, by direct propagation in the symmetric
    two-excitation subspace.

    With sigma_ij = a_i^dag a_j^dag |0> and |ij> = sigma_ij / sqrt(1+d_ij),
    the chain acts as H sigma_ij = sum_m h_mi sigma_mj + h_mj sigma_im; the
    square-root occupation factors enter through the normalization.
    """
    n = spec.n
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {p: a for a, p in enumerate(pairs)}
    from .chain import build_h1

    h1 = build_h1(spec).to_dense()

    def weight(p):
        return math.sqrt(2.0) if p[0] == p[1] else 1.0

    dim = len(pairs)
    h2 = np.zeros((dim, dim))
    for a, (i, j) in enumerate(pairs):
        for m in range(n):
            for x, y, coef in ((m, j, h1[m, i]), (i, m, h1[m, j])):
                if coef == 0.0:
                    continue
                p = (min(x, y), max(x, y))
                h2[index[p], a] += coef * weight(p) / weight((i, j))
    h2 = 0.5 * (h2 + h2.T)
    w, u = np.linalg.eigh(h2)
    src = index[(min(source_pair) - 1, max(source_pair) - 1)]
    tgt = index[(min(target_pair) - 1, max(target_pair) - 1)]
    vec = np.zeros(dim, dtype=complex)
    vec[src] = 1.0
    evolved = u @ (np.exp(-1j * w * t) * (u.conj().T @ vec))
    return complex(evolved[tgt])


# ---------------------------------------------------------------------------
# Quadratic fermion Hamiltonians
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticFermionHamiltonian:
    """H = sum A_nm a_n^dag a_m + (1/2) sum B_nm (a_n^dag a_m^dag + a_m a_n)
    with A real symmetric and B real antisymmetric."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("A and B must be square matrices of equal size")
        scale = max(1.0, np.max(np.abs(a)), np.max(np.abs(b)))
        if np.max(np.abs(a - a.T)) > 1e-12 * scale:
            raise ValueError("A must be symmetric")
        if np.max(np.abs(b + b.T)) > 1e-12 * scale:
            raise ValueError("B must be antisymmetric")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        self.a.flags.writeable = False
        self.b.flags.writeable = False

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def block_matrix(self) -> np.ndarray:
        """The 2N x 2N pairing matrix [[0, A+B], [A-B, 0]]."""
        n = self.n
        m = np.zeros((2 * n, 2 * n))
        m[:n, n:] = self.a + self.b
        m[n:, :n] = self.a - self.b
        return m


@dataclass(frozen=True)
class BogoliubovModes:
    """Non-negative mode energies with their eta/chi blocks (one row per mode)."""

    energies: np.ndarray
    eta: np.ndarray
    chi: np.ndarray


def bogoliubov_modes(h: QuadraticFermionHamiltonian) -> BogoliubovModes:
    """Diagonalize a quadratic fermion Hamiltonian into paired modes.

    Eigenvectors (eta; chi) of the block matrix come in +/- mu pairs; the
    returned set is the mu >= 0 half. Zero modes are split evenly between
    the halves by combining the eta-only and chi-only kernel vectors, which
    keeps the canonical anticommutation sums exact.
    """
    m = h.block_matrix()
    n = h.n
    lam, vec = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(lam))))
    ztol = 1e-12 * scale
    pos = lam > ztol
    zero = np.abs(lam) <= ztol
    modes = [vec[:, i] for i in np.nonzero(pos)[0]]
    energies = [float(lam[i]) for i in np.nonzero(pos)[0]]
    n_zero = int(np.sum(zero))
    if n_zero:
        kernel = vec[:, zero]
        p = np.concatenate((np.ones(n), -np.ones(n)))
        sym = kernel.T @ (p[:, None] * kernel)
        w, s = np.linalg.eigh(sym)
        rotated = kernel @ s
        eta_like = [rotated[:, i] for i in range(n_zero) if w[i] > 0]
        chi_like = [rotated[:, i] for i in range(n_zero) if w[i] < 0]
        if len(eta_like) != len(chi_like):
            raise ArithmeticError("zero-mode kernel failed to split evenly")
        for ve, vc in zip(eta_like, chi_like):
            modes.append((ve + vc) / math.sqrt(2.0))
            energies.append(0.0)
    if len(modes) != n:
        raise ArithmeticError("mode pairing failed to produce N non-negative modes")
    order = np.argsort(energies, kind="stable")
    eta = np.zeros((n, n))
    chi = np.zeros((n, n))
    mu = np.zeros(n)
    for row, i in enumerate(order):
        v = modes[i]
        e, c = v[:n], v[n:]
        mags = np.abs(e)
        top = mags.max() if mags.max() > 0 else 1.0
        idx = int(np.argmax(mags > 1e-8 * top))
        if e[idx] < 0:
            e, c = -e, -c
        eta[row], chi[row], mu[row] = e, c, energies[i]
    gram_plus = eta @ eta.T + chi @ chi.T
    gram_minus = eta @ eta.T - chi @ chi.T
    if (np.max(np.abs(gram_plus - np.eye(n))) > 1e-10
            or np.max(np.abs(gram_minus)) > 1e-10):
        raise ArithmeticError("modes violate the canonical anticommutation sums")
    return BogoliubovModes(energies=mu, eta=eta, chi=chi)


@dataclass(frozen=True)
class IsingFromPstResult:
    fields: tuple[float, ...]
    couplings: tuple[float, ...]
    quadratic: QuadraticFermionHamiltonian
    t0: float
    transfer_fidelity: float
    arrival_phase: complex


def ising_from_pst(spec: ChainSpec) -> IsingFromPstResult:
    """Fold a perfect 2N-site zero-field chain into a transverse-Ising model.

    With couplings K_1..K_{2N-1}, identify B_n = K_{2n-1} and
    2 J_n = K_{2n}. The pairing block matrix of the resulting quadratic
    Hamiltonian is exactly the 2N-site hopping matrix, so the mode
    a_1^dag (the vector e_1 + e_{N+1}) is carried onto a_N^dag
    (e_N + e_{2N}) in time t0; this is verified by direct block-matrix
    propagation.
    """
    if spec.n % 2 != 0:
        raise ValueError("the source chain must have even length")
    if np.max(np.abs(spec.field_array())) > 1e-12:
        raise ValueError("the source chain must have zero fields")
    cert = _require_perfect(spec)
    n = spec.n // 2
    k = spec.coupling_array()
    fields = k[0::2]
    couplings = k[1::2] / 2.0
    a = np.diag(fields).astype(float)
    bm = np.zeros((n, n))
    if n > 1:
        idx = np.arange(n - 1)
        a[idx, idx + 1] = couplings
        a[idx + 1, idx] = couplings
        bm[idx, idx + 1] = couplings
        bm[idx + 1, idx] = -couplings
    quad = QuadraticFermionHamiltonian(a=a, b=bm)
    m = quad.block_matrix()
    w, u = np.linalg.eigh(m)
    start = np.zeros(2 * n, dtype=complex)
    start[0] = start[n] = 1.0 / math.sqrt(2.0)
    target = np.zeros(2 * n, dtype=complex)
    target[n - 1] = target[2 * n - 1] = 1.0 / math.sqrt(2.0)
    evolved = u @ (np.exp(-1j * w * cert.t0) * (u.conj().T @ start))
    overlap = complex(np.vdot(target, evolved))
    fidelity = abs(overlap) ** 2
    if fidelity < 1.0 - 1e-8:
        raise ArithmeticError(f"mode transfer verification failed ({fidelity:.12f})")
    return IsingFromPstResult(fields=tuple(float(x) for x in fields),
                              couplings=tuple(float(x) for x in couplings),
                              quadratic=quad, t0=cert.t0,
                              transfer_fidelity=float(fidelity),
                              arrival_phase=overlap / abs(overlap))
