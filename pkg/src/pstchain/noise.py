"""Noise analysis: single-kick dephasing in closed form, and the
independent-bath effective model with its weak- and strong-coupling
behavior.

The dephasing model applies independent Z errors with probability p on
every site at one instant during the transfer; the averaged fidelity then
has a closed form in the instantaneous amplitude profile. Continuous
(Lindblad) dephasing is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import certify_pst
from .chain import ChainSpec, build_h1
from .spectral import diagonalize, gamma, propagate


@dataclass(frozen=True)
class DephasingReport:
    p: float
    t: float
    avg_fidelity: float
    lower_bound: float
    upper_bound: float
    gamma_fourth_sum: float

    def __post_init__(self):
        if not (self.lower_bound - 1e-12 <= self.avg_fidelity <= self.upper_bound + 1e-12):
            raise ArithmeticError("average fidelity escaped its bounds")


def dephasing_avg_fidelity(spec: ChainSpec, p: float, t: float) -> DephasingReport:
    """Average transfer fidelity when every site suffers a Z error with
    probability p at time t during an otherwise perfect transfer.

    <F> = 1 - 2p(2-p)/3 + 2p(1-p)/3 * sum_n |gamma_n(t)|^4, bracketed by
    the fully-delocalized (sum = 1/N) and storage (sum = 1) extremes.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    cert = certify_pst(spec)
    if not cert.perfect:
        raise ValueError(f"chain does not transfer perfectly: {cert.reason}")
    if not 0.0 <= t <= cert.t0 + 1e-12:
        raise ValueError("kick time must lie in [0, t0]")
    sd = diagonalize(spec)
    e1 = np.zeros(spec.n, dtype=complex)
    e1[0] = 1.0
    amps = propagate(sd, e1, t)
    s4 = float(np.sum(np.abs(amps) ** 4))
    # single division keeps the p = 0, 1 endpoints exact in floating point
    avg = (3.0 - 2.0 * p * (2.0 - p) + 2.0 * p * (1.0 - p) * s4) / 3.0
    lower = (3.0 - 2.0 * p * (2.0 - p) + 2.0 * p * (1.0 - p) / spec.n) / 3.0
    upper = (3.0 - 2.0 * p) / 3.0
    return DephasingReport(p=p, t=t, avg_fidelity=avg, lower_bound=lower,
                           upper_bound=upper, gamma_fourth_sum=s4)


@dataclass(frozen=True)
class BathSpec:
    """Chain with every site coupled to its own bath.

    A bath of several spins attached to one site acts, within the
    one-excitation sector, like a single effective spin with coupling
    G_n^2 = sum_m (g_m^n)^2; ``raw_couplings`` holds the per-site g lists
    when the collapse is wanted explicitly. The closed-form level formula
    assumes a common G.
    """

    chain: ChainSpec
    coupling: float | None = None
    raw_couplings: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if (self.coupling is None) == (self.raw_couplings is None):
            raise ValueError("give either a common coupling G or raw per-site couplings")
        if self.raw_couplings is not None:
            raw = tuple(tuple(float(g) for g in site) for site in self.raw_couplings)
            if len(raw) != self.chain.n:
                raise ValueError("need one raw coupling list per site")
            object.__setattr__(self, "raw_couplings", raw)
        elif self.coupling < 0:
            raise ValueError("G must be non-negative")

    def effective_couplings(self) -> np.ndarray:
        if self.raw_couplings is not None:
            return np.array([math.sqrt(sum(g * g for g in site))
                             for site in self.raw_couplings])
        return np.full(self.chain.n, float(self.coupling))

    def common_coupling(self) -> float:
        g = self.effective_couplings()
        if np.max(g) - np.min(g) > 1e-9 * max(1.0, np.max(g)):
            raise ValueError("effective bath couplings are not equal across sites")
        return float(g[0])


@dataclass(frozen=True)
class BathModel:
    operator: np.ndarray          # 2N x 2N effective one-excitation operator
    energies: np.ndarray          # ascending spectrum of the operator
    closed_form: np.ndarray       # E_n^k = (lambda_n + (-1)^k sqrt(4G^2+lambda_n^2))/2


def bath_operator(b: BathSpec) -> np.ndarray:
    """Effective 2N-site operator: the chain plus one bath spin per site."""
    n = b.chain.n
    h1 = build_h1(b.chain).to_dense()
    g = b.effective_couplings()
    op = np.zeros((2 * n, 2 * n))
    op[:n, :n] = h1
    op[np.arange(n), n + np.arange(n)] = g
    op[n + np.arange(n), np.arange(n)] = g
    return op


def bath_model(b: BathSpec) -> BathModel:
    """Build the effective operator and check its levels against the
    closed form (valid for a common G)."""
    g = b.common_coupling()
    op = bath_operator(b)
    lam = diagonalize(build_h1(b.chain)).eigenvalues
    disc = np.sqrt(4.0 * g * g + lam ** 2)
    closed = 0.5 * np.stack([lam + disc, lam - disc], axis=1)
    energies = np.sort(np.linalg.eigvalsh(op))
    expected = np.sort(closed.ravel())
    scale = max(1.0, float(np.max(np.abs(expected))))
    if np.max(np.abs(energies - expected)) > 1e-10 * scale:
        raise ArithmeticError("effective-bath spectrum disagrees with the closed form")
    return BathModel(operator=op, energies=energies, closed_form=closed)


@dataclass(frozen=True)
class BathTransferReport:
    times: np.ndarray
    gamma_exact: np.ndarray       # end amplitude of the bath-coupled chain
    gamma_bare: np.ndarray        # end amplitude of the bare chain
    strong_prediction: np.ndarray  # cos(G t) * gamma_bare(t/2)
    max_strong_deviation: float
    max_weak_deviation: float


def bath_transfer_amplitude(b: BathSpec, times) -> BathTransferReport:
    """End-to-end amplitude of the bath-coupled chain over a time grid,
    compared against the bare chain and the strong-coupling prediction
    cos(G t) gamma_N(t/2)."""
    times = np.asarray(times, dtype=float)
    g = b.common_coupling()
    n = b.chain.n
    sd_eff = diagonalize(bath_operator(b))
    sd_bare = diagonalize(build_h1(b.chain))
    exact = gamma(sd_eff, 1, n, times)
    bare = gamma(sd_bare, 1, n, times)
    strong = np.cos(g * times) * gamma(sd_bare, 1, n, times / 2.0)
    return BathTransferReport(
        times=times, gamma_exact=exact, gamma_bare=bare, strong_prediction=strong,
        max_strong_deviation=float(np.max(np.abs(exact - strong))),
        max_weak_deviation=float(np.max(np.abs(exact - bare))),
    )


def raw_bath_operator(spec: ChainSpec, raw_couplings) -> tuple[np.ndarray, list]:
    """One-excitation operator of the chain plus explicit multi-spin baths.

    Returns the operator and the basis labels: system sites first (ints),
    then one ("site", m) tuple per raw bath spin.
    """
    n = spec.n
    raw = [tuple(float(g) for g in site) for site in raw_couplings]
    if len(raw) != n:
        raise ValueError("need one raw coupling list per site")
    labels: list = list(range(1, n + 1))
    for s, site in enumerate(raw, start=1):
        labels.extend((s, m) for m in range(len(site)))
    dim = len(labels)
    op = np.zeros((dim, dim))
    op[:n, :n] = build_h1(spec).to_dense()
    row = n
    for s, site in enumerate(raw):
        for g in site:
            op[s, row] = op[row, s] = g
            row += 1
    return op, labels
