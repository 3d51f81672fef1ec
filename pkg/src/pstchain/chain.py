"""Chain data model: XX chains, their single-excitation matrices, and exact
mappings from Heisenberg and harmonic-oscillator models onto the same
tridiagonal operator.

Conventions used throughout the package:

* sites are labelled 1..n, matching couplings ``J_1..J_{n-1}`` and fields
  ``B_1..B_n``;
* ``fields`` are defined as the diagonal entries of the single-excitation
  matrix (the constant identity shift of the underlying spin Hamiltonian is
  dropped);
* a chain with ``statistics="bosonic"`` models a line of coupled harmonic
  oscillators; single-excitation dynamics is identical, and the flag only
  changes multi-excitation semantics (see :mod:`pstchain.fermionic`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import serialize

STATISTICS = ("fermionic", "bosonic")


class ChainFormatError(ValueError):
    """A chain document does not match the expected schema."""


def _finite_floats(values, name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{name} must be finite")
    return out


@dataclass(frozen=True)
class ChainSpec:
    """An open chain of ``n`` sites with couplings J_1..J_{n-1} and fields B_1..B_n.

    A zero coupling is representable but disconnects the chain (and with it
    any hope of end-to-end transfer); it is flagged via
    :attr:`has_zero_coupling`.
    """

    n: int
    couplings: tuple[float, ...]
    fields: tuple[float, ...]
    statistics: str = "fermionic"

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("chain needs at least one site")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "couplings", _finite_floats(self.couplings, "couplings"))
        object.__setattr__(self, "fields", _finite_floats(self.fields, "fields"))
        if len(self.couplings) != n - 1:
            raise ValueError(f"expected {n - 1} couplings, got {len(self.couplings)}")
        if len(self.fields) != n:
            raise ValueError(f"expected {n} fields, got {len(self.fields)}")
        if self.statistics not in STATISTICS:
            raise ValueError(f"statistics must be one of {STATISTICS}")

    @property
    def has_zero_coupling(self) -> bool:
        return any(j == 0.0 for j in self.couplings)

    def coupling_array(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=float)

    def field_array(self) -> np.ndarray:
        return np.asarray(self.fields, dtype=float)


@dataclass(frozen=True)
class SingleExcitationMatrix:
    """Symmetric tridiagonal operator acting on the one-excitation amplitudes."""

    dimension: int
    diagonal: tuple[float, ...]
    offdiagonal: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "diagonal", _finite_floats(self.diagonal, "diagonal"))
        object.__setattr__(self, "offdiagonal", _finite_floats(self.offdiagonal, "offdiagonal"))
        if len(self.diagonal) != self.dimension or len(self.offdiagonal) != self.dimension - 1:
            raise ValueError("inconsistent tridiagonal shape")

    def to_dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diagonal, dtype=float))
        off = np.asarray(self.offdiagonal, dtype=float)
        if self.dimension > 1:
            idx = np.arange(self.dimension - 1)
            m[idx, idx + 1] = off
            m[idx + 1, idx] = off
        return m


@dataclass(frozen=True)
class HeisenbergSpec:
    """Modulated anisotropic Heisenberg chain: couplings J_n, anisotropies
    Delta_n on the ZZ terms, and fields b_n."""

    n: int
    couplings: tuple[float, ...]
    anisotropies: tuple[float, ...]
    fields: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "couplings", _finite_floats(self.couplings, "couplings"))
        object.__setattr__(self, "anisotropies", _finite_floats(self.anisotropies, "anisotropies"))
        object.__setattr__(self, "fields", _finite_floats(self.fields, "fields"))
        if len(self.couplings) != self.n - 1 or len(self.anisotropies) != self.n - 1:
            raise ValueError("couplings and anisotropies must have length n-1")
        if len(self.fields) != self.n:
            raise ValueError("fields must have length n")


@dataclass(frozen=True)
class MirrorReport:
    """Outcome of a mirror-symmetry check with the worst violations found."""

    symmetric: bool
    max_violation: float
    max_coupling_violation: float
    max_field_violation: float

    def __bool__(self) -> bool:
        return self.symmetric


def chain(couplings, fields=None, statistics: str = "fermionic") -> ChainSpec:
    """Convenience constructor; ``fields`` defaults to zero."""
    couplings = tuple(float(j) for j in couplings)
    n = len(couplings) + 1
    if fields is None:
        fields = (0.0,) * n
    return ChainSpec(n=n, couplings=couplings, fields=tuple(float(b) for b in fields),
                     statistics=statistics)


def uniform_chain(n: int, coupling: float = 1.0) -> ChainSpec:
    return chain([coupling] * (n - 1))


def rescale(spec: ChainSpec, kappa: float) -> ChainSpec:
    """Scale all energies by ``kappa``; every transfer time scales as 1/kappa."""
    return replace(spec,
                   couplings=tuple(kappa * j for j in spec.couplings),
                   fields=tuple(kappa * b for b in spec.fields))


def build_h1(spec: ChainSpec) -> SingleExcitationMatrix:
    """Single-excitation matrix of the chain: diagonal B_n, off-diagonal J_n."""
    return SingleExcitationMatrix(dimension=spec.n, diagonal=spec.fields,
                                  offdiagonal=spec.couplings)


def heisenberg_to_h1(h: HeisenbergSpec) -> SingleExcitationMatrix:
    """One-excitation matrix of the anisotropic Heisenberg chain.

    The ZZ terms shift the on-site energies; the effective field is
    ``B_n = b_n - (J_n*Delta_n + J_{n-1}*Delta_{n-1}) / 2`` with the boundary
    convention ``J_0 = J_N = 0``. The off-diagonal part is untouched.
    """
    j = np.asarray(h.couplings, dtype=float)
    d = np.asarray(h.anisotropies, dtype=float)
    b = np.asarray(h.fields, dtype=float)
    jd = np.concatenate(([0.0], j * d, [0.0]))
    eff = b - 0.5 * (jd[1:] + jd[:-1])
    return SingleExcitationMatrix(dimension=h.n, diagonal=tuple(eff),
                                  offdiagonal=h.couplings)


def mirror_symmetry_check(spec: ChainSpec, tol: float | None = None) -> MirrorReport:
    """Check J_n = J_{N-n} and B_n = B_{N+1-n} up to ``tol``.

    Couplings are compared directly (positive-J convention): sign or phase
    differences only alter the arrival phase, so designers emit positive J.
    """
    j = spec.coupling_array()
    b = spec.field_array()
    if tol is None:
        scale = max(1.0, float(np.max(np.abs(j), initial=0.0)),
                    float(np.max(np.abs(b), initial=0.0)))
        tol = 1e-9 * scale
    if tol < 0:
        raise ValueError("tol must be non-negative")
    cv = float(np.max(np.abs(j - j[::-1]), initial=0.0))
    fv = float(np.max(np.abs(b - b[::-1]), initial=0.0))
    worst = max(cv, fv)
    return MirrorReport(symmetric=bool(worst <= tol), max_violation=worst,
                        max_coupling_violation=cv, max_field_violation=fv)


def chain_to_dict(spec: ChainSpec) -> dict:
    return {
        "n": spec.n,
        "couplings": list(spec.couplings),
        "fields": list(spec.fields),
        "statistics": spec.statistics,
    }


def chain_from_dict(doc) -> ChainSpec:
    if not isinstance(doc, dict):
        raise ChainFormatError("chain document must be a JSON object")
    missing = {"n", "couplings", "fields"} - set(doc)
    if missing:
        raise ChainFormatError(f"chain document missing keys: {sorted(missing)}")
    try:
        return ChainSpec(
            n=int(doc["n"]),
            couplings=tuple(float(x) for x in doc["couplings"]),
            fields=tuple(float(x) for x in doc["fields"]),
            statistics=doc.get("statistics", "fermionic"),
        )
    except (TypeError, ValueError) as exc:
        raise ChainFormatError(f"invalid chain document: {exc}") from exc


def read_chain(path) -> ChainSpec:
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ChainFormatError(f"cannot parse chain file {path}: {exc}") from exc
    return chain_from_dict(doc)


def write_chain(spec: ChainSpec, path) -> None:
    Path(path).write_text(serialize.dumps(chain_to_dict(spec)) + "\n", encoding="utf-8")
