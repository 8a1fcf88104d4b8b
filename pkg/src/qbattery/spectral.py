"""Battery spectra, epsilon-binned spectral projectors and the projector
sandwich audit of local charger terms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .locality import neighborhood, profile
from .pauli import (
    DENSE_THRESHOLD,
    CapabilityError,
    HamiltonianSpec,
    OperatorMatrix,
    is_hermitian,
    operator_norm,
    realize,
)

#: eigenvalues this close to a bin edge belong to the bin starting at that edge
EDGE_SNAP = 1e-9
FLAG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class EnergyBinning:
    epsilon: float
    spectrum: Spectrum
    # bin index -> column indices into spectrum.eigenvectors
    members: dict[int, np.ndarray]

    @property
    def bins(self) -> list[int]:
        return sorted(self.members)

    @property
    def delta_norm_bound(self) -> float:
        return self.epsilon / 2

    def discretized_energy(self, m: int) -> float:
        return (m + 0.5) * self.epsilon

    def basis(self, m: int) -> np.ndarray:
        """Orthonormal columns spanning bin ``m`` (zero columns if unoccupied)."""
        idx = self.members.get(m)
        v = self.spectrum.eigenvectors
        if idx is None:
            return np.zeros((v.shape[0], 0), dtype=v.dtype)
        return v[:, idx]

    def projector(self, m: int) -> np.ndarray:
        b = self.basis(m)
        return b @ b.conj().T

    def discretized_hamiltonian(self) -> np.ndarray:
        """Sum over bins of (m + 1/2) eps times the bin projector."""
        v = self.spectrum.eigenvectors
        e = np.empty(v.shape[1])
        for m, idx in self.members.items():
            e[idx] = self.discretized_energy(m)
        return (v * e) @ v.conj().T


def spectrum(battery: OperatorMatrix) -> Spectrum:
    if battery.dim > DENSE_THRESHOLD:
        raise CapabilityError(
            f"full diagonalization limited to dimension {DENSE_THRESHOLD} (N <= 12); got {battery.dim}"
        )
    if not is_hermitian(battery, atol=1e-10):
        raise ValueError("battery operator is not Hermitian")
    w, v = np.linalg.eigh(battery.dense())
    return Spectrum(w, v)


def bin_index(energy: float, epsilon: float) -> int:
    x = energy / epsilon
    r = round(x)
    if abs(energy - r * epsilon) <= EDGE_SNAP:
        return int(r)
    return int(math.floor(x))


def bin_spectrum(battery: OperatorMatrix | Spectrum, epsilon: float) -> EnergyBinning:
    """Group eigenvectors into half-open bins [m eps, (m+1) eps)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    spec = battery if isinstance(battery, Spectrum) else spectrum(battery)
    groups: dict[int, list[int]] = {}
    for i, e in enumerate(spec.eigenvalues):
        groups.setdefault(bin_index(float(e), epsilon), []).append(i)
    members = {m: np.array(idx) for m, idx in sorted(groups.items())}
    return EnergyBinning(float(epsilon), spec, members)


def sandwich_norm(binning: EnergyBinning, op: OperatorMatrix | np.ndarray, m: int, mp: int) -> float:
    """||Pi_m O Pi_m'|| as the top singular value of the block V_m^dag O V_m'."""
    if m not in binning.members or mp not in binning.members:
        return 0.0
    o = op.dense() if isinstance(op, OperatorMatrix) else np.asarray(op)
    block = binning.basis(m).conj().T @ o @ binning.basis(mp)
    return _block_norm(block)


def sandwich_norm_projected(binning: EnergyBinning, op: OperatorMatrix | np.ndarray, m: int, mp: int) -> float:
    """Same quantity via the full projected matrix; used as a cross-check."""
    if m not in binning.members or mp not in binning.members:
        return 0.0
    o = op.dense() if isinstance(op, OperatorMatrix) else np.asarray(op)
    return operator_norm(OperatorMatrix(binning.projector(m) @ o @ binning.projector(mp)))


def _block_norm(block: np.ndarray) -> float:
    if block.size == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[0])


def aklh_bound(h_norm: float, g: float, q: int, a_value: float, m: int, mp: int, epsilon: float) -> float:
    """Projector-sandwich bound ||h|| exp(-[(|m-m'|-1) eps - 4A] / (2 g q)), capped at ||h||."""
    if not g > 0:
        raise ValueError("g must be positive")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if q < 1:
        raise ValueError("q must be at least 1")
    gap = abs(m - mp) * epsilon - epsilon
    exponent = -(gap - 4 * a_value) / (2 * g * q)
    if exponent >= 0:
        return float(h_norm)
    return float(h_norm * math.exp(exponent))


@dataclass
class SandwichEntry:
    term_index: int
    m: int
    m_prime: int
    measured: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.measured

    @property
    def flagged(self) -> bool:
        return self.measured > self.bound + FLAG_TOL


@dataclass
class SandwichTable:
    operator_label: str
    epsilon: float
    g: float
    q: int
    entries: list[SandwichEntry] = field(default_factory=list)
    a_values: dict[int, float] = field(default_factory=dict)
    term_norms: dict[int, float] = field(default_factory=dict)

    @property
    def flags(self) -> list[SandwichEntry]:
        return [e for e in self.entries if e.flagged]

    def lookup(self, term_index: int, m: int, mp: int) -> SandwichEntry:
        for e in self.entries:
            if (e.term_index, e.m, e.m_prime) == (term_index, m, mp):
                return e
        raise KeyError((term_index, m, mp))

    def rows(self):
        for e in self.entries:
            yield (e.term_index, e.m, e.m_prime, e.measured, e.bound, e.margin, e.flagged)

    def summary(self) -> dict:
        viol = [e.measured - e.bound for e in self.entries]
        return {
            "operator": self.operator_label,
            "epsilon": self.epsilon,
            "g": self.g,
            "q": self.q,
            "n_entries": len(self.entries),
            "n_flagged": len(self.flags),
            "max_violation": max(viol) if viol else 0.0,
            "a_values": {str(k): v for k, v in sorted(self.a_values.items())},
        }


CSV_HEADER = ("term_index", "m", "m_prime", "measured", "bound", "margin", "flagged")


def aklh_audit(
    battery: HamiltonianSpec,
    charger: HamiltonianSpec,
    epsilon: float,
    binning: EnergyBinning | None = None,
) -> SandwichTable:
    """Measure ||Pi_m h_X Pi_m'|| for every charger term and occupied bin pair.

    g and q are taken from the battery's computed profile; A per term from
    the support-intersection neighbourhood.
    """
    if battery.n_sites != charger.n_sites:
        raise ValueError("battery and charger live on different lattices")
    if battery.dim > DENSE_THRESHOLD:
        raise CapabilityError(
            f"aklh audit needs dense diagonalization; max N is 12, got N={battery.n_sites}"
        )
    b_norms = battery.term_norms()
    prof = profile(battery, b_norms)
    if binning is None:
        binning = bin_spectrum(realize(battery, backend="dense"), epsilon)
    table = SandwichTable(charger.label, epsilon, prof.g, prof.locality_degree)
    v = binning.spectrum.eigenvectors
    bins = binning.bins
    for ti, term in enumerate(charger.terms):
        h_norm = term.norm()
        a = neighborhood(battery, charger, ti, b_norms).a_value
        table.a_values[ti] = a
        table.term_norms[ti] = h_norm
        # rotate once into the eigenbasis, then slice blocks
        w = v.conj().T @ realize(term, battery.n_sites, backend="dense").dense() @ v
        for m in bins:
            rows = binning.members[m]
            for mp in bins:
                measured = _block_norm(w[np.ix_(rows, binning.members[mp])])
                bound = aklh_bound(h_norm, prof.g, prof.locality_degree, a, m, mp, epsilon)
                table.entries.append(SandwichEntry(ti, m, mp, measured, bound))
    return table
