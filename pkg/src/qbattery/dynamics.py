"""Exact charging dynamics |psi(t)> = exp(-i H^C t)|psi(0)> and the
observables recorded along a trajectory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import (
    DENSE_THRESHOLD,
    CapabilityError,
    HamiltonianSpec,
    OperatorMatrix,
    commutator,
    realize,
)

DEFAULT_N_STEPS = 400
NORM_TOL = 1e-10


def time_grid(t_max: float, n_steps: int = DEFAULT_N_STEPS) -> np.ndarray:
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    return np.linspace(0.0, float(t_max), int(n_steps))


def _check_state(psi: np.ndarray, dim: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"state of shape {psi.shape} does not match dimension {dim}")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise ValueError("state is not normalized")
    return psi


class Propagator:
    """exp(-i H t) applied through a cached eigendecomposition of H."""

    def __init__(self, hamiltonian: OperatorMatrix):
        if hamiltonian.dim > DENSE_THRESHOLD:
            raise CapabilityError(
                f"exact evolution limited to dimension {DENSE_THRESHOLD} (N <= 12)"
            )
        self.dim = hamiltonian.dim
        self.energies, self.vectors = np.linalg.eigh(hamiltonian.dense())

    def states(self, psi0: np.ndarray, times) -> np.ndarray:
        """Rows are psi(t) for each t."""
        psi0 = _check_state(psi0, self.dim)
        c0 = self.vectors.conj().T @ psi0
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * c0) @ self.vectors.T


def evolve(charger: OperatorMatrix, psi0: np.ndarray, times) -> list[np.ndarray]:
    return list(Propagator(charger).states(psi0, times))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    energies: np.ndarray
    powers: np.ndarray
    powers_fd: np.ndarray
    site_energies: np.ndarray
    half_cut_entropy: np.ndarray
    norms: np.ndarray

    @property
    def max_power(self) -> float:
        return float(np.max(np.abs(self.powers)))

    def average_power(self) -> float:
        return float((self.energies[-1] - self.energies[0]) / (self.times[-1] - self.times[0]))

    def header(self) -> list[str]:
        n = self.site_energies.shape[1]
        return ["t", "E", "P", "P_fd", "entropy"] + [f"e_{i}" for i in range(n)]

    def rows(self):
        for i, t in enumerate(self.times):
            yield [t, self.energies[i], self.powers[i], self.powers_fd[i], self.half_cut_entropy[i], *self.site_energies[i]]


def charging_trajectory(
    battery: OperatorMatrix | HamiltonianSpec,
    charger: OperatorMatrix | HamiltonianSpec,
    psi0: np.ndarray,
    times,
    battery_spec: HamiltonianSpec | None = None,
    cut: int | None = None,
) -> Trajectory:
    """Evolve under the charger and record E(t), P(t) and diagnostics.

    P(t) is the expectation of i[H^C, H^B]; P_fd is the second-order finite
    difference of E(t) and serves as an independent cross-check. Site energies
    and entropy need the battery spec (for the term layout) and N >= 2.
    """
    if isinstance(battery, HamiltonianSpec):
        battery_spec = battery if battery_spec is None else battery_spec
        battery = realize(battery, backend="dense")
    if isinstance(charger, HamiltonianSpec):
        charger = realize(charger, backend="dense")
    if battery.dim != charger.dim:
        raise ValueError("battery and charger dimensions differ")
    times = np.asarray(times, dtype=float)
    states = Propagator(charger).states(psi0, times)
    hb = battery.dense()
    pw = 1j * commutator(charger, battery).dense()
    hb_psi = states @ hb.T
    energies = np.einsum("ti,ti->t", states.conj(), hb_psi)
    powers = np.einsum("ti,ti->t", states.conj(), states @ pw.T)
    if np.max(np.abs(energies.imag), initial=0.0) > 1e-10:
        raise ArithmeticError("energy expectation has an imaginary part")
    energies = energies.real
    powers = powers.real
    powers_fd = np.gradient(energies, times, edge_order=2) if times.size >= 3 else np.full_like(energies, np.nan)
    n = int(round(np.log2(battery.dim)))
    if battery_spec is not None:
        site = _site_energies(battery_spec, states)
    else:
        site = np.zeros((times.size, n))
    if n >= 2:
        c = n // 2 if cut is None else cut
        ent = np.array([half_cut_entropy(s, c) for s in states])
    else:
        # a single site has no bipartition
        ent = np.zeros(times.size)
    return Trajectory(
        times=times,
        energies=energies,
        powers=powers,
        powers_fd=powers_fd,
        site_energies=site,
        half_cut_entropy=ent,
        norms=np.linalg.norm(states, axis=1),
    )


def site_energy_profile(battery: HamiltonianSpec, state: np.ndarray) -> np.ndarray:
    """Per-site energies: each term's expectation split equally over its support."""
    state = _check_state(state, battery.dim)
    return _site_energies(battery, state[None, :])[0]


def _site_energies(battery: HamiltonianSpec, states: np.ndarray) -> np.ndarray:
    out = np.zeros((states.shape[0], battery.n_sites))
    for term in battery.terms:
        h = realize(term, battery.n_sites, backend="sparse").data
        vals = np.einsum("ti,ti->t", states.conj(), (h @ states.T).T).real
        out[:, list(term.support)] += (vals / len(term.support))[:, None]
    return out


def half_cut_entropy(state: np.ndarray, cut: int) -> float:
    """Von Neumann entropy (nats) of the first ``cut`` sites."""
    state = np.asarray(state, dtype=complex)
    n = int(round(np.log2(state.size)))
    if 2**n != state.size:
        raise ValueError("state length is not a power of two")
    if not 1 <= cut < n:
        raise ValueError(f"cut must satisfy 1 <= cut < {n}")
    s = np.linalg.svd(state.reshape(2**cut, 2 ** (n - cut)), compute_uv=False)
    p = s**2
    p = p[p > 1e-14]
    return float(-np.sum(p * np.log(p)))
