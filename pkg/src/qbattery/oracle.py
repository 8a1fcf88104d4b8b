"""Independent brute-force recomputation of norms, evolution and sandwich norms.

The oracle never touches the bit-mask realization or the cached-eigenbasis
propagator: matrices come from explicit Kronecker products, norms from a full
SVD, time evolution from a Pade matrix exponential, and sandwich norms from
explicit projector matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .dynamics import Propagator, charging_trajectory
from .models import initial_state, parallel_zeeman, transverse_charger
from .pauli import HamiltonianSpec, LocalTerm, commutator, operator_norm, realize, realize_kron
from .spectral import aklh_audit, bin_index
from .zoo import model_zoo

SCOPES = ("norms", "evolution", "sandwich")
TOL = 1e-8
MAX_N = 8


@dataclass
class OracleSummary:
    checks: int = 0
    mismatches: list[str] = field(default_factory=list)
    max_deviation: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def record(self, scope: str, label: str, main: float, oracle: float, tol: float = TOL) -> None:
        self.checks += 1
        dev = abs(main - oracle)
        self.max_deviation[scope] = max(self.max_deviation.get(scope, 0.0), dev)
        if dev > tol * max(1.0, abs(oracle)):
            self.mismatches.append(f"{scope}: {label}: main {main:.15g} vs oracle {oracle:.15g}")

    def to_dict(self) -> dict:
        return {
            "checks": self.checks,
            "passed": self.passed,
            "mismatches": list(self.mismatches),
            "max_deviation": dict(sorted(self.max_deviation.items())),
        }


def naive_norm(a: np.ndarray) -> float:
    return float(np.linalg.svd(a, compute_uv=False)[0]) if a.any() else 0.0


def check_norms(battery: HamiltonianSpec, charger: HamiltonianSpec, name: str, out: OracleSummary) -> None:
    hb, hc = realize(battery), realize(charger)
    kb, kc = realize_kron(battery), realize_kron(charger)
    out.record("norms", f"{name} realize", float(np.max(np.abs(hb.dense() - kb))), 0.0)
    out.record("norms", f"{name} ||H^B||", operator_norm(hb), naive_norm(kb))
    out.record("norms", f"{name} ||H^C||", operator_norm(hc), naive_norm(kc))
    out.record("norms", f"{name} ||[H^C,H^B]||", operator_norm(commutator(hc, hb)), naive_norm(kc @ kb - kb @ kc))


def check_evolution(charger: HamiltonianSpec, psi0: np.ndarray, times, name: str, out: OracleSummary) -> None:
    states = Propagator(realize(charger, backend="dense")).states(psi0, times)
    kc = realize_kron(charger)
    for t, psi in zip(times, states):
        ref = sla.expm(-1j * kc * t) @ psi0
        out.record("evolution", f"{name} t={t:.6g}", float(np.linalg.norm(psi - ref)), 0.0)


def check_rabi(out: OracleSummary, n_points: int = 400) -> None:
    """sigma^z battery, sigma^x charger from |1>: E = -cos 2t, P = 2 sin 2t."""
    times = np.linspace(0.0, np.pi, n_points)
    tr = charging_trajectory(parallel_zeeman(1, 1.0), transverse_charger(1, 1.0), initial_state("all_down", 1), times)
    out.record("evolution", "rabi E(t)", float(np.max(np.abs(tr.energies + np.cos(2 * times)))), 0.0, 1e-10)
    out.record("evolution", "rabi P(t)", float(np.max(np.abs(tr.powers - 2 * np.sin(2 * times)))), 0.0, 1e-10)


def naive_sandwich_table(battery: HamiltonianSpec, charger: HamiltonianSpec, epsilon: float) -> dict:
    kb = realize_kron(battery)
    w, v = np.linalg.eigh(kb)
    bins: dict[int, list[int]] = {}
    for i, e in enumerate(w):
        bins.setdefault(bin_index(float(e), epsilon), []).append(i)
    proj = {m: v[:, idx] @ v[:, idx].conj().T for m, idx in bins.items()}
    table = {}
    for ti, term in enumerate(charger.terms):
        h = realize_kron(HamiltonianSpec(charger.n_sites, [term]))
        for m, pm in proj.items():
            left = pm @ h
            for mp, pmp in proj.items():
                table[(ti, m, mp)] = naive_norm(left @ pmp)
    return table


def check_sandwich(battery: HamiltonianSpec, charger: HamiltonianSpec, epsilon: float, name: str, out: OracleSummary) -> None:
    table = aklh_audit(battery, charger, epsilon)
    ref = naive_sandwich_table(battery, charger, epsilon)
    main = {(e.term_index, e.m, e.m_prime): e.measured for e in table.entries}
    if set(main) != set(ref):
        out.checks += 1
        out.mismatches.append(f"sandwich: {name}: bin pairs differ between main path and oracle")
        return
    for key, val in main.items():
        out.record("sandwich", f"{name} term {key[0]} bins {key[1:]}", val, ref[key])


def check_hand_sandwich(out: OracleSummary) -> None:
    """sigma_1^z + sigma_2^z battery, sigma_1^x probe, eps = 1: entries are 1 iff |m - m'| = 2."""
    battery = parallel_zeeman(2, 1.0)
    probe = HamiltonianSpec(2, [LocalTerm.from_strings([0], [("X", 1.0)])], "x0")
    table = aklh_audit(battery, probe, 1.0)
    for e in table.entries:
        expected = 1.0 if abs(e.m - e.m_prime) == 2 else 0.0
        out.record("sandwich", f"hand table ({e.m},{e.m_prime})", e.measured, expected)


def oracle_check(scopes=SCOPES, n_max: int = MAX_N, epsilon: float = 1.0, n_times: int = 5) -> OracleSummary:
    if n_max > MAX_N:
        raise ValueError(f"oracle limited to N <= {MAX_N}")
    scopes = tuple(scopes)
    bad = set(scopes) - set(SCOPES)
    if bad:
        raise ValueError(f"unknown oracle scope(s) {sorted(bad)}")
    out = OracleSummary()
    for m in model_zoo():
        if m.n_sites > n_max:
            continue
        battery, charger, psi0 = m.build()
        if "norms" in scopes:
            check_norms(battery, charger, m.name, out)
        if "evolution" in scopes:
            check_evolution(charger, psi0, np.linspace(0.0, m.t_max, n_times), m.name, out)
        if "sandwich" in scopes:
            check_sandwich(battery, charger, epsilon, m.name, out)
    if "evolution" in scopes:
        check_rabi(out)
    if "sandwich" in scopes:
        check_hand_sandwich(out)
    return out
