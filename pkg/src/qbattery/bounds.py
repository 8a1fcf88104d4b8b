"""Charging-power bounds and their comparison against exact dynamics.

Three bounds are evaluated for a battery H^B and charger H^C:

* the commutator norm ||[H^C, H^B]|| and its trivial relaxation
  2 ||H^C|| ||H^B||;
* 12 g k ||H^C|| for a non-interacting (q = 1) battery;
* 12 g k q ||H^C|| in general,

with g the battery's extensivity constant, k the charger's locality degree
and q the battery's locality degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, charging_trajectory
from .locality import profile
from .pauli import (
    DENSE_THRESHOLD,
    CapabilityError,
    HamiltonianSpec,
    OperatorMatrix,
    commutator,
    operator_norm,
    realize,
)

MEASURED_TOL = 1e-8
CHAIN_TOL = 1e-9
PROP_CONSTANT = 12.0


def trivial_bound(battery: OperatorMatrix, charger: OperatorMatrix) -> float:
    return 2.0 * operator_norm(charger) * operator_norm(battery)


def prop_bounds(battery: HamiltonianSpec, charger: HamiltonianSpec, charger_norm: float | None = None):
    """Return ``(prop1, prop2)``; prop1 is None unless the battery is 1-local."""
    pb = profile(battery)
    k = profile(charger).locality_degree
    q = pb.locality_degree
    if charger_norm is None:
        charger_norm = operator_norm(realize(charger))
    prop2 = PROP_CONSTANT * pb.g * k * q * charger_norm
    prop1 = PROP_CONSTANT * pb.g * k * charger_norm if q == 1 else None
    return prop1, prop2


@dataclass
class BoundReport:
    model: str
    n_sites: int
    g: float
    k: int
    q: int
    charger_norm: float
    battery_norm: float
    measured_max_power: float
    commutator_norm_bound: float
    trivial_bound: float
    prop1_bound: float | None
    prop2_bound: float
    params: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def bounds(self) -> dict[str, float]:
        out = {
            "commutator_norm": self.commutator_norm_bound,
            "trivial": self.trivial_bound,
            "prop2": self.prop2_bound,
        }
        if self.prop1_bound is not None:
            out["prop1"] = self.prop1_bound
        return out

    @property
    def margins(self) -> dict[str, float]:
        return {k: v - self.measured_max_power for k, v in self.bounds.items()}

    def check(self) -> list[str]:
        """Recompute the violation list from the stored numbers."""
        found = []
        m = self.measured_max_power
        if m > self.commutator_norm_bound + MEASURED_TOL:
            found.append(f"measured power {m:.12g} exceeds ||[H^C,H^B]|| = {self.commutator_norm_bound:.12g}")
        if self.commutator_norm_bound > self.trivial_bound + CHAIN_TOL:
            found.append(
                f"||[H^C,H^B]|| = {self.commutator_norm_bound:.12g} exceeds 2||H^C||||H^B|| = {self.trivial_bound:.12g}"
            )
        if m > self.prop2_bound + MEASURED_TOL:
            found.append(f"measured power {m:.12g} exceeds 12gkq||H^C|| = {self.prop2_bound:.12g}")
        if self.prop1_bound is not None and m > self.prop1_bound + MEASURED_TOL:
            found.append(f"measured power {m:.12g} exceeds 12gk||H^C|| = {self.prop1_bound:.12g}")
        for name, b in self.bounds.items():
            if b < 0:
                found.append(f"bound {name} is negative")
        return found

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "N": self.n_sites,
            "params": self.params,
            "g": self.g,
            "k": self.k,
            "q": self.q,
            "norms": {"charger": self.charger_norm, "battery": self.battery_norm},
            "bounds": self.bounds,
            "measured": self.measured_max_power,
            "margins": self.margins,
            "violations": list(self.violations),
        }


def bound_report(
    battery: HamiltonianSpec,
    charger: HamiltonianSpec,
    psi0: np.ndarray,
    times,
    model: str = "",
    params: dict | None = None,
) -> BoundReport:
    """Run the charging trajectory and compare its peak power with every bound.

    The measured value is the maximum of |P(t)| over the supplied grid, a lower
    estimate of the true supremum.
    """
    if battery.n_sites != charger.n_sites:
        raise ValueError("battery and charger live on different lattices")
    if battery.dim > DENSE_THRESHOLD:
        raise CapabilityError(
            f"bound report needs dense linear algebra; max N is 12, got N={battery.n_sites}"
        )
    hb = realize(battery, backend="dense")
    hc = realize(charger, backend="dense")
    traj = charging_trajectory(hb, hc, psi0, times, battery_spec=battery)
    nb = operator_norm(hb)
    nc = operator_norm(hc)
    comm = operator_norm(commutator(hc, hb))
    pb = profile(battery)
    pc = profile(charger)
    prop1, prop2 = prop_bounds(battery, charger, nc)
    rep = BoundReport(
        model=model or f"{battery.label}|{charger.label}",
        n_sites=battery.n_sites,
        g=pb.g,
        k=pc.locality_degree,
        q=pb.locality_degree,
        charger_norm=nc,
        battery_norm=nb,
        measured_max_power=traj.max_power,
        commutator_norm_bound=comm,
        trivial_bound=2.0 * nc * nb,
        prop1_bound=prop1,
        prop2_bound=prop2,
        params=dict(params or {}),
        trajectory=traj,
    )
    rep.violations = rep.check()
    return rep
