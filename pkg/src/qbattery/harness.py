"""Experiment configuration and orchestration.

A config is a YAML document, for example::

    name: prop2_n8
    battery:
      family: xxz_battery
      n_sites: 8
      params: {h: 1.0, J: 0.5, alpha: 0.5, coupling_mode: nearest-neighbor}
    charger:
      family: transverse_charger
      n_sites: 8
      params: {omega: 1.0}
    initial_state: {kind: ground_of, of: battery}
    time: {t_max: 4.0, n_steps: 400}
    epsilon: 0.5
    epsilon_unit: 0.1
    seed: 0
    analyses: {aklh: true, bounds: true, decomp: true, locality_of_energy: false}

``time.n_steps`` is the only optional physical setting (default 400).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from . import specfile
from .bounds import bound_report
from .decomp import decompose, verify_decomposition
from .dynamics import DEFAULT_N_STEPS, charging_trajectory, time_grid
from .locality import profile
from .models import STATE_KINDS, ModelConfig, build
from .pauli import DENSE_THRESHOLD, CapabilityError
from .spectral import CSV_HEADER, aklh_audit
from .util import write_csv, write_json
from .zoo import make_state

log = logging.getLogger(__name__)

ANALYSES = ("aklh", "bounds", "decomp", "locality_of_energy")


class ConfigError(ValueError):
    pass


@dataclass
class LocalityProbe:
    t_star: float
    boundary_site: int
    bulk_site: int
    theta: float


@dataclass
class ExperimentConfig:
    name: str
    battery: ModelConfig
    charger: ModelConfig
    initial_state: dict
    t_max: float
    n_steps: int
    epsilon: float
    epsilon_unit: float
    seed: int = 0
    analyses: dict[str, bool] = field(default_factory=dict)
    locality: LocalityProbe | None = None
    decomp_mode: str = "paper"

    def validate(self) -> None:
        if not self.t_max > 0:
            raise ConfigError("time.t_max must be positive")
        if self.n_steps < 2:
            raise ConfigError("time.n_steps must be at least 2")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not self.epsilon_unit > 0:
            raise ConfigError("epsilon_unit must be positive")
        if self.battery.n_sites != self.charger.n_sites:
            raise ConfigError("battery and charger must have the same n_sites")
        if self.initial_state.get("kind") not in STATE_KINDS:
            raise ConfigError(f"initial_state.kind must be one of {STATE_KINDS}")
        unknown = set(self.analyses) - set(ANALYSES)
        if unknown:
            raise ConfigError(f"unknown analyses {sorted(unknown)}")
        if self.analyses.get("locality_of_energy") and self.locality is None:
            raise ConfigError("locality_of_energy analysis needs a 'locality_of_energy' section")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if 2**self.battery.n_sites > DENSE_THRESHOLD:
            raise CapabilityError(
                f"N={self.battery.n_sites}: dynamics, bounds and the spectral audit need dense "
                f"diagonalization, supported up to N=12"
            )

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "battery": self.battery.to_dict(),
            "charger": self.charger.to_dict(),
            "initial_state": self.initial_state,
            "time": {"t_max": self.t_max, "n_steps": self.n_steps},
            "epsilon": self.epsilon,
            "epsilon_unit": self.epsilon_unit,
            "seed": self.seed,
            "analyses": self.analyses,
            "decomp_mode": self.decomp_mode,
        }
        if self.locality is not None:
            d["locality_of_energy"] = vars(self.locality)
        return d


def _require(d: dict, key: str) -> Any:
    if key not in d:
        raise ConfigError(f"config is missing {key!r}")
    return d[key]


def parse_config(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    time = _require(data, "time")
    loe = data.get("locality_of_energy")
    probe = None
    if loe:
        probe = LocalityProbe(
            float(_require(loe, "t_star")),
            int(_require(loe, "boundary_site")),
            int(_require(loe, "bulk_site")),
            float(_require(loe, "theta")),
        )
    cfg = ExperimentConfig(
        name=str(data.get("name", "experiment")),
        battery=ModelConfig.from_dict(_require(data, "battery")),
        charger=ModelConfig.from_dict(_require(data, "charger")),
        initial_state=dict(_require(data, "initial_state")),
        t_max=float(_require(time, "t_max")),
        n_steps=int(time.get("n_steps", DEFAULT_N_STEPS)),
        epsilon=float(_require(data, "epsilon")),
        epsilon_unit=float(_require(data, "epsilon_unit")),
        seed=int(data.get("seed", 0)),
        analyses={k: bool(v) for k, v in (data.get("analyses") or {}).items()},
        locality=probe,
        decomp_mode=str(data.get("decomp_mode", "paper")),
    )
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    data = yaml.safe_load(p.read_text())
    # custom_file paths are resolved relative to the config file
    for role in ("battery", "charger"):
        m = (data or {}).get(role) or {}
        params = m.get("params") or {}
        if m.get("family") == "custom_file" and "path" in params:
            params["path"] = str((p.parent / params["path"]).resolve())
    return parse_config(data)


class Experiment:
    """Builds the models once and runs the requested analyses into ``out``."""

    def __init__(self, config: ExperimentConfig, out: str | Path, seed: int | None = None):
        self.config = config
        if seed is not None:
            config.seed = seed
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.battery = build(config.battery)
        self.charger = build(config.charger)
        self.psi0 = make_state(config.initial_state, self.battery, self.charger)
        self.times = time_grid(config.t_max, config.n_steps)
        self.violations: list[str] = []

    def write_config(self) -> None:
        write_json(self.out / "config.json", self.config.to_dict())

    def profile(self) -> dict:
        payload = {
            "battery": profile(self.battery).to_dict(),
            "charger": profile(self.charger).to_dict(),
        }
        write_json(self.out / "profile.json", payload)
        return payload

    def simulate(self):
        traj = charging_trajectory(self.battery, self.charger, self.psi0, self.times)
        write_csv(self.out / "trajectory.csv", traj.header(), traj.rows())
        return traj

    def bounds(self):
        rep = bound_report(
            self.battery, self.charger, self.psi0, self.times, model=self.config.name,
            params={"battery": self.config.battery.to_dict(), "charger": self.config.charger.to_dict()},
        )
        write_json(self.out / "bounds.json", rep.to_dict())
        traj = rep.trajectory
        write_csv(self.out / "trajectory.csv", traj.header(), traj.rows())
        self.violations += [f"bounds: {v}" for v in rep.violations]
        return rep

    def aklh(self):
        table = aklh_audit(self.battery, self.charger, self.config.epsilon)
        write_csv(self.out / "aklh.csv", CSV_HEADER, table.rows())
        write_json(self.out / "aklh_summary.json", table.summary())
        self.violations += [
            f"aklh: term {e.term_index} bins ({e.m},{e.m_prime}) measured {e.measured:.12g} > bound {e.bound:.12g}"
            for e in table.flags
        ]
        return table

    def decompose(self):
        res = decompose(self.charger, self.config.epsilon_unit, self.config.decomp_mode)
        cert = verify_decomposition(res, self.charger, self.battery, self.psi0, self.times)
        ddir = self.out / "decomposition"
        ddir.mkdir(exist_ok=True)
        for old in ddir.glob("group_*.yaml"):
            old.unlink()
        for p in range(res.k_bar):
            specfile.save(res.group_spec(p), ddir / f"group_{p:03d}.yaml")
        write_json(ddir / "certificate.json", cert)
        return res, cert

    def locality_of_energy(self) -> dict:
        probe = self.config.locality
        n = self.battery.n_sites
        for s in (probe.boundary_site, probe.bulk_site):
            if not 0 <= s < n:
                raise ConfigError(f"site {s} outside lattice of {n} sites")
        traj = charging_trajectory(self.battery, self.charger, self.psi0, [0.0, probe.t_star])
        delta = traj.site_energies[1] - traj.site_energies[0]
        d_edge = abs(delta[probe.boundary_site])
        d_bulk = abs(delta[probe.bulk_site])
        payload = {
            "t_star": probe.t_star,
            "boundary_site": probe.boundary_site,
            "bulk_site": probe.bulk_site,
            "delta_site_energy": delta,
            "boundary_response": d_edge,
            "bulk_response": d_bulk,
            "theta": probe.theta,
            "ratio": d_bulk / d_edge if d_edge > 0 else float("inf"),
            "entropy_initial": traj.half_cut_entropy[0],
            "entropy_t_star": traj.half_cut_entropy[1],
            "localized": bool(d_bulk <= probe.theta * d_edge),
        }
        write_json(self.out / "locality_of_energy.json", payload)
        return payload

    def run(self) -> dict:
        a = self.config.analyses
        self.write_config()
        summary: dict[str, Any] = {"profile": self.profile()}
        if a.get("bounds", True):
            summary["bounds"] = self.bounds().to_dict()
        else:
            self.simulate()
        if a.get("aklh"):
            summary["aklh"] = self.aklh().summary()
        if a.get("decomp"):
            summary["decomposition"] = self.decompose()[1]
        if a.get("locality_of_energy"):
            summary["locality_of_energy"] = self.locality_of_energy()
        summary["violations"] = list(self.violations)
        write_json(self.out / "summary.json", summary)
        return summary


def run(config: ExperimentConfig, out: str | Path, seed: int | None = None) -> dict:
    return Experiment(config, out, seed).run()


def bundled_configs() -> dict[str, Path]:
    root = Path(__file__).parent / "configs"
    return {p.stem: p for p in sorted(root.glob("*.cfg"))}
