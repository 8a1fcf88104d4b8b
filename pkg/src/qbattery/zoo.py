"""Reference battery/charger pairs used by the oracle and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import models
from .models import ModelConfig
from .pauli import HamiltonianSpec


@dataclass(frozen=True)
class ZooModel:
    name: str
    battery: ModelConfig
    charger: ModelConfig
    state: dict
    t_max: float
    n_steps: int = 400

    @property
    def n_sites(self) -> int:
        return self.battery.n_sites

    def build(self) -> tuple[HamiltonianSpec, HamiltonianSpec, np.ndarray]:
        b = models.build(self.battery)
        c = models.build(self.charger)
        return b, c, make_state(self.state, b, c)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)


def make_state(desc: dict, battery: HamiltonianSpec, charger: HamiltonianSpec) -> np.ndarray:
    kind = desc["kind"]
    n = battery.n_sites
    if kind == "ground_of":
        of = desc.get("of", "battery")
        if of not in ("battery", "charger"):
            raise ValueError("ground_of must name 'battery' or 'charger'")
        return models.initial_state(kind, n, spec=battery if of == "battery" else charger)
    return models.initial_state(kind, n, bits=desc.get("bits"))


def xxz(n: int, mode: str = "nearest-neighbor", h: float = 1.0, J: float = 0.5, alpha: float = 0.5) -> ModelConfig:
    return ModelConfig("xxz_battery", n, {"h": h, "J": J, "alpha": alpha, "coupling_mode": mode})


def zeeman(n: int, h: float = 1.0) -> ModelConfig:
    return ModelConfig("parallel_zeeman", n, {"h": h})


def transverse(n: int, omega: float = 1.0) -> ModelConfig:
    return ModelConfig("transverse_charger", n, {"omega": omega})


def xy_alltoall(n: int, alpha: float = 1.0, gamma: float = 0.5, B: float = 0.0, g_target: float | None = 1.0) -> ModelConfig:
    return ModelConfig("xy_alltoall_charger", n, {"alpha": alpha, "gamma": gamma, "B": B}, g_target)


def boundary(n: int, omega: float = 1.0) -> ModelConfig:
    return ModelConfig("boundary_charger", n, {"omega": omega})


def model_zoo() -> list[ZooModel]:
    return [
        ZooModel("rabi", zeeman(1), transverse(1), {"kind": "all_down"}, np.pi),
        ZooModel("zeeman_transverse_n4", zeeman(4), transverse(4), {"kind": "all_down"}, np.pi),
        ZooModel("zeeman_transverse_n8", zeeman(8), transverse(8), {"kind": "all_down"}, np.pi),
        ZooModel("xxz_nn_transverse_n8", xxz(8), transverse(8), {"kind": "ground_of", "of": "battery"}, 4.0),
        ZooModel("xxz_all_transverse_n6", xxz(6, "uniform-all-to-all"), transverse(6), {"kind": "ground_of", "of": "battery"}, 4.0),
        ZooModel("zeeman_xy_all_n6", zeeman(6), xy_alltoall(6), {"kind": "all_down"}, 4.0),
        ZooModel("xxz_nn_boundary_n10", xxz(10), boundary(10), {"kind": "ghz"}, 2.0),
    ]


def zoo_by_name() -> dict[str, ZooModel]:
    return {m.name: m for m in model_zoo()}
