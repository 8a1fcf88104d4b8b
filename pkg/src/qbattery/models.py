"""Builders for the battery and charger Hamiltonians and the initial states.

Coupling constants between sites are called ``J`` here; ``g`` is reserved for
the extensivity constant returned by :func:`qbattery.locality.profile`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Mapping

import numpy as np

from . import specfile
from .locality import profile
from .pauli import DENSE_THRESHOLD, CapabilityError, ConstructionError, HamiltonianSpec, LocalTerm, realize

FAMILIES = (
    "xxz_battery",
    "transverse_charger",
    "xy_alltoall_charger",
    "boundary_charger",
    "parallel_zeeman",
    "custom_file",
)
COUPLING_MODES = ("uniform-all-to-all", "nearest-neighbor", "golden-all-to-all", "explicit")
GOLDEN = (1 + 5**0.5) / 2
STATE_KINDS = ("all_down", "all_up", "ground_of", "product_bitstring", "ghz")


@dataclass(frozen=True)
class ModelConfig:
    family: str
    n_sites: int
    params: Mapping[str, Any] = field(default_factory=dict)
    normalization: float | None = None

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ModelConfig":
        d = dict(d)
        try:
            family = d.pop("family")
            n = int(d.pop("n_sites"))
        except KeyError as exc:
            raise ConstructionError(f"model config missing {exc}") from exc
        norm = d.pop("normalization", None)
        params = d.pop("params", {}) or {}
        params = {**params, **d}
        return cls(family, n, params, None if norm is None else float(norm))

    def to_dict(self) -> dict:
        out = {"family": self.family, "n_sites": self.n_sites, "params": dict(self.params)}
        if self.normalization is not None:
            out["normalization"] = self.normalization
        return out


def _num(params: Mapping[str, Any], key: str, default: float | None = None) -> float:
    if key not in params:
        if default is None:
            raise ConstructionError(f"missing parameter {key!r}")
        return default
    v = float(params[key])
    if not np.isfinite(v):
        raise ConstructionError(f"parameter {key!r} is not finite")
    return v


def _mode(params: Mapping[str, Any]) -> str:
    if "coupling_mode" not in params:
        raise ConstructionError(f"missing parameter 'coupling_mode' (one of {COUPLING_MODES})")
    return str(params["coupling_mode"])


def coupling_matrix(n: int, mode: str, J: float = 1.0, scale_by_n: bool = False, matrix=None) -> np.ndarray:
    """Symmetric J_ij with zero diagonal for the requested connectivity."""
    if mode == "uniform-all-to-all":
        jm = np.full((n, n), J, dtype=float)
        if scale_by_n and n > 1:
            jm /= n - 1
    elif mode == "nearest-neighbor":
        jm = np.zeros((n, n))
        for i in range(n - 1):
            jm[i, i + 1] = jm[i + 1, i] = J
    elif mode == "golden-all-to-all":
        # J_ij = J (1 + frac(k phi)) over pairs k = 1, 2, ... in lexicographic
        # order: incommensurate couplings with no common energy unit
        jm = np.zeros((n, n))
        for k, (i, j) in enumerate(combinations(range(n), 2), start=1):
            jm[i, j] = jm[j, i] = J * (1 + (k * GOLDEN) % 1.0)
        if scale_by_n and n > 1:
            jm /= n - 1
    elif mode == "explicit":
        if matrix is None:
            raise ConstructionError("explicit coupling mode needs a matrix")
        jm = np.array(matrix, dtype=float)
        if jm.shape != (n, n):
            raise ConstructionError(f"coupling matrix shape {jm.shape} != ({n}, {n})")
        if not np.all(np.isfinite(jm)):
            raise ConstructionError("coupling matrix is not finite")
        # only the upper triangle is read
        jm = np.triu(jm, 1)
        jm = jm + jm.T
    else:
        raise ConstructionError(f"unknown coupling mode {mode!r}")
    np.fill_diagonal(jm, 0.0)
    return jm


def field_terms(n: int, letter: str, strength: float, sites=None) -> list[LocalTerm]:
    if strength == 0.0:
        return []
    sites = range(n) if sites is None else sites
    return [LocalTerm.from_strings([i], [(letter, strength)]) for i in sites]


def xxz_battery(n: int, h: float, couplings: np.ndarray, alpha: float) -> HamiltonianSpec:
    """h sum Z_i - sum_{i<j} J_ij [Z_i Z_j + alpha (X_i X_j + Y_i Y_j)]."""
    if n < 2:
        raise ConstructionError("xxz_battery needs at least two sites")
    terms = field_terms(n, "Z", h)
    for i, j in combinations(range(n), 2):
        jij = couplings[i, j]
        if jij == 0.0:
            continue
        words = [("ZZ", -jij)]
        if alpha != 0.0:
            words += [("XX", -jij * alpha), ("YY", -jij * alpha)]
        terms.append(LocalTerm.from_strings([i, j], words))
    return HamiltonianSpec(n, terms, "xxz_battery")


def transverse_charger(n: int, omega: float) -> HamiltonianSpec:
    return HamiltonianSpec(n, field_terms(n, "X", omega), "transverse_charger")


def boundary_charger(n: int, omega: float) -> HamiltonianSpec:
    sites = [0] if n == 1 else [0, n - 1]
    return HamiltonianSpec(n, field_terms(n, "X", omega, sites), "boundary_charger")


def parallel_zeeman(n: int, h: float) -> HamiltonianSpec:
    return HamiltonianSpec(n, field_terms(n, "Z", h), "parallel_zeeman")


def xy_alltoall_charger(n: int, alpha: float, gamma: float, B: float, couplings=None) -> HamiltonianSpec:
    """alpha sum_{i<j} (X_i X_j + gamma Y_i Y_j) + B sum Z_i."""
    if n < 2:
        raise ConstructionError("xy_alltoall_charger needs at least two sites")
    cm = np.ones((n, n)) if couplings is None else couplings
    terms = []
    for i, j in combinations(range(n), 2):
        a = alpha * cm[i, j]
        words = [(w, c) for w, c in (("XX", a), ("YY", a * gamma)) if c != 0.0]
        if words:
            terms.append(LocalTerm.from_strings([i, j], words))
    terms += field_terms(n, "Z", B)
    return HamiltonianSpec(n, terms, "xy_alltoall_charger")


def build(config: ModelConfig) -> HamiltonianSpec:
    p = dict(config.params)
    n = config.n_sites
    fam = config.family
    if n < 1:
        raise ConstructionError("n_sites must be positive")
    if fam == "xxz_battery":
        jm = coupling_matrix(
            n,
            _mode(p),
            _num(p, "J"),
            bool(p.get("scale_by_n", False)),
            p.get("coupling_matrix"),
        )
        spec = xxz_battery(n, _num(p, "h"), jm, _num(p, "alpha"))
    elif fam == "transverse_charger":
        spec = transverse_charger(n, _num(p, "omega"))
    elif fam == "boundary_charger":
        spec = boundary_charger(n, _num(p, "omega"))
    elif fam == "parallel_zeeman":
        spec = parallel_zeeman(n, _num(p, "h"))
    elif fam == "xy_alltoall_charger":
        cm = None
        if "coupling_mode" in p:
            cm = coupling_matrix(n, _mode(p), _num(p, "J"),
                                 bool(p.get("scale_by_n", False)), p.get("coupling_matrix"))
        spec = xy_alltoall_charger(n, _num(p, "alpha"), _num(p, "gamma"), _num(p, "B"), cm)
    elif fam == "custom_file":
        if "path" not in p:
            raise ConstructionError("custom_file needs a 'path' parameter")
        spec = specfile.load(p["path"])
        if spec.n_sites != n:
            raise ConstructionError(f"{p['path']} has {spec.n_sites} sites, config says {n}")
    else:
        raise ConstructionError(f"unknown model family {fam!r}")
    if config.normalization is not None:
        spec = normalize_to_extensivity(spec, config.normalization)
    return spec


def normalize_to_extensivity(spec: HamiltonianSpec, g_target: float) -> HamiltonianSpec:
    """Rescale every coefficient so that the profile's g equals ``g_target``."""
    if not g_target > 0:
        raise ValueError("g_target must be positive")
    g = profile(spec).g
    if not spec.terms or g == 0.0:
        raise ConstructionError("cannot normalize a spec with zero norm")
    if g == g_target:
        return spec
    return spec.scaled(g_target / g)


def initial_state(kind: str, n_sites: int, spec: HamiltonianSpec | None = None, bits: str | None = None) -> np.ndarray:
    """Normalized initial states; bit 1 is spin down (sigma^z = -1)."""
    dim = 2**n_sites
    psi = np.zeros(dim, dtype=complex)
    if kind == "all_down":
        psi[-1] = 1.0
    elif kind == "all_up":
        psi[0] = 1.0
    elif kind == "product_bitstring":
        if bits is None or len(bits) != n_sites or set(bits) - {"0", "1"}:
            raise ConstructionError(f"bitstring of length {n_sites} over {{0,1}} required")
        psi[int(bits, 2)] = 1.0
    elif kind == "ghz":
        psi[0] = psi[-1] = 1 / np.sqrt(2)
    elif kind == "ground_of":
        if spec is None:
            raise ConstructionError("ground_of needs a spec")
        if spec.n_sites != n_sites:
            raise ConstructionError("ground_of spec is on a different lattice")
        if dim > DENSE_THRESHOLD:
            raise CapabilityError(f"ground_of limited to N <= 12, got N={n_sites}")
        # eigh orders ascending; degenerate ground states resolve to column 0
        _, v = np.linalg.eigh(realize(spec, backend="dense").dense())
        psi = v[:, 0].astype(complex)
        # fix the global phase so the largest amplitude is real positive
        k = int(np.argmax(np.abs(psi)))
        psi = psi * (abs(psi[k]) / psi[k])
    else:
        raise ConstructionError(f"unknown initial state kind {kind!r}")
    return psi
