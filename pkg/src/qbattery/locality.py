"""Structural quantities of local Hamiltonians: locality degree, per-site
energy sums (extensivity), participation numbers and the neighbourhood of a
charger term inside the battery."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .pauli import HamiltonianSpec

EXTENSIVITY_TOL = 1e-12


@dataclass(frozen=True)
class LocalityProfile:
    locality_degree: int
    site_sums: tuple[float, ...]
    g: float
    participation: tuple[int, ...]
    term_norms: tuple[float, ...]

    def passes_extensivity(self, g0: float) -> bool:
        return self.g <= g0 + EXTENSIVITY_TOL

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class InteractionNeighborhood:
    term_ref: int
    support: tuple[int, ...]
    overlapping_terms: tuple[int, ...]
    a_value: float


def profile(spec: HamiltonianSpec, term_norms=None) -> LocalityProfile:
    """Compute k (or q), the per-site sums S_i, g = max S_i and participation."""
    norms = spec.term_norms() if term_norms is None else np.asarray(term_norms, dtype=float)
    sums = np.zeros(spec.n_sites)
    part = np.zeros(spec.n_sites, dtype=int)
    degree = 0
    for term, nrm in zip(spec.terms, norms):
        degree = max(degree, len(term.support))
        for s in term.support:
            sums[s] += nrm
            part[s] += 1
    return LocalityProfile(
        locality_degree=degree,
        site_sums=tuple(float(x) for x in sums),
        g=float(sums.max()) if sums.size else 0.0,
        participation=tuple(int(x) for x in part),
        term_norms=tuple(float(x) for x in norms),
    )


def neighborhood(
    battery: HamiltonianSpec, charger: HamiltonianSpec, term_index: int, battery_norms=None
) -> InteractionNeighborhood:
    """Battery terms whose support meets the support of charger term ``term_index``.

    Support intersection is used rather than non-commutation, so ``a_value``
    is an upper bound on the sum over genuinely non-commuting terms.
    """
    if not 0 <= term_index < len(charger.terms):
        raise IndexError(f"charger has no term {term_index}")
    if battery.n_sites != charger.n_sites:
        raise ValueError("battery and charger live on different lattices")
    norms = battery.term_norms() if battery_norms is None else battery_norms
    x = set(charger.terms[term_index].support)
    hits = tuple(i for i, t in enumerate(battery.terms) if x.intersection(t.support))
    return InteractionNeighborhood(
        term_ref=term_index,
        support=charger.terms[term_index].support,
        overlapping_terms=hits,
        a_value=float(sum(norms[i] for i in hits)),
    )
