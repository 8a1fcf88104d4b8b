"""Reading and writing Hamiltonian specs as YAML.

Schema::

    n_sites: 3
    label: xxz chain
    terms:
      - {support: [0], words: [["Z", 1.0]]}
      - {support: [0, 1], words: [["ZZ", -0.5], ["XX", -0.25], ["YY", -0.25]]}

Word letters are matched positionally to the sorted support; ``I`` marks a
support site the word leaves untouched. Every support site must be acted
on by at least one word.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from .pauli import ConstructionError, HamiltonianSpec, LocalTerm


def spec_to_dict(spec: HamiltonianSpec) -> dict[str, Any]:
    terms = []
    for t in spec.terms:
        terms.append(
            {
                "support": list(t.support),
                "words": [[w.to_string(t.support), float(c)] for w, c in t.words],
            }
        )
    return {"n_sites": spec.n_sites, "label": spec.label, "terms": terms}


def spec_from_dict(data: dict[str, Any]) -> HamiltonianSpec:
    try:
        n_sites = int(data["n_sites"])
        raw_terms = data.get("terms") or []
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstructionError(f"malformed spec: {exc}") from exc
    terms = []
    for i, entry in enumerate(raw_terms):
        try:
            support = [int(s) for s in entry["support"]]
            words = [(str(w), float(c)) for w, c in entry["words"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConstructionError(f"malformed term {i}: {exc}") from exc
        terms.append(LocalTerm.from_strings(support, words))
    return HamiltonianSpec(n_sites, terms, str(data.get("label", "")))


def dumps(spec: HamiltonianSpec) -> str:
    d = spec_to_dict(spec)
    head = yaml.safe_dump(
        {"n_sites": d["n_sites"], "label": d["label"]}, sort_keys=False, default_flow_style=False
    )
    lines = [head.rstrip("\n"), "terms:"]
    for t in d["terms"]:
        lines.append("  - " + yaml.safe_dump(t, sort_keys=False, default_flow_style=True, width=10**6).strip())
    if not d["terms"]:
        lines[-1] = "terms: []"
    return "\n".join(lines) + "\n"


def loads(text: str) -> HamiltonianSpec:
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConstructionError("spec file must contain a mapping")
    return spec_from_dict(data)


def save(spec: HamiltonianSpec, path: str | Path) -> None:
    Path(path).write_text(dumps(spec))


def load(path: str | Path) -> HamiltonianSpec:
    return loads(Path(path).read_text())
