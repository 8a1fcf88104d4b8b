import itertools

import numpy as np
import pytest

from qbattery import models
from qbattery.locality import profile
from qbattery.models import ModelConfig, build, coupling_matrix, initial_state
from qbattery.pauli import CapabilityError, ConstructionError, realize


def test_xxz_term_counts():
    s = models.xxz_battery(3, 1.0, coupling_matrix(3, "uniform-all-to-all", 0.5), 0.5)
    assert sum(len(t.support) == 1 for t in s.terms) == 3
    assert sum(len(t.support) == 2 for t in s.terms) == 3
    nn = models.xxz_battery(5, 1.0, coupling_matrix(5, "nearest-neighbor", 0.5), 0.5)
    assert sum(len(t.support) == 2 for t in nn.terms) == 4


def test_charger_layouts():
    assert len(models.transverse_charger(4, 1.0).terms) == 4
    b = models.boundary_charger(5, 1.0)
    assert [t.support for t in b.terms] == [(0,), (4,)]


def test_xy_alltoall_extensivity_normalization():
    s = build(ModelConfig("xy_alltoall_charger", 6, {"alpha": 1.0, "gamma": 0.5, "B": 0.0}, 1.0))
    assert profile(s).g == pytest.approx(1.0)
    assert profile(s).locality_degree == 2


def test_normalize_errors():
    with pytest.raises(ValueError):
        models.normalize_to_extensivity(models.parallel_zeeman(2, 1.0), 0.0)


def test_golden_couplings_distinct():
    j = coupling_matrix(5, "golden-all-to-all", 1.0)
    vals = j[np.triu_indices(5, 1)]
    assert len(set(np.round(vals, 12))) == vals.size
    assert np.all((vals >= 1.0) & (vals < 2.0))
    np.testing.assert_allclose(j, j.T)


def test_scale_by_n():
    j = coupling_matrix(5, "uniform-all-to-all", 1.0, scale_by_n=True)
    assert j[0, 1] == pytest.approx(0.25)


def test_missing_params_rejected():
    with pytest.raises(ConstructionError):
        build(ModelConfig("xxz_battery", 3, {"h": 1.0, "J": 0.5, "coupling_mode": "nearest-neighbor"}))
    with pytest.raises(ConstructionError):
        build(ModelConfig("nope", 3, {}))


def test_initial_states():
    np.testing.assert_allclose(initial_state("all_up", 2), [1, 0, 0, 0])
    np.testing.assert_allclose(initial_state("all_down", 2), [0, 0, 0, 1])
    np.testing.assert_allclose(initial_state("product_bitstring", 3, bits="100"), np.eye(8)[4])
    with pytest.raises(ConstructionError):
        initial_state("product_bitstring", 3, bits="10")
    with pytest.raises(CapabilityError):
        initial_state("ground_of", 13, spec=models.parallel_zeeman(13, 1.0))


def test_ground_state_phase_and_energy(xxz_nn):
    s = xxz_nn(5)
    psi = initial_state("ground_of", 5, spec=s)
    k = np.argmax(np.abs(psi))
    assert psi[k].imag == 0 and psi[k].real > 0
    h = realize(s).dense()
    assert np.vdot(psi, h @ psi).real == pytest.approx(np.linalg.eigvalsh(h)[0])


def test_classical_ground_energy_matches_enumeration():
    n, h, J = 5, 0.3, 0.7
    s = models.xxz_battery(n, h, coupling_matrix(n, "nearest-neighbor", J), 0.0)
    best = min(
        h * sum(z) - J * sum(z[i] * z[i + 1] for i in range(n - 1))
        for z in itertools.product([1, -1], repeat=n)
    )
    assert np.linalg.eigvalsh(realize(s).dense())[0] == pytest.approx(best)
