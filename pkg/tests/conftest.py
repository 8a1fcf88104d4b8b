import numpy as np
import pytest

from qbattery import models
from qbattery.pauli import HamiltonianSpec, LocalTerm


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n):
    psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return psi / np.linalg.norm(psi)


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_spec(rng, n, n_terms=6, max_k=2):
    terms = []
    for _ in range(n_terms):
        k = int(rng.integers(1, max_k + 1))
        sites = sorted(rng.choice(n, size=k, replace=False).tolist())
        words = []
        for _ in range(int(rng.integers(1, 3))):
            w = "".join(rng.choice(list("XYZ"), size=k))
            words.append((w, float(rng.uniform(-1, 1))))
        terms.append(LocalTerm.from_strings(sites, words))
    return HamiltonianSpec(n, terms, "random")


@pytest.fixture
def xxz_nn():
    def make(n, h=1.0, J=0.5, alpha=0.5):
        return models.xxz_battery(n, h, models.coupling_matrix(n, "nearest-neighbor", J), alpha)

    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
