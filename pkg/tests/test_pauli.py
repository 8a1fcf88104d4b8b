import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings, strategies as st

from qbattery import models
from qbattery.pauli import (
    PAULI_MATRICES,
    ConstructionError,
    HamiltonianSpec,
    LocalTerm,
    OperatorMatrix,
    PauliWord,
    commutator,
    operator_norm,
    realize,
    realize_kron,
)

from conftest import random_hermitian, random_spec

X, Y, Z = (PAULI_MATRICES[c] for c in "XYZ")


def single(letter, site=0, n=1, coeff=1.0):
    return HamiltonianSpec(n, [LocalTerm.from_strings([site], [(letter, coeff)])])


def test_z_convention():
    np.testing.assert_array_equal(realize(single("Z")).dense(), np.diag([1.0, -1.0]))


def test_site_zero_is_most_significant():
    m = realize(single("Z", site=0, n=2)).dense()
    np.testing.assert_array_equal(np.diag(m).real, [1, 1, -1, -1])


def test_empty_spec_is_zero():
    m = realize(HamiltonianSpec(2, [])).dense()
    assert m.shape == (4, 4) and not m.any()


def test_xxz_bond_spectrum():
    # zz + a(xx + yy) has spectrum {1, 1, -1 + 2a, -1 - 2a}; coupling 1/2 scales it
    a = 0.5
    term = LocalTerm.from_strings([0, 1], [("ZZ", 0.5), ("XX", 0.5 * a), ("YY", 0.5 * a)])
    w = np.linalg.eigvalsh(realize(HamiltonianSpec(2, [term])).dense())
    np.testing.assert_allclose(sorted(w), sorted(0.5 * np.array([1, 1, -1 + 2 * a, -1 - 2 * a])), atol=1e-14)
    np.testing.assert_allclose(sorted(w), [-1.0, 0.0, 0.5, 0.5], atol=1e-14)


def test_out_of_range_support():
    with pytest.raises(ConstructionError):
        single("X", site=3, n=2)


def test_phantom_support_rejected():
    with pytest.raises(ConstructionError):
        LocalTerm.from_strings([0, 1], [("ZI", 1.0)])


def test_complex_coefficient_rejected():
    with pytest.raises(ConstructionError):
        LocalTerm([(PauliWord({0: "X"}), 1j)])


def test_bad_letter():
    with pytest.raises(ConstructionError):
        PauliWord({0: "Q"})


def test_commutator_x_z():
    c = commutator(OperatorMatrix(X, True), OperatorMatrix(Z, True)).dense()
    np.testing.assert_allclose(c, -2j * Y)


def test_self_commutator_zero(rng):
    a = OperatorMatrix(random_hermitian(rng, 8), True)
    assert not commutator(a, a).dense().any()


def test_disjoint_supports_commute():
    a = realize(single("X", 0, 2))
    b = realize(single("Z", 1, 2))
    assert not commutator(a, b).dense().any()


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError):
        commutator(OperatorMatrix(X), OperatorMatrix(np.eye(4)))


def test_basic_norms():
    assert operator_norm(OperatorMatrix(X)) == pytest.approx(1.0)
    c = commutator(OperatorMatrix(X, True), OperatorMatrix(Z, True))
    assert operator_norm(c) == pytest.approx(2.0)
    assert operator_norm(realize(models.transverse_charger(4, 1.0))) == pytest.approx(4.0, abs=1e-12)


def test_norm_rejects_nonfinite():
    with pytest.raises(ValueError):
        operator_norm(OperatorMatrix(np.array([[np.nan, 0], [0, 1]])))


@pytest.mark.parametrize("n", [2, 4, 6])
def test_norm_backends_agree(rng, n):
    spec = random_spec(rng, n, n_terms=8)
    h = realize(spec)
    c = commutator(h, realize(random_spec(rng, n)))
    for m in (h, c):
        d = operator_norm(m, backend="dense")
        it = operator_norm(m, backend="iterative")
        assert abs(d - it) <= 1e-8 * max(1.0, d)


def test_large_register_uses_sparse_path():
    h = realize(models.transverse_charger(13, 1.0))
    assert h.is_sparse
    assert operator_norm(h) == pytest.approx(13.0, rel=1e-8)


@pytest.mark.parametrize("n", range(1, 9))
def test_sparse_dense_kron_identical(rng, n):
    spec = random_spec(rng, n, n_terms=2 * n, max_k=min(3, n))
    dense = realize(spec, backend="dense").dense()
    sparse = realize(spec, backend="sparse")
    assert sps.issparse(sparse.data)
    np.testing.assert_array_equal(dense, sparse.dense())
    np.testing.assert_allclose(dense, realize_kron(spec), atol=1e-14)


def test_realize_linear(rng):
    a, b = random_spec(rng, 4), random_spec(rng, 4)
    np.testing.assert_allclose(realize(a + b).dense(), realize(a).dense() + realize(b).dense(), atol=1e-12)


def test_realized_hermitian(rng):
    m = realize(random_spec(rng, 5, 10, 3)).dense()
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.sampled_from([-2.0, 0.5, 3.0]))
def test_norm_homogeneous(seed, alpha):
    m = random_hermitian(np.random.default_rng(seed), 8)
    assert operator_norm(OperatorMatrix(alpha * m)) == pytest.approx(abs(alpha) * operator_norm(OperatorMatrix(m)), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_triangle_and_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    a = realize(random_spec(rng, 3, 3))
    b = realize(random_spec(rng, 3, 3))
    na, nb = operator_norm(a), operator_norm(b)
    assert operator_norm(a + b) <= na + nb + 1e-10
    assert operator_norm(a @ b) <= na * nb + 1e-10


def test_term_norm_on_support_matches_full():
    term = LocalTerm.from_strings([1, 3], [("ZZ", -0.5), ("XX", -0.25), ("YY", -0.25)])
    assert term.norm() == pytest.approx(operator_norm(realize(term, 5)), abs=1e-12)
