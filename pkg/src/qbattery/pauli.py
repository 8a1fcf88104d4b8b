"""Pauli-word operator algebra on spin-1/2 lattices.

Conventions used throughout the package:

* sigma^z |0> = +|0>, computational basis ordered |00...0> first;
* site 0 is the most significant tensor factor, so site ``i`` of an
  ``n``-site register lives on bit ``n - 1 - i`` of the basis index.

Terms carry real coefficients on Hermitian Pauli words, which makes every
realized Hamiltonian Hermitian by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

#: Largest Hilbert-space dimension handled by dense linear algebra.
DENSE_THRESHOLD = 4096

PAULI_LETTERS = ("X", "Y", "Z")

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ConstructionError(ValueError):
    """Raised when a word, term or spec violates its structural invariants."""


class CapabilityError(RuntimeError):
    """Raised when a requested analysis exceeds the dense-path size limit."""


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-site Pauli matrices; empty means identity."""

    site_ops: tuple[tuple[int, str], ...] = ()

    def __init__(self, site_ops: Mapping[int, str] | Iterable[tuple[int, str]] = ()):
        items = dict(site_ops).items() if not isinstance(site_ops, dict) else site_ops.items()
        ops = []
        for site, letter in items:
            site = int(site)
            letter = str(letter).upper()
            if site < 0:
                raise ConstructionError(f"negative site index {site}")
            if letter not in PAULI_LETTERS:
                raise ConstructionError(f"unknown Pauli letter {letter!r}")
            ops.append((site, letter))
        object.__setattr__(self, "site_ops", tuple(sorted(ops)))

    @classmethod
    def from_string(cls, letters: str, sites: Sequence[int]) -> "PauliWord":
        """Build a word from letters matched positionally to ``sites``; ``I`` is skipped."""
        if len(letters) != len(sites):
            raise ConstructionError(
                f"word {letters!r} has {len(letters)} letters for {len(sites)} sites"
            )
        return cls({s: c for s, c in zip(sites, letters.upper()) if c != "I"})

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.site_ops)

    def letter(self, site: int) -> str:
        return dict(self.site_ops).get(site, "I")

    def to_string(self, sites: Sequence[int]) -> str:
        ops = dict(self.site_ops)
        return "".join(ops.get(s, "I") for s in sites)

    def __repr__(self) -> str:
        body = " ".join(f"{c}{s}" for s, c in self.site_ops) or "I"
        return f"PauliWord({body})"


@dataclass(frozen=True)
class LocalTerm:
    """One Hermitian interaction term h_X with explicit support X."""

    words: tuple[tuple[PauliWord, float], ...]
    support: tuple[int, ...] = field(init=False)

    def __init__(self, words: Iterable[tuple[PauliWord, float]]):
        clean = []
        for word, coeff in words:
            if not isinstance(word, PauliWord):
                word = PauliWord(word)
            if isinstance(coeff, complex) or np.iscomplexobj(coeff):
                if abs(np.imag(coeff)) > 0:
                    raise ConstructionError("coefficients must be real")
                coeff = np.real(coeff)
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ConstructionError("non-finite coefficient")
            clean.append((word, coeff))
        support = sorted({s for w, _ in clean for s in w.sites})
        if not support:
            raise ConstructionError("a local term must act on at least one site")
        object.__setattr__(self, "words", tuple(clean))
        object.__setattr__(self, "support", tuple(support))

    @classmethod
    def from_strings(cls, support: Sequence[int], words: Iterable[tuple[str, float]]) -> "LocalTerm":
        sites = sorted(int(s) for s in support)
        if len(set(sites)) != len(sites):
            raise ConstructionError(f"repeated site in support {support}")
        term = cls((PauliWord.from_string(w, sites), c) for w, c in words)
        if term.support != tuple(sites):
            raise ConstructionError(
                f"declared support {tuple(sites)} differs from word support {term.support}"
            )
        return term

    def scaled(self, factor: float) -> "LocalTerm":
        return LocalTerm((w, c * factor) for w, c in self.words)

    def local_matrix(self) -> np.ndarray:
        """Dense matrix on the support alone (dimension 2^|X|)."""
        relabel = {s: i for i, s in enumerate(self.support)}
        local = [
            (PauliWord({relabel[s]: c for s, c in w.site_ops}), coeff)
            for w, coeff in self.words
        ]
        return _realize_words(local, len(self.support)).toarray()

    def norm(self) -> float:
        """Operator norm evaluated on the support-sized matrix."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.local_matrix()))))


@dataclass(frozen=True)
class HamiltonianSpec:
    """A sum of local terms on ``n_sites`` qubits."""

    n_sites: int
    terms: tuple[LocalTerm, ...] = ()
    label: str = ""

    def __post_init__(self):
        if int(self.n_sites) < 1:
            raise ConstructionError("n_sites must be positive")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if not isinstance(t, LocalTerm):
                raise ConstructionError("terms must be LocalTerm instances")
            if t.support[-1] >= self.n_sites:
                raise ConstructionError(
                    f"term support {t.support} exceeds lattice of {self.n_sites} sites"
                )

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    def __add__(self, other: "HamiltonianSpec") -> "HamiltonianSpec":
        if other.n_sites != self.n_sites:
            raise ConstructionError("cannot add specs on different lattices")
        label = "+".join(x for x in (self.label, other.label) if x)
        return HamiltonianSpec(self.n_sites, self.terms + other.terms, label)

    def scaled(self, factor: float) -> "HamiltonianSpec":
        return HamiltonianSpec(self.n_sites, [t.scaled(factor) for t in self.terms], self.label)

    def term_norms(self) -> np.ndarray:
        return np.array([t.norm() for t in self.terms], dtype=float)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrix realization of an operator; ``data`` is an ndarray or a CSR matrix."""

    data: Union[np.ndarray, sps.csr_matrix]
    hermitian: bool = False

    def __post_init__(self):
        shape = self.data.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"operator must be square, got shape {shape}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sps.issparse(self.data)

    def dense(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else np.asarray(self.data)

    def sparse(self) -> sps.csr_matrix:
        return self.data.tocsr() if self.is_sparse else sps.csr_matrix(self.data)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _check_same_dim(self, other)
        return OperatorMatrix(self.data + other.data, self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _check_same_dim(self, other)
        return OperatorMatrix(self.data - other.data, self.hermitian and other.hermitian)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        herm = self.hermitian and np.isreal(scalar)
        return OperatorMatrix(self.data * scalar, bool(herm))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_same_dim(self, other)
            return OperatorMatrix(self.data @ other.data)
        return self.data @ other


def _check_same_dim(a: OperatorMatrix, b: OperatorMatrix) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _word_action(word: PauliWord, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (row index, amplitude) for every column of the word's matrix."""
    cols = np.arange(2**n_sites, dtype=np.int64)
    flip = 0
    amp = np.ones(cols.size, dtype=complex)
    for site, letter in word.site_ops:
        bit = n_sites - 1 - site
        b = (cols >> bit) & 1
        if letter == "X":
            flip |= 1 << bit
        elif letter == "Y":
            flip |= 1 << bit
            # Y|0> = i|1>, Y|1> = -i|0>
            amp *= np.where(b == 0, 1j, -1j)
        else:
            amp *= np.where(b == 0, 1.0, -1.0)
    return cols ^ flip, amp


def _realize_words(words: Sequence[tuple[PauliWord, float]], n_sites: int) -> sps.csr_matrix:
    dim = 2**n_sites
    rows, cols, vals = [], [], []
    col = np.arange(dim, dtype=np.int64)
    for word, coeff in words:
        if word.sites and word.sites[-1] >= n_sites:
            raise ConstructionError(f"{word!r} outside lattice of {n_sites} sites")
        if coeff == 0.0:
            continue
        r, a = _word_action(word, n_sites)
        rows.append(r)
        cols.append(col)
        vals.append(coeff * a)
    if not rows:
        return sps.csr_matrix((dim, dim), dtype=complex)
    m = sps.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def realize(
    obj: Union[HamiltonianSpec, LocalTerm, PauliWord],
    n_sites: int | None = None,
    backend: str = "auto",
) -> OperatorMatrix:
    """Materialize a spec, term or word as a matrix on the full register.

    ``backend`` is ``"dense"``, ``"sparse"`` or ``"auto"`` (dense up to
    :data:`DENSE_THRESHOLD`).
    """
    if isinstance(obj, HamiltonianSpec):
        n = obj.n_sites if n_sites is None else n_sites
        words = [wc for t in obj.terms for wc in t.words]
    elif isinstance(obj, LocalTerm):
        if n_sites is None:
            raise ConstructionError("n_sites required to realize a bare term")
        n, words = n_sites, list(obj.words)
    elif isinstance(obj, PauliWord):
        if n_sites is None:
            raise ConstructionError("n_sites required to realize a bare word")
        n, words = n_sites, [(obj, 1.0)]
    else:
        raise TypeError(f"cannot realize {type(obj).__name__}")
    m = _realize_words(words, n)
    if backend == "auto":
        backend = "dense" if m.shape[0] <= DENSE_THRESHOLD else "sparse"
    if backend == "dense":
        return OperatorMatrix(m.toarray(), hermitian=True)
    if backend == "sparse":
        return OperatorMatrix(m, hermitian=True)
    raise ValueError(f"unknown backend {backend!r}")


def realize_kron(spec: HamiltonianSpec) -> np.ndarray:
    """Reference realization by explicit Kronecker products (slow, small N only)."""
    n = spec.n_sites
    out = np.zeros((2**n, 2**n), dtype=complex)
    for term in spec.terms:
        for word, coeff in term.words:
            m = np.ones((1, 1), dtype=complex)
            for site in range(n):
                m = np.kron(m, PAULI_MATRICES[word.letter(site)])
            out += coeff * m
    return out


def commutator(a: OperatorMatrix, b: OperatorMatrix, check: bool = True) -> OperatorMatrix:
    """Return ``ab - ba``; for Hermitian inputs the result is anti-Hermitian."""
    _check_same_dim(a, b)
    c = a.data @ b.data - b.data @ a.data
    if check and a.hermitian and b.hermitian:
        resid = c + c.conj().T
        resid = abs(resid).max() if sps.issparse(resid) else np.max(np.abs(resid), initial=0.0)
        scale = max(1.0, abs(c).max() if sps.issparse(c) else np.max(np.abs(c), initial=0.0))
        if resid > 1e-9 * scale:
            raise ValueError(f"commutator of Hermitian operators not anti-Hermitian ({resid:.3e})")
    return OperatorMatrix(c.tocsr() if sps.issparse(c) else c)


def is_hermitian(m: OperatorMatrix, atol: float = 1e-12) -> bool:
    d = m.data - m.data.conj().T
    if sps.issparse(d):
        return d.nnz == 0 or abs(d).max() <= atol
    return bool(np.max(np.abs(d), initial=0.0) <= atol)


def operator_norm(m: OperatorMatrix | np.ndarray, backend: str = "auto") -> float:
    """Largest singular value.

    The dense path diagonalizes (Hermitian and anti-Hermitian inputs use
    ``eigvalsh``); the iterative path runs Lanczos on M^dagger M.
    """
    if not isinstance(m, OperatorMatrix):
        m = OperatorMatrix(m)
    data = m.data
    values = data.data if sps.issparse(data) else data
    if not np.all(np.isfinite(values)):
        raise ValueError("operator has non-finite entries")
    if m.dim == 0:
        return 0.0
    if backend == "auto":
        backend = "dense" if m.dim <= DENSE_THRESHOLD else "iterative"
    if backend == "dense":
        return _dense_norm(m.dense())
    if backend == "iterative":
        return _iterative_norm(m.sparse())
    raise ValueError(f"unknown backend {backend!r}")


def _dense_norm(a: np.ndarray) -> float:
    if not a.any():
        return 0.0
    scale = np.max(np.abs(a))
    if np.allclose(a, a.conj().T, rtol=0, atol=1e-13 * scale):
        return float(np.max(np.abs(np.linalg.eigvalsh(a))))
    if np.allclose(a, -a.conj().T, rtol=0, atol=1e-13 * scale):
        return float(np.max(np.abs(np.linalg.eigvalsh(1j * a))))
    return float(np.linalg.norm(a, 2))


def _iterative_norm(a: sps.csr_matrix) -> float:
    if a.nnz == 0:
        return 0.0
    n = a.shape[0]
    ah = a.conj().T.tocsr()
    gram = spla.LinearOperator((n, n), matvec=lambda v: ah @ (a @ v), dtype=complex)
    if n <= 2:
        return float(np.linalg.norm(a.toarray(), 2))
    # fixed start vector keeps results reproducible
    v0 = np.random.default_rng(0).standard_normal(n) + 0j
    lam = spla.eigsh(gram, k=1, which="LA", v0=v0, tol=0, return_eigenvectors=False)
    return float(np.sqrt(max(lam[0].real, 0.0)))


def expectation(m: OperatorMatrix, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, m.data @ psi))
