"""Dense complex linear algebra for registers of up to three qubits.

Index convention (fixed for the whole package): the computational-basis
state |abc> of parties (A, B, C) lives at amplitude index ``4*a + 2*b + c``,
i.e. party A is the most significant bit.  Tensor products are Kronecker
products in the order A (x) B (x) C.

Global phase convention: a state vector is in *canonical form* when its
first amplitude of modulus > 1e-12 is real and positive.  Canonical form
is what equality helpers and golden files compare.

Tolerances are centralised here: structural checks (norms, Hermiticity,
Gram matrices, idempotency) use ``ATOL_STRUCT``; spectral checks
(eigenvalues, trace-vs-spectrum consistency) use ``ATOL_SPECTRAL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ATOL_STRUCT = 1e-12
ATOL_SPECTRAL = 1e-10

# Parties are addressed by index 0, 1, 2 (= A, B, C).
PARTY_NAMES = "ABC"

__all__ = [
    "ATOL_STRUCT",
    "ATOL_SPECTRAL",
    "DependentInputError",
    "DensityMatrix",
    "Ket",
    "OrthogonalProjectionError",
    "OrthonormalBasis",
    "Projector",
    "canonical_phase",
    "eigvals_hermitian",
    "ket_from_pairs",
    "ket_to_pairs",
    "orthonormalize",
    "partial_trace",
    "partial_transpose",
    "permute_parties",
    "project_onto",
    "tensor_product",
]


class OrthogonalProjectionError(ValueError):
    """Raised when a vector has no significant component in a subspace."""


class DependentInputError(ValueError):
    """Raised by :func:`orthonormalize` on linearly dependent input."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"input vector {index} is linearly dependent on its predecessors")


def _as_vector(values) -> np.ndarray:
    vec = np.asarray(values, dtype=np.complex128).reshape(-1)
    return vec


def _as_square(values) -> np.ndarray:
    mat = np.asarray(values, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def _party_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim != 2**n or not 1 <= n <= 3:
        raise ValueError(f"dimension {dim} is not 2^n for n in 1..3")
    return n


def canonical_phase(vec: np.ndarray, atol: float = ATOL_STRUCT) -> np.ndarray:
    """Rotate the global phase so the first significant amplitude is real positive."""
    vec = _as_vector(vec)
    for amp in vec:
        if abs(amp) > atol:
            return vec * np.exp(-1j * np.angle(amp))
    return vec.copy()


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Ket:
    """Unit-norm amplitude vector over a register of 1..3 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = _as_vector(self.amplitudes)
        _party_count(vec.size)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > ATOL_STRUCT:
            raise ValueError(f"ket norm {norm} deviates from 1 by more than {ATOL_STRUCT}")
        object.__setattr__(self, "amplitudes", _freeze(vec))

    @classmethod
    def normalized(cls, values) -> "Ket":
        """Build a Ket from any nonzero vector, rescaling to unit norm."""
        vec = _as_vector(values)
        norm = np.linalg.norm(vec)
        if norm < ATOL_STRUCT:
            raise ValueError("cannot normalize a (near-)zero vector")
        return cls(vec / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_parties(self) -> int:
        return _party_count(self.dim)

    def canonical(self) -> "Ket":
        return Ket(canonical_phase(self.amplitudes))

    def isclose(self, other: "Ket", atol: float = ATOL_STRUCT) -> bool:
        """Equality up to global phase, compared in canonical form."""
        if self.dim != other.dim:
            return False
        a = canonical_phase(self.amplitudes)
        b = canonical_phase(other.amplitudes)
        return bool(np.max(np.abs(a - b)) <= atol)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "Ket") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-one matrix."""

    entries: np.ndarray

    def __post_init__(self):
        mat = _as_square(self.entries)
        _party_count(mat.shape[0])
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > ATOL_STRUCT:
            raise ValueError(f"matrix deviates from Hermitian by {herm_dev}")
        trace_dev = abs(np.trace(mat).real - 1.0)
        if trace_dev > ATOL_STRUCT:
            raise ValueError(f"trace deviates from 1 by {trace_dev}")
        lo = np.linalg.eigvalsh(mat)[0]
        if lo < -1e-12:
            raise ValueError(f"matrix has negative eigenvalue {lo}")
        object.__setattr__(self, "entries", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_parties(self) -> int:
        return _party_count(self.dim)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian idempotent matrix with known rank."""

    entries: np.ndarray
    rank: int

    def __post_init__(self):
        mat = _as_square(self.entries)
        _party_count(mat.shape[0])
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > ATOL_STRUCT:
            raise ValueError(f"projector deviates from Hermitian by {herm_dev}")
        idem_dev = np.max(np.abs(mat @ mat - mat))
        if idem_dev > ATOL_STRUCT:
            raise ValueError(f"projector deviates from idempotency by {idem_dev}")
        trace_dev = abs(np.trace(mat).real - self.rank)
        if trace_dev > ATOL_SPECTRAL:
            raise ValueError(f"projector trace deviates from rank {self.rank} by {trace_dev}")
        object.__setattr__(self, "entries", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.entries, self.dim - self.rank)

    def expectation(self, ket: Ket) -> float:
        return float((ket.amplitudes.conj() @ self.entries @ ket.amplitudes).real)

    @classmethod
    def from_kets(cls, kets: Sequence[Ket]) -> "Projector":
        """Projector onto the span of mutually orthonormal kets."""
        mat = sum(np.outer(k.amplitudes, k.amplitudes.conj()) for k in kets)
        return cls(mat, len(kets))


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Ordered list of mutually orthogonal unit kets of a common register."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("basis needs at least one member")
        dims = {k.dim for k in members}
        if len(dims) != 1:
            raise ValueError("basis members must share a register shape")
        gram = self.gram_matrix(members)
        dev = np.max(np.abs(gram - np.eye(len(members))))
        if dev > ATOL_STRUCT:
            raise ValueError(f"Gram matrix deviates from identity by {dev}")
        object.__setattr__(self, "members", members)

    @staticmethod
    def gram_matrix(members: Sequence[Ket]) -> np.ndarray:
        mat = np.column_stack([k.amplitudes for k in members])
        return mat.conj().T @ mat

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> Ket:
        return self.members[i]

    def matrix(self) -> np.ndarray:
        """Members as columns of a (dim, k) array."""
        return np.column_stack([k.amplitudes for k in self.members])

    def projector(self) -> Projector:
        return Projector.from_kets(self.members)


def tensor_product(factors: Sequence[Ket]) -> Ket:
    """Kronecker product of kets in the order given (A (x) B (x) C)."""
    if not factors:
        raise ValueError("tensor_product needs at least one factor")
    total = sum(f.n_parties for f in factors)
    if total > 3:
        raise ValueError(f"{total} parties exceed the supported register size of 3")
    vec = factors[0].amplitudes
    for f in factors[1:]:
        vec = np.kron(vec, f.amplitudes)
    return Ket(vec)


def _entries(rho) -> np.ndarray:
    if isinstance(rho, (DensityMatrix, Projector)):
        return rho.entries
    if isinstance(rho, Ket):
        return np.outer(rho.amplitudes, rho.amplitudes.conj())
    return _as_square(rho)


def _party_subset(parties: Iterable[int], n: int, *, allow_full: bool) -> tuple:
    subset = tuple(sorted(set(int(p) for p in parties)))
    if not subset:
        raise ValueError("party subset must be nonempty")
    if any(p < 0 or p >= n for p in subset):
        raise ValueError(f"party indices must lie in 0..{n - 1}")
    if len(subset) == n and not allow_full:
        raise ValueError("party subset must be proper")
    return subset


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every party not listed in ``keep``."""
    mat = _entries(rho)
    n = _party_count(mat.shape[0])
    kept = _party_subset(keep, n, allow_full=True)
    if len(kept) == n:
        return rho if isinstance(rho, DensityMatrix) else DensityMatrix(mat)
    traced = tuple(p for p in range(n) if p not in kept)
    tens = mat.reshape((2,) * (2 * n))
    for p in reversed(traced):
        tens = np.trace(tens, axis1=p, axis2=p + tens.ndim // 2)
    d = 2 ** len(kept)
    return DensityMatrix(tens.reshape(d, d))


def partial_transpose(rho, subset: Iterable[int]) -> np.ndarray:
    """Transpose the listed parties; returns a Hermitian ndarray."""
    mat = _entries(rho)
    n = _party_count(mat.shape[0])
    parts = _party_subset(subset, n, allow_full=False)
    tens = mat.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for p in parts:
        axes[p], axes[p + n] = axes[p + n], axes[p]
    return tens.transpose(axes).reshape(mat.shape)


def project_onto(ket: Ket, sub: Projector) -> tuple:
    """Project ``ket`` onto a subspace.

    Returns ``(projected, weight)`` where ``weight = <ket|P|ket>`` and
    ``projected`` is the normalized projection.  Raises
    :class:`OrthogonalProjectionError` when the weight is at most 1e-12,
    i.e. the ket is orthogonal to the subspace.
    """
    if ket.dim != sub.dim:
        raise ValueError("ket and projector shapes do not match")
    image = sub.entries @ ket.amplitudes
    weight = float((ket.amplitudes.conj() @ image).real)
    if weight <= 1e-12:
        raise OrthogonalProjectionError(
            f"vector is orthogonal to the subspace (weight {weight:.3e})"
        )
    return Ket(image / np.sqrt(weight)), weight


def orthonormalize(kets: Sequence[Ket]) -> OrthonormalBasis:
    """Sequential (modified Gram-Schmidt) orthonormalization.

    Deterministic given input order; members come out in canonical phase.
    Linear dependence (residual norm^2 <= 1e-10 at some step) raises
    :class:`DependentInputError` naming the offending input index.
    """
    vectors = []
    for idx, ket in enumerate(kets):
        v = ket.amplitudes.copy()
        for _ in range(2):  # second pass scrubs rounding residue
            for u in vectors:
                v = v - np.vdot(u, v) * u
        nrm2 = float(np.real(np.vdot(v, v)))
        if nrm2 <= 1e-10:
            raise DependentInputError(idx)
        vectors.append(v / np.sqrt(nrm2))
    return OrthonormalBasis(tuple(Ket(canonical_phase(v)) for v in vectors))


def eigvals_hermitian(mat) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    m = _entries(mat)
    herm_dev = np.max(np.abs(m - m.conj().T))
    if herm_dev > ATOL_SPECTRAL:
        raise ValueError(f"matrix deviates from Hermitian by {herm_dev}")
    vals = np.linalg.eigvalsh(m)
    if abs(vals.sum() - np.trace(m).real) > ATOL_SPECTRAL:
        raise ArithmeticError("eigenvalue sum is inconsistent with the trace")
    return vals


def permute_parties(op, perm: Sequence[int]):
    """Relabel parties of a ket vector or an operator.

    ``perm[k]`` names the source party whose state ends up at slot ``k``;
    e.g. the cycle A->B->C->A is ``perm=(2, 0, 1)`` (slot A receives C's
    state, slot B receives A's, slot C receives B's).
    """
    if isinstance(op, Ket):
        n = op.n_parties
        if sorted(perm) != list(range(n)):
            raise ValueError(f"perm must be a permutation of 0..{n - 1}")
        vec = op.amplitudes.reshape((2,) * n).transpose(perm).reshape(-1)
        return Ket(vec)
    mat = _entries(op)
    n = _party_count(mat.shape[0])
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm must be a permutation of 0..{n - 1}")
    axes = list(perm) + [p + n for p in perm]
    out = mat.reshape((2,) * (2 * n)).transpose(axes).reshape(mat.shape)
    if isinstance(op, DensityMatrix):
        return DensityMatrix(out)
    if isinstance(op, Projector):
        return Projector(out, op.rank)
    return out


def ket_to_pairs(ket: Ket) -> list:
    """Serialize amplitudes as [re, im] decimal pairs."""
    return [[float(a.real), float(a.imag)] for a in ket.amplitudes]


def ket_from_pairs(pairs: Sequence[Sequence[float]]) -> Ket:
    """Inverse of :func:`ket_to_pairs`."""
    vec = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return Ket(vec)
