"""Shifts/GenShifts unextendible product bases and derived states.

Builds the four-member product families, the bound entangled state on the
complementary subspace, explicit bases of that subspace, the closed-form
optimal product states, and reference states (GHZ, W, product).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optimize import OptimizerOptions, ProductAngles, min_product_overlap
from .tensor import (
    DensityMatrix,
    Ket,
    OrthonormalBasis,
    Projector,
    canonical_phase,
    tensor_product,
)

_SQRT6 = math.sqrt(6.0)

DEGENERACY_TOL = 1e-10

__all__ = [
    "ANALYTIC",
    "AnalyticConstants",
    "DEGENERACY_TOL",
    "QubitKet",
    "UpbFamily",
    "concurrence_min_basis",
    "genshifts_upb",
    "geometric_min_basis",
    "optimal_product_states",
    "pauli_form_rho",
    "q_basis",
    "reference_state",
    "rho_q",
    "shifts_upb",
]


@dataclass(frozen=True)
class AnalyticConstants:
    """Closed-form values the package reproduces.

    ``theta0``          angle of the symmetric optimal product state,
                        arccos(-(sqrt(6)-2)/2);
    ``geometric_min``   1 - 3*sqrt(6)/8, the geometric-measure value;
    ``concurrence_min`` sqrt(897)/52, the concurrence value;
    ``product_overlap`` 3*sqrt(6)/8, squared overlap of the minimal basis
                        members with their closest product states.
    """

    theta0: float = math.acos(-(_SQRT6 - 2.0) / 2.0)
    geometric_min: float = 1.0 - 3.0 * _SQRT6 / 8.0
    concurrence_min: float = math.sqrt(897.0) / 52.0
    product_overlap: float = 3.0 * _SQRT6 / 8.0


ANALYTIC = AnalyticConstants()


@dataclass(frozen=True, eq=False)
class QubitKet:
    """Single-qubit state with a well-defined orthogonal companion."""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if vec.size != 2:
            raise ValueError("QubitKet needs exactly two amplitudes")
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise ValueError("cannot normalize a zero qubit state")
        vec = vec / norm
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @classmethod
    def from_bloch(cls, t: float, chi: float = 0.0) -> "QubitKet":
        """cos(t/2)|0> + e^{i chi} sin(t/2)|1>."""
        return cls(np.array([math.cos(t / 2), np.exp(1j * chi) * math.sin(t / 2)]))

    @classmethod
    def from_overlap(cls, s: float) -> "QubitKet":
        """Real state with |<0|phi>|^2 = s."""
        if not 0.0 <= s <= 1.0:
            raise ValueError("overlap must lie in [0, 1]")
        return cls(np.array([math.sqrt(s), math.sqrt(1.0 - s)], dtype=np.complex128))

    def orthogonal(self) -> "QubitKet":
        """The companion state with <phi|phi_perp> = 0, in canonical phase."""
        u, v = self.amplitudes
        return QubitKet(canonical_phase(np.array([np.conj(v), -np.conj(u)])))

    def ket(self) -> Ket:
        return Ket(self.amplitudes)

    def overlap_with_zero(self) -> float:
        return float(abs(self.amplitudes[0]) ** 2)


ZERO = QubitKet(np.array([1.0, 0.0]))
ONE = QubitKet(np.array([0.0, 1.0]))
PLUS = QubitKet(np.array([1.0, 1.0]))
MINUS = QubitKet(np.array([1.0, -1.0]))


class UpbFamily:
    """Four mutually orthonormal three-qubit product states."""

    def __init__(self, members, family: str, parameter: QubitKet | None = None):
        members = tuple(members)
        if len(members) != 4:
            raise ValueError("a family has exactly four members")
        gram = OrthonormalBasis.gram_matrix(members)
        dev = np.max(np.abs(gram - np.eye(4)))
        if dev > 1e-12:
            raise ValueError(f"family members are not orthonormal (dev {dev})")
        self.members = members
        self.family = family
        self.parameter = parameter
        self._min_overlap: float | None = None

    def projector_p(self) -> Projector:
        """Projector onto the span of the four members."""
        return Projector.from_kets(self.members)

    def projector_q(self) -> Projector:
        """Projector onto the complementary subspace."""
        return self.projector_p().complement()

    def min_product_overlap_value(self, opts: OptimizerOptions | None = None) -> float:
        """min over product states of the overlap with the member span.

        Zero (within :data:`DEGENERACY_TOL`) means the family is extendible.
        Cached for the default options.
        """
        if opts is None:
            if self._min_overlap is None:
                self._min_overlap = min_product_overlap(self.projector_p()).value
            return self._min_overlap
        return min_product_overlap(self.projector_p(), opts).value

    @property
    def degenerate(self) -> bool:
        """True when a product state is orthogonal to all four members."""
        return self.min_product_overlap_value() < DEGENERACY_TOL

    def __repr__(self):
        return f"UpbFamily({self.family!r}, parameter={self.parameter!r})"


def shifts_upb() -> UpbFamily:
    """The four-state family |000>, |1+->, |-1+>, |+-1>."""
    members = (
        tensor_product([ZERO.ket(), ZERO.ket(), ZERO.ket()]),
        tensor_product([ONE.ket(), PLUS.ket(), MINUS.ket()]),
        tensor_product([MINUS.ket(), ONE.ket(), PLUS.ket()]),
        tensor_product([PLUS.ket(), MINUS.ket(), ONE.ket()]),
    )
    return UpbFamily(members, "shifts", parameter=PLUS)


def genshifts_upb(phi) -> UpbFamily:
    """One-parameter family |000>, |1 p p'>, |p' 1 p>, |p p' 1>.

    ``phi`` may be a :class:`QubitKet` or any two-component array; it is
    normalized internally.  ``phi = |+>`` reproduces :func:`shifts_upb`
    member by member.  Families whose complement admits a product state
    (e.g. phi = |0> or |1>) carry the ``degenerate`` flag.
    """
    phi = phi if isinstance(phi, QubitKet) else QubitKet(np.asarray(phi))
    perp = phi.orthogonal()
    p, q = phi.ket(), perp.ket()
    members = (
        tensor_product([ZERO.ket(), ZERO.ket(), ZERO.ket()]),
        tensor_product([ONE.ket(), p, q]),
        tensor_product([q, ONE.ket(), p]),
        tensor_product([p, q, ONE.ket()]),
    )
    return UpbFamily(members, "genshifts", parameter=phi)


def rho_q(upb: UpbFamily) -> DensityMatrix:
    """Uniform mixture on the subspace complementary to the family span."""
    return DensityMatrix(upb.projector_q().entries / 4.0)


def pauli_form_rho() -> DensityMatrix:
    """The shifts mixture from its operator expansion.

    (1/8) [ 1 - (1/2)(1 (x) s+ (x) s-  + cyclic) - (1/(2 sqrt 2))(s+^3 + s-^3) ]
    with s+- = (sz +- sx)/sqrt(2).
    """
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    sp = (sz + sx) / math.sqrt(2)
    sm = (sz - sx) / math.sqrt(2)
    eye = np.eye(2, dtype=np.complex128)

    def k3(x, y, z):
        return np.kron(x, np.kron(y, z))

    cyclic = k3(eye, sp, sm) + k3(sm, eye, sp) + k3(sp, sm, eye)
    cubes = k3(sp, sp, sp) + k3(sm, sm, sm)
    return DensityMatrix((np.eye(8) - cyclic / 2.0 - cubes / (2.0 * math.sqrt(2))) / 8.0)


def _string_state(pattern: str) -> Ket:
    lookup = {"0": ZERO, "1": ONE, "+": PLUS, "-": MINUS}
    return tensor_product([lookup[ch].ket() for ch in pattern])


def q_basis() -> OrthonormalBasis:
    """The printed orthonormal basis of the shifts complementary subspace."""
    rt2 = math.sqrt(2.0)
    members = (
        Ket((_string_state("+++").amplitudes - _string_state("---").amplitudes) / rt2),
        Ket((_string_state("+10").amplitudes - _string_state("-01").amplitudes) / rt2),
        Ket((_string_state("0+1").amplitudes - _string_state("1-0").amplitudes) / rt2),
        Ket((_string_state("10+").amplitudes - _string_state("01-").amplitudes) / rt2),
    )
    return OrthonormalBasis(members)


def optimal_angle_table() -> tuple:
    """The four raw (alpha, beta, gamma) triples minimizing the overlap.

    The pi/2 - theta0 entries are negative; as phase-free half-angle
    parameters they label the same states as the canonical pair
    (theta0 - pi/2, phase pi) that :class:`ProductAngles` stores.
    """
    t0 = ANALYTIC.theta0
    return (
        (t0, t0, t0),
        (math.pi + t0, math.pi / 2 - t0, 3 * math.pi / 2 - t0),
        (3 * math.pi / 2 - t0, math.pi + t0, math.pi / 2 - t0),
        (math.pi / 2 - t0, 3 * math.pi / 2 - t0, math.pi + t0),
    )


def _raw_angle_factor(angle: float) -> np.ndarray:
    return np.array([math.cos(angle / 2), math.sin(angle / 2)], dtype=np.complex128)


def optimal_product_states() -> tuple:
    """Closed-form product states attaining the minimal overlap with the span.

    Returns ``(kets, angles)`` with angles in canonical form; the four
    states are mutually orthonormal and themselves form a GenShifts-type
    UPB.
    """
    kets = []
    angles = []
    for triple in optimal_angle_table():
        a, b, c = (_raw_angle_factor(t) for t in triple)
        kets.append(Ket(np.kron(a, np.kron(b, c))))
        angles.append(ProductAngles.from_factors(a, b, c))
    return tuple(kets), tuple(angles)


def geometric_min_basis() -> OrthonormalBasis:
    """Projections of the optimal product states onto the complement.

    Each member is Q |phi_i> divided by sqrt(3 sqrt(6)/8); the four form
    an orthonormal basis on which the geometric measure is constant.
    """
    qproj = shifts_upb().projector_q().entries
    norm = math.sqrt(ANALYTIC.product_overlap)
    kets, _ = optimal_product_states()
    return OrthonormalBasis(tuple(Ket(qproj @ k.amplitudes / norm) for k in kets))


_CONCURRENCE_COORDS = np.array(
    [
        [5, 3, 3, 3],
        [3, -5, 3, -3],
        [3, -3, -5, 3],
        [3, 3, -3, -5],
    ],
    dtype=float,
) / (2.0 * math.sqrt(13.0))


def concurrence_min_basis() -> OrthonormalBasis:
    """Orthonormal basis on which the concurrence is constant.

    Coordinates in the :func:`q_basis` frame: (5,3,3,3)/(2 sqrt 13) and
    its three sign companions.
    """
    qmat = q_basis().matrix()
    return OrthonormalBasis(tuple(Ket(qmat @ row) for row in _CONCURRENCE_COORDS))


def concurrence_min_coords() -> np.ndarray:
    """Coordinate rows of :func:`concurrence_min_basis` in the q frame."""
    return _CONCURRENCE_COORDS.copy()


def reference_state(name: str) -> Ket:
    """GHZ, W, or the product state |000>."""
    key = name.strip().lower()
    if key == "ghz":
        vec = np.zeros(8, dtype=np.complex128)
        vec[0] = vec[7] = 1.0 / math.sqrt(2.0)
        return Ket(vec)
    if key == "w":
        vec = np.zeros(8, dtype=np.complex128)
        vec[1] = vec[2] = vec[4] = 1.0 / math.sqrt(3.0)
        return Ket(vec)
    if key == "product":
        vec = np.zeros(8, dtype=np.complex128)
        vec[0] = 1.0
        return Ket(vec)
    raise ValueError(f"unknown reference state {name!r}")
