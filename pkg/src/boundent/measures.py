"""Entanglement measures on pure states and on the UPB-complement mixtures.

Two measures are implemented:

* the geometric measure, one minus the maximal squared overlap with a
  product state;
* a generalized concurrence built from the purities of all reduced
  density matrices.

For the mixture on a subspace free of product states, both collapse to a
subspace minimum, certified by an orthonormal basis whose members all
attain that minimum.  The shifts family gets its closed-form bases; the
GenShifts families get numerically constructed certificates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import optimize
from .optimize import OptResult, OptimizerOptions
from .tensor import (
    DensityMatrix,
    Ket,
    OrthonormalBasis,
    canonical_phase,
    partial_trace,
    project_onto,
)
from .upb import (
    UpbFamily,
    concurrence_min_basis,
    concurrence_min_coords,
    geometric_min_basis,
    q_basis,
    rho_q,
)

MEMBER_TOL = 1e-6  # certificate fails when a member exceeds the minimum by this
_POOL_TOL = 1e-9  # restart joins the minimizer pool within this of the best
_DISTINCT_TOL = 1e-5  # canonical-vector distance distinguishing minimizers
_SUBSET_TOL = 1e-4  # Gram off-diagonal admissible before the polish

__all__ = [
    "Decomposition",
    "MeasureKind",
    "MeasureReport",
    "SymmetricPoint",
    "closest_product_state",
    "concurrence_pure",
    "decomposition_average",
    "geometric_pure",
    "purity_profile",
    "purity_sum",
    "rho_q_entanglement",
    "subspace_minimum",
    "support_basis",
    "symmetric_purity_profile",
    "symmetric_state",
]


class MeasureKind(str, Enum):
    GEOMETRIC = "geometric"
    CONCURRENCE = "concurrence"


@dataclass(frozen=True)
class Decomposition:
    """Pure-state ensemble realizing a mixed state."""

    weights: tuple
    states: tuple

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        states = tuple(self.states)
        if len(weights) != len(states) or not states:
            raise ValueError("weights and states must pair up nonempty")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "states", states)
        self.mixture()  # validates the mixed state

    def mixture(self) -> DensityMatrix:
        mat = sum(
            w * np.outer(s.amplitudes, s.amplitudes.conj())
            for w, s in zip(self.weights, self.states)
        )
        return DensityMatrix(mat)


@dataclass(frozen=True)
class SymmetricPoint:
    """Parameters (theta, gamma) of the symmetric two-angle ansatz."""

    theta: float
    gamma: float

    def __post_init__(self):
        for name in ("theta", "gamma"):
            v = getattr(self, name)
            if not -1e-12 <= v <= math.pi + 1e-12:
                raise ValueError(f"{name}={v} outside [0, pi]")


@dataclass
class MeasureReport:
    """Value of a measure on a mixture plus its basis certificate."""

    kind: MeasureKind
    value: float
    basis: OrthonormalBasis | None
    member_values: tuple | None
    residuals: dict
    diagnostics: dict
    degenerate: bool = False
    certified: bool = False
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        basis = None
        if self.basis is not None:
            basis = [
                [[float(a.real), float(a.imag)] for a in member.amplitudes]
                for member in self.basis
            ]
        return {
            "measure": self.kind.value,
            "value": float(self.value),
            "basis": basis,
            "member_values": None
            if self.member_values is None
            else [float(v) for v in self.member_values],
            "diagnostics": self.diagnostics,
            "certification": {
                "certified": bool(self.certified),
                "degenerate": bool(self.degenerate),
                "residuals": {k: float(v) for k, v in self.residuals.items()},
                "notes": list(self.notes),
            },
        }


# --------------------------------------------------------------------------
# pure-state measures
# --------------------------------------------------------------------------

def purity_sum(psi: Ket) -> float:
    """Sum of Tr[rho_j^2] over all six nonempty proper party subsets."""
    if psi.n_parties != 3:
        raise ValueError("purity_sum expects a three-party ket")
    total = 0.0
    for keep in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2)):
        total += partial_trace(psi, keep).purity()
    return total


def concurrence_pure(psi: Ket) -> float:
    """Concurrence 2^{-1/2} sqrt(6 - purity_sum) of a three-qubit pure state.

    Radicands in [-1e-9, 0) are treated as rounding on nearly-product
    states and clamped to zero; anything below -1e-9 signals corrupted
    input and raises.
    """
    rad = 6.0 - purity_sum(psi)
    if rad < -1e-9:
        raise ArithmeticError(f"concurrence radicand {rad} below the rounding floor")
    return math.sqrt(max(rad, 0.0) / 2.0)


def geometric_pure(psi: Ket, opts: OptimizerOptions | None = None) -> float:
    """Geometric measure 1 - max over product states of |<psi|phi>|^2.

    The inner maximization runs the alternating product solver on
    1 - |psi><psi|, whose minimum equals the measure directly.
    """
    if psi.n_parties != 3:
        raise ValueError("geometric_pure expects a three-party ket")
    h = np.eye(8) - np.outer(psi.amplitudes, psi.amplitudes.conj())
    return optimize.min_product_overlap(h, opts).value


def closest_product_state(psi: Ket, opts: OptimizerOptions | None = None) -> tuple:
    """The product state maximizing |<psi|phi>|^2, with that overlap."""
    if psi.n_parties != 3:
        raise ValueError("closest_product_state expects a three-party ket")
    h = np.eye(8) - np.outer(psi.amplitudes, psi.amplitudes.conj())
    res = optimize.min_product_overlap(h, opts)
    return res.argmin.ket().canonical(), 1.0 - res.value


def decomposition_average(
    kind: MeasureKind,
    decomposition: Decomposition,
    opts: OptimizerOptions | None = None,
) -> float:
    """Ensemble average sum_i p_i E(psi_i); an upper bound on the convex roof."""
    measure = _pure_measure(kind, opts)
    return float(
        sum(w * measure(s) for w, s in zip(decomposition.weights, decomposition.states))
    )


def _pure_measure(kind: MeasureKind, opts):
    kind = MeasureKind(kind)
    if kind is MeasureKind.CONCURRENCE:
        return concurrence_pure
    return lambda psi: geometric_pure(psi, opts)


# --------------------------------------------------------------------------
# subspace minima
# --------------------------------------------------------------------------

def subspace_minimum(
    kind: MeasureKind,
    basis: OrthonormalBasis,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
) -> OptResult:
    """Minimum of a pure-state measure over the unit sphere of a subspace.

    The geometric case needs no nested optimization: the minimum equals
    the minimal product overlap with the orthogonal complement of the
    span, and the minimizing state is the normalized projection of the
    optimal product state.  The concurrence case runs the simplex solver
    over the subspace sphere.
    """
    kind = MeasureKind(kind)
    if kind is MeasureKind.CONCURRENCE:
        return optimize.minimize_concurrence_on_sphere(basis, opts, backend=backend)
    span = basis.projector()
    res = optimize.min_product_overlap(
        np.eye(span.dim) - span.entries, opts, backend=backend
    )
    product = res.argmin.ket()
    projected, _ = project_onto(product, span)
    return OptResult(
        value=res.value,
        argmin=projected.canonical(),
        converged_restarts=res.converged_restarts,
        best_restart=res.best_restart,
        spread=res.spread,
        restart_values=res.restart_values,
    )


# --------------------------------------------------------------------------
# symmetric two-angle ansatz
# --------------------------------------------------------------------------

def symmetric_state(pt: SymmetricPoint) -> Ket:
    """cos(theta) q0 + sin(theta) e^{i gamma} (q1 + q2 + q3)/sqrt(3)."""
    qm = q_basis().matrix()
    coeff = np.array(
        [
            math.cos(pt.theta),
            *([math.sin(pt.theta) * np.exp(1j * pt.gamma) / math.sqrt(3.0)] * 3),
        ],
        dtype=np.complex128,
    )
    return Ket(qm @ coeff)


def purity_profile(theta, gamma):
    """Closed-form purity sum of the symmetric ansatz; broadcasts over arrays."""
    c2 = np.cos(theta) ** 2
    return (10.0 + 25.0 * c2 - 26.0 * c2**2) / 3.0 - 4.0 * c2 * np.sin(theta) ** 2 * (
        1.0 - np.cos(2.0 * gamma)
    )


def symmetric_purity_profile(pt: SymmetricPoint) -> float:
    return float(purity_profile(pt.theta, pt.gamma))


# --------------------------------------------------------------------------
# mixture reports with basis certificates
# --------------------------------------------------------------------------

def rho_q_entanglement(
    kind: MeasureKind,
    family: UpbFamily,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
) -> MeasureReport:
    """Measure value of the complement mixture, certified by a basis.

    The certificate is an orthonormal basis of the support whose members
    all attain the subspace minimum, so the ensemble average meets the
    lower bound and pins the convex roof.  Shifts uses the closed-form
    bases; GenShifts certificates are assembled from the numerically
    found minimizers.  Degenerate (extendible) families report value 0.
    """
    kind = MeasureKind(kind)
    opts = opts or OptimizerOptions()
    if family.degenerate:
        return MeasureReport(
            kind=kind,
            value=0.0,
            basis=None,
            member_values=None,
            residuals={},
            diagnostics={"restarts": opts.restarts, "converged": 0, "spread": 0.0},
            degenerate=True,
            certified=False,
            notes=("family is extendible: a product state lies in the support",),
        )
    notes = []
    if kind is MeasureKind.CONCURRENCE:
        notes.append("analytic upper bound + numerical evidence")
        result, basis = _concurrence_certificate(family, opts, backend)
        member_fn = concurrence_pure
    else:
        result, basis = _geometric_certificate(family, opts, backend)
        member_fn = lambda psi: geometric_pure(psi, opts)  # noqa: E731
    report = MeasureReport(
        kind=kind,
        value=result.value,
        basis=basis,
        member_values=None,
        residuals={},
        diagnostics=result.diagnostics(),
        notes=tuple(notes),
    )
    if basis is None:
        report.notes += ("upper bound only: no minimally-entangled basis found",)
        return report
    report.member_values = tuple(member_fn(psi) for psi in basis)
    report.residuals = _certificate_residuals(family, basis, result.value, report.member_values)
    report.certified = (
        report.residuals["orthonormality"] <= 1e-10
        and report.residuals["membership"] <= 1e-8
        and report.residuals["reconstruction"] <= 1e-10
        and report.residuals["member_deviation"] <= MEMBER_TOL
    )
    if not report.certified:
        report.notes += ("upper bound only: certificate residuals out of tolerance",)
    return report


def _certificate_residuals(family, basis, value, member_values) -> dict:
    gram = OrthonormalBasis.gram_matrix(basis.members)
    p_entries = family.projector_p().entries
    membership = max(
        float((m.amplitudes.conj() @ p_entries @ m.amplitudes).real) for m in basis
    )
    recon = np.abs(basis.projector().entries / 4.0 - rho_q(family).entries).max()
    return {
        "orthonormality": float(np.abs(gram - np.eye(len(basis))).max()),
        "membership": membership,
        "reconstruction": float(recon),
        "member_deviation": float(max(abs(v - value) for v in member_values)),
    }


def _geometric_certificate(family, opts, backend):
    if family.family == "shifts":
        res = subspace_minimum(MeasureKind.GEOMETRIC, q_basis(), opts, backend)
        return res, geometric_min_basis()
    values, factors, converged = optimize.product_overlap_restarts(
        family.projector_p(), opts, backend=backend
    )
    kets = [np.kron(np.kron(f[0], f[1]), f[2]) for f in factors]
    best, vmin, spread = optimize._reduce_restarts(values, converged, kets)
    res = OptResult(
        value=vmin,
        argmin=None,
        converged_restarts=int(converged.sum()),
        best_restart=best,
        spread=spread,
        restart_values=values,
    )
    pool = _distinct_canonical(
        [kets[i] for i in np.flatnonzero(values <= vmin + _POOL_TOL)]
    )
    qproj = family.projector_q().entries
    projected = []
    for vec in pool:
        image = qproj @ vec
        nrm = np.linalg.norm(image)
        if nrm > 1e-6:
            projected.append(canonical_phase(image / nrm))
    res.argmin = Ket(projected[0]) if projected else None
    basis = _assemble_basis(projected)
    return res, basis


def _concurrence_certificate(family, opts, backend):
    if family.family == "shifts":
        res = optimize.minimize_concurrence_on_sphere(q_basis(), opts, backend=backend)
        return res, concurrence_min_basis()
    support = support_basis(family)
    seeds = _transported_seeds(support)
    pure, coords, kets, converged = optimize.concurrence_sphere_restarts(
        support, opts, backend=backend, extra_starts=seeds
    )
    res = optimize._reduce_sphere(pure, coords, kets, converged)
    pool = _distinct_canonical(
        [kets[i].amplitudes for i in np.flatnonzero(pure <= res.value + _POOL_TOL)]
    )
    basis = _assemble_basis(pool)
    return res, basis


def support_basis(family) -> OrthonormalBasis:
    """Deterministic orthonormal basis of the mixture support."""
    vals, vecs = np.linalg.eigh(rho_q(family).entries)
    members = [Ket(canonical_phase(vecs[:, j])) for j in range(4, 8)]
    return OrthonormalBasis(tuple(members))


def _transported_seeds(support: OrthonormalBasis) -> np.ndarray:
    """Extra simplex starts: the shifts closed-form coordinates reused.

    There is no exact local-unitary transport between family parameters,
    so the shifts coordinate pattern in the support eigenbasis only seeds
    the search; the multistart pool does the rest.
    """
    coords = concurrence_min_coords()
    return np.hstack([coords, np.zeros_like(coords)])


def _distinct_canonical(vectors, tol: float = _DISTINCT_TOL) -> list:
    out = []
    for vec in vectors:
        canon = canonical_phase(vec)
        if not any(np.linalg.norm(canon - u) < tol for u in out):
            out.append(canon)
    return out


def _assemble_basis(pool) -> OrthonormalBasis | None:
    """Pick four nearly-orthonormal pool members and polish them.

    Searches all 4-subsets for the smallest maximal Gram off-diagonal;
    below the admission threshold the subset is symmetrically
    orthonormalized (which stays inside the span and perturbs each
    member by at most the off-diagonal size).
    """
    if len(pool) < 4:
        return None
    best_subset, best_off = None, np.inf
    for subset in itertools.combinations(range(len(pool)), 4):
        gram = np.array([[np.vdot(pool[i], pool[j]) for j in subset] for i in subset])
        off = np.abs(gram - np.eye(4)).max()
        if off < best_off:
            best_subset, best_off = subset, off
    if best_off > _SUBSET_TOL:
        return None
    mat = np.column_stack([pool[i] for i in best_subset])
    polished = _lowdin(mat)
    members = tuple(
        Ket(canonical_phase(polished[:, j])) for j in range(polished.shape[1])
    )
    return OrthonormalBasis(members)


def _lowdin(mat: np.ndarray) -> np.ndarray:
    """Symmetric orthonormalization mat (mat^H mat)^{-1/2}."""
    overlap = mat.conj().T @ mat
    vals, vecs = np.linalg.eigh(overlap)
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    return mat @ inv_sqrt
