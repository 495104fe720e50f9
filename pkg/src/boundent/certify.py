"""Independent certification of the structural claims about the mixtures.

Covers unextendibility of the product family, positivity of the partial
transpose across all bipartitions, the cyclic-only permutation symmetry,
and the explicit biseparable basis of the complementary subspace (four
orthonormal states that are product across one cut).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .optimize import OptimizerOptions, min_product_overlap
from .tensor import (
    DensityMatrix,
    Ket,
    canonical_phase,
    eigvals_hermitian,
    partial_transpose,
    permute_parties,
)
from .upb import DEGENERACY_TOL, UpbFamily, rho_q

CYCLIC_PERM = (2, 0, 1)  # slot A receives C, B receives A, C receives B
SWAP_AB_PERM = (1, 0, 2)

_CUT_PERMS = {"AB|C": (0, 1, 2), "BC|A": (1, 2, 0), "CA|B": (2, 0, 1)}

DEFAULT_BISEP_RESOLUTION = (721, 1441)  # quarter-degree Bloch grid

__all__ = [
    "BiseparableSearchError",
    "CertReport",
    "CYCLIC_PERM",
    "DEFAULT_BISEP_RESOLUTION",
    "SWAP_AB_PERM",
    "biseparable_basis_search",
    "check_unextendibility",
    "full_certification",
    "permutation_deviation",
    "ppt_report",
]


class BiseparableSearchError(RuntimeError):
    """The scan found no biseparable basis at the given resolution.

    Never a claim of nonexistence; rerun with a finer grid.
    """


@dataclass
class CertReport:
    """Certification summary for one family; None marks a skipped field."""

    family: str
    unextendibility: float
    ppt_min_eigs: tuple
    cyclic_deviation: float
    transposition_deviation: float
    bisep_found: bool | None
    bisep_residuals: dict | None

    def failures(self, unextendibility_tol: float = 1e-8) -> list:
        """Names of the checks that certify bound entanglement and failed."""
        out = []
        if not self.unextendibility > unextendibility_tol:
            out.append("unextendibility")
        if min(self.ppt_min_eigs) < -1e-10:
            out.append("ppt")
        if not self.cyclic_deviation < 1e-12:
            out.append("cyclic_invariance")
        if not self.transposition_deviation > 0.01:
            out.append("transposition_asymmetry")
        if self.bisep_found is False:
            out.append("biseparable_basis")
        if self.bisep_residuals is not None:
            worst = max(
                self.bisep_residuals[k]
                for k in ("orthonormality", "membership", "reconstruction")
            )
            if worst > 1e-8:
                out.append("biseparable_residuals")
        return out

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "unextendibility": float(self.unextendibility),
            "ppt_min_eigs": {
                "A|BC": float(self.ppt_min_eigs[0]),
                "B|CA": float(self.ppt_min_eigs[1]),
                "C|AB": float(self.ppt_min_eigs[2]),
            },
            "cyclic_deviation": float(self.cyclic_deviation),
            "transposition_deviation": float(self.transposition_deviation),
            "biseparable": None
            if self.bisep_found is None
            else {
                "found": bool(self.bisep_found),
                "residuals": None
                if self.bisep_residuals is None
                else {k: float(v) for k, v in self.bisep_residuals.items()},
            },
        }


def check_unextendibility(family: UpbFamily, opts: OptimizerOptions | None = None) -> float:
    """min over product states of the overlap with the family span.

    Strictly positive means no product state is orthogonal to all four
    members, i.e. the family is unextendible.
    """
    return min_product_overlap(family.projector_p(), opts).value


def ppt_report(rho: DensityMatrix) -> tuple:
    """Minimal partial-transpose eigenvalue for each single-party cut."""
    return tuple(
        float(eigvals_hermitian(partial_transpose(rho, (p,)))[0]) for p in range(3)
    )


def permutation_deviation(rho: DensityMatrix, perm) -> float:
    """Frobenius distance between rho and its party-relabelled image."""
    moved = permute_parties(rho, perm)
    return float(np.linalg.norm(moved.entries - rho.entries))


# --------------------------------------------------------------------------
# biseparable basis search
# --------------------------------------------------------------------------

def _bloch_vector(t, chi):
    return np.stack(
        [np.broadcast_to(np.cos(t / 2), np.shape(chi)), np.exp(1j * chi) * np.sin(t / 2)],
        axis=-1,
    )


def _restricted_min_eigs(tens, cvecs):
    """Smallest eigenvalue of c-restricted projector blocks, batched over c."""
    blocks = np.einsum("isjt,ns,nt->nij", tens, cvecs.conj(), cvecs)
    return np.linalg.eigvalsh(blocks)[:, 0]


def _alt_bipartite_refine(tens, c, iters: int = 200):
    """Alternating exact eigen-updates of <x (x) c|P|x (x) c> on the (4,2) split."""
    val = np.inf
    x = None
    for _ in range(iters):
        block = np.einsum("isjt,s,t->ij", tens, c.conj(), c)
        vals, vecs = np.linalg.eigh(block)
        x = vecs[:, 0]
        block_c = np.einsum("isjt,i,j->st", tens, x.conj(), x)
        cvals, cvecs = np.linalg.eigh(block_c)
        c = cvecs[:, 0]
        new = float(cvals[0])
        if val - new < 1e-17:
            val = new
            break
        val = new
    return val, x, c


def biseparable_basis_search(
    family: UpbFamily,
    cut: str = "AB|C",
    resolution: tuple = DEFAULT_BISEP_RESOLUTION,
    chunk_rows: int = 8,
) -> list:
    """Four orthonormal members of the support, product across ``cut``.

    Scans the single-party factor over a Bloch-sphere grid, flags rank
    deficiency of the span projector restricted to x (x) c vectors via
    the smallest eigenvalue, refines each flagged point by alternating
    exact eigen-updates, and returns the pairs ``(pair_ket, single_ket)``
    whose products are mutually orthonormal.  Raises
    :class:`BiseparableSearchError` when no such quadruple emerges at
    this resolution.
    """
    if cut not in _CUT_PERMS:
        raise ValueError(f"cut must be one of {sorted(_CUT_PERMS)}")
    if family.degenerate:
        raise ValueError("degenerate family: the support contains product states")
    p_entries = permute_parties(family.projector_p(), _CUT_PERMS[cut]).entries
    tens = p_entries.reshape(4, 2, 4, 2)

    res_t, res_chi = resolution
    ts = np.linspace(0.0, math.pi, res_t)
    chis = np.linspace(0.0, 2.0 * math.pi, res_chi, endpoint=False)
    points = []
    values = []
    for lo in range(0, res_t, chunk_rows):
        block_t = ts[lo : lo + chunk_rows]
        tt, cc = np.meshgrid(block_t, chis, indexing="ij")
        cvecs = _bloch_vector(tt.ravel(), cc.ravel())
        eigs = _restricted_min_eigs(tens, cvecs)
        points.append(cvecs)
        values.append(eigs)
    cvecs = np.concatenate(points)
    values = np.concatenate(values)

    order = np.argsort(values, kind="stable")
    candidates = []
    for idx in order:
        if values[idx] > 5e-2 or len(candidates) >= 12:
            break
        c = cvecs[idx]
        if any(abs(np.vdot(c, prev)) > 0.995 for prev in candidates):
            continue
        candidates.append(c)

    solutions = []
    for c in candidates:
        val, x, c_ref = _alt_bipartite_refine(tens, c)
        if val > 1e-10:
            continue
        pair = canonical_phase(x)
        single = canonical_phase(c_ref)
        product = np.kron(pair, single)
        if any(abs(np.vdot(product, s[2])) > 1.0 - 1e-6 for s in solutions):
            continue
        solutions.append((pair, single, product))

    for combo in itertools.combinations(range(len(solutions)), 4):
        overlaps = [
            abs(np.vdot(solutions[i][2], solutions[j][2]))
            for i, j in itertools.combinations(combo, 2)
        ]
        if max(overlaps) < 1e-8:
            chosen = sorted(
                (solutions[i] for i in combo),
                key=lambda s: tuple(np.stack([s[1].real, s[1].imag], 1).ravel()),
            )
            return [(Ket(pair), Ket(single)) for pair, single, _ in chosen]
    raise BiseparableSearchError(
        f"no orthonormal biseparable quadruple found at resolution {resolution}"
    )


def biseparable_residuals(family: UpbFamily, pairs, cut: str = "AB|C") -> dict:
    """Recompute the certificate checks for a search result."""
    p_perm = permute_parties(family.projector_p(), _CUT_PERMS[cut]).entries
    products = [np.kron(pair.amplitudes, single.amplitudes) for pair, single in pairs]
    gram = np.array([[np.vdot(a, b) for b in products] for a in products])
    membership = max(float((v.conj() @ p_perm @ v).real) for v in products)
    recon = sum(np.outer(v, v.conj()) for v in products) / 4.0
    target = (np.eye(8) - p_perm) / 4.0
    pair_purities = []
    for pair, _ in pairs:
        m = pair.amplitudes.reshape(2, 2)
        red = m @ m.conj().T
        pair_purities.append(float(np.trace(red @ red).real))
    return {
        "orthonormality": float(np.abs(gram - np.eye(len(pairs))).max()),
        "membership": membership,
        "reconstruction": float(np.abs(recon - target).max()),
        "max_pair_purity": max(pair_purities),
    }


def full_certification(
    family: UpbFamily,
    opts: OptimizerOptions | None = None,
    bisep_resolution: tuple = DEFAULT_BISEP_RESOLUTION,
) -> CertReport:
    """Run every certification check on one family."""
    opts = opts or OptimizerOptions()
    unext = check_unextendibility(family, opts)
    rho = rho_q(family)
    ppt = ppt_report(rho)
    cyc = permutation_deviation(rho, CYCLIC_PERM)
    swap = permutation_deviation(rho, SWAP_AB_PERM)
    bisep_found: bool | None = None
    bisep_res: dict | None = None
    if unext > DEGENERACY_TOL:
        try:
            pairs = biseparable_basis_search(family, "AB|C", bisep_resolution)
            bisep_found = True
            bisep_res = biseparable_residuals(family, pairs, "AB|C")
        except BiseparableSearchError:
            bisep_found = False
    return CertReport(
        family=family.family,
        unextendibility=unext,
        ppt_min_eigs=ppt,
        cyclic_deviation=cyc,
        transposition_deviation=swap,
        bisep_found=bisep_found,
        bisep_residuals=bisep_res,
    )
