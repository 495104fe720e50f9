"""Numerical engines: product-manifold descent, sphere minimization, oracles.

Everything here is deterministic for a fixed :class:`OptimizerOptions`:
per-restart starting points derive from ``(seed, restart_index)`` and the
reduction over restarts (minimum plus lexicographic tie-break) is
order-independent, so results are reproducible regardless of how the
restarts are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .tensor import Ket, OrthonormalBasis, Projector, canonical_phase

TIE_TOL = 1e-10

__all__ = [
    "ConvergenceError",
    "OptResult",
    "OptimizerOptions",
    "ProductAngles",
    "concurrence_sphere_restarts",
    "f_closed_form",
    "grid_oracle",
    "hadamard_det",
    "min_on_sphere",
    "min_product_overlap",
    "minimize_concurrence_on_sphere",
    "product_overlap_restarts",
]


class ConvergenceError(RuntimeError):
    """No restart converged; carries the best point seen so far."""

    def __init__(self, message: str, best_value: float, best_argmin):
        super().__init__(message)
        self.best_value = best_value
        self.best_argmin = best_argmin


@dataclass(frozen=True)
class OptimizerOptions:
    """Multistart settings shared by all solvers."""

    restarts: int = 64
    max_iterations: int = 10_000
    ftol: float = 1e-12
    seed: int = 42

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.ftol <= 0:
            raise ValueError("ftol must be positive")

    def restart_rng(self, index: int) -> np.random.Generator:
        """Generator for one restart, derived from (seed, restart index)."""
        return np.random.default_rng((self.seed, index))


@dataclass(frozen=True)
class ProductAngles:
    """Bloch angles of a three-qubit product state.

    The product state is a (x) b (x) c with
    ``a = cos(alpha/2)|0> + sin(alpha/2) e^{i phase_a} |1>`` and likewise
    for b, c; alpha, beta, gamma range over [0, 2pi], phases over [0, pi].
    """

    alpha: float
    beta: float
    gamma: float
    phase_a: float = 0.0
    phase_b: float = 0.0
    phase_c: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 2 * math.pi + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 2pi]")
        for name in ("phase_a", "phase_b", "phase_c"):
            v = getattr(self, name)
            if not -1e-12 <= v <= math.pi + 1e-12:
                raise ValueError(f"{name}={v} outside [0, pi]")

    def factors(self) -> tuple:
        out = []
        for half, phase in (
            (self.alpha / 2, self.phase_a),
            (self.beta / 2, self.phase_b),
            (self.gamma / 2, self.phase_c),
        ):
            out.append(
                np.array(
                    [math.cos(half), math.sin(half) * np.exp(1j * phase)],
                    dtype=np.complex128,
                )
            )
        return tuple(out)

    def ket(self) -> Ket:
        a, b, c = self.factors()
        return Ket(np.kron(a, np.kron(b, c)))

    @classmethod
    def from_factors(cls, a, b, c) -> "ProductAngles":
        angles = []
        phases = []
        for f in (a, b, c):
            theta, phase = _qubit_angles(np.asarray(f, dtype=np.complex128))
            angles.append(theta)
            phases.append(phase)
        return cls(angles[0], angles[1], angles[2], phases[0], phases[1], phases[2])


def _qubit_angles(f: np.ndarray) -> tuple:
    """Canonical (theta in [0, 2pi], phase in [0, pi]) of a unit 2-vector."""
    u, v = f[0], f[1]
    if abs(u) < 1e-12:
        return math.pi, 0.0
    v = v * np.exp(-1j * np.angle(u))  # gauge u real positive
    u = abs(u)
    theta = 2.0 * math.acos(min(u, 1.0))
    if abs(v) < 1e-12:
        return theta, 0.0
    phase = math.atan2(v.imag, v.real)
    if phase < 0.0:
        # (theta, phase) and (2pi - theta, phase + pi) label the same state
        theta = 2 * math.pi - theta
        phase = phase + math.pi
    return theta, phase


@dataclass
class OptResult:
    """Outcome of a multistart minimization."""

    value: float
    argmin: object  # Ket or ProductAngles
    converged_restarts: int
    best_restart: int
    spread: float  # objective spread across the top-5 restarts
    restart_values: np.ndarray = field(repr=False)

    def diagnostics(self) -> dict:
        return {
            "restarts": int(self.restart_values.size),
            "converged": int(self.converged_restarts),
            "spread": float(self.spread),
            "best_restart": int(self.best_restart),
        }


def _lex_key(vec: np.ndarray) -> tuple:
    """Total order on canonical coordinate vectors (interleaved re, im)."""
    v = canonical_phase(vec)
    return tuple(np.stack([v.real, v.imag], axis=1).ravel())


def _reduce_restarts(values, converged, candidate_vecs) -> tuple:
    """Pick the best restart: minimal value, ties by lexicographic argmin."""
    vmin = float(values.min())
    tied = np.flatnonzero(values <= vmin + TIE_TOL)
    best = min(tied, key=lambda i: _lex_key(candidate_vecs[i]))
    top = np.sort(values)[: min(5, values.size)]
    spread = float(top[-1] - top[0])
    return int(best), vmin, spread


def product_starts(opts: OptimizerOptions) -> np.ndarray:
    """Independent uniform (Haar) starting factors, one triple per restart."""
    starts = np.empty((opts.restarts, 3, 2), dtype=np.complex128)
    for i in range(opts.restarts):
        rng = opts.restart_rng(i)
        raw = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        starts[i] = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    return starts


def sphere_starts(opts: OptimizerOptions, k: int) -> np.ndarray:
    """Uniform starting coordinates on the unit sphere of C^k (2k reals)."""
    starts = np.empty((opts.restarts, 2 * k))
    for i in range(opts.restarts):
        rng = opts.restart_rng(i)
        raw = rng.normal(size=2 * k)
        starts[i] = raw / np.linalg.norm(raw)
    return starts


def _projector_entries(p) -> np.ndarray:
    if isinstance(p, Projector):
        return p.entries
    mat = np.asarray(p, dtype=np.complex128)
    if mat.shape != (8, 8):
        raise ValueError("expected an 8x8 three-qubit operator")
    if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
        raise ValueError("operator must be Hermitian")
    return mat


def product_overlap_restarts(
    p,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
    extra_starts: np.ndarray | None = None,
) -> tuple:
    """Raw per-restart data of the alternating product minimizer.

    Returns ``(values, factors, converged)`` with one row per restart.
    """
    opts = opts or OptimizerOptions()
    h = _projector_entries(p)
    starts = product_starts(opts)
    if extra_starts is not None:
        starts = np.concatenate([starts, np.asarray(extra_starts, np.complex128)])
    values, factors, iters, converged, monotone = kernels.alt_product_minimize(
        h, starts, opts.max_iterations, opts.ftol, backend_name=backend
    )
    if not monotone.all():
        raise ArithmeticError("alternating sweep increased the objective")
    if not converged.any():
        i = int(values.argmin())
        raise ConvergenceError(
            f"no restart converged within {opts.max_iterations} iterations",
            float(values[i]),
            ProductAngles.from_factors(*factors[i]),
        )
    return values, factors, converged


def min_product_overlap(
    p,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
    extra_starts: np.ndarray | None = None,
) -> OptResult:
    """Minimize <phi|p|phi> over three-qubit product states.

    Alternating closed local updates: each sweep fixes two factors and
    replaces the third with the minimal eigenvector of the induced 2x2
    effective matrix, which makes every step an exact local argmin and
    the objective monotonically non-increasing.  Multistart over Haar
    initial factors; the returned ``argmin`` holds canonical
    :class:`ProductAngles`.
    """
    opts = opts or OptimizerOptions()
    values, factors, converged = product_overlap_restarts(
        p, opts, backend=backend, extra_starts=extra_starts
    )
    kets = [np.kron(np.kron(f[0], f[1]), f[2]) for f in factors]
    best, vmin, spread = _reduce_restarts(values, converged, kets)
    angles = ProductAngles.from_factors(*factors[best])
    return OptResult(
        value=vmin,
        argmin=angles,
        converged_restarts=int(converged.sum()),
        best_restart=best,
        spread=spread,
        restart_values=values,
    )


def _coords_to_ket(basis_mat: np.ndarray, x: np.ndarray) -> tuple:
    k = basis_mat.shape[1]
    c = x[:k] + 1j * x[k:]
    c = c / np.linalg.norm(c)
    c = canonical_phase(c)
    return c, Ket(canonical_phase(basis_mat @ c))


def min_on_sphere(
    objective: Callable[[Ket], float],
    basis: OrthonormalBasis,
    opts: OptimizerOptions | None = None,
) -> OptResult:
    """Minimize a real objective over unit kets of a subspace.

    States are parametrized as ``psi = sum_i c_i b_i`` with ``|c| = 1``
    and the global phase fixed (first significant coordinate real
    positive), leaving 2k - 2 free real parameters for a k-dimensional
    subspace.  Derivative-free simplex descent with multistart; the norm
    is pinned by a quadratic penalty that vanishes on the sphere, and the
    reported value is the pure objective at the canonical argmin.
    """
    opts = opts or OptimizerOptions()
    mat = basis.matrix()
    k = mat.shape[1]

    def wrapped(x):
        c = x[:k] + 1j * x[k:]
        nrm = np.linalg.norm(c)
        return objective(Ket(mat @ (c / nrm))) + (nrm - 1.0) ** 2

    starts = sphere_starts(opts, k)
    values = np.empty(opts.restarts)
    xs = np.empty_like(starts)
    converged = np.zeros(opts.restarts, dtype=bool)
    for i in range(opts.restarts):
        values[i], xs[i], _, converged[i] = kernels.nelder_mead(
            wrapped, starts[i], opts.max_iterations, opts.ftol
        )
    pure, coords, kets = _canonical_sphere_results(objective, mat, values, xs, converged, opts)
    return _reduce_sphere(pure, coords, kets, converged)


def concurrence_sphere_restarts(
    basis: OrthonormalBasis,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
    extra_starts: np.ndarray | None = None,
) -> tuple:
    """Raw per-restart data of the kernel concurrence minimizer.

    Returns ``(values, coords, kets, converged)``; values are re-evaluated
    through the partial-trace purity path at the canonical argmin, which
    doubles as a cross-check of the fast kernel objective.
    """
    from .measures import concurrence_pure  # deferred: avoids an import cycle

    opts = opts or OptimizerOptions()
    mat = basis.matrix()
    starts = sphere_starts(opts, mat.shape[1])
    if extra_starts is not None:
        starts = np.concatenate([starts, np.asarray(extra_starts, float)])
    values, xs, iters, converged = kernels.nm_concurrence(
        mat, starts, opts.max_iterations, opts.ftol, backend_name=backend
    )
    pure, coords, kets = _canonical_sphere_results(
        concurrence_pure, mat, values, xs, converged, opts
    )
    return pure, coords, kets, converged


def minimize_concurrence_on_sphere(
    basis: OrthonormalBasis,
    opts: OptimizerOptions | None = None,
    backend: str | None = None,
    extra_starts: np.ndarray | None = None,
) -> OptResult:
    """Kernel-backed :func:`min_on_sphere` specialized to the concurrence."""
    pure, coords, kets, converged = concurrence_sphere_restarts(
        basis, opts, backend=backend, extra_starts=extra_starts
    )
    return _reduce_sphere(pure, coords, kets, converged)


def _canonical_sphere_results(objective, mat, values, xs, converged, opts):
    if not converged.any():
        i = int(values.argmin())
        _, ket = _coords_to_ket(mat, xs[i])
        raise ConvergenceError(
            f"no restart converged within {opts.max_iterations} iterations",
            float(values[i]),
            ket,
        )
    coords = []
    kets = []
    pure_values = np.empty(values.size)
    for i in range(values.size):
        c, ket = _coords_to_ket(mat, xs[i])
        coords.append(c)
        kets.append(ket)
        pure_values[i] = objective(ket)
    return pure_values, coords, kets


def _reduce_sphere(pure_values, coords, kets, converged) -> OptResult:
    best, vmin, spread = _reduce_restarts(pure_values, converged, coords)
    return OptResult(
        value=vmin,
        argmin=kets[best],
        converged_restarts=int(converged.sum()),
        best_restart=best,
        spread=spread,
        restart_values=pure_values,
    )


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _trig_sum(ca, sa, cb, sb, cg, sg):
    return (
        (1 + ca) * (1 + cb) * (1 + cg)
        + (1 - ca) * (1 + sb) * (1 - sg)
        + (1 - sa) * (1 - cb) * (1 + sg)
        + (1 + sa) * (1 - sb) * (1 - cg)
    ) / 8.0


def hadamard_det(alpha, beta, gamma):
    """det of the 3x3 angle matrix whose rows are bounded by sqrt(6)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    r0 = (ca - sa, ca + sa, -2.0)
    r1 = (cb + sb, -2.0, cb - sb)
    r2 = (-2.0, cg - sg, cg + sg)
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def f_closed_form(alpha, beta, gamma):
    """Phase-free product overlap with the UPB span, as a function of angles.

    Evaluates both equivalent expressions -- the four-term trigonometric
    sum and ``1 - det(M)/16`` -- and verifies they agree to 1e-12 before
    returning.  Accepts scalars or broadcastable arrays.
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    trig = _trig_sum(ca, sa, cb, sb, cg, sg)
    det_form = 1.0 - hadamard_det(alpha, beta, gamma) / 16.0
    dev = np.max(np.abs(trig - det_form))
    if dev > 1e-12:
        raise ArithmeticError(f"closed-form expressions disagree by {dev}")
    if np.isscalar(alpha) or np.asarray(trig).ndim == 0:
        return float(trig)
    return trig


def grid_oracle(
    objective: Callable[[np.ndarray], np.ndarray],
    bounds: Sequence[tuple],
    resolution,
    chunk: int = 1 << 20,
) -> float:
    """Exhaustive minimum of a vectorized objective on a uniform grid.

    ``objective`` receives an (N, n_params) array and must return (N,)
    values.  Intended as a test-side provenance oracle, not a solver.
    """
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    if np.isscalar(resolution):
        resolution = [int(resolution)] * len(bounds)
    resolution = [int(r) for r in resolution]
    if len(resolution) != len(bounds):
        raise ValueError("one resolution per parameter required")
    if any(r < 8 for r in resolution):
        raise ValueError("grid resolution must be at least 8 per parameter")
    total = math.prod(resolution)
    if total > 10**9:
        raise ValueError(f"grid of {total} evaluations exceeds the 1e9 cap")
    axes = [np.linspace(lo, hi, r) for (lo, hi), r in zip(bounds, resolution)]
    best = math.inf
    strides = np.array(
        [math.prod(resolution[i + 1 :]) for i in range(len(resolution))], dtype=np.int64
    )
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cols = [axes[d][(idx // strides[d]) % resolution[d]] for d in range(len(axes))]
        vals = objective(np.column_stack(cols))
        best = min(best, float(np.min(vals)))
    return best
