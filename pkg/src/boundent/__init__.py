"""Bound entanglement of the three-qubit UPB-complement mixtures.

Constructs the Shifts and GenShifts unextendible product bases, the
bound entangled states on their complementary subspaces, and computes
and certifies their entanglement under the geometric measure and a
generalized concurrence.
"""

from .backend import ACTIVE_BACKEND
from .measures import (
    Decomposition,
    MeasureKind,
    MeasureReport,
    SymmetricPoint,
    closest_product_state,
    concurrence_pure,
    decomposition_average,
    geometric_pure,
    purity_sum,
    rho_q_entanglement,
    subspace_minimum,
    support_basis,
    symmetric_purity_profile,
    symmetric_state,
)
from .optimize import (
    ConvergenceError,
    OptResult,
    OptimizerOptions,
    ProductAngles,
    f_closed_form,
    grid_oracle,
    hadamard_det,
    min_on_sphere,
    min_product_overlap,
    minimize_concurrence_on_sphere,
)
from .tensor import (
    DensityMatrix,
    Ket,
    OrthonormalBasis,
    Projector,
    eigvals_hermitian,
    orthonormalize,
    partial_trace,
    partial_transpose,
    permute_parties,
    project_onto,
    tensor_product,
)
from .upb import (
    ANALYTIC,
    AnalyticConstants,
    QubitKet,
    UpbFamily,
    concurrence_min_basis,
    genshifts_upb,
    geometric_min_basis,
    optimal_product_states,
    pauli_form_rho,
    q_basis,
    reference_state,
    rho_q,
    shifts_upb,
)
from .certify import (
    BiseparableSearchError,
    CertReport,
    biseparable_basis_search,
    check_unextendibility,
    full_certification,
    permutation_deviation,
    ppt_report,
)

__version__ = "0.1.0"
