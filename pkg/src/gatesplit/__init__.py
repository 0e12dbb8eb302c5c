"""Exact and approximate separation of multipartite unitary gates."""

from .approx import (
    ApproxCertificate,
    ApproxSeparationResult,
    DegenerateFactorError,
    LocalHamiltonianFamily,
    approx_separate,
    distance_bound,
    nearest_kron_unitary,
    phase_optimal_distance,
    project_local,
    residual_certificate,
)
from .exact import (
    Method,
    SeparationResult,
    TensorTerm,
    TensorTermSum,
    Verdict,
    delta_coeffs,
    is_scalar,
    qubit_structure_check,
    schmidt_rank,
    separate_rank_one,
    separate_sum,
    separate_unitary,
)
from .generator import HermitianGenerator, UnitaryGate, ValidationError, exp_of, generator_of
from .linalg import (
    Cut,
    GateSplitError,
    TensorSpace,
    commutator,
    hermitian_eig,
    kron,
    kron_all,
    matrix_exp_i,
    norm,
    partial_trace,
    reshuffle,
)

__version__ = "0.1.0"
