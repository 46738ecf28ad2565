"""Perron-Frobenius eigenpairs of multi-homogeneous maps induced by nonnegative tensors."""

from .cone import (
    REGIME_TOL,
    Regime,
    WeightVector,
    classify_regime,
    decouple_homogeneity,
    equality_weight_vector,
    find_weight_vector,
    is_irreducible_matrix,
    is_primitive_matrix,
    lipschitz_constant,
    spectral_radius_nonneg,
)
from .exceptions import (
    BudgetExceededError,
    DegenerateIterateError,
    DegenerateMapError,
    DimensionError,
    ExpansiveRegimeError,
    InvalidProblemError,
    MHPFError,
    NoWeightVectorError,
    ResidualError,
)
from .irreducibility import (
    DiagnosticsReport,
    StructureGraph,
    diagnose,
    jacobian_pattern_at_ones,
    path_condition,
    strong_irreducibility,
    uniqueness_certificate,
    weak_irreducibility,
    weak_primitivity,
)
from .maps import (
    ProblemSpec,
    eigenvalue_from_vector,
    eval_R,
    holder_conjugate,
    homogeneity_matrix,
    normalize,
    psi,
)
from .metrics import hilbert_metric, thompson_metric
from .oracle import GridSpec, classical_power_oracle, grid_rayleigh_max
from .solver import (
    RateCertificate,
    SolveOptions,
    SolveReport,
    cw_bounds,
    delta_ladder,
    eval_shifted,
    gelfand_estimate,
    power_step,
    solve,
)
from .tensor import NonnegTensor, contract_mode, multilinear_form

__version__ = "0.1.0"
