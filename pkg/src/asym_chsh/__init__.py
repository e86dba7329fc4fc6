"""CHSH violation with one-sided detection inefficiency.

Bell operators, entanglement bounds, local-model simulation and numerical
searches for two-qubit CHSH experiments where one party's detectors fail
part of the time.
"""
from .bell import (
    BellOperator,
    CoefficientTable,
    Kind,
    bell_asymmetric,
    bell_chsh,
    bell_single_setting,
    chsh_value,
    correlator,
    lambda_max_sq_single_setting,
    lambda_max_symmetric,
    sign_flip_conjugate,
)
from .bounds import (
    kappa_max_bound_single,
    main_bound,
    quartic_coefficients,
    violation_ub,
    violation_ub_limit_check,
)
from .entanglement import (
    TwoQubitState,
    concurrence,
    concurrence_mixed,
    concurrence_pure,
    filter_decomposition,
    marginal_z_expectation,
    schmidt,
)
from .errors import DomainError
from .lhv import (
    LHVModel,
    NoSignalingDistribution,
    massar_pironio_model,
    quantum_distribution,
    simulate,
    validate_no_signaling,
    verify_simulation,
)
from .linalg import bloch_observable, eig_hermitian, pauli, tensor, trace_product_bound_check
from .optimizer import (
    OptimizationResult,
    StateParams,
    degenerate_eigenspace_concurrence,
    max_concurrence_violating,
    max_value_fixed_concurrence,
    min_concurrence_violating,
    prop1_margin_scan,
)
from .scenario import Povm, Scenario, canonical_directions, inefficient_povm, is_degenerate, projector

__version__ = "0.1.0"
