"""Worst-case binary logistic regression instances for deterministic
first-order methods: dataset construction, analytic optima, lower-bound
formulas, oracle-driven optimizers, and the adaptive rotation adversary.
"""

from .analytic import (
    AnalyticProfile,
    agd_upper_bound,
    bound_general,
    bound_linear_span,
    c_bracket,
    constant_c_ratio,
    logcosh,
    numeric_optimum,
    per_coordinate_gap,
    profile,
    profile_metadata,
    sandwich_ratio,
    solve_c,
    subspace_gap,
)
from .datasets import (
    RotatedInstance,
    SpectralNorm,
    Variant,
    WOperator,
    WorstCaseInstance,
    build_instance,
    build_w,
    export,
    matvec_a,
    matvec_at,
    spectral_norm,
)
from .logloss import (
    FirstOrderOracle,
    OracleResponse,
    QueryLog,
    h_grad,
    h_value,
    lipschitz,
    loss,
    phi,
)
from .optimizers import (
    METHOD_NAMES,
    MethodSpec,
    Trace,
    check_linear_span,
    iterate_steps,
    run,
    trace_to_csv,
    trace_to_json,
)
from .resist import (
    AdversaryState,
    ResistingOracle,
    adversarial_run,
    containment_residuals,
    data_direction_residual,
    fix_and_map,
    new_adversary,
    orthogonality_residual,
    replay_check,
    save_matrix_csv,
)

__version__ = "0.1.0"
