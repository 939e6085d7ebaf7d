"""Mittag-Leffler matrix functions and walk-based network centrality.

Scalar and matrix evaluation of E_{alpha,beta}, admissibility theory for
the downweighting parameter, classical and parametric centrality indices
with Kendall-tau sweeps, and dynamic communicability for piecewise-constant
temporal networks.
"""

__version__ = "0.1.0"

from .admissibility import (
    AdmissibilityReport,
    LimitingBound,
    bound_monotone,
    bound_representable,
    check_coeff_monotone,
    mu,
    mu_profile,
)
from .centrality import (
    Baseline,
    CentralityVector,
    Measure,
    SweepGrid,
    degree_centrality,
    eigenvector_centrality,
    kendall_tau,
    ml_communicability,
    ml_subgraph_centrality,
    ml_total_communicability,
    sweep_grid,
)
from .errors import (
    AdmissibilityWarning,
    DisconnectedGraphWarning,
    GammaPoleError,
    MatrixLogBranchError,
    MLConvergenceError,
    MLDomainError,
    MLError,
    MLOverflowError,
    ParseError,
)
from .graphio import (
    Graph,
    GraphStats,
    graph_stats,
    load_edge_list,
    load_graph,
    load_matrix_market,
    parse_edge_list,
    parse_matrix_market,
    save_matrix_market,
    to_matrix_market,
)
from .matfun import (
    KrylovBasis,
    lanczos,
    matrix_exp,
    matrix_log_principal,
    ml_action_krylov,
    ml_matrix_dense,
    spectral_radius,
    sym_eig,
)
from .mlkernel import (
    DEFAULT_KBAR,
    ClosedForm,
    ClosedFormKind,
    MLParams,
    closed_form_lookup,
    eval_closed_form,
    gamma_fn,
    ml_coeff,
    ml_scalar,
)
from .temporal import (
    CommunicabilityState,
    Piece,
    TemporalNetwork,
    TemporalRanking,
    discrete_katz_product,
    gen_alternating_tree,
    gen_phone_cascade,
    generator,
    load_schedule,
    parse_schedule,
    propagate,
    run_model,
    save_schedule,
)
