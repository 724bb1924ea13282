"""Digital-analog schedule synthesis with calibration-error bounds.

The package turns target and source two-body Pauli couplings into timed
single-qubit-gate block schedules, models constant calibration defects,
evaluates analytic bounds on the resulting simulation error, and verifies
those bounds against exact dense-matrix computations.
"""

from .errors import (
    DaqcError,
    InternalConsistencyError,
    LpSolverStallError,
    OracleLimitError,
    PatternExhaustionError,
    SimulabilityError,
    SynthesisInfeasibleError,
    ValidationError,
)
from .pauli import (
    AXES,
    CouplingKey,
    CouplingVector,
    InteractionGraph,
    canonical_index,
    graph_difference,
    hadamard_divide,
    vector_p_norm,
)
from .blocks import (
    SignMatrix,
    block_sign,
    build_sign_matrix,
    generate_candidate_patterns,
)
from .lp import LinearProgram, LpSolution, brute_force_optimum, solve
from .schedule import Schedule, SynthesisMode, effective_couplings, error_vector, synthesize
from .dense import (
    DEFAULT_QUBIT_CAP,
    DenseHamiltonian,
    ObservableSpec,
    build_dense,
    expectation_deviation,
    frobenius_norm,
    make_observable,
    operator_norm,
    plus_state,
    random_product_state,
    replay_unitary,
    single_qubit_observable,
    zero_state,
)
from .bounds import (
    BoundReport,
    DefectSample,
    coupling_ratios,
    evaluate_bounds,
    expectation_error_bound,
    frobenius_stability_factor,
    max_allowed_delta,
    mitigated_expectation_bound,
    op_norm_error_bound,
    p_norm_error_bound,
    sample_defect,
)
from .harness import (
    ExperimentConfig,
    TopologySpec,
    TrialRecord,
    generate_problem,
    run_experiment,
    run_trial,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "BoundReport",
    "CouplingKey",
    "CouplingVector",
    "DaqcError",
    "DefectSample",
    "DenseHamiltonian",
    "DEFAULT_QUBIT_CAP",
    "ExperimentConfig",
    "InteractionGraph",
    "InternalConsistencyError",
    "LinearProgram",
    "LpSolution",
    "LpSolverStallError",
    "ObservableSpec",
    "OracleLimitError",
    "PatternExhaustionError",
    "Schedule",
    "SignMatrix",
    "SimulabilityError",
    "SynthesisInfeasibleError",
    "SynthesisMode",
    "TopologySpec",
    "TrialRecord",
    "ValidationError",
    "block_sign",
    "brute_force_optimum",
    "build_dense",
    "build_sign_matrix",
    "canonical_index",
    "coupling_ratios",
    "effective_couplings",
    "error_vector",
    "evaluate_bounds",
    "expectation_deviation",
    "expectation_error_bound",
    "frobenius_norm",
    "frobenius_stability_factor",
    "generate_candidate_patterns",
    "generate_problem",
    "graph_difference",
    "hadamard_divide",
    "make_observable",
    "max_allowed_delta",
    "mitigated_expectation_bound",
    "op_norm_error_bound",
    "operator_norm",
    "p_norm_error_bound",
    "plus_state",
    "random_product_state",
    "replay_unitary",
    "run_experiment",
    "run_trial",
    "sample_defect",
    "single_qubit_observable",
    "solve",
    "summarize",
    "synthesize",
    "vector_p_norm",
    "zero_state",
]
