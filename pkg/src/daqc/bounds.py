"""Defect sampling and the analytic error bounds, with exact counterparts.

The bounds take the schedule-level quantities (total analog time, edge
counts, degrees, the elementwise target/source coupling ratios) and return
upper bounds on norms of the coupling error and on the deviation of an
observable's expectation value.  ``evaluate_bounds`` packages one full
evaluation, pairing every bound with its exact dense value when the system
is small enough.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import dense
from .blocks import block_sign
from .errors import InternalConsistencyError, ValidationError
from .pauli import (
    CouplingKey,
    CouplingVector,
    InteractionGraph,
    graph_difference,
    vector_p_norm,
)
from .schedule import REPLAY_TOL, Schedule, SynthesisMode, error_vector

#: "much smaller than" thresholds used for the validity-regime flags
SMALL_DEFECT_FACTOR = 1e-2
SHORT_TIME_LIMIT = 0.1


@dataclass(frozen=True)
class DefectSample:
    """One draw of unknown coupling deviations, entrywise bounded by ``delta``."""

    h_delta: CouplingVector
    delta: float
    rng_seed: int


def sample_defect(support: InteractionGraph, delta: float, rng_seed: int) -> DefectSample:
    """Uniform entries in [-delta, delta] on every edge of ``support``."""
    if not (delta > 0 and math.isfinite(delta)):
        raise ValidationError(f"delta must be positive and finite, got {delta}")
    edges = support.sorted_edges()
    rng = np.random.default_rng(rng_seed)
    values = rng.uniform(-delta, delta, size=len(edges))
    h_delta = CouplingVector(support.n_qubits, dict(zip(edges, values)))
    return DefectSample(h_delta, float(delta), rng_seed)


def coupling_ratios(h_problem: CouplingVector, h_source: CouplingVector) -> CouplingVector:
    """Elementwise h_P / h_S over the nonzero source couplings."""
    if h_problem.n_qubits != h_source.n_qubits:
        raise ValidationError("coupling vectors disagree on system size")
    ratios = {key: h_problem[key] / h_source[key] for key in h_source.support()}
    return CouplingVector(h_source.n_qubits, ratios)


def _edge_count_root(e_ds: int, p: float) -> float:
    if e_ds == 0:
        return 0.0
    if p == math.inf:
        return 1.0
    return float(e_ds) ** (1.0 / p)


def p_norm_error_bound(
    h_problem: CouplingVector,
    h_source: CouplingVector,
    delta: float,
    target_time: float,
    total_analog_time: float,
    e_ds: int,
    p: float,
) -> float:
    """Bound on the p-norm of the coupling error vector.

    delta * ||h_P/h_S||_p over the measured couplings, plus
    delta * (t_A/T) * |E|^(1/p) for the |E| unmeasured defect edges.
    """
    if p == -math.inf:
        raise ValidationError("the coupling error bound is stated for proper p-norms only")
    if not target_time > 0:
        raise ValidationError(f"target time must be positive, got {target_time}")
    ratio_norm = vector_p_norm(coupling_ratios(h_problem, h_source), p)
    return delta * ratio_norm + delta * (total_analog_time / target_time) * _edge_count_root(e_ds, p)


def op_norm_error_bound(
    h_problem: CouplingVector,
    h_source: CouplingVector,
    delta: float,
    target_time: float,
    total_analog_time: float,
    e_ds: int,
) -> float:
    """Operator-norm bound on the error Hamiltonian: the p=1 case above."""
    return p_norm_error_bound(
        h_problem, h_source, delta, target_time, total_analog_time, e_ds, p=1.0
    )


def frobenius_stability_factor(
    h_problem: CouplingVector,
    h_source: CouplingVector,
    total_analog_time: float,
    target_time: float,
    e_ds: int,
) -> float:
    """Dimensionless multiplier f with ||H_eps||_F <= f * ||H_delta||_F."""
    if not target_time > 0:
        raise ValidationError(f"target time must be positive, got {target_time}")
    ratio_sq = vector_p_norm(coupling_ratios(h_problem, h_source), 2.0) ** 2
    return math.sqrt(ratio_sq + e_ds * (total_analog_time / target_time) ** 2)


def expectation_error_bound(
    supp_observable: int,
    op_norm_observable: float,
    deg_problem: int,
    deg_defect_only: int,
    h_ratio_inf: float,
    delta: float,
    target_time: float,
    total_analog_time: float,
) -> float:
    """Small-defect, short-time bound on the expectation-value deviation.

    6*T*delta*supp(O)*deg(P)*||O||*||h_P/h_S||_inf for the measured couplings
    plus 6*t_A*delta*supp(O)*deg(D\\S)*||O|| for the unmeasured ones.  The
    validity regime (defects far below the source couplings, T*||H_S|| << 1)
    is the caller's responsibility.
    """
    first = 6.0 * target_time * delta * supp_observable * deg_problem * op_norm_observable * h_ratio_inf
    second = 6.0 * total_analog_time * delta * supp_observable * deg_defect_only * op_norm_observable
    return first + second


def mitigated_expectation_bound(
    supp_observable: int,
    op_norm_observable: float,
    deg_problem: int,
    h_ratio_inf: float,
    delta: float,
    target_time: float,
) -> float:
    """Expectation-value bound once the unmeasured couplings cancel exactly."""
    return expectation_error_bound(
        supp_observable, op_norm_observable, deg_problem, 0, h_ratio_inf, delta, target_time, 0.0
    )


def max_allowed_delta(
    delta_max_error: float,
    supp_observable: int,
    op_norm_observable: float,
    deg_problem: int,
    deg_defect_only: int,
    h_ratio_inf: float,
    target_time: float,
    total_analog_time: float,
) -> float:
    """Largest calibration error compatible with a target expectation error."""
    denom = 6.0 * supp_observable * op_norm_observable * (
        target_time * deg_problem * h_ratio_inf + total_analog_time * deg_defect_only
    )
    if denom <= 0:
        raise ValidationError("degenerate inputs: the expectation bound has no delta dependence")
    return delta_max_error / denom


@dataclass(frozen=True)
class BoundReport:
    """Evaluated bounds next to exact dense values for one schedule + defect.

    For mitigated schedules the coupling-error bounds keep only their
    measured-coupling term, after verifying that the block signs cancel on
    every unmeasured edge; ``frobenius_factor`` always carries the full
    protocol-level expression.  ``exact_op_norm`` is absent above the dense
    cap, while ``exact_frobenius`` then falls back to the orthogonality
    identity 2^(N/2) * ||h_eps||_2, which is exact for two-body sums.
    """

    n_qubits: int
    mode: str
    delta: float
    target_time: float
    total_analog_time: float
    source_edge_count: int
    defect_edge_count: int
    defect_only_edge_count: int
    problem_degree: int
    defect_only_degree: int
    ratio_norm_1: float
    ratio_norm_2: float
    ratio_norm_inf: float
    requested_p: float
    p_norm_bound: float
    op_norm_bound: float
    frobenius_factor: float
    defect_frobenius: float
    frobenius_bound: float
    observable_support: int
    observable_norm: float
    expectation_bound: float
    expectation_bound_mitigated: float
    exact_op_norm: float | None
    exact_frobenius: float | None
    exact_delta_o: float | None
    commutator_bound: float | None
    small_defect: bool
    short_time: bool

    def to_json_dict(self) -> dict:
        return asdict(self)


def _defect_only_weights(schedule: Schedule, edges: tuple[CouplingKey, ...]) -> np.ndarray:
    weights = np.zeros(len(edges))
    for k, (pattern, time) in enumerate(zip(schedule.patterns, schedule.times)):
        for alpha, key in enumerate(edges):
            weights[alpha] += time * block_sign(pattern, key)
    return weights


def evaluate_bounds(
    h_problem: CouplingVector,
    h_source: CouplingVector,
    defect_support: InteractionGraph,
    schedule: Schedule,
    defect: DefectSample,
    observable: dense.ObservableSpec | None = None,
    requested_p: float = 2.0,
    rho0: np.ndarray | None = None,
    q: int = 1,
    qubit_cap: int = dense.DEFAULT_QUBIT_CAP,
) -> BoundReport:
    """Evaluate every bound for one (problem, source, schedule, defect) tuple.

    Exact dense quantities (operator norm, Frobenius norm, observable
    deviation, commuting-case commutator bound) are computed only when the
    system fits under ``qubit_cap``.  Without an observable the expectation
    bounds are reported for a generic single-site, unit-norm observable.
    """
    n = h_problem.n_qubits
    if not set(defect.h_delta.keys()) <= defect_support.edges:
        raise ValidationError("defect sample declares couplings outside the defect support")

    h_eps = error_vector(schedule, h_problem, h_source, defect.h_delta)
    ratios = coupling_ratios(h_problem, h_source)
    ds_graph = graph_difference(defect_support, h_source.support_graph())
    e_ds = ds_graph.edge_count
    t_a = schedule.total_analog_time
    target_time = schedule.target_time
    delta = defect.delta

    mitigated = schedule.mode is SynthesisMode.MITIGATE_ZEROS
    if mitigated and e_ds:
        weights = _defect_only_weights(schedule, ds_graph.sorted_edges())
        worst = float(np.abs(weights).max())
        if worst > REPLAY_TOL:
            raise InternalConsistencyError(
                f"mitigated schedule leaves sign weight {worst:.3e} on an unmeasured edge"
            )
    effective_e_ds = 0 if mitigated else e_ds

    p_bound = p_norm_error_bound(
        h_problem, h_source, delta, target_time, t_a, effective_e_ds, requested_p
    )
    op_bound = op_norm_error_bound(h_problem, h_source, delta, target_time, t_a, effective_e_ds)
    frob_factor = frobenius_stability_factor(h_problem, h_source, t_a, target_time, e_ds)
    defect_frob = 2.0 ** (n / 2.0) * vector_p_norm(defect.h_delta, 2.0)
    frob_bound = frob_factor * defect_frob

    supp_o = len(observable.support) if observable is not None else 1
    norm_o = observable.op_norm if observable is not None else 1.0
    ratio_inf = vector_p_norm(ratios, math.inf)
    deg_p = h_problem.support_graph().degree()
    deg_ds = ds_graph.degree()
    exp_bound = expectation_error_bound(
        supp_o, norm_o, deg_p, deg_ds, ratio_inf, delta, target_time, t_a
    )
    exp_bound_mit = mitigated_expectation_bound(supp_o, norm_o, deg_p, ratio_inf, delta, target_time)

    exact_op = exact_frob = exact_delta_o = commutator_bound = None
    if n <= qubit_cap:
        h_eps_dense = dense.build_dense(h_eps, cap=qubit_cap)
        exact_op = dense.operator_norm(h_eps_dense)
        exact_frob = dense.frobenius_norm(h_eps_dense)
        if observable is not None:
            state = dense.plus_state(n) if rho0 is None else rho0
            exact_delta_o = dense.expectation_deviation(
                h_problem, schedule, h_source + defect.h_delta, state, observable, q=q, cap=qubit_cap
            )
            if all(dense.is_zz_only(v) for v in (h_problem, h_source, defect.h_delta)):
                commutator_bound = target_time * dense.commutator_norm(
                    h_eps_dense.matrix, observable.matrix
                )
    else:
        exact_frob = 2.0 ** (n / 2.0) * vector_p_norm(h_eps, 2.0)

    source_values = [abs(h_source[k]) for k in h_source.support()]
    small_defect = bool(source_values) and delta < SMALL_DEFECT_FACTOR * min(source_values)
    short_time = False
    if n <= qubit_cap:
        h_s_norm = dense.operator_norm(dense.build_dense(h_source, cap=qubit_cap))
        short_time = target_time * h_s_norm < SHORT_TIME_LIMIT

    return BoundReport(
        n_qubits=n,
        mode=schedule.mode.value,
        delta=delta,
        target_time=target_time,
        total_analog_time=t_a,
        source_edge_count=h_source.support_graph().edge_count,
        defect_edge_count=defect_support.edge_count,
        defect_only_edge_count=e_ds,
        problem_degree=deg_p,
        defect_only_degree=deg_ds,
        ratio_norm_1=vector_p_norm(ratios, 1.0),
        ratio_norm_2=vector_p_norm(ratios, 2.0),
        ratio_norm_inf=ratio_inf,
        requested_p=float(requested_p),
        p_norm_bound=p_bound,
        op_norm_bound=op_bound,
        frobenius_factor=frob_factor,
        defect_frobenius=defect_frob,
        frobenius_bound=frob_bound,
        observable_support=supp_o,
        observable_norm=norm_o,
        expectation_bound=exp_bound,
        expectation_bound_mitigated=exp_bound_mit,
        exact_op_norm=exact_op,
        exact_frobenius=exact_frob,
        exact_delta_o=exact_delta_o,
        commutator_bound=commutator_bound,
        small_defect=small_defect,
        short_time=short_time,
    )
