import math

import numpy as np
import pytest

from daqc import bounds, dense
from daqc.errors import ValidationError
from daqc.harness import TopologySpec, generate_problem
from daqc.pauli import CouplingKey, CouplingVector, InteractionGraph, vector_p_norm
from daqc.schedule import SynthesisMode, synthesize


def zz(i, j):
    return CouplingKey(i, j, "z", "z")


TRIANGLE = InteractionGraph(3, [zz(0, 1), zz(0, 2), zz(1, 2)])


# ---- defect sampling ---------------------------------------------------------


def test_sample_defect_range_and_support():
    sample = bounds.sample_defect(TRIANGLE, 10.0, rng_seed=3)
    assert sample.h_delta.keys() == TRIANGLE.sorted_edges()
    values = sample.h_delta.values_array()
    assert len(values) == 3
    assert np.abs(values).max() <= 10.0


def test_sample_defect_deterministic():
    a = bounds.sample_defect(TRIANGLE, 2.0, rng_seed=123)
    b = bounds.sample_defect(TRIANGLE, 2.0, rng_seed=123)
    assert a.h_delta == b.h_delta


def test_sample_defect_validates_delta():
    with pytest.raises(ValidationError):
        bounds.sample_defect(TRIANGLE, 0.0, rng_seed=0)


# ---- closed-form bounds --------------------------------------------------------


def ratio_pair():
    h_s = CouplingVector(3, {zz(0, 1): 1.0, zz(0, 2): 1.0})
    h_p = CouplingVector(3, {zz(0, 1): 1.0, zz(0, 2): 1.0})
    return h_p, h_s


def test_p_norm_bound_zero_delta():
    h_p, h_s = ratio_pair()
    assert bounds.p_norm_error_bound(h_p, h_s, 0.0, 1.0, 1.0, 1, p=2.0) == 0.0


def test_p_norm_bound_direct_evaluation():
    # ratio one-norm 2, t_A/T = 1, one extra edge, delta 0.1 -> 0.1*2 + 0.1*1
    h_p, h_s = ratio_pair()
    value = bounds.p_norm_error_bound(h_p, h_s, 0.1, 1.0, 1.0, 1, p=1.0)
    assert value == pytest.approx(0.3)


def test_p_norm_bound_no_defect_only_edges():
    h_p, h_s = ratio_pair()
    for p in (1.0, 2.0, math.inf):
        value = bounds.p_norm_error_bound(h_p, h_s, 0.5, 1.0, 7.0, 0, p=p)
        assert value == pytest.approx(0.5 * vector_p_norm(bounds.coupling_ratios(h_p, h_s), p))


def test_p_norm_bound_rejects_minus_inf():
    h_p, h_s = ratio_pair()
    with pytest.raises(ValidationError):
        bounds.p_norm_error_bound(h_p, h_s, 0.1, 1.0, 1.0, 1, p=-math.inf)


def test_op_norm_bound_is_one_norm_case():
    h_p, h_s = ratio_pair()
    for delta, t_a, e_ds in [(0.1, 1.0, 1), (2.0, 3.5, 4), (0.0, 1.0, 0)]:
        assert bounds.op_norm_error_bound(h_p, h_s, delta, 1.0, t_a, e_ds) == \
            bounds.p_norm_error_bound(h_p, h_s, delta, 1.0, t_a, e_ds, p=1.0)


def test_op_norm_bound_three_qubit_path():
    h_p, h_s = ratio_pair()
    assert bounds.op_norm_error_bound(h_p, h_s, 0.1, 1.0, 1.0, 1) == pytest.approx(0.3)


def test_frobenius_factor_single_ratio():
    h_s = CouplingVector(2, {zz(0, 1): 2.0})
    h_p = CouplingVector(2, {zz(0, 1): -3.0})
    assert bounds.frobenius_stability_factor(h_p, h_s, 1.0, 1.0, 0) == pytest.approx(1.5)


def test_frobenius_factor_equal_ratios():
    m = 4
    h_s = CouplingVector(5, {zz(i, i + 1): 2.0 for i in range(m)})
    h_p = CouplingVector(5, {zz(i, i + 1): 1.0 for i in range(m)})
    assert bounds.frobenius_stability_factor(h_p, h_s, 1.0, 1.0, 0) == \
        pytest.approx(0.5 * math.sqrt(m))


def test_frobenius_factor_two_couplings_max_min_form():
    h_s = CouplingVector(3, {zz(0, 1): 1.0, zz(0, 2): 2.0})
    h_p = CouplingVector(3, {zz(0, 1): 3.0, zz(0, 2): 1.0})
    ratios = bounds.coupling_ratios(h_p, h_s)
    expected = math.sqrt(
        vector_p_norm(ratios, math.inf) ** 2 + vector_p_norm(ratios, -math.inf) ** 2
    )
    assert bounds.frobenius_stability_factor(h_p, h_s, 1.0, 1.0, 0) == pytest.approx(expected)


def test_expectation_bound_zero_delta():
    assert bounds.expectation_error_bound(1, 1.0, 2, 2, 1.0, 0.0, 1.0, 1.0) == 0.0


def test_expectation_bound_direct_evaluation():
    # 6 * T * delta * supp * deg_P * |O| * ratio + 6 * t_A * delta * supp * deg_DS * |O|
    value = bounds.expectation_error_bound(2, 0.5, 3, 1, 2.0, 0.01, 1.0, 4.0)
    assert value == pytest.approx(6 * 1.0 * 0.01 * 2 * 3 * 0.5 * 2.0 + 6 * 4.0 * 0.01 * 2 * 1 * 0.5)


def test_mitigated_bound_is_first_term():
    for args in [(1, 1.0, 2, 1.0, 0.01, 1.0), (3, 2.0, 4, 0.5, 0.1, 2.0)]:
        supp, norm, deg_p, ratio, delta, t = args
        assert bounds.mitigated_expectation_bound(*args) == \
            bounds.expectation_error_bound(supp, norm, deg_p, 0, ratio, delta, t, 0.0)


def test_mitigated_bound_worked_example():
    assert bounds.mitigated_expectation_bound(1, 1.0, 2, 1.0, 0.01, 1.0) == pytest.approx(0.12)


def test_max_allowed_delta_direct():
    assert bounds.max_allowed_delta(0.6, 1, 1.0, 1, 0, 1.0, 1.0, 0.0) == pytest.approx(0.1)


def test_max_allowed_delta_zero_target():
    assert bounds.max_allowed_delta(0.0, 1, 1.0, 2, 1, 1.0, 1.0, 1.0) == 0.0


def test_max_allowed_delta_inverse_consistency():
    rng = np.random.default_rng(6)
    for _ in range(20):
        supp = int(rng.integers(1, 4))
        norm = float(rng.uniform(0.5, 2.0))
        deg_p = int(rng.integers(1, 4))
        deg_ds = int(rng.integers(0, 3))
        ratio = float(rng.uniform(0.2, 3.0))
        t = float(rng.uniform(0.5, 2.0))
        t_a = float(rng.uniform(0.0, 5.0))
        target = float(rng.uniform(0.01, 1.0))
        delta = bounds.max_allowed_delta(target, supp, norm, deg_p, deg_ds, ratio, t, t_a)
        back = bounds.expectation_error_bound(supp, norm, deg_p, deg_ds, ratio, delta, t, t_a)
        assert back == pytest.approx(target, abs=1e-9)


def test_max_allowed_delta_degenerate_inputs():
    with pytest.raises(ValidationError):
        bounds.max_allowed_delta(0.5, 0, 1.0, 1, 0, 1.0, 1.0, 0.0)


def test_bound_monotonicity_under_perturbation():
    h_p, h_s = ratio_pair()
    rng = np.random.default_rng(9)
    base = dict(delta=0.3, t=1.0, t_a=2.0, e_ds=2)
    b0 = bounds.op_norm_error_bound(h_p, h_s, base["delta"], base["t"], base["t_a"], base["e_ds"])
    f0 = bounds.frobenius_stability_factor(h_p, h_s, base["t_a"], base["t"], base["e_ds"])
    e0 = bounds.expectation_error_bound(1, 1.0, 2, 1, 1.0, base["delta"], base["t"], base["t_a"])
    for _ in range(25):
        bump = float(rng.uniform(0, 1))
        assert bounds.op_norm_error_bound(h_p, h_s, base["delta"] + bump, base["t"], base["t_a"], base["e_ds"]) >= b0
        assert bounds.op_norm_error_bound(h_p, h_s, base["delta"], base["t"], base["t_a"] + bump, base["e_ds"]) >= b0
        assert bounds.frobenius_stability_factor(h_p, h_s, base["t_a"] + bump, base["t"], base["e_ds"]) >= f0
        assert bounds.frobenius_stability_factor(h_p, h_s, base["t_a"], base["t"], base["e_ds"] + 1) >= f0
        assert bounds.expectation_error_bound(1, 1.0, 2, 1, 1.0, base["delta"] + bump, base["t"], base["t_a"]) >= e0


# ---- full report ---------------------------------------------------------------


def make_case(mode, seed=0, kind="nn", n=4):
    spec = TopologySpec(kind, n)
    h_p, h_s, defect = generate_problem(spec, 100.0, seed)
    sched = synthesize(h_p, h_s, defect, 1.0, mode, seed + 1)
    sample = bounds.sample_defect(defect, 10.0, seed + 2)
    return h_p, h_s, defect, sched, sample


def test_report_soundness_and_echoes():
    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.REMOVE_ZEROS)
    obs = dense.single_qubit_observable("x", 0, 4)
    report = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample, observable=obs)
    assert report.exact_op_norm <= report.op_norm_bound
    assert report.exact_frobenius <= report.frobenius_bound
    assert report.n_qubits == 4
    assert report.mode == "remove"
    assert report.defect_only_edge_count == defect.edge_count - len(h_s.support())
    assert report.total_analog_time == pytest.approx(sched.total_analog_time)
    assert report.observable_support == 1
    assert report.exact_delta_o is not None
    assert report.commutator_bound is not None
    assert report.exact_delta_o <= report.commutator_bound + 1e-12


def test_report_mitigated_bound_keeps_first_term_only():
    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.MITIGATE_ZEROS, seed=5)
    report = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample)
    first_term = sample.delta * report.ratio_norm_1
    assert report.op_norm_bound == pytest.approx(first_term)
    assert report.exact_op_norm <= report.op_norm_bound
    # the factor itself stays protocol-generic
    assert report.frobenius_factor == pytest.approx(
        bounds.frobenius_stability_factor(
            h_p, h_s, sched.total_analog_time, 1.0, report.defect_only_edge_count
        )
    )


def test_report_without_observable_uses_unit_observable():
    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.REMOVE_ZEROS, seed=2)
    report = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample)
    assert report.observable_support == 1
    assert report.observable_norm == 1.0
    assert report.exact_delta_o is None
    assert report.commutator_bound is None


def test_report_flags_reflect_regime():
    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.REMOVE_ZEROS, seed=3)
    loud = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample)
    assert not loud.small_defect  # delta=10 vs couplings ~100
    norm = dense.operator_norm(dense.build_dense(h_s))
    short_t = 0.05 / norm
    quiet_sched = synthesize(h_p, h_s, defect, short_t, SynthesisMode.REMOVE_ZEROS, 11)
    tiny = bounds.sample_defect(defect, 1e-3 * 50.0, 12)
    quiet = bounds.evaluate_bounds(h_p, h_s, defect, quiet_sched, tiny)
    assert quiet.small_defect
    assert quiet.short_time


def test_report_above_cap_marks_exact_op_absent():
    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.REMOVE_ZEROS, seed=4)
    report = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample, qubit_cap=3)
    assert report.exact_op_norm is None
    assert report.exact_delta_o is None
    # closed-form Frobenius stays available and sound
    assert report.exact_frobenius is not None
    assert report.exact_frobenius <= report.frobenius_bound


def test_report_json_round_trip():
    import json

    h_p, h_s, defect, sched, sample = make_case(SynthesisMode.REMOVE_ZEROS, seed=6)
    report = bounds.evaluate_bounds(h_p, h_s, defect, sched, sample)
    payload = json.loads(json.dumps(report.to_json_dict()))
    assert payload["op_norm_bound"] == report.op_norm_bound
    assert payload["exact_op_norm"] == report.exact_op_norm


def test_report_rejects_defects_outside_support():
    h_p, h_s, defect, sched, _ = make_case(SynthesisMode.REMOVE_ZEROS, seed=7)
    alien = bounds.DefectSample(
        CouplingVector(4, {CouplingKey(0, 1, "x", "x"): 0.1}), 0.1, 0
    )
    with pytest.raises(ValidationError):
        bounds.evaluate_bounds(h_p, h_s, defect, sched, alien)
