import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedet import (
    InvalidParameterError,
    NoCodewordsError,
    VanishingCodespaceError,
)
from qedet.codes import (
    codeword_membership,
    diagonal_projector_terms,
    enumerate_codewords,
    repetition_code,
    tensor_expansions,
    triangular_color_code,
)
from qedet.detect import (
    DetectionResult,
    analytic_mitigated_value,
    f_c_prediction,
    postselect_estimate,
    projector_estimate,
)
from qedet.encode import build_experiment_circuit
from qedet.sim import (
    ExactExpectation,
    NoiseModel,
    exact_distribution,
    exact_expectation,
    sample_shots,
)

REP3_WORDS = {"000", "111"}
Z_MASK3 = [True, False, False]


class TestPostselectBasics:
    def test_hand_example(self):
        counts = {"000": 60, "111": 20, "010": 15, "110": 5}
        r = postselect_estimate(counts, REP3_WORDS, [Z_MASK3])
        assert r.kept == 80
        assert r.total == 100
        assert r.f_c == pytest.approx(0.8)
        assert r.value == pytest.approx((60 - 20) / 80)
        assert r.stderr == pytest.approx(math.sqrt((1 - 0.5 ** 2) / 80))

    def test_index_mask_equals_bool_mask(self):
        counts = {"000": 3, "111": 1}
        a = postselect_estimate(counts, REP3_WORDS, [Z_MASK3])
        b = postselect_estimate(counts, REP3_WORDS, [[0]])
        assert a == b

    def test_index_masks_ambiguous_for_two_blocks(self):
        counts = {"000000": 1}
        with pytest.raises(InvalidParameterError):
            postselect_estimate(counts, REP3_WORDS, [[0], [0]])

    def test_mask_width_mismatch(self):
        with pytest.raises(InvalidParameterError):
            postselect_estimate({"000000": 1}, REP3_WORDS, [Z_MASK3])

    def test_no_survivors(self):
        with pytest.raises(NoCodewordsError) as err:
            postselect_estimate({"010": 7, "110": 3}, REP3_WORDS, [Z_MASK3])
        assert err.value.f_c == 0.0
        assert err.value.kept == 0
        assert err.value.total == 10

    def test_empty_and_negative_rejected(self):
        with pytest.raises(InvalidParameterError):
            postselect_estimate({}, REP3_WORDS, [Z_MASK3])
        with pytest.raises(InvalidParameterError):
            postselect_estimate({"000": -1, "111": 2}, REP3_WORDS, [Z_MASK3])

    def test_callable_membership(self):
        counts = {"000": 5, "011": 5}
        even = lambda bits: bits.sum(axis=1) % 2 == 0
        r = postselect_estimate(counts, even, [Z_MASK3])
        assert r.f_c == 1.0

    def test_mask_invariant_under_stabilizer_support(self):
        # any representative of the logical-Z coset scores codewords equally:
        # 100, 010, 001 (logical on each qubit) and 111 all agree on 000/111
        counts = {"000": 9, "111": 4}
        reps = ([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1])
        values = [
            postselect_estimate(counts, REP3_WORDS, [np.array(m, bool)]).value
            for m in reps
        ]
        assert values == [pytest.approx((9 - 4) / 13)] * 4

    def test_accepts_shot_table(self):
        exp = build_experiment_circuit("memory", repetition_code(3), 2)
        table = sample_shots(exp, NoiseModel("single_qubit_depolarizing", 0.05),
                             5000, seed=9)
        r = postselect_estimate(table, REP3_WORDS, exp.block_parity_masks())
        assert 0 < r.f_c < 1
        assert r.total == 5000


class TestStrategyEquivalence:
    """Post-selection over the exact outcome distribution must equal the
    diagonal-projector ratio: same quantity, two evaluation routes."""

    @pytest.mark.parametrize("make_code", [
        lambda: repetition_code(3),
        lambda: triangular_color_code(3),
    ])
    def test_memory(self, make_code):
        code = make_code()
        exp = build_experiment_circuit("memory", code, 4)
        noise = NoiseModel("single_qubit_depolarizing", 0.1)
        dist = exact_distribution(exp, noise)
        ps = postselect_estimate(dist, enumerate_codewords(code),
                                 exp.block_parity_masks())
        pr = projector_estimate(
            exact_expectation(exp, noise, diagonal_projector_terms(code),
                              exp.observable_pauli())
        )
        assert ps.value == pytest.approx(pr.value, abs=1e-12)
        assert ps.f_c == pytest.approx(pr.f_c, abs=1e-12)

    def test_bell_two_blocks(self):
        code = repetition_code(3)
        exp = build_experiment_circuit("bell", code, 2)
        noise = NoiseModel("single_qubit_depolarizing", 0.06)
        dist = exact_distribution(exp, noise)
        ps = postselect_estimate(dist, enumerate_codewords(code),
                                 exp.block_parity_masks())
        diag = diagonal_projector_terms(code)
        pr = projector_estimate(
            exact_expectation(exp, noise, tensor_expansions(diag, diag),
                              exp.observable_pauli())
        )
        assert ps.value == pytest.approx(pr.value, abs=1e-12)
        assert ps.f_c == pytest.approx(pr.f_c, abs=1e-12)

    def test_predicate_membership_matches_string_set(self):
        code = triangular_color_code(3)
        exp = build_experiment_circuit("memory", code, 2)
        noise = NoiseModel("single_qubit_depolarizing", 0.08)
        dist = exact_distribution(exp, noise)
        masks = exp.block_parity_masks()
        a = postselect_estimate(dist, enumerate_codewords(code), masks)
        b = postselect_estimate(dist, codeword_membership(code), masks)
        assert a.value == pytest.approx(b.value, abs=1e-15)
        assert a.f_c == pytest.approx(b.f_c, abs=1e-15)


class TestProjectorEstimate:
    def test_wraps_ratio(self):
        r = projector_estimate(ExactExpectation(0.42, 0.6, 0.7))
        assert r.value == pytest.approx(0.7)
        assert r.f_c == pytest.approx(0.6)
        assert r.kept == r.total == 0
        assert r.stderr == 0.0

    def test_vanishing_codespace(self):
        with pytest.raises(VanishingCodespaceError):
            projector_estimate(ExactExpectation(0.0, 1e-15, float("nan")))


class TestClosedForms:
    def test_f_c_prediction_limits(self):
        assert f_c_prediction(0.9, 0, 5) == 1.0
        assert f_c_prediction(1.0, 12, 5) == 1.0
        assert f_c_prediction(0.0, 1, 3) == pytest.approx(0.25)

    def test_f_c_prediction_decreases_with_depth(self):
        vals = [f_c_prediction(0.9, d, 5) for d in range(0, 12, 2)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_f_c_prediction_validates(self):
        with pytest.raises(InvalidParameterError):
            f_c_prediction(1.5, 2, 3)
        with pytest.raises(InvalidParameterError):
            f_c_prediction(0.5, -1, 3)

    def test_matches_exact_global_model(self):
        code = repetition_code(5)
        exp = build_experiment_circuit("memory", code, 6)
        noise = NoiseModel("global_depolarizing", 0.95)
        res = exact_expectation(exp, noise, diagonal_projector_terms(code),
                                exp.observable_pauli(), backend="heisenberg")
        assert res.denominator == pytest.approx(f_c_prediction(0.95, 6, 5),
                                                abs=1e-12)
        assert res.value == pytest.approx(analytic_mitigated_value(0.95, 6, 5),
                                          abs=1e-12)

    @given(st.floats(0.05, 1.0), st.integers(0, 20), st.integers(1, 12))
    @settings(max_examples=60, deadline=None)
    def test_mitigated_value_within_unit_interval(self, p, depth, n):
        v = analytic_mitigated_value(p, depth, n)
        assert 0.0 <= v <= 1.0 + 1e-12


class TestDetectionResult:
    def test_json_round_trip(self):
        r = DetectionResult(value=0.5, f_c=0.8, kept=80, total=100,
                            stderr=0.0968)
        back = DetectionResult.from_json(r.to_json())
        assert back == r
        assert set(json.loads(r.to_json())) == {
            "value", "f_c", "kept", "total", "stderr"
        }

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            DetectionResult(value=1.5, f_c=0.5, kept=1, total=2, stderr=0.0)
        with pytest.raises(InvalidParameterError):
            DetectionResult(value=0.5, f_c=-0.5, kept=1, total=2, stderr=0.0)


class TestSampledAgainstExact:
    def test_memory_three_sigma(self):
        # 1e5 shots of the n=3 memory run at depolarizing1q 0.05, D=10:
        # both the survivor fraction and the mitigated value must sit within
        # 3 sigma of the exact quantities
        code = repetition_code(3)
        exp = build_experiment_circuit("memory", code, 10)
        noise = NoiseModel("single_qubit_depolarizing", 0.05)
        shots = 100_000
        table = sample_shots(exp, noise, shots, seed=2024)
        est = postselect_estimate(table, enumerate_codewords(code),
                                  exp.block_parity_masks())
        exact = projector_estimate(
            exact_expectation(exp, noise, diagonal_projector_terms(code),
                              exp.observable_pauli())
        )
        sigma_f = math.sqrt(exact.f_c * (1 - exact.f_c) / shots)
        assert abs(est.f_c - exact.f_c) < 3 * sigma_f
        sigma_v = math.sqrt((1 - exact.value ** 2) / (exact.f_c * shots))
        assert abs(est.value - exact.value) < 3 * max(sigma_v, 1e-6)

    def test_global_noise_three_sigma(self):
        code = repetition_code(5)
        exp = build_experiment_circuit("memory", code, 6)
        noise = NoiseModel("global_depolarizing", 0.9)
        shots = 50_000
        table = sample_shots(exp, noise, shots, seed=77)
        est = postselect_estimate(table, enumerate_codewords(code),
                                  exp.block_parity_masks())
        want_f = f_c_prediction(0.9, 6, 5)
        want_v = analytic_mitigated_value(0.9, 6, 5)
        assert abs(est.f_c - want_f) < 3 * math.sqrt(want_f * (1 - want_f) / shots)
        assert abs(est.value - want_v) < 3 * max(est.stderr, 1e-6)
