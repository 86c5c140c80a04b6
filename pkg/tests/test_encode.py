import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedet import InvalidParameterError, UnsupportedOperationError
from qedet.codes import (
    StabilizerCode,
    random_css_code,
    random_stabilizer_code,
    repetition_code,
    single_qubit_code,
    triangular_color_code,
)
from qedet.encode import (
    ExperimentCircuit,
    LogicalBlock,
    build_experiment_circuit,
    ideal_observable_value,
    logical_gate,
    synthesize_encoder,
    _general_encoder,
)
from qedet.pauli import (
    CheckMatrix,
    PauliString,
    Tableau,
    conjugate_by_circuit,
    pauli_multiply,
    rref_gf2,
)

from oracles import dense_unitary, logical_zero_state


def tableau_after(circuit):
    t = Tableau(circuit.n_qubits)
    for moment in circuit.gate_moments():
        for g in moment:
            t.apply_gate(g.name, *g.qubits)
    return t


def assert_encodes_logical_zero(code):
    t = tableau_after(synthesize_encoder(code))
    for op in list(code.generators) + list(code.logical_z):
        assert t.expectation(op) == 1, (code.name, op.to_label())


def embed(op, block, width):
    x = np.zeros(width, bool)
    z = np.zeros(width, bool)
    for i, q in enumerate(block.qubits):
        x[q] = op.x_bits()[i]
        z[q] = op.z_bits()[i]
    return PauliString.from_bits(x, z)


class TestEncoderSynthesis:
    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_repetition_encoder_is_empty(self, n):
        assert synthesize_encoder(repetition_code(n)).moments == []

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_color_code_encoder_stabilizes(self, d):
        assert_encodes_logical_zero(triangular_color_code(d))

    def test_d3_statevector_matches_dense_oracle(self):
        code = triangular_color_code(3)
        mat = dense_unitary(synthesize_encoder(code))
        overlap = abs(np.vdot(logical_zero_state(code), mat[:, 0]))
        assert overlap == pytest.approx(1.0, abs=1e-10)

    def test_d3_gate_budget(self):
        # 3 X-type pivots -> 3 H; weight-4 reduced rows -> 9 CX fanout gates
        circ = synthesize_encoder(triangular_color_code(3))
        names = [g.name for m in circ.moments for g in m]
        assert names.count("H") == 3 and names.count("CX") == 9

    def test_trivial_code(self):
        assert synthesize_encoder(single_qubit_code()).moments == []

    @pytest.mark.parametrize("seed", range(5))
    def test_general_path_random_codes(self, seed):
        assert_encodes_logical_zero(random_stabilizer_code(7, seed))

    def test_general_path_agrees_on_css_code(self):
        code = triangular_color_code(3)
        t = tableau_after(_general_encoder(code))
        for op in list(code.generators) + list(code.logical_z):
            assert t.expectation(op) == 1

    @pytest.mark.parametrize("seed", range(3))
    def test_random_css_codes(self, seed):
        assert_encodes_logical_zero(random_css_code(9, seed))


class TestLogicalGates:
    def test_block_validation(self):
        code = repetition_code(3)
        with pytest.raises(InvalidParameterError):
            LogicalBlock(code, (0, 1))
        with pytest.raises(InvalidParameterError):
            LogicalBlock(code, (0, 1, 1))

    def test_cnot_is_transversal(self):
        code = repetition_code(3)
        b0 = LogicalBlock(code, (0, 1, 2))
        b1 = LogicalBlock(code, (3, 4, 5))
        circ = logical_gate("CNOT", [b0, b1])
        assert circ.depth == 1
        assert sorted(str(g) for g in circ.moments[0]) == [
            "CX q0 q3", "CX q1 q4", "CX q2 q5",
        ]

    def test_cnot_needs_two_matching_blocks(self):
        b0 = LogicalBlock(repetition_code(3), (0, 1, 2))
        b1 = LogicalBlock(repetition_code(5), (3, 4, 5, 6, 7))
        with pytest.raises(InvalidParameterError):
            logical_gate("CNOT", [b0])
        with pytest.raises(InvalidParameterError):
            logical_gate("CNOT", [b0, b1])

    @pytest.mark.parametrize("code_fn", [repetition_code, triangular_color_code],
                             ids=["rep3", "color3"])
    def test_cnot_heisenberg_action(self, code_fn):
        code = code_fn(3)
        n = code.n
        b0 = LogicalBlock(code, tuple(range(n)))
        b1 = LogicalBlock(code, tuple(range(n, 2 * n)))
        cnot = logical_gate("CNOT", [b0, b1])
        lx, lz = code.logical_x[0], code.logical_z[0]
        x1, x2 = embed(lx, b0, 2 * n), embed(lx, b1, 2 * n)
        z1, z2 = embed(lz, b0, 2 * n), embed(lz, b1, 2 * n)
        assert conjugate_by_circuit(x1, cnot) == pauli_multiply(x1, x2)
        assert conjugate_by_circuit(x2, cnot) == x2
        assert conjugate_by_circuit(z1, cnot) == z1
        assert conjugate_by_circuit(z2, cnot) == pauli_multiply(z1, z2)

    def test_color_h_is_one_transversal_moment(self):
        code = triangular_color_code(3)
        circ = logical_gate("H", [LogicalBlock(code, tuple(range(7)))])
        assert circ.depth == 1
        assert all(g.name == "H" for g in circ.moments[0])
        assert len(circ.moments[0]) == 7

    @pytest.mark.parametrize("d", [3, 5])
    def test_transversal_h_preserves_group(self, d):
        code = triangular_color_code(d)
        circ = logical_gate("H", [LogicalBlock(code, tuple(range(code.n)))])
        reduced, _, _ = rref_gf2(CheckMatrix.from_paulis(list(code.generators)))
        for g in code.generators:
            remainder = reduced.reduce_pauli(conjugate_by_circuit(g, circ))
            assert remainder.is_identity() and remainder.sign == 1

    def test_repetition_h_ladder(self):
        code = repetition_code(3)
        circ = logical_gate("H", [LogicalBlock(code, (0, 1, 2))])
        assert [str(g) for m in circ.moments for g in m] == [
            "H q0", "CX q0 q1", "CX q1 q2",
        ]
        assert circ.metadata["fault_tolerant"] is False

    def test_repetition_h_prepares_plus_state(self):
        # valid as a state-prep map: |000> -> (|000> + |111>)/sqrt(2)
        code = repetition_code(3)
        circ = logical_gate("H", [LogicalBlock(code, (0, 1, 2))])
        psi = dense_unitary(circ)[:, 0]
        want = np.zeros(8)
        want[0b000] = want[0b111] = 1 / np.sqrt(2)
        assert np.allclose(psi, want, atol=1e-12)

    def test_x_layer_uses_logical_support(self):
        rep = repetition_code(3)
        circ = logical_gate("X", [LogicalBlock(rep, (0, 1, 2))])
        assert circ.depth == 1 and len(circ.moments[0]) == 3  # transversal
        color = triangular_color_code(3)
        circ = logical_gate("X", [LogicalBlock(color, tuple(range(7)))])
        assert sorted(g.qubits[0] for g in circ.moments[0]) == [0, 1, 2]

    def test_h_unsupported_for_generic_code(self):
        code = random_stabilizer_code(6, seed=0)
        with pytest.raises(UnsupportedOperationError):
            logical_gate("H", [LogicalBlock(code, tuple(range(6)))])

    def test_unknown_kind(self):
        with pytest.raises(InvalidParameterError):
            logical_gate("T", [LogicalBlock(repetition_code(3), (0, 1, 2))])


class TestExperimentCircuits:
    def test_memory_d0_is_measure_only(self):
        exp = build_experiment_circuit("memory", repetition_code(3), 0)
        assert exp.circuit.depth == 1
        assert exp.circuit.moments[-1][0].name == "M"
        assert ideal_observable_value(exp) == 1

    def test_memory_layers_are_single_moments(self):
        exp = build_experiment_circuit("memory", repetition_code(3), 6)
        assert len(exp.logical_layer_moments) == 6
        for i in exp.logical_layer_moments:
            assert all(g.name == "X" for g in exp.circuit.moments[i])

    @pytest.mark.parametrize("depth", [0, 2, 4, 8])
    def test_noiseless_value_independent_of_depth(self, depth):
        exp = build_experiment_circuit("memory", repetition_code(5), depth)
        assert ideal_observable_value(exp) == 1

    def test_odd_depth_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_experiment_circuit("memory", repetition_code(3), 3)

    @pytest.mark.parametrize("obs", ["ZZ", "XX"])
    @pytest.mark.parametrize("depth", [0, 2])
    def test_color_bell_correlations(self, obs, depth):
        exp = build_experiment_circuit(
            "bell", triangular_color_code(3), depth, obs
        )
        assert ideal_observable_value(exp) == 1

    def test_rep_bell_zz(self):
        exp = build_experiment_circuit("bell", repetition_code(3), 0, "ZZ")
        assert ideal_observable_value(exp) == 1
        assert len(exp.blocks) == 2
        assert exp.blocks[1].qubits == (3, 4, 5)

    def test_rep_bell_xx_unsupported(self):
        with pytest.raises(UnsupportedOperationError):
            build_experiment_circuit("bell", repetition_code(3), 0, "XX")

    def test_physical_bell_pair(self):
        exp = build_experiment_circuit("bell", single_qubit_code(), 0, "ZZ")
        assert exp.circuit.n_qubits == 2
        assert ideal_observable_value(exp) == 1

    def test_rotated_basis_recorded(self):
        exp = build_experiment_circuit("bell", triangular_color_code(3), 0, "XX")
        assert exp.rotated_basis
        pre_measure = exp.circuit.gate_moments()[-1]
        assert all(g.name == "H" for g in pre_measure)
        assert len(pre_measure) == 14

    def test_parity_masks(self):
        exp = build_experiment_circuit("bell", repetition_code(3), 0, "ZZ")
        masks = exp.block_parity_masks()
        assert [tuple(np.flatnonzero(m)) for m in masks] == [(0,), (0,)]
        exp = build_experiment_circuit("bell", triangular_color_code(3), 0, "XX")
        masks = exp.block_parity_masks()
        assert [tuple(np.flatnonzero(m)) for m in masks] == [(0, 1, 2), (0, 1, 2)]

    def test_observable_pauli(self):
        exp = build_experiment_circuit("bell", repetition_code(3), 0, "ZZ")
        assert exp.observable_pauli().to_label() == "+ZIIZII"

    def test_bad_inputs(self):
        with pytest.raises(InvalidParameterError):
            build_experiment_circuit("teleport", repetition_code(3), 0)
        with pytest.raises(InvalidParameterError):
            build_experiment_circuit("bell", repetition_code(3), 0, "Z")
        with pytest.raises(InvalidParameterError):
            build_experiment_circuit("bell", repetition_code(3), 0, "ZX")
        with pytest.raises(InvalidParameterError):
            ExperimentCircuit(
                build_experiment_circuit("memory", repetition_code(3), 0).circuit,
                (), "Z", depth_parameter=1,
            )


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(4, 8))
def test_encoder_property_random_codes(seed, n):
    code = random_stabilizer_code(n, seed)
    t = tableau_after(synthesize_encoder(code))
    assert all(
        t.expectation(op) == 1
        for op in list(code.generators) + list(code.logical_z)
    )
