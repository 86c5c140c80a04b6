import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedet import CliffordCircuit, Gate, InvalidParameterError, UnsupportedOperationError


def test_gate_validation():
    with pytest.raises(InvalidParameterError):
        Gate("H", (0, 1))
    with pytest.raises(InvalidParameterError):
        Gate("CX", (2, 2))
    with pytest.raises(InvalidParameterError):
        Gate("FOO", (0,))
    with pytest.raises(InvalidParameterError):
        Gate("M", ())


def test_append_packs_asap():
    c = CliffordCircuit(4)
    c.append("H", 0)
    c.append("H", 1)          # same moment as H 0
    c.append("CX", 0, 2)      # must start a second moment
    c.append("H", 3)          # fits in the first moment
    assert c.depth == 2
    assert [g.name for g in c.moments[0]] == ["H", "H", "H"]


def test_append_moment_rejects_overlap():
    c = CliffordCircuit(3)
    with pytest.raises(InvalidParameterError):
        c.append_moment([("H", (0,)), ("CX", (0, 1))])


def test_no_gates_after_measurement():
    c = CliffordCircuit(2)
    c.append("H", 0)
    c.measure_all()
    with pytest.raises(UnsupportedOperationError):
        c.append("H", 1)


def test_out_of_range_qubit():
    with pytest.raises(InvalidParameterError):
        CliffordCircuit(2).append("H", 2)


def test_measured_qubits_order():
    c = CliffordCircuit(3)
    c.append("M", 2, 0, 1)
    assert c.measured_qubits() == (2, 0, 1)


def test_depth_counts_nonempty_moments():
    c = CliffordCircuit(2)
    assert c.depth == 0
    c.append("H", 0)
    c.append("CX", 0, 1)
    c.measure_all()
    assert c.depth == 3


def test_text_format_round_trip():
    c = CliffordCircuit(5)
    c.append("H", 0)
    c.append("CX", 0, 1)
    c.append_moment([("S", (2,)), ("SWAP", (3, 4))])
    c.measure_all()
    text = c.to_text()
    assert text.splitlines()[0] == "qubits 5"
    back = CliffordCircuit.from_text(text)
    assert back == c
    assert back.to_text() == text


def test_text_format_comments_and_blanks():
    text = "# a comment\nqubits 2\n\nH q0  # trailing note\nCX q0 q1\nM q0 q1\n"
    c = CliffordCircuit.from_text(text)
    assert c.n_qubits == 2 and c.depth == 3
    assert c.measured_qubits() == (0, 1)


def test_text_format_bad_header():
    with pytest.raises(InvalidParameterError):
        CliffordCircuit.from_text("H q0\n")
    with pytest.raises(InvalidParameterError):
        CliffordCircuit.from_text("")


def test_extend_concatenates_without_repacking():
    a = CliffordCircuit(2).append("H", 0)
    b = CliffordCircuit(2).append("H", 1)
    a.extend(b)
    assert a.depth == 2  # kept as separate moments


def test_inverse_reverses_and_inverts_s():
    c = CliffordCircuit(1).append("S", 0)
    inv = c.inverse()
    names = [g.name for m in inv.moments for g in m]
    assert names == ["S", "Z"]
    with pytest.raises(UnsupportedOperationError):
        CliffordCircuit(1).measure_all().inverse()


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_random_build_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    c = CliffordCircuit(n)
    for _ in range(int(rng.integers(0, 30))):
        kind = rng.choice(["H", "S", "X", "Z", "CX", "CZ", "SWAP"])
        if kind in ("CX", "CZ", "SWAP"):
            if n < 2:
                continue
            a, b = rng.choice(n, size=2, replace=False)
            c.append(str(kind), int(a), int(b))
        else:
            c.append(str(kind), int(rng.integers(n)))
    # no qubit twice within any moment
    for moment in c.moments:
        used = [q for g in moment for q in g.qubits]
        assert len(used) == len(set(used))
    # text round trip is exact
    assert CliffordCircuit.from_text(c.to_text()) == c
    assert c.depth == sum(1 for m in c.moments if m)
