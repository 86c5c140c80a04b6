"""Encoding-circuit synthesis, logical gates, and experiment assembly.

``synthesize_encoder`` produces a unitary U with U|0...0> = |logical 0>,
verified by tableau simulation.  CSS codes with positive generator signs use
the standard-form recipe (Gaussian elimination on the X-type check matrix,
then one Hadamard per pivot and CX fanout along each reduced row); everything
else goes through a group-preserving tableau reduction.

Logical layers:
  * X on the logical-X support (transversal X for the repetition code),
  * transversal H for self-dual CSS codes,
  * physical-H + CX ladder for the repetition code (state-prep only; the
    circuit metadata carries fault_tolerant=False because it spreads
    bit flips),
  * transversal CNOT between two same-code blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf2
from .circuits import CliffordCircuit, Gate
from .codes import StabilizerCode
from .errors import (
    InvalidParameterError,
    SynthesisError,
    UnsupportedOperationError,
)
from .pauli import CheckMatrix, PauliString, Tableau


# ---------------------------------------------------------------------------
# encoder synthesis
# ---------------------------------------------------------------------------

def _css_standard_form_encoder(code: StabilizerCode) -> CliffordCircuit:
    circ = CliffordCircuit(code.n)
    h_x = code.h_x()
    if h_x.size == 0:
        return circ  # Z-type-only code: |0...0> is already the logical zero
    reduced, rank, pivots = gf2.rref(h_x)
    if rank != len(h_x):
        raise SynthesisError(f"X-type checks dependent: rank {rank} < {len(h_x)}")
    for row_i in range(rank):
        pivot = int(pivots[row_i])
        circ.append("H", pivot)
        for q in np.flatnonzero(reduced[row_i]):
            if int(q) != pivot:
                circ.append("CX", pivot, int(q))
    return circ


def _general_encoder(code: StabilizerCode) -> CliffordCircuit:
    """Reduce {generators + logical Zs} to {+Z_0 ... +Z_{n-1}} by gates and
    row multiplications; the encoder is the inverse of the gate sequence."""
    n = code.n
    m = CheckMatrix.from_paulis(list(code.generators) + list(code.logical_z))
    if m.n_rows != n:
        raise SynthesisError(
            f"stabilizer stack has {m.n_rows} rows, expected n = {n}"
        )
    forward = CliffordCircuit(n)

    def emit(name, *qubits):
        forward.append(name, *qubits)
        m.apply_gate(name, *qubits)

    for i in range(n):
        # commutation with the already-fixed +Z_j (j < i) forces x = 0 there;
        # clear the leftover z bits by multiplying those rows in
        for j in range(i):
            if m.row(i).z_bits()[j]:
                m._mul_rows_into(np.array([i]), j)
        row = m.row(i)
        xb, zb = row.x_bits(), row.z_bits()
        if xb[:i].any():
            raise SynthesisError("stack rows do not commute")
        for q in np.flatnonzero(xb & zb):
            emit("S", int(q))
        row = m.row(i)
        for q in np.flatnonzero(row.x_bits()):
            emit("H", int(q))
        support = np.flatnonzero(m.row(i).z_bits())
        if len(support) == 0:
            raise SynthesisError(f"rank deficiency at row {i}")
        anchor = i if i in support else int(support[0])
        for b in support:
            if int(b) != anchor:
                emit("CX", int(b), anchor)
        if anchor != i:
            emit("SWAP", anchor, i)
        if m.row(i).sign < 0:
            emit("X", i)
        for j in range(n):
            if j != i and m.row(j).z_bits()[i]:
                m._mul_rows_into(np.array([j]), i)
    return forward.inverse()


def synthesize_encoder(code: StabilizerCode) -> CliffordCircuit:
    """Unitary preparation circuit for the logical zero state.

    Post-condition (tableau-checked in tests): running the result on
    |0...0> yields a state on which every generator and every logical Z
    has deterministic expectation +1.  The repetition code comes out as
    the empty circuit.
    """
    css_ready = (
        code.is_css
        and all(g.sign == 1 for g in code.generators)
        and all(not p.x.any() for p in code.logical_z)
    )
    if css_ready:
        return _css_standard_form_encoder(code)
    return _general_encoder(code)


def encoder_stabilizes(circuit: CliffordCircuit, code: StabilizerCode) -> bool:
    """True iff the circuit maps |0...0> to a state with deterministic +1
    expectation for every generator and every logical Z."""
    if circuit.n_qubits != code.n:
        return False
    t = Tableau(code.n)
    for moment in circuit.gate_moments():
        for g in moment:
            t.apply_gate(g.name, *g.qubits)
    targets = list(code.generators) + list(code.logical_z)
    return all(t.expectation(p) == 1 for p in targets)


# ---------------------------------------------------------------------------
# logical blocks and gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogicalBlock:
    code: StabilizerCode
    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(self.qubits) != self.code.n:
            raise InvalidParameterError(
                f"block has {len(self.qubits)} qubits for an n={self.code.n} code"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidParameterError("duplicate qubit in block")


def _block_width(blocks: Sequence[LogicalBlock]) -> int:
    return max(q for b in blocks for q in b.qubits) + 1


def _is_repetition_family(code: StabilizerCode) -> bool:
    return code.r == 0 or all(not g.x.any() for g in code.generators)


def _transversal_h_ok(code: StabilizerCode) -> bool:
    """Transversal H preserves the group iff the code is self-dual CSS
    (X-type and Z-type supports coincide as row spaces)."""
    if not code.is_css:
        return False
    h_x, h_z = code.h_x(), code.h_z()
    if len(h_x) != len(h_z):
        return False
    if len(h_x) == 0:
        return code.r == 0  # trivial code: H is its own logical H
    return all(gf2.in_rowspace(h_z, row) for row in h_x) and all(
        gf2.in_rowspace(h_x, row) for row in h_z
    )


def logical_gate(kind: str, blocks: Sequence[LogicalBlock]) -> CliffordCircuit:
    """Compile one logical operation acting on the given physical blocks.

    kind "X": physical X on each block's logical-X support, one moment.
    kind "H": transversal H for self-dual CSS blocks; for the repetition
        family, the H + CX-ladder state-prep map (metadata flags it
        non-fault-tolerant).
    kind "CNOT": transversal CX between exactly two same-code blocks.
    """
    if not blocks:
        raise InvalidParameterError("need at least one block")
    n_total = _block_width(blocks)
    circ = CliffordCircuit(n_total)

    if kind == "X":
        gates = []
        for b in blocks:
            for q in np.flatnonzero(b.code.logical_x[0].x_bits()):
                gates.append(Gate("X", (b.qubits[int(q)],)))
        circ.append_moment(gates)
        return circ

    if kind == "H":
        for b in blocks:
            if _transversal_h_ok(b.code):
                circ.append_moment([Gate("H", (q,)) for q in b.qubits])
            elif _is_repetition_family(b.code):
                qs = b.qubits
                circ.append("H", qs[0])
                for a, t in zip(qs, qs[1:]):
                    circ.append("CX", a, t)
                circ.metadata["fault_tolerant"] = False
                circ.metadata["note"] = (
                    "repetition-ladder Hadamard: valid only on |logical 0>; "
                    "spreads bit flips"
                )
            else:
                raise UnsupportedOperationError(
                    f"no logical H construction for code {b.code.name!r}"
                )
        return circ

    if kind == "CNOT":
        if len(blocks) != 2:
            raise InvalidParameterError("CNOT takes exactly two blocks")
        ctrl, tgt = blocks
        if ctrl.code != tgt.code:
            raise InvalidParameterError("CNOT blocks must share a code")
        circ.append_moment(
            [Gate("CX", (c, t)) for c, t in zip(ctrl.qubits, tgt.qubits)]
        )
        return circ

    raise InvalidParameterError(f"unknown logical gate {kind!r}")


# ---------------------------------------------------------------------------
# experiment circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentCircuit:
    """A compiled detection experiment: prep + D logical-X layers + readout.

    ``logical_layer_moments`` indexes the D deliberately-noisy layers so
    noise models can target storage moments alone; ``rotated_basis`` records
    a terminal transversal H (X-observable readout).
    """

    circuit: CliffordCircuit
    blocks: tuple[LogicalBlock, ...]
    observable: str
    depth_parameter: int
    logical_layer_moments: tuple[int, ...] = ()
    rotated_basis: bool = field(default=False)

    def __post_init__(self):
        if self.depth_parameter < 0 or self.depth_parameter % 2:
            raise InvalidParameterError("depth parameter must be even and >= 0")
        for b in self.blocks:
            if any(q >= self.circuit.n_qubits for q in b.qubits):
                raise InvalidParameterError("block index outside circuit")

    def block_parity_masks(self) -> list[np.ndarray]:
        """Per-block bool masks (block-local, length code.n) whose parity
        over the measured bits gives that block's logical eigenvalue."""
        masks = []
        for b, ch in zip(self.blocks, self.observable):
            op = b.code.logical_x[0] if ch == "X" else b.code.logical_z[0]
            bits = op.x_bits() if ch == "X" else op.z_bits()
            masks.append(bits.astype(bool))
        return masks

    def observable_pauli(self) -> PauliString:
        """The measured logical observable as a physical Pauli on the full
        register, in the pre-rotation frame."""
        n = self.circuit.n_qubits
        x = np.zeros(n, bool)
        z = np.zeros(n, bool)
        for b, ch in zip(self.blocks, self.observable):
            op = b.code.logical_x[0] if ch == "X" else b.code.logical_z[0]
            for i, q in enumerate(b.qubits):
                x[q] |= bool(op.x_bits()[i])
                z[q] |= bool(op.z_bits()[i])
        return PauliString.from_bits(x, z)


def _normalize_observable(kind: str, observable: str, n_blocks: int) -> str:
    obs = observable.replace("bar", "").replace("_", "").upper()
    if len(obs) != n_blocks or any(ch not in "XZ" for ch in obs):
        raise InvalidParameterError(
            f"observable {observable!r} invalid for {kind} ({n_blocks} block(s))"
        )
    if len(set(obs)) != 1:
        raise InvalidParameterError("mixed-basis observables are not supported")
    return obs


def build_experiment_circuit(
    kind: str,
    code: StabilizerCode,
    depth_parameter: int,
    observable: str | None = None,
) -> ExperimentCircuit:
    """Assemble a memory or Bell experiment.

    memory: encode one block, D logical-X layers (one moment each), measure.
    bell:   encode two blocks, logical H on block 0, transversal CNOT, D
            logical-X layers on both blocks, measure.
    X-basis observables append a transversal H before measurement and are
    only available on self-dual CSS codes.
    """
    if kind not in ("memory", "bell"):
        raise InvalidParameterError(f"unknown experiment kind {kind!r}")
    if depth_parameter < 0 or depth_parameter % 2:
        raise InvalidParameterError("depth parameter must be even and >= 0")
    n_blocks = 2 if kind == "bell" else 1
    if observable is None:
        observable = "Z" * n_blocks
    obs = _normalize_observable(kind, observable, n_blocks)

    blocks = tuple(
        LogicalBlock(code, tuple(range(i * code.n, (i + 1) * code.n)))
        for i in range(n_blocks)
    )
    total = n_blocks * code.n
    circ = CliffordCircuit(total)

    encoder = synthesize_encoder(code)
    for b in blocks:
        for moment in encoder.moments:
            circ.append_moment(
                [Gate(g.name, tuple(b.qubits[q] for q in g.qubits)) for g in moment]
            )
    if kind == "bell":
        circ.extend(logical_gate("H", [blocks[0]]))
        circ.extend(logical_gate("CNOT", blocks))

    layer_start = len(circ.moments)
    x_layer = logical_gate("X", blocks)
    for _ in range(depth_parameter):
        for moment in x_layer.moments:
            circ.append_moment(list(moment))
    layers = tuple(range(layer_start, len(circ.moments)))

    rotated = obs[0] == "X"
    if rotated:
        if not all(_transversal_h_ok(b.code) for b in blocks):
            raise UnsupportedOperationError(
                f"observable {obs} needs a transversal Hadamard; "
                f"code {code.name!r} has none"
            )
        circ.append_moment([Gate("H", (q,)) for q in range(total)])
    circ.measure_all()

    return ExperimentCircuit(
        circuit=circ,
        blocks=blocks,
        observable=obs,
        depth_parameter=depth_parameter,
        logical_layer_moments=layers,
        rotated_basis=rotated,
    )


def ideal_observable_value(exp: ExperimentCircuit) -> int:
    """Noiseless expectation of the experiment's logical observable,
    evaluated by tableau simulation just before basis rotation."""
    t = Tableau(exp.circuit.n_qubits)
    rotation_cut = len(exp.circuit.gate_moments()) - (1 if exp.rotated_basis else 0)
    for moment in exp.circuit.gate_moments()[:rotation_cut]:
        for g in moment:
            t.apply_gate(g.name, *g.qubits)
    return t.expectation(exp.observable_pauli())
