"""Moment-ordered Clifford circuits with terminal Z measurements.

A circuit is a list of moments; each moment is a tuple of gates acting on
disjoint qubits.  The gate alphabet is fixed to
``H, S, X, Z, CX, CZ, SWAP, M`` where ``M`` is a computational-basis
measurement of one or more qubits and may only appear in the final moments.

Text format (round-trips deterministically)::

    # optional comments
    qubits 14
    H q0
    CX q0 q1; CX q2 q3
    M q0 q1 q2 q3

One moment per line; gates within a moment are separated by ``;``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError, UnsupportedOperationError

SINGLE_QUBIT_GATES = frozenset({"H", "S", "X", "Z"})
TWO_QUBIT_GATES = frozenset({"CX", "CZ", "SWAP"})
GATE_NAMES = SINGLE_QUBIT_GATES | TWO_QUBIT_GATES | {"M"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise InvalidParameterError(f"unknown gate {self.name!r}")
        if self.name in SINGLE_QUBIT_GATES and len(self.qubits) != 1:
            raise InvalidParameterError(f"{self.name} takes one qubit")
        if self.name in TWO_QUBIT_GATES and len(self.qubits) != 2:
            raise InvalidParameterError(f"{self.name} takes two qubits")
        if self.name == "M" and len(self.qubits) == 0:
            raise InvalidParameterError("M needs at least one qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidParameterError(f"repeated qubit in {self.name}")
        if any(q < 0 for q in self.qubits):
            raise InvalidParameterError("negative qubit index")

    def __str__(self) -> str:
        return f"{self.name} " + " ".join(f"q{q}" for q in self.qubits)


class CliffordCircuit:
    """Mutable builder; treat as immutable once handed to simulators."""

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise InvalidParameterError("need at least one qubit")
        self.n_qubits = n_qubits
        self.moments: list[list[Gate]] = []
        self.metadata: dict = {}  # free-form annotations; not serialized

    # -- construction -----------------------------------------------------

    def _check_gate(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.n_qubits:
            raise InvalidParameterError(
                f"gate {gate} out of range for {self.n_qubits} qubits"
            )
        if gate.name != "M" and self.has_measurement():
            raise UnsupportedOperationError(
                "measurements are terminal: no gates may follow an M moment"
            )

    def append(self, name: str, *qubits: int) -> "CliffordCircuit":
        """Add a gate as early as possible (after the last use of its qubits)."""
        gate = Gate(name, tuple(qubits))
        self._check_gate(gate)
        qs = set(gate.qubits)
        slot = len(self.moments)
        while slot > 0:
            prev = self.moments[slot - 1]
            if any(qs & set(g.qubits) for g in prev):
                break
            if any(g.name == "M" for g in prev):
                break  # never pack a unitary before/next to a measurement row
            slot -= 1
        if gate.name == "M" and self.moments and slot < len(self.moments):
            slot = len(self.moments)
        if slot == len(self.moments):
            self.moments.append([gate])
        else:
            self.moments[slot].append(gate)
        return self

    def append_moment(self, gates: list[tuple[str, tuple[int, ...]]] | list[Gate]) -> "CliffordCircuit":
        """Add an explicit moment (used for logical layers that must stay one
        moment regardless of packing)."""
        moment: list[Gate] = []
        used: set[int] = set()
        for g in gates:
            gate = g if isinstance(g, Gate) else Gate(g[0], tuple(g[1]))
            self._check_gate(gate)
            if used & set(gate.qubits):
                raise InvalidParameterError("qubit used twice in one moment")
            used |= set(gate.qubits)
            moment.append(gate)
        if moment:
            self.moments.append(moment)
        return self

    def extend(self, other: "CliffordCircuit") -> "CliffordCircuit":
        """Concatenate another circuit moment-by-moment (no re-packing)."""
        if other.n_qubits > self.n_qubits:
            raise InvalidParameterError("appended circuit is wider than target")
        for moment in other.moments:
            for g in moment:
                self._check_gate(g)
            self.moments.append(list(moment))
        return self

    def measure_all(self) -> "CliffordCircuit":
        self.append("M", *range(self.n_qubits))
        return self

    # -- inspection --------------------------------------------------------

    @property
    def depth(self) -> int:
        return sum(1 for m in self.moments if m)

    def has_measurement(self) -> bool:
        return any(g.name == "M" for m in self.moments for g in m)

    def measured_qubits(self) -> tuple[int, ...]:
        out: list[int] = []
        for moment in self.moments:
            for g in moment:
                if g.name == "M":
                    out.extend(g.qubits)
        return tuple(out)

    def gate_moments(self) -> list[list[Gate]]:
        """Moments before the first measurement moment."""
        out = []
        for moment in self.moments:
            if any(g.name == "M" for g in moment):
                break
            out.append(moment)
        return out

    def copy(self) -> "CliffordCircuit":
        c = CliffordCircuit(self.n_qubits)
        c.moments = [list(m) for m in self.moments]
        c.metadata = dict(self.metadata)
        return c

    def inverse(self) -> "CliffordCircuit":
        """Inverse of the unitary part.  S inverts to the pair Z*S (= S^dag)."""
        if self.has_measurement():
            raise UnsupportedOperationError("cannot invert a measured circuit")
        inv = CliffordCircuit(self.n_qubits)
        for moment in reversed(self.moments):
            for g in reversed(moment):
                if g.name == "S":
                    inv.append("S", *g.qubits)
                    inv.append("Z", *g.qubits)
                else:
                    inv.append(g.name, *g.qubits)
        return inv

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CliffordCircuit)
            and self.n_qubits == other.n_qubits
            and [tuple(m) for m in self.moments] == [tuple(m) for m in other.moments]
        )

    def __repr__(self) -> str:
        return f"CliffordCircuit(n_qubits={self.n_qubits}, depth={self.depth})"

    # -- text format --------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        for moment in self.moments:
            if moment:
                lines.append("; ".join(str(g) for g in moment))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        circ: CliffordCircuit | None = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if circ is None:
                head = line.split()
                if len(head) != 2 or head[0] != "qubits":
                    raise InvalidParameterError(
                        f"expected 'qubits N' header, got {raw!r}"
                    )
                circ = cls(int(head[1]))
                continue
            gates = []
            for chunk in line.split(";"):
                parts = chunk.split()
                if not parts:
                    continue
                name, args = parts[0], parts[1:]
                qubits = []
                for a in args:
                    if not a.startswith("q"):
                        raise InvalidParameterError(f"bad qubit token {a!r}")
                    qubits.append(int(a[1:]))
                gates.append(Gate(name, tuple(qubits)))
            circ.append_moment(gates)
        if circ is None:
            raise InvalidParameterError("empty circuit file")
        return circ
