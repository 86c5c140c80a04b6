"""Noisy execution of experiment circuits.

Two regimes:

* ``sample_shots`` — Monte Carlo sampling that scales to every code in the
  package.  Single-qubit depolarizing noise rides on a Pauli frame over a
  stabilizer ideal-sample; the global channel is unraveled exactly as a
  survival mixture (any per-moment failure collapses the shot to a uniform
  string, which is the channel's exact terminal-measurement behavior).
* ``exact_expectation`` / ``exact_distribution`` — exact evaluation, either
  by dense density-operator evolution (small registers) or by Heisenberg
  back-propagation of the observable's Pauli expansion (exact for both
  depolarizing kinds, scales to wide registers as long as the term count is
  manageable).

Noise conventions (kept throughout the package):

* ``global_depolarizing``: p is the per-moment *survival* probability —
  after one noisy moment the state is  p·rho + (1-p)·I/2^N.
* ``single_qubit_depolarizing``: p is the per-qubit per-moment *error*
  probability; X, Y, Z each occur with probability p/3.

Randomness is a counter hash keyed by (seed, shot, moment, qubit), so a
shot's outcome never depends on chunking or worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import CliffordCircuit
from .codes import ProjectorExpansion
from .encode import ExperimentCircuit
from .errors import (
    CapacityError,
    InvalidParameterError,
    UnsupportedOperationError,
)
from .pauli import CheckMatrix, PauliString, Tableau, pauli_commutes, pauli_multiply

NOISE_KINDS = ("none", "single_qubit_depolarizing", "global_depolarizing")
_DEFAULT_CHUNK = 131072


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    p: float = 0.0
    scope: str = "all"  # "all" moments, or "logical_only" (the D layers)

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidParameterError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameterError(f"noise rate {self.p} outside [0, 1]")
        if self.scope not in ("all", "logical_only"):
            raise InvalidParameterError(f"unknown noise scope {self.scope!r}")

    @property
    def is_trivial(self) -> bool:
        if self.kind == "none":
            return True
        if self.kind == "global_depolarizing":
            return self.p == 1.0  # survival 1 = no noise
        return self.p == 0.0

    def label(self) -> str:
        names = {
            "none": "none",
            "single_qubit_depolarizing": "depolarizing1q",
            "global_depolarizing": "depolarizing_global",
        }
        return f"{names[self.kind]}:{self.p:g}"


# ---------------------------------------------------------------------------
# counter RNG: splitmix64 finalizer chained over keys
# ---------------------------------------------------------------------------

_TAG_BASIS = np.uint64(1) << np.uint64(40)
_TAG_SURVIVE = np.uint64(1) << np.uint64(41)
_TAG_UNIFORM = np.uint64(1) << np.uint64(42)
_MOMENT_SHIFT = np.uint64(20)


def _mix(h: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = h.astype(np.uint64, copy=True)
        h ^= h >> np.uint64(30)
        h *= np.uint64(0xBF58476D1CE4E5B9)
        h ^= h >> np.uint64(27)
        h *= np.uint64(0x94D049BB133111EB)
        h ^= h >> np.uint64(31)
    return h


def counter_hash(seed: int, *keys) -> np.ndarray:
    """Chain-hash the seed and each key (ints or uint64 arrays, broadcast)."""
    h = _mix(np.asarray(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    for k in keys:
        h = _mix(h ^ np.asarray(k, dtype=np.uint64))
    return h


def _to_unit(h: np.ndarray) -> np.ndarray:
    return (h >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


# ---------------------------------------------------------------------------
# shot tables
# ---------------------------------------------------------------------------

@dataclass
class ShotTable:
    counts: dict[str, int]
    shots: int
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise InvalidParameterError("counts do not sum to total shots")

    @property
    def n_bits(self) -> int:
        return len(next(iter(self.counts))) if self.counts else 0

    def merge(self, other: "ShotTable") -> "ShotTable":
        if self.counts and other.counts and self.n_bits != other.n_bits:
            raise InvalidParameterError("bit widths differ")
        merged = dict(self.counts)
        for s, c in other.counts.items():
            merged[s] = merged.get(s, 0) + c
        return ShotTable(merged, self.shots + other.shots, self.seed, dict(self.meta))

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bitstring", "count"])
            for s in sorted(self.counts):
                writer.writerow([s, self.counts[s]])
        sidecar = {
            "shots": self.shots,
            "seed": self.seed,
            "noise_kind": self.meta.get("noise_kind", "none"),
            "p": self.meta.get("p", 0.0),
            "circuit_hash": self.meta.get("circuit_hash", ""),
        }
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> "ShotTable":
        path = Path(path)
        counts: dict[str, int] = {}
        with path.open() as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["bitstring", "count"]:
                raise InvalidParameterError(f"bad shot CSV header {header}")
            for row in reader:
                counts[row[0]] = int(row[1])
        meta_path = path.with_suffix(path.suffix + ".json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        return cls(counts, sum(counts.values()), meta.get("seed", 0), meta)


def circuit_hash(circuit: CliffordCircuit) -> str:
    return hashlib.sha256(circuit.to_text().encode()).hexdigest()


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _as_circuit(target) -> tuple[CliffordCircuit, tuple[int, ...]]:
    if isinstance(target, ExperimentCircuit):
        return target.circuit, target.logical_layer_moments
    if isinstance(target, CliffordCircuit):
        return target, ()
    raise InvalidParameterError(f"cannot sample from {type(target).__name__}")


def noisy_moment_indices(target, noise: NoiseModel) -> tuple[int, ...]:
    circuit, layers = _as_circuit(target)
    if noise.kind == "none":
        return ()
    if noise.scope == "logical_only":
        if not isinstance(target, ExperimentCircuit):
            raise InvalidParameterError(
                "logical_only scope needs an ExperimentCircuit"
            )
        return layers
    return tuple(range(len(circuit.gate_moments())))


_FRAME_SWAPS = {"H"}


def _propagate_frame(xf, zf, moment):
    """Conjugate the Pauli frame (bool arrays (n, chunk)) through one moment.
    Signs are irrelevant: a frame only shifts measured strings."""
    for g in moment:
        if g.name == "H":
            q = g.qubits[0]
            xf[q], zf[q] = zf[q].copy(), xf[q].copy()
        elif g.name == "S":
            q = g.qubits[0]
            zf[q] ^= xf[q]
        elif g.name in ("X", "Z"):
            pass
        elif g.name == "CX":
            c, t = g.qubits
            xf[t] ^= xf[c]
            zf[c] ^= zf[t]
        elif g.name == "CZ":
            a, b = g.qubits
            za = zf[a] ^ xf[b]
            zb = zf[b] ^ xf[a]
            zf[a], zf[b] = za, zb
        elif g.name == "SWAP":
            a, b = g.qubits
            xf[[a, b]] = xf[[b, a]]
            zf[[a, b]] = zf[[b, a]]
        else:  # pragma: no cover - M filtered out by gate_moments
            raise UnsupportedOperationError(f"frame rule missing for {g.name}")


def _ideal_sampler(circuit: CliffordCircuit):
    """Affine description (s0, basis) of the noiseless outcome distribution."""
    t = Tableau(circuit.n_qubits)
    for moment in circuit.gate_moments():
        for g in moment:
            t.apply_gate(g.name, *g.qubits)
    return t.z_basis_support()


def _ideal_bits(s0, basis, h_shot):
    chunk = len(h_shot)
    out = np.broadcast_to(s0, (chunk, len(s0))).copy()
    for j in range(len(basis)):
        coin = (counter_hash(0, h_shot ^ (_TAG_BASIS | np.uint64(j)))
                >> np.uint64(63)).astype(bool)
        out[coin] ^= basis[j]
    return out


def sample_shots(
    target,
    noise: NoiseModel,
    shots: int,
    seed: int,
    chunk_size: int = _DEFAULT_CHUNK,
) -> ShotTable:
    """Sample terminal-measurement bitstrings; deterministic in (seed, shot).

    The string's character i is the outcome of the i-th *measured* qubit.
    """
    if shots < 1:
        raise InvalidParameterError("need at least one shot")
    circuit, _ = _as_circuit(target)
    if not circuit.has_measurement():
        raise InvalidParameterError("circuit has no terminal measurement")
    order = list(circuit.measured_qubits())
    noisy = frozenset(noisy_moment_indices(target, noise))
    s0, basis = _ideal_sampler(circuit)
    moments = circuit.gate_moments()
    n = circuit.n_qubits

    counts: dict[str, int] = {}
    for lo in range(0, shots, chunk_size):
        hi = min(lo + chunk_size, shots)
        h_shot = counter_hash(seed, np.arange(lo, hi, dtype=np.uint64))
        ideal = _ideal_bits(s0, basis, h_shot)  # (chunk, n)

        if noise.kind == "single_qubit_depolarizing" and noise.p > 0 and noisy:
            out = ideal
            xf = np.zeros((n, hi - lo), bool)
            zf = np.zeros((n, hi - lo), bool)
            qkeys = np.arange(n, dtype=np.uint64)[:, None]
            for mi, moment in enumerate(moments):
                _propagate_frame(xf, zf, moment)
                if mi in noisy:
                    mq = (np.uint64(mi) << _MOMENT_SHIFT) | qkeys
                    u = _to_unit(counter_hash(0, h_shot[None, :] ^ mq))
                    err = u < noise.p
                    kind = np.floor_divide(3.0 * u, noise.p).astype(np.int8)
                    xf ^= err & (kind != 2)
                    zf ^= err & (kind != 0)
            out = ideal ^ xf.T
        elif noise.kind == "global_depolarizing" and noise.p < 1 and noisy:
            survive = np.ones(hi - lo, bool)
            for mi in noisy:
                u = _to_unit(counter_hash(0, h_shot ^ (_TAG_SURVIVE | np.uint64(mi))))
                survive &= u < noise.p
            uniform = np.empty((hi - lo, n), bool)
            for q in range(n):
                uniform[:, q] = (
                    counter_hash(0, h_shot ^ (_TAG_UNIFORM | np.uint64(q)))
                    >> np.uint64(63)
                ).astype(bool)
            out = np.where(survive[:, None], ideal, uniform)
        else:
            out = ideal

        strings = out[:, order].astype(np.uint8)
        packed = np.packbits(strings, axis=1)
        uniq, inv_counts = np.unique(packed, axis=0, return_counts=True)
        for row, c in zip(uniq, inv_counts):
            bits = np.unpackbits(row)[: len(order)]
            key = "".join("1" if b else "0" for b in bits)
            counts[key] = counts.get(key, 0) + int(c)

    return ShotTable(
        counts,
        shots,
        seed,
        meta={
            "noise_kind": noise.kind,
            "p": noise.p,
            "scope": noise.scope,
            "circuit_hash": circuit_hash(circuit),
        },
    )


# ---------------------------------------------------------------------------
# dense density-operator backend
# ---------------------------------------------------------------------------

_DENSE_CAP = 14

_G1 = {
    "H": np.array([[1, 1], [1, -1]], complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], complex),
    "X": np.array([[0, 1], [1, 0]], complex),
    "Y": np.array([[0, -1j], [1j, 0]], complex),
    "Z": np.array([[1, 0], [0, -1]], complex),
}
_G2 = {
    "CX": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], complex
    ),
}


def _apply_unitary(rho_t, mat, qubits, n):
    """rho -> U rho U^dag on the tensored density (2,)*2n, row axes first."""
    k = len(qubits)
    g = mat.reshape((2,) * (2 * k))
    rho_t = np.tensordot(g, rho_t, axes=(list(range(k, 2 * k)), list(qubits)))
    rho_t = np.moveaxis(rho_t, range(k), qubits)
    col_axes = [n + q for q in qubits]
    rho_t = np.tensordot(np.conj(g), rho_t, axes=(list(range(k, 2 * k)), col_axes))
    rho_t = np.moveaxis(rho_t, range(k), col_axes)
    return rho_t


def _apply_moment_noise(rho_t, noise: NoiseModel, n):
    if noise.kind == "single_qubit_depolarizing":
        p = noise.p
        for q in range(n):
            acc = (1 - p) * rho_t
            for letter in "XYZ":
                acc = acc + (p / 3) * _apply_unitary(rho_t, _G1[letter], [q], n)
            rho_t = acc
        return rho_t
    if noise.kind == "global_depolarizing":
        dim = 1 << n
        rho = rho_t.reshape(dim, dim)
        tr = np.trace(rho)
        mixed = (tr / dim) * np.eye(dim, dtype=complex)
        return (noise.p * rho + (1 - noise.p) * mixed).reshape((2,) * (2 * n))
    return rho_t


def exact_density(target, noise: NoiseModel, dense_cap: int = _DENSE_CAP):
    """Density matrix just before measurement, shape (2^n, 2^n)."""
    circuit, _ = _as_circuit(target)
    n = circuit.n_qubits
    if n > dense_cap:
        raise CapacityError(f"dense backend capped at {dense_cap} qubits (n={n})")
    noisy = frozenset(noisy_moment_indices(target, noise))
    dim = 1 << n
    rho = np.zeros((dim, dim), complex)
    rho[0, 0] = 1.0
    rho_t = rho.reshape((2,) * (2 * n))
    for mi, moment in enumerate(circuit.gate_moments()):
        for g in moment:
            mat = _G1[g.name] if g.name in _G1 else _G2[g.name]
            rho_t = _apply_unitary(rho_t, mat, list(g.qubits), n)
        if mi in noisy:
            rho_t = _apply_moment_noise(rho_t, noise, n)
    return rho_t.reshape(dim, dim)


def exact_distribution(target, noise: NoiseModel, dense_cap: int = _DENSE_CAP):
    """Exact terminal-measurement distribution as {bitstring: probability},
    strings ordered like the sampler's (character i = i-th measured qubit)."""
    circuit, _ = _as_circuit(target)
    rho = exact_density(target, noise, dense_cap)
    probs = np.clip(np.diag(rho).real, 0.0, None)
    n = circuit.n_qubits
    order = list(circuit.measured_qubits()) if circuit.has_measurement() else list(
        range(n)
    )
    out: dict[str, float] = {}
    for idx in np.flatnonzero(probs > 1e-15):
        full = format(int(idx), f"0{n}b")
        key = "".join(full[q] for q in order)
        out[key] = out.get(key, 0.0) + float(probs[idx])
    return out


def _trace_with_pauli(rho: np.ndarray, p: PauliString) -> complex:
    n = p.n
    xb, zb = p.x_bits(), p.z_bits()
    x_int = int("".join("1" if b else "0" for b in xb), 2)
    z_int = int("".join("1" if b else "0" for b in zb), 2)
    w_y = int(np.count_nonzero(xb & zb))
    idx = np.arange(1 << n, dtype=np.uint64)
    perm = (idx ^ np.uint64(x_int)).astype(np.intp)
    phases = 1.0 - 2.0 * (
        np.bitwise_count(idx & np.uint64(z_int)) & np.uint64(1)
    ).astype(np.float64)
    return p.sign * (1j ** w_y) * np.sum(rho[idx.astype(np.intp), perm] * phases)


# ---------------------------------------------------------------------------
# Heisenberg back-propagation backend
# ---------------------------------------------------------------------------

def heisenberg_profile(target, kind: str, terms, scope: str = "all"):
    """Back-propagate signed Pauli terms and return ``(weights, exponents)``.

    Depolarizing channels are diagonal on the Pauli basis, so pulling a term
    backward only multiplies it by a channel factor per noisy moment: the
    single-qubit channel contributes lambda = 1 - 4p/3 per non-identity
    site, the global channel the survival p whenever the term is not the
    identity.  The conjugation path is rate-independent, so one pass yields
    ``sum(weights * factor**exponents)`` as the exact expectation for every
    rate at once (``factor`` = lambda or p by kind).
    """
    circuit, _ = _as_circuit(target)
    probe = NoiseModel(kind, 0.5 if kind != "none" else 0.0, scope=scope)
    noisy = frozenset(noisy_moment_indices(target, probe))
    paulis = [p for _, p in terms]
    coeff = np.array([c for c, _ in terms], float)
    m = CheckMatrix.from_paulis(paulis)
    expo = np.zeros(len(paulis), np.int64)
    moments = circuit.gate_moments()
    for mi in range(len(moments) - 1, -1, -1):
        if mi in noisy:
            if kind == "single_qubit_depolarizing":
                expo += np.bitwise_count(m.X | m.Z).sum(axis=1).astype(np.int64)
            elif kind == "global_depolarizing":
                expo += (m.X.any(axis=1)) | (m.Z.any(axis=1))
        for g in moments[mi]:
            if g.name == "S":  # S^-1 = Z S
                m.apply_gate("S", *g.qubits)
                m.apply_gate("Z", *g.qubits)
            else:
                m.apply_gate(g.name, *g.qubits)
    pure_z = ~m.X.any(axis=1)
    return coeff * m.signs * pure_z, expo


def channel_factor(noise: NoiseModel) -> float:
    """Per-exponent damping factor matching heisenberg_profile's convention."""
    if noise.kind == "single_qubit_depolarizing":
        return 1.0 - 4.0 * noise.p / 3.0
    if noise.kind == "global_depolarizing":
        return noise.p
    return 1.0


def heisenberg_expectation(target, noise: NoiseModel, terms) -> float:
    """Sum of coeff * Tr[rho P] over signed Pauli terms via back-propagation."""
    weights, expo = heisenberg_profile(target, noise.kind, terms, scope=noise.scope)
    return float(np.dot(weights, channel_factor(noise) ** expo.astype(float)))


# ---------------------------------------------------------------------------
# exact mitigated expectation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactExpectation:
    numerator: float
    denominator: float
    value: float


def exact_expectation(
    target,
    noise: NoiseModel,
    projector: ProjectorExpansion,
    observable: PauliString,
    backend: str = "auto",
    dense_cap: int = _DENSE_CAP,
) -> ExactExpectation:
    """Tr[rho Pi O], Tr[rho Pi], and their ratio on the pre-measurement state.

    Requires the observable to commute with every projector term (the
    subspace-code contract); violations raise UnsupportedOperationError.
    """
    circuit, _ = _as_circuit(target)
    n = circuit.n_qubits
    if projector.n != n or observable.n != n:
        raise InvalidParameterError("projector/observable width mismatch")
    for _, term in projector.terms:
        if not pauli_commutes(term, observable):
            raise UnsupportedOperationError(
                f"projector term {term.to_label()} anticommutes with the "
                "observable; mitigated expectation undefined"
            )
    num_terms = [(c, pauli_multiply(t, observable)) for c, t in projector.terms]
    den_terms = list(projector.terms)

    if backend == "auto":
        backend = "density" if n <= 10 else "heisenberg"
    if backend == "density":
        rho = exact_density(target, noise, dense_cap)
        num = sum(c * _trace_with_pauli(rho, p) for c, p in num_terms)
        den = sum(c * _trace_with_pauli(rho, p) for c, p in den_terms)
        num, den = float(np.real(num)), float(np.real(den))
    elif backend == "heisenberg":
        num = heisenberg_expectation(target, noise, num_terms)
        den = heisenberg_expectation(target, noise, den_terms)
    else:
        raise InvalidParameterError(f"unknown backend {backend!r}")
    value = num / den if den != 0.0 else float("nan")
    return ExactExpectation(numerator=num, denominator=den, value=value)
