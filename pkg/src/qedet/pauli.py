"""Bit-packed Pauli strings, sign-tracked check matrices, stabilizer tableaus.

Conventions
-----------
A Pauli operator is stored as ``sign * prod_q sigma_q`` with ``sign`` in
``{+1, -1}`` and ``sigma_q`` determined by an (x, z) bit pair per qubit:
``(0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y``.  Every stored operator is Hermitian.
Internally, phases are handled through the identification

    sign * prod_q sigma_q  =  i^e * X^x Z^z,   e = 2*[sign<0] + |x & z|  (mod 4)

since ``Y = i X Z``.  Bit ``q`` of a row lives in 64-bit word ``q >> 6`` at
position ``q & 63``.
"""

from __future__ import annotations

import numpy as np

from .circuits import CliffordCircuit
from .errors import (
    DimensionError,
    InvalidParameterError,
    PhaseError,
    UnsupportedOperationError,
)

_KIND_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_KIND = {v: k for k, v in _KIND_TO_XZ.items()}


def _n_words(n: int) -> int:
    return (n + 63) >> 6


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean array (..., n) into uint64 words (..., ceil(n/64))."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    rows, n = bits.shape
    w = _n_words(n)
    padded = np.zeros((rows, w * 64), dtype=np.uint8)
    padded[:, :n] = bits
    words = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
    return words


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a bool array (..., n)."""
    words = np.atleast_2d(np.asarray(words, dtype=np.uint64))
    flat = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return flat[:, :n].astype(bool)


def _popcount(words: np.ndarray) -> np.ndarray:
    """Per-row popcount of packed words (rows, W) -> (rows,)."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


class PauliString:
    """A signed Hermitian Pauli operator on ``n`` qubits."""

    __slots__ = ("n", "x", "z", "sign")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, sign: int = 1):
        if sign not in (1, -1):
            raise InvalidParameterError(f"sign must be +1 or -1, got {sign!r}")
        self.n = n
        self.x = np.asarray(x, dtype=np.uint64).reshape(_n_words(n))
        self.z = np.asarray(z, dtype=np.uint64).reshape(_n_words(n))
        self.sign = sign

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        w = _n_words(n)
        return cls(n, np.zeros(w, np.uint64), np.zeros(w, np.uint64), 1)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        sign = 1
        if label[:1] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        n = len(label)
        xb = np.zeros(n, bool)
        zb = np.zeros(n, bool)
        for q, ch in enumerate(label):
            if ch not in _KIND_TO_XZ:
                raise InvalidParameterError(f"bad Pauli letter {ch!r}")
            xb[q], zb[q] = _KIND_TO_XZ[ch]
        return cls(n, pack_bits(xb)[0], pack_bits(zb)[0], sign)

    @classmethod
    def from_bits(cls, xbits, zbits, sign: int = 1) -> "PauliString":
        xbits = np.asarray(xbits, bool)
        zbits = np.asarray(zbits, bool)
        if xbits.shape != zbits.shape or xbits.ndim != 1:
            raise DimensionError("x and z bit vectors must be same-length 1-D")
        return cls(len(xbits), pack_bits(xbits)[0], pack_bits(zbits)[0], sign)

    @classmethod
    def from_sparse(cls, n: int, support: dict[int, str], sign: int = 1) -> "PauliString":
        xb = np.zeros(n, bool)
        zb = np.zeros(n, bool)
        for q, ch in support.items():
            xb[q], zb[q] = _KIND_TO_XZ[ch]
        return cls(n, pack_bits(xb)[0], pack_bits(zb)[0], sign)

    # -- views ---------------------------------------------------------------

    def x_bits(self) -> np.ndarray:
        return unpack_bits(self.x, self.n)[0]

    def z_bits(self) -> np.ndarray:
        return unpack_bits(self.z, self.n)[0]

    def weight(self) -> int:
        return int(_popcount((self.x | self.z)[None, :])[0])

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def to_label(self) -> str:
        xb, zb = self.x_bits(), self.z_bits()
        body = "".join(_XZ_TO_KIND[(int(a), int(b))] for a, b in zip(xb, zb))
        return ("+" if self.sign > 0 else "-") + body

    def copy(self) -> "PauliString":
        return PauliString(self.n, self.x.copy(), self.z.copy(), self.sign)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.n == other.n
            and self.sign == other.sign
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.n, self.sign, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        return f"PauliString({self.to_label()!r})"

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)


def _check_same_n(p1: PauliString, p2: PauliString) -> None:
    if p1.n != p2.n:
        raise DimensionError(f"qubit counts differ: {p1.n} vs {p2.n}")


def pauli_commutes(p1: PauliString, p2: PauliString) -> bool:
    _check_same_n(p1, p2)
    sym = _popcount((p1.x & p2.z)[None, :]) + _popcount((p1.z & p2.x)[None, :])
    return bool(sym[0] % 2 == 0)


def _multiply_raw(p1: PauliString, p2: PauliString) -> tuple[PauliString, int]:
    """Return (hermitian representative of p1*p2, residual phase mod 4).

    Residual 0 means the product equals the representative, 2 means the
    representative already carries the -1 (folded into its sign), 1 or 3 mean
    the true product is ``i`` times the returned operator.
    """
    _check_same_n(p1, p2)
    e1 = (2 if p1.sign < 0 else 0) + _popcount((p1.x & p1.z)[None, :])[0]
    e2 = (2 if p2.sign < 0 else 0) + _popcount((p2.x & p2.z)[None, :])[0]
    cross = _popcount((p1.z & p2.x)[None, :])[0]
    x3 = p1.x ^ p2.x
    z3 = p1.z ^ p2.z
    w3 = _popcount((x3 & z3)[None, :])[0]
    r = int(e1 + e2 + 2 * cross - w3) % 4
    sign = 1 if r in (0, 1) else -1
    return PauliString(p1.n, x3, z3, sign), r


def pauli_multiply(p1: PauliString, p2: PauliString) -> PauliString:
    """Product of two commuting Paulis.  Raises PhaseError when the inputs
    anticommute (the product would be anti-Hermitian, outside the +-1 sign
    domain this type can represent)."""
    prod, r = _multiply_raw(p1, p2)
    if r % 2:
        raise PhaseError(
            "product of anticommuting Paulis carries a factor of i; "
            "use pauli_multiply_phase to capture it"
        )
    return prod

def pauli_multiply_phase(p1: PauliString, p2: PauliString) -> tuple[PauliString, bool]:
    """Like pauli_multiply but never raises: returns (P, imag) such that
    p1 * p2 == (i if imag else 1) * P with P Hermitian."""
    prod, r = _multiply_raw(p1, p2)
    return prod, bool(r % 2)


class CheckMatrix:
    """A stack of signed Pauli rows packed into uint64 words.

    Supports vectorised Clifford-gate conjugation (applied to every row at
    once) and sign-tracked Gaussian elimination over GF(2).
    """

    def __init__(self, n: int, X: np.ndarray, Z: np.ndarray, signs: np.ndarray):
        self.n = n
        self.X = np.asarray(X, np.uint64).reshape(-1, _n_words(n))
        self.Z = np.asarray(Z, np.uint64).reshape(-1, _n_words(n))
        self.signs = np.asarray(signs, np.int8).reshape(-1)
        if not (len(self.X) == len(self.Z) == len(self.signs)):
            raise DimensionError("row count mismatch between X, Z, signs")

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "CheckMatrix":
        w = _n_words(n)
        return cls(n, np.zeros((0, w), np.uint64), np.zeros((0, w), np.uint64),
                   np.zeros(0, np.int8))

    @classmethod
    def from_paulis(cls, paulis: list[PauliString]) -> "CheckMatrix":
        if not paulis:
            raise InvalidParameterError("need at least one row")
        n = paulis[0].n
        for p in paulis:
            if p.n != n:
                raise DimensionError("mixed qubit counts")
        X = np.stack([p.x for p in paulis])
        Z = np.stack([p.z for p in paulis])
        signs = np.array([p.sign for p in paulis], np.int8)
        return cls(n, X, Z, signs)

    @classmethod
    def from_bit_rows(cls, xrows, zrows, signs=None) -> "CheckMatrix":
        xrows = np.atleast_2d(np.asarray(xrows, bool))
        zrows = np.atleast_2d(np.asarray(zrows, bool))
        if xrows.shape != zrows.shape:
            raise DimensionError("x and z blocks must have equal shape")
        r, n = xrows.shape
        if signs is None:
            signs = np.ones(r, np.int8)
        return cls(n, pack_bits(xrows), pack_bits(zrows), signs)

    @classmethod
    def zeta(cls, n: int) -> "CheckMatrix":
        """Generators +Z_0 ... +Z_{n-1} (the |0...0> stabilizer group)."""
        zrows = np.eye(n, dtype=bool)
        xrows = np.zeros((n, n), bool)
        return cls.from_bit_rows(xrows, zrows)

    # -- views ----------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.signs)

    def row(self, i: int) -> PauliString:
        return PauliString(self.n, self.X[i], self.Z[i], int(self.signs[i]))

    def rows(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.n_rows)]

    def x_bit_rows(self) -> np.ndarray:
        return unpack_bits(self.X, self.n)

    def z_bit_rows(self) -> np.ndarray:
        return unpack_bits(self.Z, self.n)

    def copy(self) -> "CheckMatrix":
        return CheckMatrix(self.n, self.X.copy(), self.Z.copy(), self.signs.copy())

    def __repr__(self) -> str:
        return f"CheckMatrix(n={self.n}, rows={self.n_rows})"

    # -- bit-column access ----------------------------------------------------

    def _col(self, block: np.ndarray, q: int) -> np.ndarray:
        return ((block[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)).astype(bool)

    def _xor_col(self, block: np.ndarray, q: int, bits: np.ndarray) -> None:
        block[:, q >> 6] ^= bits.astype(np.uint64) << np.uint64(q & 63)

    # -- vectorised gate conjugation  (rows -> U row U^dag) ---------------------

    def apply_gate(self, name: str, *qubits: int) -> None:
        if name == "H":
            (q,) = qubits
            xq, zq = self._col(self.X, q), self._col(self.Z, q)
            self.signs[xq & zq] *= -1
            self._xor_col(self.X, q, xq ^ zq)
            self._xor_col(self.Z, q, xq ^ zq)
        elif name == "S":
            (q,) = qubits
            xq, zq = self._col(self.X, q), self._col(self.Z, q)
            self.signs[xq & zq] *= -1
            self._xor_col(self.Z, q, xq)
        elif name == "X":
            (q,) = qubits
            self.signs[self._col(self.Z, q)] *= -1
        elif name == "Z":
            (q,) = qubits
            self.signs[self._col(self.X, q)] *= -1
        elif name == "CX":
            c, t = qubits
            xc, zc = self._col(self.X, c), self._col(self.Z, c)
            xt, zt = self._col(self.X, t), self._col(self.Z, t)
            self.signs[xc & zt & ~(xt ^ zc)] *= -1
            self._xor_col(self.X, t, xc)
            self._xor_col(self.Z, c, zt)
        elif name == "CZ":
            a, b = qubits
            xa, za = self._col(self.X, a), self._col(self.Z, a)
            xb, zb = self._col(self.X, b), self._col(self.Z, b)
            self.signs[xa & xb & (za ^ zb)] *= -1
            self._xor_col(self.Z, a, xb)
            self._xor_col(self.Z, b, xa)
        elif name == "SWAP":
            a, b = qubits
            xa, za = self._col(self.X, a), self._col(self.Z, a)
            xb, zb = self._col(self.X, b), self._col(self.Z, b)
            self._xor_col(self.X, a, xa ^ xb)
            self._xor_col(self.X, b, xa ^ xb)
            self._xor_col(self.Z, a, za ^ zb)
            self._xor_col(self.Z, b, za ^ zb)
        elif name == "M":
            pass  # terminal measurement: no Heisenberg action on rows
        else:
            raise InvalidParameterError(f"unknown gate {name!r}")

    def apply_circuit(self, circuit: CliffordCircuit) -> None:
        if circuit.n_qubits > self.n:
            raise DimensionError("circuit wider than check matrix")
        for moment in circuit.moments:
            for g in moment:
                self.apply_gate(g.name, *g.qubits)

    # -- sign-tracked elimination ------------------------------------------------

    def _mul_rows_into(self, targets: np.ndarray, src: int) -> None:
        """row_t <- row_t * row_src for every t in targets (phase-tracked)."""
        if len(targets) == 0:
            return
        e_t = np.where(self.signs[targets] < 0, 2, 0) + _popcount(
            self.X[targets] & self.Z[targets]
        )
        e_s = (2 if self.signs[src] < 0 else 0) + _popcount(
            (self.X[src] & self.Z[src])[None, :]
        )[0]
        cross = _popcount(self.Z[targets] & self.X[src][None, :])
        self.X[targets] ^= self.X[src]
        self.Z[targets] ^= self.Z[src]
        w_new = _popcount(self.X[targets] & self.Z[targets])
        r = (e_t + e_s + 2 * cross - w_new) % 4
        if np.any(r % 2):
            raise PhaseError("row product left an i phase (rows anticommute)")
        self.signs[targets] = np.where(r == 0, 1, -1).astype(np.int8)

    def _swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.X[[i, j]] = self.X[[j, i]]
        self.Z[[i, j]] = self.Z[[j, i]]
        self.signs[[i, j]] = self.signs[[j, i]]

    def rref_gf2(self, x_first: bool = True) -> list[tuple[str, int, int]]:
        """In-place reduced row echelon form over the 2n symplectic columns.

        Pivot column order is all-X then all-Z when ``x_first`` (the default),
        else Z first.  Returns the pivot list as (block, qubit, row) triples.
        Rows are combined by Pauli multiplication, so signs stay meaningful;
        zero rows sink to the bottom.
        """
        blocks = ("x", "z") if x_first else ("z", "x")
        pivots: list[tuple[str, int, int]] = []
        r = 0
        for blk in blocks:
            mat = self.X if blk == "x" else self.Z
            for q in range(self.n):
                col = self._col(mat, q)
                hot = np.flatnonzero(col)
                hot = hot[hot >= r]
                if len(hot) == 0:
                    continue
                self._swap_rows(r, hot[0])
                col = self._col(mat, q)
                col[r] = False
                self._mul_rows_into(np.flatnonzero(col), r)
                pivots.append((blk, q, r))
                r += 1
                if r == self.n_rows:
                    return pivots
        return pivots

    def reduce_pauli(self, p: PauliString) -> PauliString:
        """Reduce ``p`` by the rows of an already-RREF'd matrix.

        The returned Pauli is ``p`` times a subset of rows; it is the identity
        (up to sign) iff ``p`` lies in the group generated by the rows.
        """
        if p.n != self.n:
            raise DimensionError("qubit count mismatch")
        out = p.copy()
        for blk, q, r in self._pivots_cache():
            bits = out.x if blk == "x" else out.z
            if (bits[q >> 6] >> np.uint64(q & 63)) & np.uint64(1):
                row = self.row(r)
                out = pauli_multiply(out, row)
        return out

    def _pivots_cache(self) -> list[tuple[str, int, int]]:
        # Recover pivots from an RREF'd matrix: first set bit per row, X block
        # taking precedence (matching rref_gf2's default order).
        pivots = []
        xb = self.x_bit_rows()
        zb = self.z_bit_rows()
        for r in range(self.n_rows):
            xs = np.flatnonzero(xb[r])
            if len(xs):
                pivots.append(("x", int(xs[0]), r))
            else:
                zs = np.flatnonzero(zb[r])
                if len(zs):
                    pivots.append(("z", int(zs[0]), r))
        return pivots


def rref_gf2(m: CheckMatrix, x_first: bool = True) -> tuple[CheckMatrix, int, list[int]]:
    """Reduced row echelon form of a check matrix over GF(2).

    Returns ``(reduced, rank, pivot_columns)``; pivot columns are indices into
    the 2n-wide [X | Z] block layout (X column q -> q, Z column q -> n + q).
    The input is not modified.  Row additions are Pauli multiplications, so
    the reduced rows carry correct signs.
    """
    out = m.copy()
    pivots = out.rref_gf2(x_first=x_first)
    cols = [q if blk == "x" else m.n + q for blk, q, _ in pivots]
    return out, len(pivots), cols


def conjugate_by_circuit(obj, circuit: CliffordCircuit):
    """Conjugate a PauliString or CheckMatrix by a circuit: P -> U P U^dag.

    The circuit must be purely unitary; measurements have no conjugation
    action and are rejected.
    """
    if circuit.has_measurement():
        raise UnsupportedOperationError("cannot conjugate through a measurement")
    if isinstance(obj, PauliString):
        m = CheckMatrix.from_paulis([obj])
        m.apply_circuit(circuit)
        return m.row(0)
    if isinstance(obj, CheckMatrix):
        m = obj.copy()
        m.apply_circuit(circuit)
        return m
    raise InvalidParameterError(f"cannot conjugate {type(obj).__name__}")


class Tableau:
    """Pure stabilizer state, tracked as n generator rows.  Starts in |0^n>."""

    def __init__(self, n_qubits: int):
        self.n = n_qubits
        self.gens = CheckMatrix.zeta(n_qubits)

    def apply(self, circuit: CliffordCircuit) -> "Tableau":
        self.gens.apply_circuit(circuit)
        return self

    def apply_gate(self, name: str, *qubits: int) -> "Tableau":
        self.gens.apply_gate(name, *qubits)
        return self

    def expectation(self, p: PauliString) -> int:
        """<psi| P |psi> for a stabilizer state: +1, -1, or 0."""
        if p.n != self.n:
            raise DimensionError("qubit count mismatch")
        for i in range(self.gens.n_rows):
            if not pauli_commutes(p, self.gens.row(i)):
                return 0
        reduced = self.gens.copy()
        reduced.rref_gf2()
        residue = reduced.reduce_pauli(p)
        if residue.is_identity():
            return residue.sign
        return 0  # commutes but outside the group: only for subgroup tracking

    def z_basis_support(self) -> tuple[np.ndarray, np.ndarray]:
        """Affine support of the all-qubit Z measurement distribution.

        Returns ``(s0, basis)`` with s0 an n-bit offset and basis a (m, n)
        GF(2) matrix; the outcome distribution is uniform over
        ``{ s0 xor (c @ basis) : c in {0,1}^m }``.
        """
        from . import gf2

        reduced = self.gens.copy()
        reduced.rref_gf2(x_first=True)
        xb = reduced.x_bit_rows()
        zb = reduced.z_bit_rows()
        pure_z = ~xb.any(axis=1)
        A = gf2.as_gf2(zb[pure_z])
        b = (reduced.signs[pure_z] < 0).astype(np.uint8)
        if len(A) == 0:
            s0 = np.zeros(self.n, np.uint8)
            basis = np.eye(self.n, dtype=np.uint8)
        else:
            s0 = gf2.solve(A, b)
            if s0 is None:
                raise PhaseError("inconsistent stabilizer constraints")
            basis = gf2.nullspace(A)
        return s0.astype(bool), basis.astype(bool)
