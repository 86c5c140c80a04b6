"""Stabilizer-code constructions and analysis.

Provides the repetition code, the triangular color-code family (6.6.6 patch
with weight-4 boundary faces), random codes for benchmarking, code validation,
brute-force distance, codeword enumeration (dense general path and CSS
shortcut), and stabilizer-group projector expansions.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .errors import (
    BudgetExceededError,
    CapacityError,
    InvalidParameterError,
    UnsupportedOperationError,
)
from .pauli import CheckMatrix, PauliString, pauli_commutes, pauli_multiply, rref_gf2

_ENUM_SEED = 0x5EED  # fixed seed for the dense enumerator's start vector
_SPAN_DIM_LIMIT = 22


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    d: int | None
    generators: tuple[PauliString, ...]
    logical_x: tuple[PauliString, ...]
    logical_z: tuple[PauliString, ...]
    is_css: bool
    name: str = field(default="", compare=False)

    @property
    def r(self) -> int:
        return len(self.generators)

    def x_type_generators(self) -> tuple[PauliString, ...]:
        return tuple(g for g in self.generators if not g.z.any())

    def z_type_generators(self) -> tuple[PauliString, ...]:
        return tuple(g for g in self.generators if not g.x.any())

    def h_x(self) -> np.ndarray:
        """X-part bit matrix of the pure-X generators, shape (r_x, n)."""
        gens = self.x_type_generators()
        if not gens:
            return np.zeros((0, self.n), dtype=np.uint8)
        return np.stack([g.x_bits() for g in gens]).astype(np.uint8)

    def h_z(self) -> np.ndarray:
        gens = self.z_type_generators()
        if not gens:
            return np.zeros((0, self.n), dtype=np.uint8)
        return np.stack([g.z_bits() for g in gens]).astype(np.uint8)

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"[[{self.n},{self.k},{self.d if self.d is not None else 0}]] "
                 f"css={'true' if self.is_css else 'false'}"]
        def fmt(p: PauliString) -> str:
            return p.to_label().replace("I", "_")
        lines.extend(fmt(g) for g in self.generators)
        lines.append("LX")
        lines.extend(fmt(p) for p in self.logical_x)
        lines.append("LZ")
        lines.extend(fmt(p) for p in self.logical_z)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StabilizerCode":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0]
        if not head.startswith("[[") or "css=" not in head:
            raise InvalidParameterError(f"bad code header {head!r}")
        nums, css_part = head.split("]]")
        n, k, d = (int(v) for v in nums[2:].split(","))
        is_css = css_part.strip() == "css=true"
        gens: list[PauliString] = []
        lx: list[PauliString] = []
        lz: list[PauliString] = []
        target = gens
        for ln in lines[1:]:
            if ln == "LX":
                target = lx
            elif ln == "LZ":
                target = lz
            else:
                target.append(PauliString.from_label(ln.replace("_", "I")))
        return cls(n, k, d if d > 0 else None, tuple(gens), tuple(lx), tuple(lz), is_css)

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def single_qubit_code() -> StabilizerCode:
    """The trivial [[1,1,1]] 'code': no generators, bare X/Z logicals.

    Stands in for n = 1 in repetition-family sweeps (the unencoded physical
    qubit) so analytic forms with general n apply uniformly.
    """
    return StabilizerCode(
        n=1, k=1, d=1,
        generators=(),
        logical_x=(PauliString.from_label("X"),),
        logical_z=(PauliString.from_label("Z"),),
        is_css=True, name="trivial",
    )


def repetition_code(n: int) -> StabilizerCode:
    """[[n,1,n]] bit-flip repetition code, odd n >= 3.

    Generators Z_i Z_{i+1}; logical Z = Z on qubit 0; logical X = X...X.
    The claimed distance n applies to bit-flip errors only — a single Z is
    already an undetectable logical operation.
    """
    if n < 3 or n % 2 == 0:
        raise InvalidParameterError(f"repetition code needs odd n >= 3, got {n}")
    gens = tuple(
        PauliString.from_sparse(n, {i: "Z", i + 1: "Z"}) for i in range(n - 1)
    )
    return StabilizerCode(
        n=n, k=1, d=n,
        generators=gens,
        logical_x=(PauliString.from_bits(np.ones(n, bool), np.zeros(n, bool)),),
        logical_z=(PauliString.from_sparse(n, {0: "Z"}),),
        is_css=True, name=f"repetition_{n}",
    )


@dataclass(frozen=True)
class Face:
    color: str
    center: tuple[int, int]
    sites: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ColorCodeLattice:
    d: int
    data_sites: tuple[tuple[int, int], ...]
    faces: tuple[Face, ...]

    @property
    def n(self) -> int:
        return len(self.data_sites)

    def site_index(self) -> dict[tuple[int, int], int]:
        return {s: i for i, s in enumerate(self.data_sites)}

    def bottom_row(self) -> tuple[int, ...]:
        idx = self.site_index()
        return tuple(idx[s] for s in self.data_sites if s[1] == 0)


_FACE_OFFSETS = ((-1, 1), (1, 1), (2, 0), (1, -1), (-1, -1), (-2, 0))
_CENTER_RESIDUE = {0: 2, 1: 0, 2: 1}
_ROW_COLOR = {0: "g", 1: "b", 2: "r"}


def build_color_lattice(d: int) -> ColorCodeLattice:
    """Triangular 6.6.6 color-code patch of odd distance d.

    Sites live on rows y = 0..3(d-1)/2 at x = y, y+2, ..., 2L-y; one third of
    them are hexagon centers (weight-4 at the boundary), the rest are data
    qubits.  Row-major scan order fixes qubit and face numbering.
    """
    if d < 3 or d % 2 == 0:
        raise InvalidParameterError(f"color code needs odd distance >= 3, got {d}")
    height = 3 * (d - 1) // 2
    sites = [
        (x, y)
        for y in range(height + 1)
        for x in range(y, 2 * height - y + 1, 2)
    ]
    site_set = set(sites)
    centers = [
        (x, y) for (x, y) in sites
        if ((x - y) // 2) % 3 == _CENTER_RESIDUE[y % 3]
    ]
    center_set = set(centers)
    data = tuple(s for s in sites if s not in center_set)
    data_set = set(data)
    faces = []
    for cx, cy in sorted(centers, key=lambda s: (s[1], s[0])):
        support = tuple(
            sorted(
                (cx + dx, cy + dy)
                for dx, dy in _FACE_OFFSETS
                if (cx + dx, cy + dy) in site_set
            )
        )
        assert all(s in data_set for s in support)
        faces.append(Face(color=_ROW_COLOR[cy % 3], center=(cx, cy), sites=support))
    return ColorCodeLattice(d=d, data_sites=data, faces=tuple(faces))


def triangular_color_code(d: int) -> StabilizerCode:
    """[[ (3d^2+1)/4, 1, d ]] self-dual CSS color code on the triangular patch.

    Every face contributes one X-type and one Z-type generator on the same
    support (X block first, then Z block, faces in row-major order).  Both
    logicals sit on the bottom boundary row.
    """
    lat = build_color_lattice(d)
    n = lat.n
    idx = lat.site_index()
    supports = [tuple(idx[s] for s in f.sites) for f in lat.faces]
    x_gens = [PauliString.from_sparse(n, {q: "X" for q in sup}) for sup in supports]
    z_gens = [PauliString.from_sparse(n, {q: "Z" for q in sup}) for sup in supports]
    bottom = lat.bottom_row()
    return StabilizerCode(
        n=n, k=1, d=d,
        generators=tuple(x_gens) + tuple(z_gens),
        logical_x=(PauliString.from_sparse(n, {q: "X" for q in bottom}),),
        logical_z=(PauliString.from_sparse(n, {q: "Z" for q in bottom}),),
        is_css=True, name=f"color_d{d}",
    )


def random_stabilizer_code(n: int, seed: int, k: int = 1) -> StabilizerCode:
    """Random [[n,k]] code: a random Clifford conjugates the trivial
    Z_0..Z_{r-1} generators (and the matching logicals on the last k qubits)."""
    if not 1 <= k < n:
        raise InvalidParameterError("need 1 <= k < n")
    rng = np.random.default_rng(seed)
    rows = [PauliString.from_sparse(n, {i: "Z"}) for i in range(n - k)]
    rows += [PauliString.from_sparse(n, {n - k + j: "Z"}) for j in range(k)]
    rows += [PauliString.from_sparse(n, {n - k + j: "X"}) for j in range(k)]
    m = CheckMatrix.from_paulis(rows)
    for _ in range(6 * n):
        kind = rng.choice(["H", "S", "CX", "CZ"])
        if kind in ("CX", "CZ") and n >= 2:
            a, b = rng.choice(n, size=2, replace=False)
            m.apply_gate(str(kind), int(a), int(b))
        else:
            m.apply_gate("H" if kind in ("CX", "CZ") else str(kind), int(rng.integers(n)))
    r = n - k
    return StabilizerCode(
        n=n, k=k, d=None,
        generators=tuple(m.row(i) for i in range(r)),
        logical_z=tuple(m.row(r + j) for j in range(k)),
        logical_x=tuple(m.row(r + k + j) for j in range(k)),
        is_css=False, name=f"random_{n}_{seed}",
    )


def random_css_code(n: int, seed: int) -> StabilizerCode:
    """Random [[n,1]] CSS code: random full-rank H_x, H_z drawn from its
    orthogonal complement, logicals completed from the two kernels."""
    if n < 3:
        raise InvalidParameterError("need n >= 3")
    rng = np.random.default_rng(seed)
    r_x = (n - 1) // 2
    r_z = n - 1 - r_x
    while True:
        h_x = rng.integers(0, 2, size=(r_x, n)).astype(np.uint8)
        if gf2.rank(h_x) != r_x:
            continue
        kern = gf2.nullspace(h_x)  # dim r_z + 1
        sel = rng.integers(0, 2, size=(r_z, len(kern))).astype(np.uint8)
        h_z = (sel @ kern) % 2
        if gf2.rank(h_z) != r_z:
            continue
        lx = _complete_logical(gf2.nullspace(h_z), h_x)
        lz_candidates = gf2.nullspace(h_x)
        lz = None
        for cand in _span_candidates(lz_candidates):
            if not gf2.in_rowspace(h_z, cand) and int(cand @ lx) % 2 == 1:
                lz = cand
                break
        if lx is None or lz is None:
            continue
        zeros = np.zeros(n, bool)
        return StabilizerCode(
            n=n, k=1, d=None,
            generators=tuple(
                PauliString.from_bits(row.astype(bool), zeros) for row in h_x
            ) + tuple(
                PauliString.from_bits(zeros, row.astype(bool)) for row in h_z
            ),
            logical_x=(PauliString.from_bits(lx.astype(bool), zeros),),
            logical_z=(PauliString.from_bits(zeros, lz.astype(bool)),),
            is_css=True, name=f"random_css_{n}_{seed}",
        )


def _span_candidates(basis: np.ndarray):
    """Basis vectors first, then pairwise sums — enough to find a coset rep."""
    for row in basis:
        yield row
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            yield (basis[i] + basis[j]) % 2


def _complete_logical(kernel: np.ndarray, h: np.ndarray) -> np.ndarray | None:
    for cand in _span_candidates(kernel):
        if not gf2.in_rowspace(h, cand):
            return cand
    return None


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationEntry:
    check: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[ValidationEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> tuple[ValidationEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)

    def __str__(self) -> str:
        lines = []
        for e in self.entries:
            mark = "ok  " if e.passed else "FAIL"
            lines.append(f"[{mark}] {e.check}" + (f": {e.detail}" if e.detail else ""))
        return "\n".join(lines)


def validate_code(code: StabilizerCode) -> ValidationReport:
    """Check every structural invariant; failures become report entries,
    never exceptions."""
    entries: list[ValidationEntry] = []

    def add(check: str, passed: bool, detail: str = ""):
        entries.append(ValidationEntry(check, passed, detail if not passed else ""))

    add("generator-count r = n - k", code.r == code.n - code.k,
        f"r={code.r}, n-k={code.n - code.k}")
    widths_ok = all(
        p.n == code.n for p in code.generators + code.logical_x + code.logical_z
    )
    add("operator widths match n", widths_ok, "some operator has wrong length")
    add("logical counts = k",
        len(code.logical_x) == code.k and len(code.logical_z) == code.k,
        f"|LX|={len(code.logical_x)}, |LZ|={len(code.logical_z)}, k={code.k}")
    if not widths_ok:
        return ValidationReport(tuple(entries))

    bad_pair = None
    for i in range(code.r):
        for j in range(i + 1, code.r):
            if not pauli_commutes(code.generators[i], code.generators[j]):
                bad_pair = (i, j)
                break
        if bad_pair:
            break
    add("generators pairwise commute", bad_pair is None,
        f"generators {bad_pair} anticommute" if bad_pair else "")

    if code.r:
        bits = np.concatenate(
            [np.stack([g.x_bits() for g in code.generators]),
             np.stack([g.z_bits() for g in code.generators])], axis=1
        ).astype(np.uint8)
        rank = gf2.rank(bits)
        add("generators GF(2)-independent", rank == code.r,
            f"rank {rank} < r = {code.r}")
    else:
        add("generators GF(2)-independent", True)

    bad = None
    for i, lx in enumerate(code.logical_x):
        for j, lz in enumerate(code.logical_z):
            want = (i != j)
            if pauli_commutes(lx, lz) != want:
                bad = (i, j)
    add("logical X/Z anticommute exactly on matching index", bad is None,
        f"logical pair {bad} has wrong commutation" if bad else "")

    bad = None
    for i, p in enumerate(code.logical_x + code.logical_z):
        for j, g in enumerate(code.generators):
            if not pauli_commutes(p, g):
                bad = (i, j)
    add("logicals commute with generators", bad is None,
        f"logical {bad[0]} vs generator {bad[1]}" if bad else "")

    if code.is_css:
        mixed = [i for i, g in enumerate(code.generators)
                 if g.x.any() and g.z.any()]
        add("css: generators are pure X or pure Z", not mixed,
            f"generators {mixed} are mixed")

    return ValidationReport(tuple(entries))


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

def _min_weight_coset_vector(kernel_of: np.ndarray, not_in: np.ndarray) -> int | None:
    """Minimum weight over vectors in ker(kernel_of) \\ rowspace(not_in)."""
    n = not_in.shape[1]
    kern = gf2.nullspace(kernel_of) if len(kernel_of) else np.eye(n, dtype=np.uint8)
    if len(kern) == 0:
        return None
    if len(kern) > _SPAN_DIM_LIMIT:
        raise BudgetExceededError(
            f"kernel dimension {len(kern)} exceeds span limit {_SPAN_DIM_LIMIT}"
        )
    vectors = gf2.span(kern)
    weights = vectors.sum(axis=1, dtype=np.int64)
    # reduce every vector by the rowspace basis at once; survivors (nonzero
    # residue) are exactly the vectors outside the rowspace
    reduced, rank, pivots = gf2.rref(not_in)
    residue = vectors.copy()
    for row_i in range(rank):
        col = pivots[row_i]
        mask = residue[:, col].astype(bool)
        residue[mask] ^= reduced[row_i]
    outside = residue.any(axis=1)
    if not outside.any():
        return None
    return int(weights[outside].min())


def code_distance_bruteforce(
    code: StabilizerCode,
    max_weight: int | None = None,
    error_types: str = "XYZ",
    budget: int = 20_000_000,
) -> int | None:
    """Minimum weight of a Pauli that commutes with every generator but lies
    outside the stabilizer group; None if no such operator exists up to
    max_weight.

    ``error_types`` restricts the single-qubit letters considered (e.g. "X"
    searches bit-flip-only errors).  CSS codes with an unrestricted or
    single-letter alphabet take an exhaustive kernel-enumeration shortcut
    (for CSS codes the minimum-weight logical can always be chosen pure-X or
    pure-Z); anything else walks Paulis in weight order under ``budget``.
    """
    if max_weight is None:
        max_weight = code.n
    letters = "".join(ch for ch in "XYZ" if ch in error_types)
    if not letters:
        raise InvalidParameterError("error_types must contain X, Y, or Z")

    if code.is_css and letters in ("X", "Z", "XYZ", "XZ"):
        h_x, h_z = code.h_x(), code.h_z()
        best: list[int] = []
        if "X" in letters:
            w = _min_weight_coset_vector(h_z, h_x)
            if w is not None:
                best.append(w)
        if "Z" in letters:
            w = _min_weight_coset_vector(h_x, h_z)
            if w is not None:
                best.append(w)
        if not best:
            return None
        d = min(best)
        return d if d <= max_weight else None

    return _distance_scan(code, max_weight, letters, budget)


def _distance_scan(code, max_weight, letters, budget) -> int | None:
    from itertools import combinations, product

    gen_x = np.stack([g.x_bits() for g in code.generators]).astype(np.uint8) \
        if code.r else np.zeros((0, code.n), np.uint8)
    gen_z = np.stack([g.z_bits() for g in code.generators]).astype(np.uint8) \
        if code.r else np.zeros((0, code.n), np.uint8)
    group_bits = np.concatenate([gen_x, gen_z], axis=1)
    examined = 0
    for w in range(1, max_weight + 1):
        for support in combinations(range(code.n), w):
            for kinds in product(letters, repeat=w):
                examined += 1
                if examined > budget:
                    raise BudgetExceededError(
                        f"distance scan exceeded budget of {budget} candidates "
                        f"at weight {w}"
                    )
                x = np.zeros(code.n, np.uint8)
                z = np.zeros(code.n, np.uint8)
                for q, ch in zip(support, kinds):
                    if ch != "Z":
                        x[q] = 1
                    if ch != "X":
                        z[q] = 1
                # commutes with every generator?
                syn = (gen_z @ x + gen_x @ z) % 2
                if syn.any():
                    continue
                if not gf2.in_rowspace(group_bits, np.concatenate([x, z])):
                    return w
    return None


# ---------------------------------------------------------------------------
# codewords
# ---------------------------------------------------------------------------

def _pauli_statevector_action(p: PauliString, psi: np.ndarray) -> np.ndarray:
    """Apply a signed Pauli to a dense state (qubit 0 = most significant bit)."""
    n = p.n
    dim = 1 << n
    xb, zb = p.x_bits(), p.z_bits()
    x_int = int("".join("1" if b else "0" for b in xb), 2) if n else 0
    z_int = int("".join("1" if b else "0" for b in zb), 2) if n else 0
    w_y = int(np.count_nonzero(xb & zb))
    perm = np.arange(dim, dtype=np.uint64) ^ np.uint64(x_int)
    phases = 1.0 - 2.0 * (np.bitwise_count(perm & np.uint64(z_int)) & np.uint64(1))
    return (p.sign * (1j ** w_y)) * phases * psi[perm.astype(np.intp)]


def enumerate_codewords(
    code: StabilizerCode, method: str = "auto", cap: int = 24
) -> set[str]:
    """Computational-basis strings with nonzero amplitude in the codespace.

    The general path projects a fixed-seed random dense vector with
    (I + S)/sqrt-normalization per generator and thresholds |amplitude| at
    1e-9; the CSS path spans {X-generator supports} + {logical-X supports}
    over GF(2).  Bit i of each returned string is qubit i.
    """
    if method not in ("auto", "general", "css"):
        raise InvalidParameterError(f"unknown method {method!r}")
    if method == "css" or (method == "auto" and code.is_css):
        if not code.is_css:
            raise UnsupportedOperationError("CSS path requested for non-CSS code")
        basis = np.concatenate(
            [code.h_x().astype(np.uint8)]
            + [p.x_bits().astype(np.uint8)[None, :] for p in code.logical_x],
            axis=0,
        )
        reduced, rank, _ = gf2.rref(basis)
        if rank > _SPAN_DIM_LIMIT:
            raise CapacityError(f"codeword span dimension {rank} too large")
        vectors = gf2.span(reduced[:rank])
        return {"".join("1" if b else "0" for b in v) for v in vectors}

    if code.n > cap:
        raise CapacityError(
            f"general enumeration path capped at {cap} qubits (n = {code.n}); "
            "use the CSS path for CSS codes"
        )
    rng = np.random.default_rng(_ENUM_SEED)
    psi = rng.standard_normal(1 << code.n) + 0j
    psi /= np.linalg.norm(psi)
    for g in code.generators:
        psi = psi + _pauli_statevector_action(g, psi)
        norm = np.linalg.norm(psi)
        if norm < 1e-12:
            return set()
        psi /= norm
    support = np.flatnonzero(np.abs(psi) > 1e-9)
    return {format(int(s), f"0{code.n}b") for s in support}


def codeword_membership(code: StabilizerCode):
    """Vectorized codeword-string test: bool bit-matrix (m, n) -> bool (m,).

    CSS codes check H_z parity directly (no enumeration); other codes fall
    back to the enumerated set.
    """
    if code.is_css:
        h_z = code.h_z()

        def check(bits: np.ndarray) -> np.ndarray:
            bits = np.atleast_2d(np.asarray(bits, np.uint8))
            if h_z.size == 0:
                return np.ones(len(bits), bool)
            return ~(((bits @ h_z.T) % 2).any(axis=1))

        return check

    words = enumerate_codewords(code)

    def check(bits: np.ndarray) -> np.ndarray:
        bits = np.atleast_2d(np.asarray(bits, np.uint8))
        return np.array(
            ["".join("1" if b else "0" for b in row) in words for row in bits],
            dtype=bool,
        )

    return check


# ---------------------------------------------------------------------------
# projector expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectorExpansion:
    """Uniform signed-Pauli expansion of a stabilizer-(sub)group projector:
    (1/2^r) * sum of all 2^r group elements."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    @property
    def coefficient(self) -> float:
        return self.terms[0][0] if self.terms else 0.0


def _expand_group(n: int, gens: list[PauliString]) -> ProjectorExpansion:
    elements = [PauliString.identity(n)]
    for g in gens:
        elements = elements + [pauli_multiply(e, g) for e in elements]
    coeff = 1.0 / len(elements)
    return ProjectorExpansion(n, tuple((coeff, e) for e in elements))


def projector_terms(code: StabilizerCode, cap: int = 24) -> ProjectorExpansion:
    """Full codespace projector: all 2^r signed group elements, coefficient
    1/2^r each; the identity appears exactly once."""
    if code.r > cap:
        raise CapacityError(f"projector expansion needs 2^{code.r} terms (cap 2^{cap})")
    return _expand_group(code.n, list(code.generators))


def diagonal_projector_terms(code: StabilizerCode, cap: int = 24) -> ProjectorExpansion:
    """Expansion of the measurement-diagonal part of the stabilizer group:
    the pure-Z subgroup, whose uniform sum is the diagonal projector onto
    codeword strings (the operator post-selection implements)."""
    if not code.r:
        return _expand_group(code.n, [])
    reduced, rank, _ = rref_gf2(CheckMatrix.from_paulis(list(code.generators)))
    rows = [reduced.row(i) for i in range(rank)]
    pure_z = [p for p in rows if not p.x.any()]
    if len(pure_z) > cap:
        raise CapacityError(f"diagonal expansion needs 2^{len(pure_z)} terms")
    return _expand_group(code.n, pure_z)


def tensor_expansions(a: ProjectorExpansion, b: ProjectorExpansion) -> ProjectorExpansion:
    """Kronecker product of two expansions, a on the low block, b appended."""
    terms = []
    for ca, pa in a.terms:
        la = pa.to_label()
        for cb, pb in b.terms:
            lb = pb.to_label()
            sign = "+" if (la[0] == "+") == (lb[0] == "+") else "-"
            terms.append((ca * cb, PauliString.from_label(sign + la[1:] + lb[1:])))
    return ProjectorExpansion(a.n + b.n, tuple(terms))
