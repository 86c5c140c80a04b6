"""Post-selected and projector-based mitigated expectation values.

Two equivalent evaluation strategies for the same quantity:

* ``postselect_estimate`` — operational: discard measured strings outside
  the codespace, average the observable's parity over the survivors.
* ``projector_estimate`` — wrap an exact Tr[rho Pi O] / Tr[rho Pi] ratio
  (from ``sim.exact_expectation``) in the same result type.

Plus the closed forms for the per-layer global depolarizing model, used as
oracles and as the analytic baseline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidParameterError,
    NoCodewordsError,
    VanishingCodespaceError,
)
from .sim import ExactExpectation, ShotTable

_DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class DetectionResult:
    value: float
    f_c: float
    kept: float
    total: float
    stderr: float

    def __post_init__(self):
        if not -1.0 - 1e-9 <= self.value <= 1.0 + 1e-9:
            raise InvalidParameterError(f"mitigated value {self.value} outside [-1, 1]")
        if not -1e-9 <= self.f_c <= 1.0 + 1e-9:
            raise InvalidParameterError(f"codeword fraction {self.f_c} outside [0, 1]")

    def to_json(self) -> str:
        return json.dumps(
            {
                "value": self.value,
                "f_c": self.f_c,
                "kept": self.kept,
                "total": self.total,
                "stderr": self.stderr,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DetectionResult":
        d = json.loads(text)
        return cls(d["value"], d["f_c"], d["kept"], d["total"], d["stderr"])


Membership = Callable[[np.ndarray], np.ndarray]


def _membership_fn(spec, width: int) -> Membership:
    """Normalize a codeword spec (string set or vectorized predicate) to a
    predicate over a (m, width) bool matrix."""
    if callable(spec):
        return spec
    strings = set(spec)
    for s in strings:
        if len(s) != width:
            raise InvalidParameterError(
                f"codeword {s!r} has width {len(s)}, block has {width}"
            )
    if width <= 62:
        packed = {int(s, 2) for s in strings}
        weights = (1 << np.arange(width - 1, -1, -1)).astype(np.int64)

        def check_packed(bits: np.ndarray) -> np.ndarray:
            vals = bits.astype(np.int64) @ weights
            return np.isin(vals, np.fromiter(packed, np.int64, len(packed)))

        return check_packed

    def check_str(bits: np.ndarray) -> np.ndarray:
        return np.array(
            ["".join("1" if b else "0" for b in row) in strings for row in bits],
            bool,
        )

    return check_str


def _as_mask(mask, width: int) -> np.ndarray:
    arr = np.asarray(mask)
    if arr.dtype == bool and arr.shape == (width,):
        return arr
    out = np.zeros(width, bool)
    out[list(mask)] = True
    return out


def _counts_items(shots) -> tuple[list[str], np.ndarray]:
    if isinstance(shots, ShotTable):
        items = shots.counts
    elif isinstance(shots, Mapping):
        items = shots
    else:
        raise InvalidParameterError(
            f"expected ShotTable or mapping, got {type(shots).__name__}"
        )
    if not items:
        raise InvalidParameterError("empty shot table")
    strings = sorted(items)
    weights = np.array([items[s] for s in strings], float)
    if np.any(weights < 0):
        raise InvalidParameterError("negative shot weights")
    return strings, weights


def postselect_estimate(shots, codewords, parity_masks) -> DetectionResult:
    """Post-selected observable estimate from measured strings.

    shots         ShotTable, or any mapping bitstring -> weight (counts or
                  exact probabilities both work).
    codewords     per-block membership: a set of per-block bitstrings, a
                  vectorized predicate over (m, block_width) bool arrays, or
                  a sequence of one such spec per block.
    parity_masks  per-block observable support (bool mask or index list);
                  mask widths define the block boundaries, left to right.

    Raises NoCodewordsError (carrying f_C = 0) when nothing survives.
    """
    masks = [np.asarray(m) for m in parity_masks]
    if not masks:
        raise InvalidParameterError("need at least one block mask")
    strings, weights = _counts_items(shots)
    widths = [
        m.shape[0] if m.dtype == bool else None for m in masks
    ]
    # index-style masks need the block width from the string length
    if any(w is None for w in widths):
        if len(masks) == 1:
            widths = [len(strings[0])]
        else:
            raise InvalidParameterError(
                "index-style masks are only unambiguous for a single block; "
                "pass boolean masks of full block width"
            )
    total_width = sum(widths)
    if len(strings[0]) != total_width:
        raise InvalidParameterError(
            f"strings have {len(strings[0])} bits, masks cover {total_width}"
        )
    if not isinstance(codewords, (list, tuple)):
        codeword_specs = [codewords] * len(masks)
    else:
        codeword_specs = list(codewords)
        if len(codeword_specs) != len(masks):
            raise InvalidParameterError("one codeword spec per block required")

    bits = np.array([[c == "1" for c in s] for s in strings], bool)
    total = float(weights.sum())
    keep = np.ones(len(strings), bool)
    parity = np.zeros(len(strings), np.int64)
    offset = 0
    for spec, mask, width in zip(codeword_specs, masks, widths):
        block = bits[:, offset : offset + width]
        keep &= np.asarray(_membership_fn(spec, width)(block), bool)
        parity += block @ _as_mask(mask, width).astype(np.int64)
        offset += width

    kept = float(weights[keep].sum())
    if kept <= 0.0:
        raise NoCodewordsError(
            "no sampled string lies in the codespace", total=total
        )
    signs = 1.0 - 2.0 * (parity[keep] % 2)
    value = float(np.dot(weights[keep], signs) / kept)
    f_c = kept / total
    stderr = math.sqrt(max(0.0, 1.0 - value * value) / kept)
    return DetectionResult(value=value, f_c=f_c, kept=kept, total=total, stderr=stderr)


def projector_estimate(exact: ExactExpectation) -> DetectionResult:
    """Package an exact mitigated ratio as a DetectionResult.

    f_C is the denominator Tr[rho Pi] — the codespace population; kept and
    total are zero because no shots were drawn, and stderr is exactly 0.
    """
    den = exact.denominator
    if abs(den) < _DENOMINATOR_FLOOR:
        raise VanishingCodespaceError(
            f"codespace population {den:.3e} below floor {_DENOMINATOR_FLOOR:g}"
        )
    value = exact.numerator / den
    return DetectionResult(
        value=value, f_c=den, kept=0.0, total=0.0, stderr=0.0
    )


# ---------------------------------------------------------------------------
# closed forms for D layers of global depolarizing (survival p) on n qubits
# ---------------------------------------------------------------------------

def f_c_prediction(p: float, depth_parameter: int, n: int) -> float:
    """Predicted codespace population: p^D + (1 - p^D) / 2^(n-1)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"survival probability {p} outside [0, 1]")
    if depth_parameter < 0 or n < 1:
        raise InvalidParameterError("need D >= 0 and n >= 1")
    pd = p ** depth_parameter
    return pd + (1.0 - pd) / 2.0 ** (n - 1)


def analytic_mitigated_value(
    p: float, depth_parameter: int, n: int, ideal: float = 1.0
) -> float:
    """Mitigated logical expectation under the global model:
    p^D * ideal / (p^D + (1 - p^D) / 2^(n-1))."""
    pd = p ** depth_parameter
    return pd * ideal / f_c_prediction(p, depth_parameter, n)
