"""Experiment drivers: memory and Bell sweeps, pseudothreshold estimation,
and the codeword-enumeration timing benchmark.

Every sweep point gets its own seed derived from (master seed, integer grid
coordinates) through the counter hash, so results are bit-identical for any
worker count and any execution order.  Result files are a CSV (one row per
grid point) plus a JSON manifest echoing the configuration, the derived
seeds, and the content hashes of the codes used.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codes, detect, route, sim
from .codes import StabilizerCode
from .encode import ExperimentCircuit, build_experiment_circuit, ideal_observable_value
from .errors import InvalidParameterError, NoCrossoverError
from .sim import NoiseModel

DEFAULT_ENCODED_SHOTS = 100_000
DEFAULT_PHYSICAL_SHOTS = 10_000
DEFAULT_D7_SHOTS = 1_000_000

_SEED_TAG_BASELINE = 0
_SEED_TAG_ENCODED = 1
_SEED_TAG_GRID = 2


def point_seed(master: int, *coords: int) -> int:
    """Derived per-point seed, independent of evaluation order."""
    return int(sim.counter_hash(master, *[np.uint64(c & 0xFFFFFFFFFFFFFFFF) for c in coords]))


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class SweepPoint:
    axis: tuple[tuple[str, int], ...]
    result: detect.DetectionResult
    baseline: float
    stats: dict | None = None


@dataclass
class SweepResult:
    kind: str
    config: dict
    points: list[SweepPoint]
    seeds: dict[str, int] = field(default_factory=dict)
    code_hashes: dict[str, str] = field(default_factory=dict)

    def to_csv_text(self) -> str:
        if not self.points:
            raise InvalidParameterError("empty sweep")
        axis_names = [k for k, _ in self.points[0].axis]
        stat_names = sorted(self.points[0].stats) if self.points[0].stats else []
        header = axis_names + ["value", "stderr", "f_c", "kept", "total", "baseline"] + stat_names
        lines = [",".join(header)]
        for pt in self.points:
            r = pt.result
            row = [_fmt(v) for _, v in pt.axis]
            row += [_fmt(r.value), _fmt(r.stderr), _fmt(r.f_c), _fmt(r.kept),
                    _fmt(r.total), _fmt(pt.baseline)]
            row += [_fmt(pt.stats[k]) for k in stat_names]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def manifest(self) -> dict:
        return {
            "format_version": 1,
            "kind": self.kind,
            "config": self.config,
            "seeds": self.seeds,
            "code_hashes": self.code_hashes,
        }

    def write(self, csv_path: str | Path) -> Path:
        csv_path = Path(csv_path)
        csv_path.write_text(self.to_csv_text())
        manifest_path = csv_path.with_suffix(csv_path.suffix + ".manifest.json")
        manifest_path.write_text(
            json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n"
        )
        return manifest_path


def _run_points(jobs: int, tasks):
    """Evaluate callables, possibly in a thread pool; order preserved."""
    if jobs <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


def _plain_mean_estimate(table: sim.ShotTable, mask) -> detect.DetectionResult:
    """Unencoded baseline: every string is kept (trivial codespace)."""
    return detect.postselect_estimate(
        table, lambda bits: np.ones(len(bits), bool), [np.asarray(mask, bool)]
    )


def _physical_memory_value(depth_parameter, noise, shots, seed) -> float:
    exp = build_experiment_circuit("memory", codes.single_qubit_code(), depth_parameter)
    table = sim.sample_shots(exp, noise, shots, seed)
    return _plain_mean_estimate(table, [True]).value


def _physical_bell_value(depth_parameter, observable, noise, shots, seed) -> float:
    exp = build_experiment_circuit(
        "bell", codes.single_qubit_code(), depth_parameter, observable=observable
    )
    table = sim.sample_shots(exp, noise, shots, seed)
    return _plain_mean_estimate(table, [True, True]).value


def run_memory_sweep(
    n_values,
    depths,
    noise: NoiseModel,
    shots: int = DEFAULT_ENCODED_SHOTS,
    seed: int = 0,
    physical_shots: int = DEFAULT_PHYSICAL_SHOTS,
    jobs: int = 1,
) -> SweepResult:
    """Repetition-code memory experiment over an (n, D) grid.

    Encoded points: sample + post-select ⟨Z̄⟩.  Baseline column: the bare
    single-qubit version of the same circuit under the same noise.
    """
    n_values = [int(n) for n in n_values]
    depths = [int(d) for d in depths]
    if not n_values or not depths:
        raise InvalidParameterError("need at least one n and one depth")
    for n in n_values:
        if n < 3 or n % 2 == 0:
            raise InvalidParameterError(f"repetition length {n} must be odd and >= 3")
    for d in depths:
        if d < 0 or d % 2:
            raise InvalidParameterError(f"depth parameter {d} must be even and >= 0")

    built = {n: codes.repetition_code(n) for n in n_values}
    members = {n: codes.codeword_membership(built[n]) for n in n_values}
    baseline_seeds = {d: point_seed(seed, _SEED_TAG_BASELINE, 1, d) for d in depths}
    baselines = dict(
        zip(
            depths,
            _run_points(
                jobs,
                [
                    (lambda d=d: _physical_memory_value(
                        d, noise, physical_shots, baseline_seeds[d]))
                    for d in depths
                ],
            ),
        )
    )

    grid = [(n, d) for n in n_values for d in depths]
    seeds = {f"n={n},D={d}": point_seed(seed, _SEED_TAG_ENCODED, n, d) for n, d in grid}

    def job(n, d):
        exp = build_experiment_circuit("memory", built[n], d)
        table = sim.sample_shots(exp, noise, shots, seeds[f"n={n},D={d}"])
        res = detect.postselect_estimate(table, members[n], exp.block_parity_masks())
        return SweepPoint(
            axis=(("n", n), ("D", d)), result=res, baseline=baselines[d]
        )

    points = _run_points(jobs, [(lambda n=n, d=d: job(n, d)) for n, d in grid])
    config = {
        "experiment": "memory",
        "family": "repetition",
        "n_values": n_values,
        "depths": depths,
        "noise": noise.label(),
        "scope": noise.scope,
        "shots": shots,
        "physical_shots": physical_shots,
        "seed": seed,
    }
    hashes = {f"repetition-{n}": built[n].content_hash() for n in n_values}
    return SweepResult("memory", config, points,
                       seeds={**seeds, **{f"baseline-D={d}": s for d, s in baseline_seeds.items()}},
                       code_hashes=hashes)


def _code_for(family: str, d: int) -> StabilizerCode:
    if family == "repetition":
        return codes.repetition_code(d)
    if family == "color":
        return codes.triangular_color_code(d)
    raise InvalidParameterError(f"unknown code family {family!r}")


def _heavy_hex_for(width: int) -> route.CouplingGraph:
    k = 1
    while True:
        g = route.heavy_hex_graph(k, k)
        if g.n_nodes >= width:
            return g
        k += 1


def run_bell_sweep(
    family: str,
    distances,
    depths,
    noise: NoiseModel,
    observable: str = "ZZ",
    shots: int = DEFAULT_ENCODED_SHOTS,
    seed: int = 0,
    physical_shots: int = DEFAULT_PHYSICAL_SHOTS,
    routed: bool = False,
    graph: route.CouplingGraph | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Two-block Bell experiment over a (distance, D) grid.

    Each point records the post-selected estimate, the 2-qubit unencoded
    Bell baseline under the same noise, and the circuit statistics (routed
    points are counted in native-CX after SWAP expansion).
    """
    distances = [int(x) for x in distances]
    depths = [int(x) for x in depths]
    if not distances or not depths:
        raise InvalidParameterError("need at least one distance and one depth")
    if routed and noise.scope == "logical_only":
        raise InvalidParameterError("routed sampling supports scope='all' only")

    built = {d: _code_for(family, d) for d in distances}
    baseline_seeds = {dd: point_seed(seed, _SEED_TAG_BASELINE, 2, dd) for dd in depths}
    baselines = dict(
        zip(
            depths,
            _run_points(
                jobs,
                [
                    (lambda dd=dd: _physical_bell_value(
                        dd, observable, noise, physical_shots, baseline_seeds[dd]))
                    for dd in depths
                ],
            ),
        )
    )

    grid = [(d, dd) for d in distances for dd in depths]
    seeds = {f"d={d},D={dd}": point_seed(seed, _SEED_TAG_ENCODED, d, dd) for d, dd in grid}

    def job(d, dd):
        code = built[d]
        exp = build_experiment_circuit("bell", code, dd, observable=observable)
        member = codes.codeword_membership(code)
        masks = exp.block_parity_masks()
        if routed:
            g = graph if graph is not None else _heavy_hex_for(exp.circuit.n_qubits)
            routed_c = route.route_circuit(exp.circuit, g)
            target = routed_c.circuit
            stats = route.circuit_stats(target, mode="native-CX")
        else:
            target = exp
            stats = route.circuit_stats(exp.circuit, mode="native-CZ")
        table = sim.sample_shots(target, noise, shots, seeds[f"d={d},D={dd}"])
        res = detect.postselect_estimate(table, member, masks)
        stats_row = {k: stats[k] for k in ("two_qubit_count", "depth", "swap_count")}
        return SweepPoint(axis=(("d", d), ("D", dd)), result=res,
                          baseline=baselines[dd], stats=stats_row)

    points = _run_points(jobs, [(lambda d=d, dd=dd: job(d, dd)) for d, dd in grid])
    config = {
        "experiment": "bell",
        "family": family,
        "distances": distances,
        "depths": depths,
        "observable": observable,
        "noise": noise.label(),
        "scope": noise.scope,
        "shots": shots,
        "physical_shots": physical_shots,
        "seed": seed,
        "routed": routed,
    }
    hashes = {f"{family}-{d}": built[d].content_hash() for d in distances}
    return SweepResult("bell", config, points,
                       seeds={**seeds, **{f"baseline-D={dd}": s for dd, s in baseline_seeds.items()}},
                       code_hashes=hashes)


# ---------------------------------------------------------------------------
# pseudothreshold
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudothresholdResult:
    depth_parameter: int
    p_star: float
    method: str
    per_item: tuple[tuple[str, float], ...]
    grid: tuple[float, ...]
    diagnostics: dict

    def __post_init__(self):
        if not 0.0 < self.p_star < 1.0:
            raise InvalidParameterError(f"p* = {self.p_star} outside (0, 1)")


def _two_block_diag(code: StabilizerCode) -> codes.ProjectorExpansion:
    e = codes.diagonal_projector_terms(code)
    return codes.tensor_expansions(e, e)


class ExactPostselectEvaluator:
    """Exact post-selected ⟨Z̄⟩ / ⟨Z̄Z̄⟩ curves over a noise-rate grid.

    Uses the diagonal-subgroup projector (the operator post-selection
    implements) and the Heisenberg exponent profile: the conjugation path is
    rate-independent, so each (code, experiment, D) triple costs one
    back-propagation, after which every grid point is a dot product.
    """

    def __init__(self, kind: str):
        self.kind = kind
        self._terms: dict = {}
        self._profiles: dict = {}

    def _exp_terms(self, code: StabilizerCode, experiment: str, depth_parameter: int):
        key = (code.content_hash(), experiment)
        if key not in self._terms:
            exp = build_experiment_circuit(experiment, code, 0)
            diag = codes.diagonal_projector_terms(code)
            den = (_two_block_diag(code) if experiment == "bell" else diag).terms
            obs = exp.observable_pauli()
            from .pauli import pauli_multiply

            num = tuple((c, pauli_multiply(t, obs)) for c, t in den)
            self._terms[key] = (num, den)
        return self._terms[key]

    def curve(self, code: StabilizerCode, experiment: str, depth_parameter: int,
              p_grid) -> np.ndarray:
        key = (code.content_hash(), experiment, depth_parameter)
        if key not in self._profiles:
            num, den = self._exp_terms(code, experiment, depth_parameter)
            exp = build_experiment_circuit(experiment, code, depth_parameter)
            self._profiles[key] = (
                sim.heisenberg_profile(exp, self.kind, num),
                sim.heisenberg_profile(exp, self.kind, den),
            )
        (nw, ne), (dw, de) = self._profiles[key]
        out = np.empty(len(p_grid))
        for i, p in enumerate(p_grid):
            f = sim.channel_factor(NoiseModel(self.kind, p))
            numerator = float(np.dot(nw, f ** ne.astype(float)))
            denominator = float(np.dot(dw, f ** de.astype(float)))
            out[i] = detect.projector_estimate(
                sim.ExactExpectation(numerator, denominator, float("nan"))
            ).value
        return out


def _sampled_bell_value(code: StabilizerCode, depth_parameter: int, p: float,
                        kind: str, shots: int, seed: int) -> float:
    exp = build_experiment_circuit("bell", code, depth_parameter, observable="ZZ")
    table = sim.sample_shots(exp, NoiseModel(kind, p), shots, seed)
    member = codes.codeword_membership(code)
    return detect.postselect_estimate(table, member, exp.block_parity_masks()).value


_EXACT_EVALUATORS: dict[str, ExactPostselectEvaluator] = {}


def _exact_evaluator(kind: str) -> ExactPostselectEvaluator:
    if kind not in _EXACT_EVALUATORS:
        _EXACT_EVALUATORS[kind] = ExactPostselectEvaluator(kind)
    return _EXACT_EVALUATORS[kind]


def _interp_log_crossing(p_grid, diff_log):
    """First index where the log-error difference crosses from < 0 to >= 0,
    root by linear interpolation in (log p, diff_log)."""
    for i in range(len(p_grid) - 1):
        y0, y1 = diff_log[i], diff_log[i + 1]
        if y0 < 0.0 <= y1:
            x0, x1 = np.log(p_grid[i]), np.log(p_grid[i + 1])
            x = x0 - y0 * (x1 - x0) / (y1 - y0)
            return float(np.exp(x)), (float(p_grid[i]), float(p_grid[i + 1]))
    raise NoCrossoverError(
        "no sign change of (encoded error - reference error) inside the p grid"
    )


def estimate_pseudothreshold(
    depth_parameter: int,
    distances,
    p_grid,
    family: str = "color",
    noise_kind: str = "single_qubit_depolarizing",
    method: str = "vs_physical",
    shots: int | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> PseudothresholdResult:
    """Noise rate below which the detected Bell experiment beats the bare one.

    method "vs_physical" (primary): for each distance, locate the sign
    change of encoded-minus-physical ⟨Z̄Z̄⟩ error along the p grid and
    interpolate log-log; multiple distances are combined by geometric mean.
    method "pair": same, but the reference curve for the pair (d1, d2) is
    the d1 curve and the test curve is d2 (the distance-crossover variant).
    shots=None evaluates both curves exactly; an integer samples them.
    """
    p_grid = [float(p) for p in p_grid]
    if len(p_grid) < 2:
        raise InvalidParameterError("p grid needs at least two points")
    if sorted(p_grid) != p_grid or len(set(p_grid)) != len(p_grid):
        raise InvalidParameterError("p grid must be strictly increasing")
    if any(not 0.0 < p < 1.0 for p in p_grid):
        raise InvalidParameterError("p grid values must lie in (0, 1)")
    if method not in ("vs_physical", "pair"):
        raise InvalidParameterError(f"unknown method {method!r}")

    if method == "pair":
        pairs = [tuple(int(x) for x in item) for item in distances]
        if any(len(pr) != 2 or pr[0] >= pr[1] for pr in pairs):
            raise InvalidParameterError("pairs must be (smaller, larger) distances")
        needed = sorted({d for pr in pairs for d in pr})
    else:
        needed = sorted({int(d) for d in distances})
        pairs = [(d,) for d in needed]

    built = {d: _code_for(family, d) for d in needed}
    evaluator = _exact_evaluator(noise_kind) if shots is None else None

    def encoded_curve(d):
        if shots is None:
            return evaluator.curve(built[d], "bell", depth_parameter, p_grid)

        def at(i, p):
            return _sampled_bell_value(
                built[d], depth_parameter, p, noise_kind, shots,
                point_seed(seed, _SEED_TAG_GRID, d, depth_parameter, i),
            )
        return _run_points(jobs, [(lambda i=i, p=p: at(i, p)) for i, p in enumerate(p_grid)])

    def physical_curve():
        if shots is None:
            return evaluator.curve(codes.single_qubit_code(), "bell", depth_parameter, p_grid)

        def at(i, p):
            exp = build_experiment_circuit(
                "bell", codes.single_qubit_code(), depth_parameter, observable="ZZ"
            )
            table = sim.sample_shots(
                exp, NoiseModel(noise_kind, p), DEFAULT_PHYSICAL_SHOTS,
                point_seed(seed, _SEED_TAG_GRID, 1, depth_parameter, i),
            )
            return _plain_mean_estimate(table, [True, True]).value
        return _run_points(jobs, [(lambda i=i, p=p: at(i, p)) for i, p in enumerate(p_grid)])

    curves = {d: np.abs(1.0 - np.array(encoded_curve(d))) for d in needed}
    phys = np.abs(1.0 - np.array(physical_curve())) if method == "vs_physical" else None

    tiny = 1e-300
    per_item = []
    diagnostics = {"grid": p_grid, "curves": {}}
    for pr in pairs:
        if method == "vs_physical":
            test, ref, label = curves[pr[0]], phys, f"d={pr[0]}"
        else:
            test, ref, label = curves[pr[1]], curves[pr[0]], f"d={pr[0]}vs{pr[1]}"
        diff_log = np.log(np.maximum(test, tiny)) - np.log(np.maximum(ref, tiny))
        p_star, bracket = _interp_log_crossing(p_grid, diff_log)
        per_item.append((label, p_star))
        diagnostics["curves"][label] = {
            "test_error": [float(x) for x in test],
            "reference_error": [float(x) for x in ref],
            "bracket": list(bracket),
        }
    combined = float(np.exp(np.mean([np.log(v) for _, v in per_item])))
    return PseudothresholdResult(
        depth_parameter=depth_parameter,
        p_star=combined,
        method=method,
        per_item=tuple(per_item),
        grid=tuple(p_grid),
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# codeword-enumeration timing benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimingRow:
    n: int
    seconds: tuple[float, ...]
    codeword_counts: tuple[int, ...]

    @property
    def mean_seconds(self) -> float:
        return float(np.mean(self.seconds))


@dataclass
class TimingTable:
    rows: list[TimingRow]
    config: dict
    seeds: dict[str, int] = field(default_factory=dict)

    def mean_ratio_per_two_qubits(self) -> float:
        """Geometric-mean growth of mean wall time per +2 qubits."""
        by_n = {r.n: r.mean_seconds for r in self.rows}
        ns = sorted(by_n)
        ratios = [
            by_n[b] / by_n[a]
            for a, b in zip(ns, ns[1:])
            if b - a == 2 and by_n[a] > 0
        ]
        if not ratios:
            raise InvalidParameterError("no adjacent +2 qubit pairs in the table")
        return float(np.exp(np.mean(np.log(ratios))))

    def to_csv_text(self) -> str:
        lines = ["n,run,seconds,codewords"]
        for r in self.rows:
            for i, (s, c) in enumerate(zip(r.seconds, r.codeword_counts)):
                lines.append(f"{r.n},{i},{s!r},{c}")
        return "\n".join(lines) + "\n"

    def write(self, csv_path: str | Path) -> Path:
        csv_path = Path(csv_path)
        csv_path.write_text(self.to_csv_text())
        manifest_path = csv_path.with_suffix(csv_path.suffix + ".manifest.json")
        manifest_path.write_text(json.dumps(
            {"format_version": 1, "kind": "codewords-bench",
             "config": self.config, "seeds": self.seeds},
            indent=2, sort_keys=True) + "\n")
        return manifest_path


def codeword_timing_benchmark(
    n_values, codes_per_n: int = 3, seed: int = 0
) -> TimingTable:
    """Wall time of general-path codeword enumeration on random codes.

    Codes are random-Clifford images of the trivial code, so the general
    dense path is the only one available; the expected trend is a ~4x cost
    per +2 qubits.  Timings are wall-clock and not reproducible bit-for-bit.
    """
    n_values = [int(n) for n in n_values]
    if not n_values or codes_per_n < 1:
        raise InvalidParameterError("need at least one n and codes_per_n >= 1")
    rows = []
    seeds = {}
    for n in n_values:
        times, sizes = [], []
        for i in range(codes_per_n):
            s = point_seed(seed, 3, int(n), i)
            seeds[f"n={n},run={i}"] = s
            code = codes.random_stabilizer_code(int(n), seed=s)
            t0 = time.perf_counter()
            words = codes.enumerate_codewords(code, method="general")
            times.append(time.perf_counter() - t0)
            sizes.append(len(words))
        rows.append(TimingRow(int(n), tuple(times), tuple(sizes)))
    config = {
        "experiment": "codewords-bench",
        "n_values": [int(n) for n in n_values],
        "codes_per_n": codes_per_n,
        "seed": seed,
    }
    return TimingTable(rows, config, seeds)
