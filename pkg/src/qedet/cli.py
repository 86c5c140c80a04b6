"""Command-line front end.

Subcommands: memory, bell, pseudothreshold, codewords-bench, encode,
validate-code.  Exit codes: 0 success, 2 validation/usage problem, 3
runtime failure (e.g. no codeword survived post-selection).

Noise grammar is ``kind:rate`` with kinds none, depolarizing1q,
depolarizing_global.  A JSON config file (or a previous run's manifest)
supplies defaults; explicit flags win.  Relative output paths resolve
against $QEDET_OUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import codes, encode, experiments
from .circuits import CliffordCircuit
from .errors import InvalidParameterError, QedetError
from .sim import NoiseModel

_NOISE_NAMES = {
    "none": "none",
    "depolarizing1q": "single_qubit_depolarizing",
    "depolarizing_global": "global_depolarizing",
}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def parse_noise(text: str, scope: str = "all") -> NoiseModel:
    kind, _, rate = text.partition(":")
    if kind not in _NOISE_NAMES:
        raise InvalidParameterError(
            f"unknown noise kind {kind!r}; choose from {sorted(_NOISE_NAMES)}"
        )
    if kind == "none" and not rate:
        rate = "0"
    try:
        p = float(rate)
    except ValueError:
        raise InvalidParameterError(f"bad noise rate {rate!r} in {text!r}") from None
    return NoiseModel(_NOISE_NAMES[kind], p, scope=scope)


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x != ""]
    except ValueError:
        raise InvalidParameterError(f"bad integer list {text!r}") from None


def _parse_grid(spec) -> list[float]:
    """Grid spec: 'lo:hi:count' (log-spaced) or comma-separated values."""
    import numpy as np

    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    if ":" in spec:
        lo, hi, count = spec.split(":")
        return [float(x) for x in np.geomspace(float(lo), float(hi), int(count))]
    return [float(x) for x in spec.split(",")]


def _out_path(name: str | None, default: str) -> Path:
    base = Path(os.environ.get("QEDET_OUT_DIR", "."))
    p = Path(name) if name else Path(default)
    return p if p.is_absolute() else base / p


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="qedet",
        description="Stabilizer-code error-detection experiments",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file or prior run manifest")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None, help="worker cap (default 1)")
        p.add_argument("--out", default=None, help="output CSV path")

    p = sub.add_parser("memory", help="repetition-code memory sweep over (n, D)")
    common(p)
    p.add_argument("--code", choices=["repetition"], default=None,
                   help="code family (the memory sweep is repetition-only)")
    p.add_argument("--n", default=None, help="comma list of odd code lengths")
    p.add_argument("--depth", default=None, help="comma list of even D values")
    p.add_argument("--noise", default=None, help="kind:rate")
    p.add_argument("--scope", choices=["all", "logical_only"], default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--physical-shots", type=int, default=None, dest="physical_shots")

    p = sub.add_parser("bell", help="two-block Bell sweep over (distance, D)")
    common(p)
    p.add_argument("--code", choices=["repetition", "color"], default=None)
    p.add_argument("--distance", default=None, help="comma list of distances")
    p.add_argument("--depth", default=None, help="comma list of even D values")
    p.add_argument("--observable", choices=["ZZ", "XX"], default=None)
    p.add_argument("--noise", default=None)
    p.add_argument("--scope", choices=["all", "logical_only"], default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--physical-shots", type=int, default=None, dest="physical_shots")
    p.add_argument("--routed", action="store_true", default=None,
                   help="route over a heavy-hex graph first")

    p = sub.add_parser("pseudothreshold", help="crossover noise rate vs depth")
    common(p)
    p.add_argument("--depth", default=None, help="comma list of D values")
    p.add_argument("--distances", default=None,
                   help="comma list of distances (vs_physical) or a:b pairs (pair)")
    p.add_argument("--p-grid", default=None, dest="p_grid",
                   help="lo:hi:count log grid or comma list")
    p.add_argument("--method", choices=["vs_physical", "pair"], default=None)
    p.add_argument("--code", choices=["repetition", "color"], default=None)
    p.add_argument("--noise-kind", default=None, dest="noise_kind",
                   help="depolarizing1q or depolarizing_global")
    p.add_argument("--shots", type=int, default=None,
                   help="sample curves instead of exact evaluation")

    p = sub.add_parser("codewords-bench", help="codeword-enumeration timing trend")
    common(p)
    p.add_argument("--n", default=None, help="comma list of qubit counts")
    p.add_argument("--codes-per-n", type=int, default=None, dest="codes_per_n")

    p = sub.add_parser("encode", help="synthesize and save an encoding circuit")
    common(p)
    p.add_argument("--code", choices=["repetition", "color"], default=None)
    p.add_argument("--distance", type=int, default=None)

    p = sub.add_parser("validate-code", help="check a stabilizer code's structure")
    common(p)
    p.add_argument("--code", choices=["repetition", "color"], default=None)
    p.add_argument("--distance", type=int, default=None)
    p.add_argument("--file", default=None, help="serialized code file")

    return top


def _merge_config(args: argparse.Namespace) -> dict:
    """Effective settings: flag > config file > built-in default."""
    file_cfg: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        file_cfg = raw.get("config", raw)  # accept a manifest or a bare config
    merged = dict(file_cfg)
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        merged[key] = val
    return merged


def _get(cfg: dict, key: str, default, *aliases: str):
    """Look up a setting, falling back to manifest-style key aliases."""
    val = cfg.get(key)
    for alt in aliases:
        if val is None:
            val = cfg.get(alt)
    if val is None:
        val = default
    if val is None:
        raise InvalidParameterError(f"missing required setting --{key.replace('_', '-')}")
    return val


def _cmd_memory(cfg: dict) -> int:
    noise = parse_noise(str(_get(cfg, "noise", "none")), cfg.get("scope", "all"))
    result = experiments.run_memory_sweep(
        _int_list(_get(cfg, "n", None, "n_values")),
        _int_list(_get(cfg, "depth", None, "depths")),
        noise,
        shots=int(cfg.get("shots", experiments.DEFAULT_ENCODED_SHOTS)),
        seed=int(cfg.get("seed", 0)),
        physical_shots=int(cfg.get("physical_shots", experiments.DEFAULT_PHYSICAL_SHOTS)),
        jobs=int(cfg.get("jobs", 1)),
    )
    out = _out_path(cfg.get("out"), "memory.csv")
    manifest = result.write(out)
    print(f"wrote {out} and {manifest}")
    return EXIT_OK


def _cmd_bell(cfg: dict) -> int:
    noise = parse_noise(str(_get(cfg, "noise", "none")), cfg.get("scope", "all"))
    distances = _int_list(_get(cfg, "distance", None, "distances"))
    shots = int(cfg.get("shots", 0)) or (
        experiments.DEFAULT_D7_SHOTS if max(distances) >= 7
        else experiments.DEFAULT_ENCODED_SHOTS
    )
    result = experiments.run_bell_sweep(
        str(_get(cfg, "code", "color", "family")),
        distances,
        _int_list(_get(cfg, "depth", None, "depths")),
        noise,
        observable=str(cfg.get("observable", "ZZ")),
        shots=shots,
        seed=int(cfg.get("seed", 0)),
        physical_shots=int(cfg.get("physical_shots", experiments.DEFAULT_PHYSICAL_SHOTS)),
        routed=bool(cfg.get("routed", False)),
        jobs=int(cfg.get("jobs", 1)),
    )
    out = _out_path(cfg.get("out"), "bell.csv")
    manifest = result.write(out)
    print(f"wrote {out} and {manifest}")
    return EXIT_OK


def _cmd_pseudothreshold(cfg: dict) -> int:
    method = str(cfg.get("method", "vs_physical"))
    spec = str(_get(cfg, "distances", None))
    if method == "pair":
        distances = [tuple(int(x) for x in item.split(":")) for item in spec.split(",")]
    else:
        distances = _int_list(spec)
    noise_kind = _NOISE_NAMES.get(
        str(cfg.get("noise_kind", "depolarizing1q")), cfg.get("noise_kind")
    )
    if noise_kind not in ("single_qubit_depolarizing", "global_depolarizing"):
        raise InvalidParameterError(f"bad noise kind {cfg.get('noise_kind')!r}")
    depths = _int_list(_get(cfg, "depth", None))
    grid = _parse_grid(_get(cfg, "p_grid", None))
    shots = cfg.get("shots")
    results = [
        experiments.estimate_pseudothreshold(
            D, distances, grid,
            family=str(cfg.get("code", "color")),
            noise_kind=noise_kind,
            method=method,
            shots=int(shots) if shots else None,
            seed=int(cfg.get("seed", 0)),
            jobs=int(cfg.get("jobs", 1)),
        )
        for D in depths
    ]
    out = _out_path(cfg.get("out"), "pseudothreshold.csv")
    lines = ["D,label,p_star"]
    for r in results:
        for label, star in r.per_item:
            lines.append(f"{r.depth_parameter},{label},{star!r}")
        lines.append(f"{r.depth_parameter},combined,{r.p_star!r}")
    out.write_text("\n".join(lines) + "\n")
    manifest = out.with_suffix(out.suffix + ".manifest.json")
    manifest.write_text(json.dumps(
        {
            "format_version": 1,
            "kind": "pseudothreshold",
            "config": {k: v for k, v in sorted(cfg.items()) if k not in ("jobs", "out")},
            "p_star_by_depth": {str(r.depth_parameter): r.p_star for r in results},
            "diagnostics": {str(r.depth_parameter): r.diagnostics for r in results},
        },
        indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} and {manifest}")
    return EXIT_OK


def _cmd_codewords_bench(cfg: dict) -> int:
    table = experiments.codeword_timing_benchmark(
        _int_list(_get(cfg, "n", None, "n_values")),
        codes_per_n=int(cfg.get("codes_per_n", 3)),
        seed=int(cfg.get("seed", 0)),
    )
    out = _out_path(cfg.get("out"), "codewords_bench.csv")
    manifest = table.write(out)
    print(f"wrote {out} and {manifest}")
    print(f"mean wall-time ratio per +2 qubits: {table.mean_ratio_per_two_qubits():.2f}")
    return EXIT_OK


def _make_code(cfg: dict) -> codes.StabilizerCode:
    family = str(_get(cfg, "code", None))
    d = int(_get(cfg, "distance", None))
    if family == "repetition":
        return codes.repetition_code(d)
    return codes.triangular_color_code(d)


def _cmd_encode(cfg: dict) -> int:
    code = _make_code(cfg)
    circuit = encode.synthesize_encoder(code)
    out = _out_path(cfg.get("out"), f"{cfg.get('code')}_{cfg.get('distance')}.enc")
    out.write_text(circuit.to_text())
    reloaded = CliffordCircuit.from_text(out.read_text())
    if not encode.encoder_stabilizes(reloaded, code):
        print("round-trip verification failed", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {out} ({reloaded.depth} moments, verified)")
    return EXIT_OK


def _cmd_validate_code(cfg: dict) -> int:
    if cfg.get("file"):
        code = codes.StabilizerCode.from_text(Path(cfg["file"]).read_text())
    else:
        code = _make_code(cfg)
    report = codes.validate_code(code)
    print(report)
    return EXIT_OK if report.passed else EXIT_VALIDATION


_COMMANDS = {
    "memory": _cmd_memory,
    "bell": _cmd_bell,
    "pseudothreshold": _cmd_pseudothreshold,
    "codewords-bench": _cmd_codewords_bench,
    "encode": _cmd_encode,
    "validate-code": _cmd_validate_code,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.command](cfg)
    except (InvalidParameterError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except QedetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
