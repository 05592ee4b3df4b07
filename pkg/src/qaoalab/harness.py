"""Experiment harness: JSON configs, deterministic artifacts, and the CLI.

A run optimizes the layer angles under the configured evaluation mode,
executes the final circuit once at the winning angles, and writes three
artifacts to the output directory: counts.json, trace.csv (the winning
restart's evaluation log), and summary.json. Every random draw in the
pipeline is keyed off the master seed, so (config, seed) reproduces the
files byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng
from .ansatz import QaoaParams, build_qaoa_circuit, run_circuit
from .graph import (
    MaxCutInstance,
    ParseError,
    brute_force_maxcut,
    canonical_instance,
    cut_value,
    parse_edge_list,
    serialize_edge_list,
)
from .noise import NoiseConfig
from .objective import OptimizationTrace, energy_from_counts, evaluate_qaoa, make_objective
from .optim import METHODS, MinimizeProblem, MinimizeResult, minimize, random_qaoa_starts
from .plots import plot_histogram, plot_trace
from .statevec import Counts

SCHEMA_VERSION = 1

NOISE_PRESETS: dict[str, NoiseConfig] = {
    "none": NoiseConfig(),
    "ibm-bounds": NoiseConfig(p1q=0.005, p2q=0.025, p_readout=0.05),
    "coherent-only": NoiseConfig(epsilon_coherent=0.05),
    "dephase-only": NoiseConfig(sigma_dephase=0.1),
}

# Published depth-5 starting point, first half betas, second half gammas.
PAPER_P5_THETA = (
    2.083, 2.048, 1.792, 1.564, 1.387,
    2.281, 5.962, 1.789, 3.563, 5.646,
)

RUN_MODES = ("exact", "sampled", "noisy")

_CONFIG_FIELDS = {
    "version", "instance", "p", "method", "init", "restarts",
    "shots", "mode", "noise", "seed", "max_evals", "out_dir", "sweep",
}
_INSTANCE_FIELDS = {"file", "inline"}
_INLINE_FIELDS = {"n", "edges", "weights"}
_NOISE_FIELDS = {
    "p1q", "p2q", "p_readout", "epsilon_coherent", "sigma_dephase",
    "twirling", "dd", "dd_sequence",
}
_SWEEP_FIELDS = {"p", "method", "noise", "shots"}


class ConfigError(ValueError):
    """Invalid experiment config; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    instance: MaxCutInstance
    p: int
    method: str
    init: str | tuple[float, ...]
    restarts: int
    shots: int
    mode: str
    noise: NoiseConfig
    seed: int
    max_evals: int | None
    out_dir: str | None
    sweep: dict | None
    config_hash: str


@dataclass
class RunArtifacts:
    counts_path: Path
    trace_path: Path
    summary_path: Path
    summary: dict
    result: MinimizeResult | None


def _reject_unknown(section: str, given, allowed: set[str]) -> None:
    if not isinstance(given, dict):
        raise ConfigError(f"{section} must be a JSON object, got {type(given).__name__}")
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise ConfigError(f"unknown field {unknown[0]!r} in {section}")


def _resolve_instance(spec) -> MaxCutInstance:
    if spec == "canonical":
        return canonical_instance()
    if isinstance(spec, str):
        raise ConfigError(f"instance: unknown named instance {spec!r} (only 'canonical')")
    _reject_unknown("instance", spec, _INSTANCE_FIELDS)
    if ("file" in spec) == ("inline" in spec):
        raise ConfigError("instance: give exactly one of 'file' or 'inline'")
    if "file" in spec:
        path = Path(spec["file"])
        if not path.exists():
            raise ConfigError(f"instance.file: no such file: {path}")
        try:
            return parse_edge_list(path.read_text(encoding="utf-8"))
        except ParseError as exc:
            raise ConfigError(f"instance.file: {path}: {exc}") from None
    inline = spec["inline"]
    _reject_unknown("instance.inline", inline, _INLINE_FIELDS)
    try:
        return MaxCutInstance(
            n=inline.get("n"),
            edges=tuple(tuple(e) for e in inline.get("edges", ())),
            weights=tuple(inline.get("weights", ())),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"instance.inline: {exc}") from None


def _resolve_noise(spec) -> NoiseConfig:
    if isinstance(spec, str):
        if spec not in NOISE_PRESETS:
            raise ConfigError(
                f"noise: unknown preset {spec!r}; presets are {sorted(NOISE_PRESETS)}"
            )
        return NOISE_PRESETS[spec]
    _reject_unknown("noise", spec, _NOISE_FIELDS)
    try:
        return NoiseConfig(**spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"noise: {exc}") from None


def parse_config(raw: dict, *, seed_override: int | None = None,
                 out_override: str | None = None) -> ExperimentConfig:
    """Validate a raw config dict; unknown fields anywhere are errors."""
    _reject_unknown("config", raw, _CONFIG_FIELDS)
    version = raw.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"version: unsupported schema version {version!r}")
    instance = _resolve_instance(raw.get("instance", "canonical"))
    p = raw.get("p", 1)
    if not isinstance(p, int) or p < 0:
        raise ConfigError(f"p: must be a non-negative integer, got {p!r}")
    method = raw.get("method", "cobyla")
    if method not in METHODS:
        raise ConfigError(f"method: must be one of {METHODS}, got {method!r}")
    init = raw.get("init", "random")
    if isinstance(init, list):
        try:
            init = tuple(float(v) for v in init)
        except (TypeError, ValueError):
            raise ConfigError(f"init: explicit vector must be numeric, got {init!r}") from None
        if len(init) != 2 * p:
            raise ConfigError(f"init: explicit vector has length {len(init)}, need 2*p = {2 * p}")
    elif init == "paper-p5":
        if p != 5:
            raise ConfigError(f"init: preset 'paper-p5' requires p = 5, got p = {p}")
    elif init != "random":
        raise ConfigError(f"init: must be 'random', 'paper-p5', or a vector, got {init!r}")
    restarts = raw.get("restarts", 1)
    if not isinstance(restarts, int) or restarts < 1:
        raise ConfigError(f"restarts: must be a positive integer, got {restarts!r}")
    shots = raw.get("shots", 1000)
    if not isinstance(shots, int) or shots < 1:
        raise ConfigError(f"shots: must be a positive integer, got {shots!r}")
    mode = raw.get("mode", "exact")
    if mode not in RUN_MODES:
        raise ConfigError(f"mode: must be one of {RUN_MODES}, got {mode!r}")
    noise = _resolve_noise(raw.get("noise", "none"))
    seed = seed_override if seed_override is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed: must be an integer, got {seed!r}")
    max_evals = raw.get("max_evals")
    if max_evals is not None and (not isinstance(max_evals, int) or max_evals < 1):
        raise ConfigError(f"max_evals: must be a positive integer, got {max_evals!r}")
    out_dir = out_override if out_override is not None else raw.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError(f"out_dir: must be a string path, got {out_dir!r}")
    sweep = raw.get("sweep")
    if sweep is not None:
        _reject_unknown("sweep", sweep, _SWEEP_FIELDS)
        for key, values in sweep.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep.{key}: must be a non-empty list")
    # hash the normalized config (overrides applied) for artifact provenance
    normalized = {
        "version": SCHEMA_VERSION,
        "instance": serialize_edge_list(instance),
        "p": p,
        "method": method,
        "init": list(init) if isinstance(init, tuple) else init,
        "restarts": restarts,
        "shots": shots,
        "mode": mode,
        "noise": {
            "p1q": noise.p1q, "p2q": noise.p2q, "p_readout": noise.p_readout,
            "epsilon_coherent": noise.epsilon_coherent,
            "sigma_dephase": noise.sigma_dephase,
            "twirling": noise.twirling, "dd": noise.dd,
            "dd_sequence": noise.dd_sequence,
        },
        "seed": seed,
        "max_evals": max_evals,
        "sweep": sweep,
    }
    digest = hashlib.sha256(
        json.dumps(normalized, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return ExperimentConfig(
        instance=instance, p=p, method=method, init=init, restarts=restarts,
        shots=shots, mode=mode, noise=noise, seed=seed, max_evals=max_evals,
        out_dir=out_dir, sweep=sweep, config_hash=digest,
    )


def load_config(path, **overrides) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(raw, **overrides)


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------


def write_counts_json(path: Path, counts: Counts, config: ExperimentConfig) -> None:
    payload = {
        "shots": counts.shots,
        "counts": dict(sorted(counts.counts.items())),
        "config_hash": config.config_hash,
        "seed": config.seed,
        "instance": serialize_edge_list(config.instance),
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_trace_csv(path: Path, trace: OptimizationTrace, p: int) -> None:
    """Header: eval,energy,beta_1..beta_p,gamma_1..gamma_p; 9 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["eval", "energy"]
    header += [f"beta_{i + 1}" for i in range(p)]
    header += [f"gamma_{i + 1}" for i in range(p)]
    writer.writerow(header)
    for record in trace.records:
        row = [str(record.index), f"{record.energy:.9g}"]
        row += [f"{v:.9g}" for v in record.theta]
        writer.writerow(row)
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_trace_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [dict(row) for row in csv.DictReader(fh)]


# ---------------------------------------------------------------------------
# experiment pipeline
# ---------------------------------------------------------------------------


def _final_counts(config: ExperimentConfig, theta: np.ndarray) -> Counts:
    params = QaoaParams.from_vector(theta)
    circuit = build_qaoa_circuit(config.instance, params)
    final_seed = rng.child_seed(config.seed, rng.STREAM_FINAL)
    if config.mode == "noisy":
        return run_circuit(circuit, "noisy", shots=config.shots,
                           seed=final_seed, noise=config.noise)
    return run_circuit(circuit, "sampled", shots=config.shots, seed=final_seed)


def run_experiment(config: ExperimentConfig, out_dir=None) -> RunArtifacts:
    """Optimize, run the final circuit, and write the three artifacts."""
    t0 = time.perf_counter()
    out = Path(out_dir) if out_dir is not None else Path(config.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)

    result: MinimizeResult | None = None
    if config.p == 0:
        theta = np.zeros(0)
        trace = OptimizationTrace(method=config.method)
        energy = evaluate_qaoa(config.instance, QaoaParams((), ())).energy
        trace.append(theta, energy)
        trace.status = "converged"
        best_f = energy
        evals_used = 1
        total_evals = 1
    else:
        if isinstance(config.init, tuple):
            starts = [np.array(config.init)] * config.restarts
        elif config.init == "paper-p5":
            starts = [np.array(PAPER_P5_THETA)] * config.restarts
        else:
            starts = random_qaoa_starts(config.p, config.restarts, config.seed)
        results = []
        for r, x0 in enumerate(starts):
            objective = make_objective(
                config.instance, config.p, config.mode,
                shots=config.shots,
                seed=rng.child_seed(config.seed, rng.STREAM_EVAL, r),
                noise=config.noise if config.mode == "noisy" else None,
            )
            problem = MinimizeProblem(objective, x0, max_evals=config.max_evals)
            results.append(minimize(config.method, problem))
        result = min(results, key=lambda res: res.f_best)
        theta = result.x_best
        trace = result.trace
        best_f = result.f_best
        evals_used = result.evals_used
        total_evals = sum(res.evals_used for res in results)

    counts = _final_counts(config, theta)
    final_energy = energy_from_counts(counts, config.instance)
    max_cut, optima = brute_force_maxcut(config.instance)
    best_cut = max(cut_value(config.instance, bits) for bits in counts.counts)
    best_bitstrings = sorted(
        bits for bits in counts.counts
        if cut_value(config.instance, bits) == best_cut
    )
    probs = counts.probabilities()
    summary = {
        "config_hash": config.config_hash,
        "seed": config.seed,
        "p": config.p,
        "method": config.method,
        "mode": config.mode,
        "status": trace.status,
        "best_energy": best_f,
        "final_energy": final_energy,
        "best_bitstrings": best_bitstrings,
        "max_cut": max_cut,
        "approx_ratio": best_cut / max_cut if max_cut > 0 else 1.0,
        "ground_pair_prob": float(sum(probs.get(b, 0.0) for b in sorted(optima))),
        "theta": [float(v) for v in theta],
        "evals_used": evals_used,
        "total_evals": total_evals,
        "shots": config.shots,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    counts_path = out / "counts.json"
    trace_path = out / "trace.csv"
    summary_path = out / "summary.json"
    write_counts_json(counts_path, counts, config)
    write_trace_csv(trace_path, trace, config.p)
    summary_json = dict(summary)
    summary_json.pop("wall_time_s")  # keep summary.json byte-stable
    summary_path.write_text(
        json.dumps(summary_json, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return RunArtifacts(counts_path, trace_path, summary_path, summary, result)


SWEEP_LIMIT = 1000


def run_sweep(config: ExperimentConfig, out_dir=None) -> list[dict]:
    """Cross-product sweep; every cell gets its own derived seed and subdir."""
    out = Path(out_dir) if out_dir is not None else Path(config.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    axes = config.sweep or {}
    levels = [(key, axes[key]) for key in ("p", "method", "noise", "shots") if key in axes]
    cells: list[dict] = [{}]
    for key, values in levels:
        cells = [dict(cell, **{key: v}) for cell in cells for v in values]
    if len(cells) > SWEEP_LIMIT:
        raise ConfigError(f"sweep: {len(cells)} cells exceeds the limit of {SWEEP_LIMIT}")
    rows = []
    for idx, cell in enumerate(cells):
        # an empty sweep is the base experiment itself, same seed included
        if levels:
            cell_seed = rng.child_seed(config.seed, rng.STREAM_CELL, idx)
        else:
            cell_seed = config.seed
        raw = {
            "instance": {"inline": {
                "n": config.instance.n,
                "edges": [list(e) for e in config.instance.edges],
                "weights": list(config.instance.weights),
            }},
            "p": cell.get("p", config.p),
            "method": cell.get("method", config.method),
            "init": list(config.init) if isinstance(config.init, tuple) else config.init,
            "restarts": config.restarts,
            "shots": cell.get("shots", config.shots),
            "mode": config.mode,
            "noise": cell.get("noise", "none"),
            "seed": cell_seed,
            "max_evals": config.max_evals,
        }
        if "noise" not in cell:
            raw["noise"] = {
                "p1q": config.noise.p1q, "p2q": config.noise.p2q,
                "p_readout": config.noise.p_readout,
                "epsilon_coherent": config.noise.epsilon_coherent,
                "sigma_dephase": config.noise.sigma_dephase,
                "twirling": config.noise.twirling, "dd": config.noise.dd,
                "dd_sequence": config.noise.dd_sequence,
            }
        cell_config = parse_config(raw)
        name_bits = [f"{k}{cell[k]}" for k, _ in levels] or ["single"]
        cell_dir = out / ("cell_%03d_%s" % (idx, "_".join(name_bits)))
        artifacts = run_experiment(cell_config, cell_dir)
        row = {
            "cell": idx,
            "p": cell_config.p,
            "method": cell_config.method,
            "noise": cell.get("noise", "custom"),
            "shots": cell_config.shots,
            "seed": cell_seed,
            "f_best": artifacts.summary["best_energy"],
            "approx_ratio": artifacts.summary["approx_ratio"],
            "ground_pair_prob": artifacts.summary["ground_pair_prob"],
            "evals_used": artifacts.summary["evals_used"],
            "status": artifacts.summary["status"],
        }
        rows.append(row)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0].keys()) if rows else
                    ["cell", "p", "method", "noise", "shots", "seed",
                     "f_best", "approx_ratio", "ground_pair_prob", "evals_used", "status"])
    for row in rows:
        writer.writerow([
            f"{v:.9g}" if isinstance(v, float) else str(v) for v in row.values()
        ])
    (out / "sweep.csv").write_text(buf.getvalue(), encoding="utf-8")
    return rows


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the published contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qaoalab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one experiment from a config")
    solve.add_argument("--config", required=True)
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--out", default=None)

    sweep = sub.add_parser("sweep", help="run the config's sweep axes")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--out", default=None)

    brute = sub.add_parser("brute-force", help="exhaustive MaxCut oracle")
    brute.add_argument("--graph", required=True,
                       help="'canonical' or a path to an edge-list file")

    plot = sub.add_parser("plot", help="render an artifact file to SVG")
    plot.add_argument("--in", dest="infile", required=True,
                      help="counts .json or trace .csv")
    plot.add_argument("--out", required=True)
    plot.add_argument("--series", choices=("energy", "params"), default="energy")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if args.command == "solve":
            config = load_config(args.config, seed_override=args.seed,
                                 out_override=args.out)
            artifacts = run_experiment(config)
            s = artifacts.summary
            print(f"best_energy {s['best_energy']:.6g}  "
                  f"approx_ratio {s['approx_ratio']:.4g}  "
                  f"evals {s['evals_used']}  status {s['status']}")
            print(f"wrote {artifacts.counts_path} {artifacts.trace_path} "
                  f"{artifacts.summary_path}")
            return 0
        if args.command == "sweep":
            config = load_config(args.config, seed_override=args.seed,
                                 out_override=args.out)
            rows = run_sweep(config)
            for row in rows:
                print(f"cell {row['cell']:3d}  p={row['p']}  {row['method']:7s} "
                      f"noise={row['noise']:13s} f_best={row['f_best']:.6g} "
                      f"ground_pair={row['ground_pair_prob']:.4g}")
            return 0
        if args.command == "brute-force":
            if args.graph == "canonical":
                instance = canonical_instance()
            else:
                path = Path(args.graph)
                if not path.exists():
                    print(f"error: no such graph file: {path}", file=sys.stderr)
                    return 1
                instance = parse_edge_list(path.read_text(encoding="utf-8"))
            best, optima = brute_force_maxcut(instance)
            print(f"{best:g} " + " ".join(sorted(optima)))
            return 0
        if args.command == "plot":
            infile = Path(args.infile)
            if not infile.exists():
                print(f"error: no such input file: {infile}", file=sys.stderr)
                return 1
            if infile.suffix == ".csv":
                svg = plot_trace(infile, series=args.series)
            else:
                svg = plot_histogram(infile)
            Path(args.out).write_text(svg, encoding="utf-8")
            print(f"wrote {args.out}")
            return 0
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ConfigError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
