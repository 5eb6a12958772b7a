"""Command-line entry point: ``lsxgc simulate | analyze | bench``.

Settings come from built-in defaults, then an optional JSON file
(``--config``), then command-line flags; later sources win. The JSON file may
hold simulation, analysis and CLI keys at the top level or grouped under
``"simulation"``, ``"analysis"`` and ``"cli"``, which is the layout written
into manifests and reports, so a recorded run can be replayed from them.

Exit codes: 0 success, 1 configuration or I/O error, 2 estimator error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .data import AnalysisConfig, load_ensemble_csv, save_matrix
from .errors import InvalidParams, LsxgcError, ParseError
from .evaluation import estimate, parse_methods, run_benchmark
from .simulate import SimulationConfig, load_dataset, simulate_dataset, write_dataset

__all__ = ["main", "build_parser", "cmd_simulate", "cmd_analyze", "cmd_bench"]

EXIT_OK, EXIT_CONFIG, EXIT_ESTIMATOR = 0, 1, 2

SIM_KEYS = {f.name for f in dataclasses.fields(SimulationConfig)}
ANALYSIS_KEYS = {f.name for f in dataclasses.fields(AnalysisConfig)}
CLI_KEYS = {"methods", "jobs", "out", "orientation", "format", "dataset"}
SECTIONS = {"simulation": SIM_KEYS, "analysis": ANALYSIS_KEYS, "cli": CLI_KEYS}

# flag dest -> config key
FLAG_KEYS = {
    "seed": "seed",
    "jobs": "jobs",
    "out": "out",
    "nodes": "n_nodes",
    "realizations": "n_realizations",
    "samples": "t_samples",
    "density": "edge_density",
    "snr_db": "snr_db",
    "tr": "tr_s",
    "methods": "methods",
    "p": "p",
    "m": "m",
    "k": "k",
    "ridge": "ridge",
    "orientation": "orientation",
    "format": "format",
}


class ConfigError(Exception):
    pass


@dataclasses.dataclass
class CliConfig:
    simulation: SimulationConfig
    analysis: AnalysisConfig
    methods: list
    jobs: int = 1
    out: str | None = None
    orientation: str = "rows-are-time"
    format: str = "csv"
    dataset: str | None = None


def _flatten(raw: dict) -> dict:
    if "realizations" in raw and isinstance(raw.get("realizations"), list):
        # a simulation manifest: replay its generator settings
        raw = {"simulation": raw.get("config")}
    elif "wilcoxon_p" in raw and isinstance(raw.get("config"), dict):
        # a benchmark report: replay its recorded settings
        raw = raw["config"]
    flat = {}
    for key, value in raw.items():
        if key in SECTIONS:
            if value is None:
                continue
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            unknown = set(value) - SECTIONS[key]
            if unknown:
                raise ConfigError(f"unknown {key} keys: {sorted(unknown)}")
            flat.update(value)
        elif key in SIM_KEYS | ANALYSIS_KEYS | CLI_KEYS:
            flat[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return flat


def load_config(path: str | None, overrides: dict, default_methods: str) -> CliConfig:
    """Merge defaults, the JSON file at ``path`` and flag ``overrides``."""
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        values = _flatten(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    sim = {k: v for k, v in values.items() if k in SIM_KEYS}
    ana = {k: v for k, v in values.items() if k in ANALYSIS_KEYS}
    try:
        cfg = CliConfig(
            simulation=SimulationConfig(**sim),
            analysis=AnalysisConfig(**ana),
            methods=parse_methods(values.get("methods", default_methods)),
            jobs=int(values.get("jobs", 1)),
            out=values.get("out"),
            orientation=values.get("orientation", "rows-are-time"),
            format=values.get("format", "csv"),
            dataset=values.get("dataset"),
        )
    except (InvalidParams, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    if cfg.orientation not in ("rows-are-time", "rows-are-nodes"):
        raise ConfigError(f"unknown orientation {cfg.orientation!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    return cfg


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _estimator_error(exc: LsxgcError) -> int:
    return _fail(EXIT_ESTIMATOR, f"{type(exc).__name__}: {exc}")


def cmd_simulate(cfg: CliConfig) -> int:
    out = cfg.out or "simulation"
    try:
        data = simulate_dataset(cfg.simulation, cfg.jobs)
    except LsxgcError as exc:
        return _estimator_error(exc)
    try:
        paths = write_dataset(data, out, cfg.simulation)
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write to {out}: {exc}")
    print(f"wrote {len(paths)} files to {out}")
    return EXIT_OK


def cmd_analyze(cfg: CliConfig, path: str) -> int:
    try:
        ensemble = load_ensemble_csv(path, cfg.orientation)
    except (OSError, ParseError) as exc:
        return _fail(EXIT_CONFIG, f"cannot read {path}: {exc}")
    except LsxgcError as exc:
        return _fail(EXIT_CONFIG, f"invalid input {path}: {type(exc).__name__}: {exc}")
    results = []
    for method in cfg.methods:
        try:
            results.append(estimate(method, ensemble, cfg.analysis, cfg.jobs))
        except LsxgcError as exc:
            return _estimator_error(exc)
    out = cfg.out or "."
    try:
        os.makedirs(out, exist_ok=True)
        for matrix in results:
            target = os.path.join(out, f"{matrix.method}.{cfg.format}")
            save_matrix(matrix, target, cfg.format)
            print(f"wrote {target}")
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write to {out}: {exc}")
    return EXIT_OK


def cmd_bench(cfg: CliConfig, dataset_dir: str | None = None) -> int:
    snapshot = {"cli": {"methods": cfg.methods, "jobs": cfg.jobs}}
    snapshot["dataset"] = None
    if dataset_dir:
        if not os.path.isdir(dataset_dir):
            return _fail(EXIT_CONFIG, f"dataset directory {dataset_dir} does not exist")
        manifest = os.path.join(dataset_dir, "manifest.json")
        try:
            data = load_dataset(dataset_dir)
            snapshot["simulation"] = None
            if os.path.exists(manifest):
                with open(manifest, encoding="utf-8") as fh:
                    snapshot["simulation"] = json.load(fh).get("config")
        except (OSError, ParseError, json.JSONDecodeError, KeyError) as exc:
            return _fail(EXIT_CONFIG, f"cannot read dataset {dataset_dir}: {exc}")
        except LsxgcError as exc:
            return _fail(EXIT_CONFIG, f"invalid dataset {dataset_dir}: {type(exc).__name__}: {exc}")
        snapshot["dataset"] = os.path.abspath(dataset_dir)
        if not data:
            return _fail(EXIT_CONFIG, f"no realizations found in {dataset_dir}")
    else:
        try:
            data = simulate_dataset(cfg.simulation, cfg.jobs)
        except LsxgcError as exc:
            return _estimator_error(exc)
        snapshot["simulation"] = cfg.simulation.to_dict()
    report = run_benchmark(data, cfg.methods, cfg.analysis, cfg.jobs, snapshot)
    for line in report.summary_lines():
        print(line)
    failed = [r for r in report.results if r.error]
    for r in failed:
        print(f"{r.method} failed: {r.error}", file=sys.stderr)
    out = cfg.out or "."
    try:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        with open(os.path.join(out, "table.txt"), "w", encoding="utf-8") as fh:
            fh.write(report.table())
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write to {out}: {exc}")
    return EXIT_ESTIMATOR if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker threads (results do not depend on it)")
    common.add_argument("--out", help="output directory")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--nodes", type=int)
    sim.add_argument("--realizations", type=int)
    sim.add_argument("--samples", type=int, help="output length per realization")
    sim.add_argument("--density", type=float, help="edge probability")
    sim.add_argument("--snr-db", type=float)
    sim.add_argument("--tr", type=float, help="output sampling interval in seconds")

    ana = argparse.ArgumentParser(add_help=False)
    ana.add_argument("--p", type=int, help="principal components")
    ana.add_argument("--m", type=int, help="lag order")
    ana.add_argument("--k", type=int, help="nearest neighbours for TE/MI")
    ana.add_argument("--ridge", type=float)

    parser = argparse.ArgumentParser(prog="lsxgc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[common, sim], help="write a synthetic dataset")
    p_sim.set_defaults(default_methods="all")

    p_an = sub.add_parser("analyze", parents=[common, ana], help="score one ensemble CSV")
    p_an.add_argument("input", help="ensemble CSV")
    p_an.add_argument("--method", "--methods", dest="methods",
                      help="lsxgc, gc, te, mi, all or a comma list (default lsxgc)")
    p_an.add_argument("--orientation", choices=["rows-are-time", "rows-are-nodes"])
    p_an.add_argument("--format", choices=["csv", "json"])
    p_an.set_defaults(default_methods="lsxgc")

    p_b = sub.add_parser("bench", parents=[common, sim, ana],
                         help="AUROC and timing of each method over a dataset")
    p_b.add_argument("dataset", nargs="?",
                     help="directory written by 'simulate'; generated in memory if omitted")
    p_b.add_argument("--methods", "--method", dest="methods",
                     help="comma list or 'all' (default all)")
    p_b.set_defaults(default_methods="all")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {key: getattr(args, dest) for dest, key in FLAG_KEYS.items() if hasattr(args, dest)}
    try:
        cfg = load_config(args.config, overrides, args.default_methods)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    if args.command == "simulate":
        return cmd_simulate(cfg)
    if args.command == "analyze":
        return cmd_analyze(cfg, args.input)
    return cmd_bench(cfg, args.dataset or cfg.dataset)


if __name__ == "__main__":
    sys.exit(main())
