"""Command-line experiment runner.

Usage::

    shrinkinit run --config configs/protocol_hidden10.json [--out DIR] [--jobs N]
    shrinkinit probe --widths 32,64,128,256 --out timing.csv

``run`` trains one network per (scheme, seed) cell and writes, under the
output directory::

    <scheme>_<seed>_metrics.csv       epoch,objective,train_acc,test_acc
    <scheme>_<seed>_weights_init.csv  layer,row,col,value
    summary.csv                       final metrics per cell

Exit codes: 0 success, 1 at least one cell failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .data import Dataset, load_csv, split, standardize, synth_blobs
from .exceptions import NumericError, ParameterError, ShrinkInitError
from .initializers import InitSpec, Scheme, init_sinl, initialize
from .network import Activation, NetworkParams
from .numerics import gaussian_matrix
from .training import MetricsRecord, TrainConfig, train

logger = logging.getLogger("shrinkinit")

EXIT_OK, EXIT_CELL_FAILED, EXIT_CONFIG = 0, 1, 2
METRICS_HEADER = ["epoch", "objective", "train_acc", "test_acc"]
WEIGHTS_HEADER = ["layer", "row", "col", "value"]
SUMMARY_HEADER = ["scheme", "seed", "status", "epoch", "objective", "train_acc", "test_acc", "message"]


class ConfigError(ParameterError):
    pass


@dataclass
class ExperimentConfig:
    dataset: dict
    hidden: list = field(default_factory=lambda: [10, 10])
    activation: str = "sigmoid"
    schemes: list = field(default_factory=lambda: [s.value for s in Scheme])
    seeds: list = field(default_factory=lambda: [0])
    epochs: int = 10_000
    learning_rate: float = 0.5
    dropout_rate: float = 0.0
    record_every: int = 10
    gain: float = 1.0
    variance_tol: float = 0.02
    max_var_iters: int = 10
    attach_bn: bool = False
    standardize: bool = True
    train_fraction: float = 0.75
    split_seed: int = 0
    output_dir: str = "runs"
    base_dir: str = "."

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "dataset" not in raw:
            raise ConfigError("config needs a 'dataset' entry")
        cfg = cls(**raw, base_dir=str(base_dir))
        cfg.validate()
        return cfg

    def validate(self):
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        for s in self.seeds:
            if not isinstance(s, int) or isinstance(s, bool):
                raise ConfigError(f"seeds must be integers, got {s!r}")
        if not all(isinstance(w, int) and w > 0 for w in self.hidden):
            raise ConfigError(f"hidden widths must be positive integers, got {self.hidden}")
        try:
            activation = Activation.parse(self.activation)
            self.schemes = [Scheme.parse(s).value for s in self.schemes]
            self.init_spec(0)
            self.train_config(0)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
        if activation is Activation.IDENTITY:
            raise ConfigError("activation must be one of sigmoid, tanh, relu")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        kind = self.dataset.get("kind") if isinstance(self.dataset, dict) else None
        if kind not in ("blobs", "csv"):
            raise ConfigError("dataset.kind must be 'blobs' or 'csv'")

    def init_spec(self, seed: int, scheme=Scheme.SINL) -> InitSpec:
        return InitSpec(scheme, self.gain, self.variance_tol, self.max_var_iters, self.attach_bn, seed)

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(self.epochs, self.learning_rate, self.dropout_rate, self.record_every, seed)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    try:
        return ExperimentConfig.from_dict(raw, base_dir=path.parent)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def build_datasets(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    spec = dict(cfg.dataset)
    kind = spec.pop("kind")
    try:
        if kind == "blobs":
            ds = synth_blobs(
                spec.pop("classes", 3),
                spec.pop("per_class", 50),
                spec.pop("dim", 4),
                spec.pop("separation", 3.0),
                spec.pop("seed", 0),
            )
        else:
            path = Path(spec.pop("path"))
            if not path.is_absolute():
                path = Path(cfg.base_dir) / path
            ds = load_csv(path, spec.pop("label_column", "last"))
    except KeyError as exc:
        raise ConfigError(f"dataset is missing {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read dataset: {exc}") from None
    if spec:
        raise ConfigError(f"unknown dataset keys: {', '.join(sorted(spec))}")
    if cfg.standardize:
        ds = standardize(ds)
    return split(ds, cfg.train_fraction, cfg.split_seed)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_metrics(path, history: list[MetricsRecord]):
    _write_csv(
        path,
        METRICS_HEADER,
        ([r.epoch, _fmt(r.objective), _fmt(r.train_accuracy), _fmt(r.test_accuracy)] for r in history),
    )


def write_weights(path, params: NetworkParams):
    def rows():
        for k, w in enumerate(params.weights):
            for (i, j), value in np.ndenumerate(w):
                yield k, i, j, _fmt(value)

    _write_csv(path, WEIGHTS_HEADER, rows())


def run_cell(cfg: ExperimentConfig, train_set: Dataset, test_set: Dataset, scheme: str, seed: int, out: Path) -> dict:
    """Initialize, train and dump one (scheme, seed) cell; failures go into the returned row."""
    row = {"scheme": scheme, "seed": seed, "status": "ok", "epoch": "", "objective": "",
           "train_acc": "", "test_acc": "", "message": ""}
    dims = [train_set.n_features, *cfg.hidden, train_set.class_count]
    spec = cfg.init_spec(seed, scheme)
    try:
        params = initialize(dims, train_set.features, spec, cfg.activation)
        write_weights(out / f"{scheme}_{seed}_weights_init.csv", params)
        _, history = train(params, train_set, test_set, cfg.train_config(seed))
    except NumericError as exc:
        row.update(status="diverged" if exc.iteration is not None else "failed", message=str(exc))
        if exc.iteration is not None:
            row["epoch"] = exc.iteration
        return row
    except ShrinkInitError as exc:
        row.update(status="failed", message=str(exc))
        return row
    write_metrics(out / f"{scheme}_{seed}_metrics.csv", history)
    last = history[-1]
    row.update(epoch=last.epoch, objective=_fmt(last.objective),
               train_acc=_fmt(last.train_accuracy), test_acc=_fmt(last.test_accuracy))
    return row


def run(config_path, out: Optional[str] = None, jobs: int = 1) -> int:
    try:
        cfg = load_config(config_path)
        train_set, test_set = build_datasets(cfg)
    except ShrinkInitError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(out) if out is not None else Path(cfg.base_dir) / cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    cells = [(scheme, seed) for scheme in cfg.schemes for seed in cfg.seeds]
    logger.info("running %d cells into %s", len(cells), out_dir)
    if jobs == 1:
        rows = [run_cell(cfg, train_set, test_set, s, seed, out_dir) for s, seed in cells]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_cell, cfg, train_set, test_set, s, seed, out_dir) for s, seed in cells]
            rows = [f.result() for f in futures]
    _write_csv(out_dir / "summary.csv", SUMMARY_HEADER, ([r[k] for k in SUMMARY_HEADER] for r in rows))

    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"cell {r['scheme']}/{r['seed']} {r['status']}: {r['message']}", file=sys.stderr)
    return EXIT_CELL_FAILED if failed else EXIT_OK


def timing_probe(widths, n_samples=None, repeats: int = 3, seed: int = 0) -> list[tuple[int, float]]:
    """Wall time of :func:`init_sinl` on a depth-3 net of constant width.

    Each width ``w`` uses ``w x (n_samples or 2w)`` Gaussian input; the
    reported time is the best of ``repeats`` runs.
    """
    widths = [int(w) for w in widths]
    if not widths:
        raise ParameterError("widths sweep must be non-empty")
    if min(widths) < 1:
        raise ParameterError(f"widths must be positive, got {widths}")
    rows = []
    for w in widths:
        x0 = gaussian_matrix(w, n_samples or 2 * w, 1.0, seed)
        spec = InitSpec(Scheme.SINL, seed=seed)
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            init_sinl([w] * 4, x0, spec)
            best = min(best, time.perf_counter() - start)
        rows.append((w, best))
        logger.info("width %d: %.4fs", w, best)
    return rows


def _parse_widths(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad width list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shrinkinit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every (scheme, seed) cell of an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    p_run.add_argument("--jobs", type=int, default=1)

    p_probe = sub.add_parser("probe", help="time shrinkage initialization across widths")
    p_probe.add_argument("--widths", type=_parse_widths, required=True)
    p_probe.add_argument("--out", required=True)
    p_probe.add_argument("--samples", type=int, default=None)
    p_probe.add_argument("--repeats", type=int, default=3)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return run(args.config, args.out, args.jobs)
    try:
        rows = timing_probe(args.widths, args.samples, args.repeats)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write_csv(Path(args.out), ["width", "seconds"], ([w, _fmt(t)] for w, t in rows))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
