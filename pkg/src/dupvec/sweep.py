"""Duplication-factor sweep: train, evaluate and aggregate over a rho grid.

For every duplication factor rho in the grid, each configured model is
trained ``runs`` times with seeds ``base_seed + run`` and scored on the
evaluation set. Aggregation reports per-cell mean/std (population) of the
mean tau and, per model, the improvement of the best cell over the
unduplicated rho=1 baseline. Reports mirror a ranking table (one row per
model) and per-curve plot data.

Duplicated corpora are never materialized: training streams the base corpus
rho times per epoch, which is equivalent to training on a physical
rho-fold concatenation.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import PipelineConfig, TokenizedCorpus
from .evaluate import EvalSet, evaluate
from .glove import GloveEmbedding
from .sgns import SgnsEmbedding
from .validation import check_corpus, check_positive_int

logger = logging.getLogger(__name__)

MODEL_TAGS = ("W2Vcb", "W2Vsg", "FTcb", "FTsg", "Glove")
_SGNS_TAGS = {
    "W2Vcb": ("word2vec", "cbow"),
    "W2Vsg": ("word2vec", "skipgram"),
    "FTcb": ("fasttext", "cbow"),
    "FTsg": ("fasttext", "skipgram"),
}

SUMMARY_TABLE = "summary_table.txt"
CURVE_DATA = "curve_data.csv"
RUNS_FILE = "runs.csv"
SUMMARY_JSON = "summary.json"


def default_rho_grid() -> list[int]:
    """1 plus the even factors 2..30."""
    return [1] + list(range(2, 31, 2))


@dataclass
class SweepConfig:
    """Grid definition plus per-model training overrides.

    ``training`` maps a model tag (or the key "default", applied to every
    model first) to keyword overrides for that model's constructor. Seeds
    are always assigned by the sweep as ``base_seed + run`` and may not be
    overridden here.
    """

    rho_grid: list[int] = field(default_factory=default_rho_grid)
    models: list[str] = field(default_factory=lambda: list(MODEL_TAGS))
    runs: int = 5
    base_seed: int = 1
    training: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rho_grid or 1 not in self.rho_grid:
            raise ValueError("rho_grid must contain 1 (the baseline)")
        if list(self.rho_grid) != sorted(set(self.rho_grid)):
            raise ValueError("rho_grid must be strictly ascending")
        for rho in self.rho_grid:
            check_positive_int("rho", rho)
        if not self.models:
            raise ValueError("need at least one model")
        for tag in self.models:
            if tag not in MODEL_TAGS:
                raise ValueError("unknown model tag %r; choose from %s"
                                 % (tag, list(MODEL_TAGS)))
        if len(set(self.models)) != len(self.models):
            raise ValueError("duplicate model tag in models")
        check_positive_int("runs", self.runs)
        for key, overrides in self.training.items():
            if key != "default" and key not in MODEL_TAGS:
                raise ValueError("training overrides for unknown model %r" % (key,))
            if "seed" in overrides:
                raise ValueError("seeds are assigned per run; remove 'seed' from "
                                 "training overrides for %r" % (key,))

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        known = {"rho_grid", "models", "runs", "base_seed", "training"}
        unknown = set(payload) - known
        if unknown:
            raise ValueError("%s: unknown sweep config fields %s"
                             % (path, sorted(unknown)))
        return cls(**payload)


@dataclass
class RunRecord:
    """Outcome of one (model, rho, run) training + evaluation."""

    model: str
    rho: int
    run: int
    seed: int
    mean_tau: float
    wall_time_sec: float
    config: dict


@dataclass
class CellStats:
    model: str
    rho: int
    tau_mean: float
    tau_std: float
    n_runs: int
    wall_time_sec: float


@dataclass
class ModelSummary:
    model: str
    tau_at_1x: float
    max_tau: float
    argmax_rho: int
    improvement_pct: float
    time_at_argmax_sec: float


@dataclass
class SweepSummary:
    cells: list[CellStats]
    models: list[ModelSummary]


def make_model(tag: str, seed: int, training: dict | None = None):
    """Instantiate the trainer for a model tag with its configured overrides."""
    training = training or {}
    overrides = dict(training.get("default", {}))
    overrides.update(training.get(tag, {}))
    if tag == "Glove":
        return GloveEmbedding(seed=seed, **overrides)
    if tag not in _SGNS_TAGS:
        raise ValueError("unknown model tag %r" % (tag,))
    algorithm, mode = _SGNS_TAGS[tag]
    return SgnsEmbedding(algorithm=algorithm, mode=mode, seed=seed, **overrides)


def run_sweep(corpus: TokenizedCorpus, evalset: EvalSet, config: SweepConfig,
              pipeline_config: PipelineConfig | None = None) -> list[RunRecord]:
    """Train and evaluate every (rho, model, run) cell of the grid.

    Cells run sequentially in grid order, each with seed ``base_seed + run``.
    A failing run is logged and skipped; only a cell with no surviving runs
    aborts the sweep.
    """
    check_corpus(corpus)
    records: list[RunRecord] = []
    for rho in config.rho_grid:
        for tag in config.models:
            survivors = 0
            last_error = None
            for run in range(config.runs):
                seed = config.base_seed + run
                model = make_model(tag, seed, config.training)
                t0 = time.perf_counter()
                try:
                    model.fit(corpus, repeats=rho)
                    result = evaluate(model, evalset, pipeline_config)
                except Exception as exc:
                    last_error = exc
                    logger.warning("run failed: model=%s rho=%d run=%d seed=%d: %s",
                                   tag, rho, run, seed, exc)
                    continue
                wall = time.perf_counter() - t0
                records.append(RunRecord(model=tag, rho=rho, run=run, seed=seed,
                                         mean_tau=result.mean_tau,
                                         wall_time_sec=wall,
                                         config=model.get_params()))
                survivors += 1
                logger.info("model=%s rho=%d run=%d tau=%.4f (%.1fs)",
                            tag, rho, run, result.mean_tau, wall)
            if survivors == 0:
                raise RuntimeError(
                    "all %d runs failed for model=%s rho=%d; last error: %s"
                    % (config.runs, tag, rho, last_error))
    return records


def summarize(records: list[RunRecord]) -> SweepSummary:
    """Aggregate run records into per-cell and per-model statistics.

    Cell std is the population standard deviation over the cell's runs. The
    per-model improvement is ``100 * (max_tau - tau_at_1x) / tau_at_1x``
    with the argmax tie broken by the smallest rho; a model without rho=1
    runs has no defined improvement and raises.
    """
    if not records:
        raise ValueError("no run records to summarize")
    model_order: list[str] = []
    grouped: dict[tuple[str, int], list[RunRecord]] = {}
    for record in records:
        if record.model not in model_order:
            model_order.append(record.model)
        grouped.setdefault((record.model, record.rho), []).append(record)

    cells = []
    for tag in model_order:
        rhos = sorted(rho for (m, rho) in grouped if m == tag)
        for rho in rhos:
            runs = grouped[(tag, rho)]
            taus = [r.mean_tau for r in runs]
            cells.append(CellStats(
                model=tag, rho=rho,
                tau_mean=float(np.mean(taus)),
                tau_std=float(np.std(taus)),
                n_runs=len(runs),
                wall_time_sec=float(np.mean([r.wall_time_sec for r in runs]))))

    models = []
    for tag in model_order:
        own = [c for c in cells if c.model == tag]
        at_1x = next((c for c in own if c.rho == 1), None)
        if at_1x is None:
            raise ValueError("model %s has no rho=1 runs; improvement undefined" % tag)
        best = min(own, key=lambda c: (-c.tau_mean, c.rho))
        if at_1x.tau_mean != 0.0:
            improvement = 100.0 * (best.tau_mean - at_1x.tau_mean) / at_1x.tau_mean
        elif best.tau_mean == 0.0:
            improvement = 0.0
        else:
            improvement = math.copysign(math.inf, best.tau_mean)
        models.append(ModelSummary(
            model=tag, tau_at_1x=at_1x.tau_mean, max_tau=best.tau_mean,
            argmax_rho=best.rho, improvement_pct=improvement,
            time_at_argmax_sec=best.wall_time_sec))
    return SweepSummary(cells=cells, models=models)


def emit_report(summary: SweepSummary, records: list[RunRecord], out_dir) -> list[Path]:
    """Write the four report files and return their paths.

    ``summary_table.txt`` ranks models by their best mean tau; the two csv
    files carry full-precision values so statistics recomputed from them
    match the emitted summary exactly; ``summary.json`` mirrors the summary
    dataclasses.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    table_path = out / SUMMARY_TABLE
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write("# One row per model, sorted by max τ descending.\n")
        fh.write("# τ values are means over runs; bands in curve_data.csv use the\n")
        fh.write("# population standard deviation. Time is minutes for one run of\n")
        fh.write("# the best (argmax ρ) cell.\n")
        fh.write("Model | τ(1×) | max τ | ρ | Improvement % | Time(min)\n")
        for m in sorted(summary.models, key=lambda m: -m.max_tau):
            fh.write("%s | %.3f | %.3f | %d | %.1f | %.1f\n"
                     % (m.model, m.tau_at_1x, m.max_tau, m.argmax_rho,
                        m.improvement_pct, m.time_at_argmax_sec / 60.0))

    curve_path = out / CURVE_DATA
    with open(curve_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "rho", "tau_mean", "tau_std"])
        for cell in summary.cells:
            writer.writerow([cell.model, cell.rho,
                             repr(cell.tau_mean), repr(cell.tau_std)])

    runs_path = out / RUNS_FILE
    with open(runs_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "rho", "run", "seed",
                         "mean_tau", "wall_time_sec", "config"])
        for r in records:
            writer.writerow([r.model, r.rho, r.run, r.seed, repr(r.mean_tau),
                             repr(r.wall_time_sec),
                             json.dumps(r.config, sort_keys=True)])

    json_path = out / SUMMARY_JSON
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(asdict(summary), fh, indent=2)
        fh.write("\n")

    return [table_path, curve_path, runs_path, json_path]


def load_runs(path) -> list[RunRecord]:
    """Read back a runs.csv written by :func:`emit_report`."""
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"model", "rho", "run", "seed", "mean_tau", "wall_time_sec", "config"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ValueError("%s: expected columns %s, got %r"
                             % (path, sorted(expected), reader.fieldnames))
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(RunRecord(
                    model=row["model"], rho=int(row["rho"]), run=int(row["run"]),
                    seed=int(row["seed"]), mean_tau=float(row["mean_tau"]),
                    wall_time_sec=float(row["wall_time_sec"]),
                    config=json.loads(row["config"])))
            except (TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError("%s:%d: malformed run record: %s"
                                 % (path, lineno, exc)) from None
    if not records:
        raise ValueError("%s: no run records" % (path,))
    return records
