"""Command-line entry point composing the pipeline modules end to end.

Subcommands: ingest, duplicate, stats, train, eval, sweep, report. Exit
codes: 0 success, 1 usage error (bad flags or values), 2 runtime failure
(unreadable files, training divergence, ...). Every default mirrors the
module-level default; ``--workers`` falls back to the ``DUPVEC_WORKERS``
environment variable, then to 1 (the deterministic contract).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .corpus import (
    PipelineConfig,
    corpus_stats,
    duplicate,
    ingest,
    load_corpus,
    preprocess,
    save_corpus,
)
from .evaluate import evaluate, load_evalset
from .sweep import SweepConfig, emit_report, load_runs, run_sweep, summarize
from .vectors import load_vec, save_model

logger = logging.getLogger(__name__)

WORKERS_ENV_VAR = "DUPVEC_WORKERS"

_ALGO_NAMES = {"w2v": "word2vec", "ft": "fasttext", "glove": "glove"}
_MODE_NAMES = {"cbow": "cbow", "sg": "skipgram"}
_SGNS_ONLY_FLAGS = ("negatives", "subsample", "ngram_min", "ngram_max", "buckets")
_GLOVE_ONLY_FLAGS = ("x_max", "alpha")


class _Parser(argparse.ArgumentParser):
    """argparse with the documented exit-code contract: usage errors print
    the message plus the subcommand's help and exit 1 (not argparse's 2)."""

    def error(self, message):
        sys.stderr.write("%s: error: %s\n\n" % (self.prog, message))
        self.print_help(sys.stderr)
        raise SystemExit(1)


class _UsageError(Exception):
    """Flag misuse argparse cannot see on its own (invalid combinations)."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got %r" % text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer, got %d" % value)
    return value


def _resolve_workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        return args.workers
    raw = os.environ.get(WORKERS_ENV_VAR)
    if raw is None:
        return 1
    try:
        return _positive_int(raw)
    except argparse.ArgumentTypeError as exc:
        raise _UsageError("%s=%r: %s" % (WORKERS_ENV_VAR, raw, exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dupvec",
                     description="Corpus duplication pipeline: preprocess a corpus, "
                                 "train static embeddings, evaluate sentence-similarity "
                                 "rankings and sweep duplication factors.")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    p = sub.add_parser("ingest", help="read raw text, preprocess, write a corpus file")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH",
                   help="input files (one document each, or json-lines records)")
    p.add_argument("--out", required=True, help="corpus file to write")
    p.add_argument("--config", default=None,
                   help="pipeline config json (default: built-in defaults)")
    p.add_argument("--format", choices=("plain", "json-lines"), default="plain",
                   help="input layout (default: %(default)s)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("duplicate", help="materialize a rho-fold corpus duplicate")
    p.add_argument("--in", dest="input", required=True, help="corpus file to read")
    p.add_argument("--rho", type=_positive_int, required=True,
                   help="duplication factor, a positive integer")
    p.add_argument("--out", required=True, help="corpus file to write")
    p.add_argument("--shuffle", action="store_true",
                   help="shuffle document order after duplication (default: off)")
    p.add_argument("--seed", type=int, default=None,
                   help="shuffle seed (default: unseeded)")
    p.set_defaults(func=_cmd_duplicate)

    p = sub.add_parser("stats", help="print corpus counts")
    p.add_argument("--in", dest="input", required=True, help="corpus file to read")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train one embedding model on a corpus")
    p.add_argument("--algo", choices=sorted(_ALGO_NAMES), required=True,
                   help="w2v/ft train with negative sampling, glove factorizes "
                        "co-occurrence counts")
    p.add_argument("--mode", choices=("cbow", "sg"), default=None,
                   help="w2v/ft training mode (default: sg; not valid with glove)")
    p.add_argument("--in", dest="input", required=True, help="corpus file to read")
    p.add_argument("--out", required=True,
                   help="vector file to write (metadata sidecar at OUT.meta)")
    p.add_argument("--seed", type=int, default=1, help="rng seed (default: %(default)s)")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads; >1 drops bit-reproducibility "
                        "(default: $%s or 1)" % WORKERS_ENV_VAR)
    p.add_argument("--dim", type=_positive_int, default=None,
                   help="embedding dimension (default: 100)")
    p.add_argument("--window", type=_positive_int, default=None,
                   help="context window size (default: 5)")
    p.add_argument("--epochs", type=_positive_int, default=None,
                   help="training epochs (default: 5; 25 for glove)")
    p.add_argument("--min-count", type=_positive_int, default=None,
                   help="discard words rarer than this (default: 5)")
    p.add_argument("--lr", type=float, default=None,
                   help="initial learning rate (default: 0.025; 0.05 for glove)")
    p.add_argument("--negatives", type=_positive_int, default=None,
                   help="negative samples per target (default: 5)")
    p.add_argument("--subsample", type=float, default=None,
                   help="frequent-word subsampling threshold, 0 disables "
                        "(default: 0.001)")
    p.add_argument("--ngram-min", type=_positive_int, default=None,
                   help="shortest subword n-gram, ft only (default: 3)")
    p.add_argument("--ngram-max", type=_positive_int, default=None,
                   help="longest subword n-gram, ft only (default: 6)")
    p.add_argument("--buckets", type=_positive_int, default=None,
                   help="subword hash buckets, ft only (default: 2000000)")
    p.add_argument("--x-max", type=float, default=None,
                   help="glove weighting cutoff (default: 100)")
    p.add_argument("--alpha", type=float, default=None,
                   help="glove weighting exponent (default: 0.75)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a vector file on an evaluation set")
    p.add_argument("--model", required=True, help="vector file to load")
    p.add_argument("--evalset", required=True, help="evaluation set json")
    p.add_argument("--report", default=None,
                   help="write per-item results json here (default: print only)")
    p.add_argument("--config", default=None,
                   help="pipeline config json for tokenization (default: built-in "
                        "defaults)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="run the full duplication-factor sweep")
    p.add_argument("--config", required=True,
                   help="sweep config json; its 'corpus' and 'evalset' paths are "
                        "resolved relative to the config file")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's base_seed (default: use config)")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads for every trainer (default: $%s or 1)"
                        % WORKERS_ENV_VAR)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="rebuild the report files from a runs.csv")
    p.add_argument("--runs", required=True, help="runs.csv from an earlier sweep")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=_cmd_report)

    return parser


def _load_pipeline_config(path) -> PipelineConfig:
    return PipelineConfig.from_json(path) if path else PipelineConfig()


def _cmd_ingest(args) -> int:
    config = _load_pipeline_config(args.config)
    result = ingest(args.inputs, format=args.format)
    for warning in result.warnings:
        logger.warning("%s", warning)
    corpus = preprocess(result.documents, config)
    save_corpus(corpus, args.out)
    stats = corpus_stats(corpus)
    print("ingested %d documents (%d warnings): tokens=%d sentences=%d -> %s"
          % (stats.documents, result.warning_count, stats.tokens,
             stats.sentences, args.out))
    return 0


def _cmd_duplicate(args) -> int:
    corpus = load_corpus(args.input)
    out = duplicate(corpus, args.rho, shuffle=args.shuffle, seed=args.seed)
    save_corpus(out, args.out)
    print("duplicated rho=%d: tokens=%d -> %s" % (args.rho, out.n_tokens, args.out))
    return 0


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.input)
    stats = corpus_stats(corpus)
    print("documents=%d sentences=%d tokens=%d types=%d rho=%d"
          % (stats.documents, stats.sentences, stats.tokens,
             stats.distinct_types, corpus.duplication_factor))
    return 0


def _cmd_train(args) -> int:
    from .glove import GloveEmbedding
    from .sgns import SgnsEmbedding

    algo = _ALGO_NAMES[args.algo]
    overrides = {
        "dim": args.dim, "window": args.window, "epochs": args.epochs,
        "min_count": args.min_count, "initial_lr": args.lr,
        "negatives": args.negatives, "subsample": args.subsample,
        "ngram_min": args.ngram_min, "ngram_max": args.ngram_max,
        "buckets": args.buckets, "x_max": args.x_max, "alpha": args.alpha,
    }
    if algo == "glove":
        if args.mode is not None:
            raise _UsageError("--mode does not apply to --algo glove")
        bad = [f for f in _SGNS_ONLY_FLAGS if overrides[f] is not None]
        if bad:
            raise _UsageError("--%s does not apply to --algo glove"
                              % bad[0].replace("_", "-"))
        kwargs = {k: v for k, v in overrides.items()
                  if v is not None and k not in _SGNS_ONLY_FLAGS}
        model = GloveEmbedding(seed=args.seed, workers=_resolve_workers(args), **kwargs)
    else:
        bad = [f for f in _GLOVE_ONLY_FLAGS if overrides[f] is not None]
        if bad:
            raise _UsageError("--%s only applies to --algo glove"
                              % bad[0].replace("_", "-"))
        mode = _MODE_NAMES[args.mode or "sg"]
        kwargs = {k: v for k, v in overrides.items()
                  if v is not None and k not in _GLOVE_ONLY_FLAGS}
        model = SgnsEmbedding(algorithm=algo, mode=mode, seed=args.seed,
                              workers=_resolve_workers(args), **kwargs)

    corpus = load_corpus(args.input)
    t0 = time.perf_counter()
    model.fit(corpus)
    save_model(model, args.out)
    print("trained %s on %d tokens in %.1fs -> %s"
          % (args.algo, corpus.n_tokens, time.perf_counter() - t0, args.out))
    return 0


def _cmd_eval(args) -> int:
    model = load_vec(args.model)
    evalset = load_evalset(args.evalset)
    config = _load_pipeline_config(args.config)
    result = evaluate(model, evalset, config)
    print("items=%d mean_tau=%.4f degenerate=%d mean_coverage=%.3f"
          % (len(result.per_item_tau), result.mean_tau, result.n_degenerate,
             sum(result.per_item_coverage) / len(result.per_item_coverage)))
    if args.report:
        payload = {
            "mean_tau": result.mean_tau,
            "n_items": len(result.per_item_tau),
            "n_degenerate": result.n_degenerate,
            "per_item_tau": result.per_item_tau,
            "per_item_coverage": result.per_item_coverage,
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print("wrote %s" % args.report)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        payload = json.load(fh)
    base = Path(args.config).parent
    try:
        corpus_path = base / payload.pop("corpus")
        evalset_path = base / payload.pop("evalset")
    except KeyError as exc:
        raise ValueError("%s: sweep config needs a %s path" % (args.config, exc))
    pipeline_path = payload.pop("pipeline", None)
    config = SweepConfig(**payload)
    if args.seed is not None:
        config.base_seed = args.seed
    workers = _resolve_workers(args)
    if workers != 1:
        config.training.setdefault("default", {}).setdefault("workers", workers)

    corpus = load_corpus(corpus_path)
    evalset = load_evalset(evalset_path)
    pipeline_config = _load_pipeline_config(base / pipeline_path if pipeline_path else None)
    records = run_sweep(corpus, evalset, config, pipeline_config)
    paths = emit_report(summarize(records), records, args.out)
    for path in paths:
        print("wrote %s" % path)
    return 0


def _cmd_report(args) -> int:
    records = load_runs(args.runs)
    paths = emit_report(summarize(records), records, args.out)
    for path in paths:
        print("wrote %s" % path)
    return 0


def run_cli(argv=None) -> int:
    """Parse arguments and run one subcommand; returns the exit code."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1
    except Exception as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


def main(argv=None) -> int:
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
