"""Command-line front end: ``run``, ``synth``, ``extract`` and ``report``."""

import argparse
import logging
import os
import sys
from dataclasses import fields

import numpy as np

from . import bench
from .data import synth_dataset, write_csv
from .solvers import METHODS

SYNTH_KEYS = ("synth_classes", "synth_train", "synth_test", "synth_d", "synth_support", "synth_sigma")
SOLVER_KEYS = ("lam", "delta", "dt", "damping", "ista_step", "max_iter", "x_tol", "restarts")
DATA_KEYS = ("source", "train", "test") + SYNTH_KEYS

HELP = {
    "source": "dataset source: synth, csv or pgm",
    "train": "training CSV file, or directory of <label>_<anything>.pgm images",
    "test": "test CSV file, or directory of <label>_<anything>.pgm images",
    "methods": "comma-separated subset of pca,ista,leapfrog",
    "dims": "comma-separated component counts",
    "classifiers": "comma-separated subset of knn,krr",
    "lam": "sparsity weight (default: 0.1 * mean diagonal of the covariance)",
    "bandwidth": "rbf bandwidth (default: median pairwise training distance)",
    "ista_step": "ISTA step size (default: 0.9 / (2 * top eigenvalue estimate))",
    "record_time": "write per-cell wall time (makes the CSV run-dependent)",
}


def _add_config_flags(parser, keys):
    for name in keys:
        parser.add_argument(
            "--" + name.replace("_", "-"), dest=name, default=None, metavar="VALUE",
            help=HELP.get(name),
        )


def _overrides(args, keys):
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _resolve_config(args, keys):
    base = bench.read_config_file(args.config) if getattr(args, "config", None) else None
    return bench.config_from_mapping(_overrides(args, keys), base)


def cmd_run(args):
    config_keys = [f.name for f in fields(bench.ExperimentConfig)]
    config = _resolve_config(args, config_keys)
    if config.seed is None:
        raise SystemExit("run: --seed is required (or set seed in the config file)")
    report = bench.run_pipeline(config)
    bench.emit_report(report, args.out, "csv")
    if args.markdown:
        bench.emit_report(report, args.markdown, "markdown")
    failed = sum(r.status != "ok" for r in report.rows)
    print(f"wrote {len(report.rows)} rows to {args.out} ({failed} failed)")


def cmd_synth(args):
    config = bench.config_from_mapping(_overrides(args, ("seed",) + SYNTH_KEYS))
    if config.seed is None:
        raise SystemExit("synth: --seed is required")
    ds = synth_dataset(
        config.synth_classes, config.synth_train, config.synth_test, config.synth_d,
        config.synth_support, config.synth_sigma, config.seed,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    write_csv(ds.train, os.path.join(args.out_dir, "train.csv"))
    write_csv(ds.test, os.path.join(args.out_dir, "test.csv"))
    print(f"wrote {ds.train.n} train and {ds.test.n} test rows to {args.out_dir}")


def cmd_extract(args):
    config = _resolve_config(args, ("seed",) + DATA_KEYS + SOLVER_KEYS)
    seed = config.seed if config.seed is not None else 0
    dataset = bench.load_dataset(bench.config_from_mapping({"seed": seed}, config))
    train_c, _, mean = bench.center(dataset.train, dataset.test)
    S = bench.covariance(train_c)
    lam = config.lam if config.lam is not None else bench.default_lambda(S)
    W = bench.extract_components(S, args.k, args.method, config.solver_config(lam, seed))
    np.savetxt(args.out, W.components, delimiter=",", fmt="%.17g")
    print(f"wrote {W.d}x{W.k} loadings to {args.out}")


def cmd_report(args):
    report = bench.read_report_csv(args.report)
    text = bench.report_to_markdown(report) if args.format == "markdown" else bench.report_to_csv(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hamspca",
        description="Sparse PCA via damped leapfrog dynamics, benchmarked with k-NN and kernel ridge regression.",
        epilog="PGM directories hold binary 8-bit P5 files named '<label>_<anything>.pgm'.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate the full method x dims x classifier grid")
    run.add_argument("--config", help="key = value file; command-line flags override it")
    _add_config_flags(run, [f.name for f in fields(bench.ExperimentConfig)])
    run.add_argument("--out", required=True, help="CSV report path")
    run.add_argument("--markdown", help="optional markdown table path")
    run.set_defaults(func=cmd_run)

    synth = sub.add_parser("synth", help="write a synthetic dataset as train.csv/test.csv")
    _add_config_flags(synth, ("seed",) + SYNTH_KEYS)
    synth.add_argument("--out-dir", required=True)
    synth.set_defaults(func=cmd_synth)

    extract = sub.add_parser("extract", help="write the d x k loadings matrix as CSV")
    extract.add_argument("--config", help="key = value file; command-line flags override it")
    _add_config_flags(extract, ("seed",) + DATA_KEYS + SOLVER_KEYS)
    extract.add_argument("--method", choices=METHODS, default="leapfrog")
    extract.add_argument("--k", type=int, required=True, help="number of components")
    extract.add_argument("--out", required=True)
    extract.set_defaults(func=cmd_extract)

    report = sub.add_parser("report", help="re-render a saved CSV report")
    report.add_argument("report", help="CSV written by 'run'")
    report.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    report.add_argument("--out", help="output path (default: stdout)")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
