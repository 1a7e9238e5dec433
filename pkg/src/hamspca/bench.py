"""Experiment grid: load, center, extract, transform, classify, score.

A grid cell is one (method, d) pair; each classifier is scored on the
features of that cell, giving one report row per (method, d, classifier).
"""

import configparser
import csv
import io
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional, Tuple

import numpy as np

from .classify import accuracy, knn_fit, knn_predict, krr_fit, krr_predict
from .core import center, covariance
from .data import DatasetPair, load_csv, load_pgm_dir, synth_dataset
from .solvers import METHODS, SolverConfig, extract_components, transform

log = logging.getLogger(__name__)

CLASSIFIERS = ("knn", "krr")
REPORT_COLUMNS = (
    "method", "d", "classifier", "lambda", "delta", "dt", "damping", "k_neighbors",
    "kernel", "bandwidth", "ridge", "seed", "accuracy", "seconds", "status",
)
METHOD_TITLES = {"pca": "PCA", "ista": "ISTA sparse PCA", "leapfrog": "Leapfrog sparse PCA"}
CLASSIFIER_TITLES = {"knn": "k nearest neighbor method", "krr": "kernel ridge regression method"}


@dataclass(frozen=True)
class ExperimentConfig:
    seed: Optional[int] = None
    source: str = "synth"  # synth | csv | pgm
    train: str = ""
    test: str = ""
    synth_classes: int = 15
    synth_train: int = 8
    synth_test: int = 3
    synth_d: int = 1024
    synth_support: int = 10
    synth_sigma: float = 0.6
    methods: Tuple[str, ...] = METHODS
    dims: Tuple[int, ...] = (20, 30, 40, 50, 60)
    classifiers: Tuple[str, ...] = CLASSIFIERS
    lam: Optional[float] = None  # None: 0.1 * mean(diag(S))
    delta: float = 1e-4
    dt: float = 0.05
    damping: float = 0.95
    ista_step: Optional[float] = None
    max_iter: int = 5000
    x_tol: float = 1e-7
    restarts: int = 3
    k_neighbors: int = 1
    kernel: str = "rbf"
    bandwidth: Optional[float] = None  # None: median pairwise distance
    ridge: float = 1e-3
    record_time: bool = False  # wall times make the CSV non-reproducible
    jobs: int = 1

    def __post_init__(self):
        if self.source not in ("synth", "csv", "pgm"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.source != "synth" and not (self.train and self.test):
            raise ValueError(f"source {self.source!r} needs train and test paths")
        if not self.methods or not self.dims or not self.classifiers:
            raise ValueError("methods, dims and classifiers must be non-empty")
        bad = set(self.methods) - set(METHODS) or set(self.classifiers) - set(CLASSIFIERS)
        if bad:
            raise ValueError(f"unknown grid entries {sorted(bad)}")
        if min(self.dims) < 1:
            raise ValueError("every d must be >= 1")
        if self.kernel not in ("rbf", "linear"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def solver_config(self, lam, seed):
        return SolverConfig(
            lam=lam, delta=self.delta, dt=self.dt, damping=self.damping,
            ista_step=self.ista_step, max_iter=self.max_iter, x_tol=self.x_tol,
            seed=seed, restarts=self.restarts,
        )


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional(convert):
    def parse(text):
        return None if text.strip().lower() in ("", "none", "auto") else convert(text)
    return parse


def _tuple_of(convert):
    def parse(text):
        if isinstance(text, (list, tuple)):
            return tuple(convert(str(t)) for t in text)
        return tuple(convert(t.strip()) for t in text.split(",") if t.strip())
    return parse


_CONVERTERS = {
    "seed": _optional(int),
    "lam": _optional(float),
    "ista_step": _optional(float),
    "bandwidth": _optional(float),
    "methods": _tuple_of(str),
    "dims": _tuple_of(int),
    "classifiers": _tuple_of(str),
    "record_time": _parse_bool,
}


def _convert(name, value):
    if not isinstance(value, str):
        return value
    if name in _CONVERTERS:
        return _CONVERTERS[name](value)
    default = ExperimentConfig.__dataclass_fields__[name].default
    return type(default)(value) if default is not None else value


def config_from_mapping(mapping, base=None):
    """Build an ExperimentConfig from string or typed values, on top of ``base``."""
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    values = {k: _convert(k, v) for k, v in mapping.items()}
    return replace(base or ExperimentConfig(), **values)


def read_config_file(path):
    """``key = value`` lines (``#`` comments); an INI section header is optional."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[experiment]\n" + text
    parser.read_string(text)
    merged = {}
    for section in parser.sections():
        merged.update(parser[section])
    return config_from_mapping(merged)


def load_dataset(config):
    if config.source == "csv":
        return load_csv(config.train, config.test)
    if config.source == "pgm":
        return load_pgm_dir(config.train, config.test)
    if config.seed is None:
        raise ValueError("a synthetic dataset needs a seed")
    return synth_dataset(
        config.synth_classes, config.synth_train, config.synth_test, config.synth_d,
        config.synth_support, config.synth_sigma, config.seed,
    )


def cell_seed(seed, method, d):
    """Solver seed for a grid cell; independent of scheduling order."""
    state = np.random.SeedSequence([int(seed), METHODS.index(method), int(d)]).generate_state(1)
    return int(state[0])


def default_lambda(S):
    return 0.1 * float(np.mean(np.diag(S)))


def fit_loadings(dataset, method, d, solver_config):
    """Centering mean and loadings computed from the training split only."""
    train_c, _, mean = center(dataset.train, dataset.test)
    S = covariance(train_c)
    return mean, extract_components(S, d, method, solver_config)


@dataclass
class ReportRow:
    method: str
    d: int
    classifier: str
    lam: Optional[float]
    delta: Optional[float]
    dt: Optional[float]
    damping: Optional[float]
    k_neighbors: Optional[int]
    kernel: Optional[str]
    bandwidth: Optional[float]
    ridge: Optional[float]
    seed: int
    accuracy: Optional[float]
    seconds: Optional[float]
    status: str = "ok"
    error: str = ""

    def csv_fields(self):
        values = [
            self.method, self.d, self.classifier, self.lam, self.delta, self.dt, self.damping,
            self.k_neighbors, self.kernel, self.bandwidth, self.ridge, self.seed,
            self.accuracy, self.seconds, self.status,
        ]
        return ["" if v is None else ("%.17g" % v if isinstance(v, float) else str(v)) for v in values]


@dataclass
class EvaluationReport:
    rows: list
    config: dict = field(default_factory=dict)


def _run_cell(dataset, config, method, d, lam):
    seed = cell_seed(config.seed, method, d)
    sparse = method != "pca"
    leapfrog = method == "leapfrog"
    common = dict(
        method=method, d=d,
        lam=lam if sparse else None,
        delta=config.delta if sparse else None,
        dt=config.dt if leapfrog else None,
        damping=config.damping if leapfrog else None,
        seed=seed,
    )

    def row(classifier, **extra):
        hyper = dict(k_neighbors=None, kernel=None, bandwidth=None, ridge=None)
        if classifier == "knn":
            hyper["k_neighbors"] = config.k_neighbors
        else:
            hyper.update(kernel=config.kernel, ridge=config.ridge, bandwidth=config.bandwidth)
        hyper.update(extra)
        return ReportRow(classifier=classifier, **common, **hyper,
                         accuracy=None, seconds=None, status="failed")

    start = time.perf_counter()
    try:
        mean, W = fit_loadings(dataset, method, d, config.solver_config(lam, seed))
        train = transform(dataset.train, mean, W)
        test = transform(dataset.test, mean, W)
    except Exception as exc:  # a failed cell must not sink the grid
        log.warning("cell %s d=%d failed during extraction: %s", method, d, exc)
        return [replace(row(c), error=str(exc)) for c in config.classifiers]
    extract_seconds = time.perf_counter() - start

    rows = []
    for classifier in config.classifiers:
        t0 = time.perf_counter()
        try:
            if classifier == "knn":
                model = knn_fit(train.values, train.labels, config.k_neighbors)
                predicted = knn_predict(model, test.values)
                r = row(classifier)
            else:
                model = krr_fit(train.values, train.labels, config.kernel, config.bandwidth, config.ridge)
                predicted = krr_predict(model, test.values)
                r = row(classifier, bandwidth=model.bandwidth)
            r.accuracy = accuracy(predicted, test.labels)
            r.status = "ok"
        except Exception as exc:
            log.warning("cell %s d=%d %s failed: %s", method, d, classifier, exc)
            r = replace(row(classifier), error=str(exc))
        if config.record_time:
            r.seconds = extract_seconds + time.perf_counter() - t0
        rows.append(r)
    return rows


def run_pipeline(config, dataset=None):
    """Evaluate every (method, d, classifier) cell of the grid."""
    if config.seed is None:
        raise ValueError("run_pipeline needs a seed")
    dataset = dataset if dataset is not None else load_dataset(config)
    limit = min(dataset.train.d, dataset.train.n)
    too_big = [d for d in config.dims if d > limit]
    if too_big:
        raise ValueError(f"dims {too_big} exceed min(features, training rows) = {limit}")

    train_c, _, _ = center(dataset.train, dataset.test)
    lam = config.lam if config.lam is not None else default_lambda(covariance(train_c))

    cells = [(m, d) for m in config.methods for d in config.dims]
    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            results = list(pool.map(lambda c: _run_cell(dataset, config, c[0], c[1], lam), cells))
    else:
        results = [_run_cell(dataset, config, m, d, lam) for m, d in cells]

    resolved = asdict(config)
    resolved["lam"] = lam
    resolved["dataset"] = dataset.meta.get("source", "")
    return EvaluationReport([r for rows in results for r in rows], resolved)


def report_to_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in report.rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def report_to_markdown(report):
    lines = []
    if report.config:
        lines.append("Resolved configuration:")
        lines.append("")
        lines.extend(f"    {k} = {_format_config_value(v)}" for k, v in report.config.items())
        lines.append("")
    classifiers = list(dict.fromkeys(r.classifier for r in report.rows))
    for classifier in classifiers:
        title = CLASSIFIER_TITLES.get(classifier, classifier)
        lines.append(f"### Accuracies with the {title}")
        lines.append("")
        lines.append("| Configuration | Accuracy |")
        lines.append("|---|---|")
        for r in report.rows:
            if r.classifier != classifier:
                continue
            name = f"{METHOD_TITLES.get(r.method, r.method)} (d={r.d}) + {title}"
            acc = f"{r.accuracy:.2f}" if r.status == "ok" else r.status
            lines.append(f"| {name} | {acc} |")
        lines.append("")
    return "\n".join(lines)


def _format_config_value(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return "none" if v is None else str(v)


def emit_report(report, path, format="csv"):
    if not report.rows:
        raise ValueError("refusing to write an empty report")
    text = report_to_csv(report) if format == "csv" else report_to_markdown(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_report_csv(path):
    def opt(cast):
        return lambda s: cast(s) if s != "" else None

    casts = dict(
        d=int, lam=opt(float), delta=opt(float), dt=opt(float), damping=opt(float),
        k_neighbors=opt(int), kernel=opt(str), bandwidth=opt(float), ridge=opt(float),
        seed=int, accuracy=opt(float), seconds=opt(float),
    )
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            rec["lam"] = rec.pop("lambda")
            rows.append(ReportRow(**{k: casts.get(k, str)(v) for k, v in rec.items()}))
    if not rows:
        raise ValueError(f"{path}: report has no rows")
    return EvaluationReport(rows)
