"""Dataset loading (CSV, binary PGM directories) and a synthetic generator."""

import csv
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .core import DataMatrix, DimensionError


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetPair:
    train: DataMatrix
    test: DataMatrix
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.train.labels is None or self.test.labels is None:
            raise DatasetError("both train and test need labels")
        if self.train.d != self.test.d:
            raise DimensionError(f"train has {self.train.d} features, test has {self.test.d}")
        if self.train.n < 2:
            raise DatasetError(f"need at least 2 training rows, got {self.train.n}")
        unseen = set(self.test.labels.tolist()) - set(self.train.labels.tolist())
        if unseen:
            raise DatasetError(f"test labels absent from train: {sorted(unseen)}")
        meta = {"d": self.train.d, "classes": int(np.unique(self.train.labels).size)}
        meta.update(self.meta)
        object.__setattr__(self, "meta", meta)


def _read_csv_matrix(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")
    labels, rows = [], []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
                if width < 2:
                    raise DatasetError(f"{path}:{lineno}: need a label and at least one feature")
            elif len(row) != width:
                raise DatasetError(
                    f"{path}:{lineno}: ragged row with {len(row)} fields, expected {width}"
                )
            try:
                label = int(row[0])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}:1: label {row[0]!r} is not an integer") from None
            if label < 0:
                raise DatasetError(f"{path}:{lineno}:1: negative label {label}")
            values = []
            for col, cell in enumerate(row[1:], start=2):
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(f"{path}:{lineno}:{col}: non-numeric cell {cell!r}") from None
                if not math.isfinite(v):
                    raise DatasetError(f"{path}:{lineno}:{col}: non-finite value {cell!r}")
                values.append(v)
            labels.append(label)
            rows.append(values)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return DataMatrix(np.array(rows), np.array(labels, dtype=np.int64))


def load_csv(path_train, path_test):
    """Read ``label,feature1,...,featureD`` files (no header)."""
    train = _read_csv_matrix(path_train)
    test = _read_csv_matrix(path_test)
    if train.d != test.d:
        raise DimensionError(f"{path_train} has {train.d} features, {path_test} has {test.d}")
    return DatasetPair(train, test, {"source": f"csv:{path_train},{path_test}"})


def write_csv(data, path):
    """Write a labelled DataMatrix so that ``load_csv`` reads it back bit for bit."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for label, row in zip(data.labels, data.values):
            fh.write(",".join([str(int(label))] + ["%.17g" % v for v in row]) + "\n")


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(path):
    """Binary (P5) 8-bit PGM as an ``(height, width)`` uint8 array."""
    with open(path, "rb") as fh:
        blob = fh.read()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(blob, pos)
        if m is None:
            raise DatasetError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise DatasetError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise DatasetError(f"{path}: malformed PGM header {tokens!r}") from None
    if width < 1 or height < 1 or not 0 < maxval < 256:
        raise DatasetError(f"{path}: unsupported PGM geometry {width}x{height}, maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    pixels = np.frombuffer(blob, dtype=np.uint8, count=width * height, offset=pos) if len(
        blob
    ) - pos >= width * height else None
    if pixels is None:
        raise DatasetError(f"{path}: expected {width * height} pixel bytes, got {len(blob) - pos}")
    return pixels.reshape(height, width)


def write_pgm(path, image):
    image = np.asarray(image, dtype=np.uint8)
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(image.tobytes())


def _label_from_name(name):
    head = name.split("_", 1)[0]
    if not head.isdigit():
        raise DatasetError(f"cannot read a label from file name {name!r}; expected '<label>_...pgm'")
    return int(head)


def _read_pgm_dir(directory):
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith(".pgm"))
    if not names:
        raise DatasetError(f"{directory}: no .pgm files")
    rows, labels = [], []
    shape = None
    for name in names:
        label = _label_from_name(name)
        image = read_pgm(os.path.join(directory, name))
        if shape is None:
            shape = image.shape
        elif image.shape != shape:
            raise DatasetError(
                f"{os.path.join(directory, name)}: image is {image.shape[1]}x{image.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        rows.append(image.reshape(-1) / 255.0)  # row-major flattening
        labels.append(label)
    return DataMatrix(np.array(rows), np.array(labels, dtype=np.int64)), shape


def load_pgm_dir(train_dir, test_dir):
    """Flatten every ``<label>_*.pgm`` image row by row, scaled to [0, 1]."""
    train, shape = _read_pgm_dir(train_dir)
    test, test_shape = _read_pgm_dir(test_dir)
    if shape != test_shape:
        raise DatasetError(f"train images are {shape}, test images are {test_shape}")
    return DatasetPair(train, test, {"source": f"pgm:{train_dir},{test_dir}", "image_shape": shape})


def synth_dataset(classes, per_class_train, per_class_test, d, sparse_support, noise_sigma, seed):
    """Classes with sparse mean vectors plus isotropic Gaussian noise.

    Each class mean has ``sparse_support`` nonzero coordinates with random
    signs and magnitudes in [1, 2].
    """
    if min(classes, per_class_train, per_class_test, d, sparse_support) < 1:
        raise ValueError("all counts must be >= 1")
    if sparse_support > d:
        raise ValueError(f"sparse_support {sparse_support} exceeds d {d}")
    if classes * per_class_train < 2:
        raise ValueError("need at least 2 training rows")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    means = np.zeros((classes, d))
    for c in range(classes):
        support = rng.choice(d, size=sparse_support, replace=False)
        means[c, support] = rng.uniform(1.0, 2.0, sparse_support) * rng.choice([-1.0, 1.0], sparse_support)

    def draw(per_class):
        labels = np.repeat(np.arange(classes), per_class)
        values = means[labels] + noise_sigma * rng.standard_normal((labels.size, d))
        return DataMatrix(values, labels)

    train = draw(per_class_train)
    test = draw(per_class_test)
    meta = {
        "source": (
            f"synth:classes={classes},train={per_class_train},test={per_class_test},d={d},"
            f"support={sparse_support},sigma={noise_sigma},seed={seed}"
        ),
        "means": means,
    }
    return DatasetPair(train, test, meta)
