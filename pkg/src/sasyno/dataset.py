"""Dataset model, CSV ingestion, class partitioning, splitting and generators."""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .validation import DataFormatError, minority_majority, ordered_labels


@dataclass(frozen=True)
class Dataset:
    """Feature matrix ``X`` (N x M) with one label per row in ``y``.

    Labels are opaque identifiers. The arrays are made read-only on
    construction so a dataset can be shared freely.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = None
    label_name: str = None

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, copy=True)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(
                f"y must have shape ({X.shape[0]},), got {y.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains NaN or infinite values")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise ValueError("feature_names length does not match X")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def labels(self):
        """Distinct labels, in order of first appearance."""
        return ordered_labels(self.y)

    def __len__(self):
        return self.n_samples

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.X[idx], self.y[idx], self.feature_names, self.label_name)

    def with_data(self, X, y):
        """Same column metadata, new rows."""
        return Dataset(X, y, self.feature_names, self.label_name)

    def count(self, label):
        return int(np.sum(self.y == label))


def concatenate(first, *others):
    """Row-wise union of datasets sharing the same columns."""
    parts = (first, *others)
    X = np.vstack([d.X for d in parts])
    y = np.concatenate([d.y for d in parts])
    return first.with_data(X, y)


@dataclass(frozen=True)
class ClassPartition:
    """A binary dataset split into its minority (class 0) and majority (class 1)."""

    minority: Dataset
    majority: Dataset
    minority_label: object
    majority_label: object
    minority_index: np.ndarray = field(repr=False)
    majority_index: np.ndarray = field(repr=False)

    @property
    def n0(self):
        return self.minority.n_samples

    @property
    def n1(self):
        return self.majority.n_samples


def partition_by_class(d):
    """Split a binary dataset into minority and majority parts.

    The less frequent label is the minority; on an exact tie the label
    that appears first in ``d`` wins.
    """
    minority_label, majority_label = minority_majority(d.y)
    min_idx = np.flatnonzero(d.y == minority_label)
    maj_idx = np.flatnonzero(d.y == majority_label)
    return ClassPartition(
        minority=d.subset(min_idx),
        majority=d.subset(maj_idx),
        minority_label=minority_label,
        majority_label=majority_label,
        minority_index=min_idx,
        majority_index=maj_idx,
    )


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def split_indices(y, train_fraction=0.8, rng=None):
    """Stratified train/test index arrays for labels ``y``.

    Each class of size ``n`` contributes ``round(train_fraction * n)``
    samples to the training side, clipped to ``[1, n - 1]`` so both sides
    keep every class. Indices are returned in ascending order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    y = np.asarray(y)
    if y.size == 0:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.default_rng(rng)
    train, test = [], []
    for label in ordered_labels(y):
        members = np.flatnonzero(y == label)
        if members.size < 2:
            raise ValueError(
                f"class {label!r} has {members.size} sample(s); "
                "at least 2 are needed to populate both sides of the split"
            )
        n_train = min(max(_round_half_up(train_fraction * members.size), 1),
                      members.size - 1)
        shuffled = rng.permutation(members)
        train.append(shuffled[:n_train])
        test.append(shuffled[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def train_test_split(d, train_fraction=0.8, rng=None):
    """Stratified random split of ``d`` into ``(train, test)`` datasets."""
    train_idx, test_idx = split_indices(d.y, train_fraction, rng)
    return d.subset(train_idx), d.subset(test_idx)


def generate_gaussian_imbalanced(n0, n1, centers, spreads, rng=None):
    """Two isotropic Gaussian classes labelled 0 (``n0`` rows) and 1 (``n1`` rows).

    Parameters
    ----------
    n0, n1 : int
        Class sizes, both at least 1.
    centers : pair of array-like
        Mean vector of class 0 and of class 1.
    spreads : pair of float
        Per-class standard deviation, shared by every dimension.
    rng : seed or numpy Generator
    """
    if n0 < 1 or n1 < 1:
        raise ValueError(f"class sizes must be >= 1, got n0={n0}, n1={n1}")
    c0 = np.atleast_1d(np.asarray(centers[0], dtype=np.float64))
    c1 = np.atleast_1d(np.asarray(centers[1], dtype=np.float64))
    if c0.shape != c1.shape or c0.ndim != 1:
        raise ValueError(
            f"center dimensionalities differ: {c0.shape} vs {c1.shape}"
        )
    s0, s1 = (float(s) for s in spreads)
    if s0 < 0 or s1 < 0:
        raise ValueError("spreads must be nonnegative")
    rng = np.random.default_rng(rng)
    X0 = c0 + s0 * rng.standard_normal((n0, c0.size))
    X1 = c1 + s1 * rng.standard_normal((n1, c1.size))
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    return Dataset(np.vstack([X0, X1]), y)


@dataclass(frozen=True)
class NormParams:
    """Per-attribute minima and maxima for min-max rescaling."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        if np.any(self.maximum < self.minimum):
            raise ValueError("maximum must be >= minimum for every attribute")

    @property
    def scale(self):
        span = self.maximum - self.minimum
        return np.where(span > 0, span, 1.0)

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        out = (X - self.minimum) / self.scale
        # constant training attributes map to 0
        return np.where(self.maximum > self.minimum, out, 0.0)

    def inverse_transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        return X * self.scale + self.minimum

    def apply(self, d):
        return d.with_data(self.transform(d.X), d.y)


def fit_minmax(X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("cannot normalise an empty dataset")
    return NormParams(X.min(axis=0), X.max(axis=0))


def minmax_normalize(d):
    """Rescale each attribute of ``d`` into [0, 1]; returns ``(dataset, params)``."""
    params = fit_minmax(d.X)
    return params.apply(d), params


# -- CSV ---------------------------------------------------------------------

def _parse_float(cell):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def _resolve_label_column(label_column, header, n_cols):
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise DataFormatError(
                f"label column {label_column!r} given by name but the file has no header"
            )
        try:
            return header.index(label_column)
        except ValueError:
            raise DataFormatError(
                f"label column {label_column!r} not found in header {header}"
            ) from None
    index = int(label_column)
    if not -n_cols <= index < n_cols:
        raise DataFormatError(f"label column {index} out of range for {n_cols} columns")
    return index % n_cols


def load_csv(path, label_column=-1):
    """Read a comma-separated file into a :class:`Dataset`.

    The first row is a header iff any of its non-label cells fails to
    parse as a number. ``label_column`` is a column index (negative
    counts from the end) or a header name. Errors name the 1-based file
    row and column.
    """
    if not os.path.isfile(path):
        raise DataFormatError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1)
                if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataFormatError(f"{path}: file is empty")

    n_cols = len(rows[0][1])
    if n_cols < 2:
        raise DataFormatError(f"{path}: row {rows[0][0]}: need at least 2 columns")

    first = [cell.strip() for cell in rows[0][1]]
    header = None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        header = first  # a named label column implies a header row
    label_idx = _resolve_label_column(label_column, header or first, n_cols)
    if header is None and any(
        _parse_float(c) is None for j, c in enumerate(first) if j != label_idx
    ):
        header = first
    body = rows[1:] if header is not None else rows
    if not body:
        raise DataFormatError(f"{path}: no data rows")

    X = np.empty((len(body), n_cols - 1), dtype=np.float64)
    y = []
    for r, (lineno, row) in enumerate(body):
        if len(row) != n_cols:
            raise DataFormatError(
                f"{path}: row {lineno}: expected {n_cols} columns, got {len(row)}"
            )
        c = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                y.append(cell.strip())
                continue
            value = _parse_float(cell.strip())
            if value is None or not math.isfinite(value):
                raise DataFormatError(
                    f"{path}: row {lineno}, column {j + 1}: "
                    f"non-numeric or non-finite feature value {cell!r}"
                )
            X[r, c] = value
            c += 1

    feature_names = label_name = None
    if header is not None:
        feature_names = tuple(h for j, h in enumerate(header) if j != label_idx)
        label_name = header[label_idx]
    return Dataset(X, np.array(y, dtype=object).astype(str), feature_names, label_name)


def write_csv(path, d, header=None):
    """Write ``d`` with the label as the last column.

    A header row is written when ``header`` is True, or when ``header``
    is None and the dataset carries column names. Floats use ``repr`` so
    the file round-trips exactly.
    """
    if header is None:
        header = d.feature_names is not None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            names = d.feature_names or tuple(f"x{j + 1}" for j in range(d.n_features))
            writer.writerow([*names, d.label_name or "label"])
        for row, label in zip(d.X, d.y):
            writer.writerow([repr(float(v)) for v in row] + [label])
