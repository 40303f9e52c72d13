"""CSV loading and per-feature min-max scaling."""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class NormParams:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise DataError("mins and maxs must be 1-D arrays of equal length")
        if np.any(self.maxs < self.mins):
            raise DataError("max < min in normalization parameters")

    @property
    def d(self) -> int:
        return self.mins.shape[0]

    def to_list(self) -> list:
        return [[float(a), float(b)] for a, b in zip(self.mins, self.maxs)]

    @classmethod
    def from_list(cls, pairs) -> "NormParams":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy())


@dataclass
class Dataset:
    """Feature matrix plus targets.

    ``labels`` holds contiguous class ids ``0..m-1`` when ``class_labels`` is
    set (classification) and real targets otherwise.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    class_labels: Optional[list[str]] = None
    norm_params: Optional[NormParams] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2 or self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise DataError(f"features must be a non-empty N x d matrix, got shape {self.features.shape}")
        self.labels = np.asarray(self.labels)
        if self.labels.shape != (self.features.shape[0],):
            raise DataError("labels length does not match number of rows")
        if len(self.feature_names) != self.features.shape[1]:
            raise DataError("feature_names length does not match number of columns")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def is_classification(self) -> bool:
        return self.class_labels is not None

    @property
    def n_classes(self) -> int:
        return len(self.class_labels) if self.class_labels is not None else 0

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return replace(self, features=self.features[idx], labels=self.labels[idx])


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _resolve_label_column(label_column, header, ncols) -> int:
    if isinstance(label_column, int):
        idx = label_column
    elif header is not None and label_column in header:
        return header.index(label_column)
    elif isinstance(label_column, str) and label_column.lstrip("-").isdigit():
        idx = int(label_column)
    else:
        raise ConfigError(f"label column {label_column!r} not found")
    if idx < 0:
        idx += ncols
    if not 0 <= idx < ncols:
        raise ConfigError(f"label column index {label_column} out of range for {ncols} columns")
    return idx


def load_csv(path: Union[str, Path], label_column: Union[str, int] = -1,
             regression: bool = False,
             class_labels: Optional[Sequence[str]] = None) -> Dataset:
    """Read a CSV into an unnormalized :class:`Dataset`.

    The first row is treated as a header when any of its cells is non-numeric.
    Class labels are mapped to ``0..m-1`` in first-appearance order, unless an
    existing ``class_labels`` mapping is given (e.g. from a trained model).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    header = None
    first = [c.strip() for c in rows[0]]
    by_index = isinstance(label_column, int) or str(label_column).lstrip("-").isdigit()
    if by_index:
        # the label cell of a headerless file may well be a class name
        lab0 = int(label_column) % len(first) if first else 0
        looks_like_header = any(not _is_number(c) for i, c in enumerate(first) if i != lab0)
    else:
        looks_like_header = any(not _is_number(c) for c in first)
    if looks_like_header:
        header = first
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    ncols = len(header) if header is not None else len(rows[0])
    if ncols < 2:
        raise DataError(f"{path}: need at least one feature column and a label column")
    lab = _resolve_label_column(label_column, header, ncols)

    feats = np.empty((len(rows), ncols - 1))
    raw_labels = []
    lineno_offset = 2 if header is not None else 1
    for i, row in enumerate(rows):
        line = i + lineno_offset
        if len(row) != ncols:
            raise DataError(f"{path}: row {line} has {len(row)} columns, expected {ncols}")
        vals = [c.strip() for c in row]
        raw_labels.append(vals[lab])
        j = 0
        for c, cell in enumerate(vals):
            if c == lab:
                continue
            try:
                feats[i, j] = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {line}, column {c + 1}: non-numeric value {cell!r}") from None
            if not np.isfinite(feats[i, j]):
                raise DataError(f"{path}: row {line}, column {c + 1}: non-finite value {cell!r}")
            j += 1

    if header is not None:
        names = [h for c, h in enumerate(header) if c != lab]
    else:
        names = [f"x{c}" for c in range(ncols - 1)]

    if regression:
        try:
            y = np.array([float(s) for s in raw_labels])
        except ValueError as exc:
            raise DataError(f"{path}: non-numeric regression target ({exc})") from None
        return Dataset(feats, y, names)

    if class_labels is None:
        mapping: dict[str, int] = {}
        for s in raw_labels:
            mapping.setdefault(s, len(mapping))
        class_labels = list(mapping)
    else:
        class_labels = list(class_labels)
        mapping = {s: i for i, s in enumerate(class_labels)}
    try:
        y = np.array([mapping[s] for s in raw_labels], dtype=int)
    except KeyError as exc:
        raise DataError(f"{path}: unknown class label {exc.args[0]!r}") from None
    return Dataset(feats, y, names, class_labels=class_labels)


def fit_minmax(train: Dataset) -> NormParams:
    return NormParams(train.features.min(axis=0), train.features.max(axis=0))


def scale_features(X, params: NormParams) -> np.ndarray:
    """Scale to [0, 1] with the fitted range; constant features map to 0 and
    out-of-range values are clamped."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != params.d:
        raise DataError(f"dimension mismatch: data has {X.shape[1]} features, params have {params.d}")
    span = params.maxs - params.mins
    safe = np.where(span > 0, span, 1.0)
    z = (X - params.mins) / safe
    z[:, span <= 0] = 0.0
    return np.clip(z, 0.0, 1.0)


def apply_minmax(data: Dataset, params: NormParams) -> Dataset:
    return replace(data, features=scale_features(data.features, params), norm_params=params)


def normalize_train_test(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    params = fit_minmax(train)
    return apply_minmax(train, params), apply_minmax(test, params)
