"""Tabular regression data: CSV ingestion, label encoding, histograms, resampling."""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError


class FeatureKind(str, enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Dataset:
    """Immutable (X, y) pair with per-column kinds.

    Categorical columns hold integer codes in ``[0, K_j)``. ``levels`` maps a
    categorical column index to the level text for each code when the data came
    from a CSV; synthetic datasets may leave it empty.
    """

    feature_names: tuple[str, ...]
    feature_kinds: tuple[FeatureKind, ...]
    X: np.ndarray
    y: np.ndarray
    levels: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True)
        y = np.array(self.y, dtype=float, copy=True).ravel()
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        names = tuple(str(s) for s in self.feature_names)
        kinds = tuple(FeatureKind(k) for k in self.feature_kinds)
        n, p = X.shape
        if n != len(y):
            raise DataError(f"X has {n} rows but y has {len(y)}")
        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        if p < 1 or len(names) != p or len(kinds) != p:
            raise DataError("feature_names/feature_kinds must match the column count (p >= 1)")
        if len(set(names)) != p:
            raise DataError("feature names must be unique")
        if not np.all(np.isfinite(y)):
            raise DataError("y contains missing or non-finite values")
        if not np.all(np.isfinite(X)):
            raise DataError("X contains missing or non-finite values")
        for j, kind in enumerate(kinds):
            if kind is FeatureKind.CATEGORICAL:
                col = X[:, j]
                if np.any(col < 0) or np.any(col != np.round(col)):
                    raise DataError(f"categorical column {names[j]!r} must hold non-negative integer codes")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "feature_kinds", kinds)
        object.__setattr__(self, "levels", {int(k): tuple(v) for k, v in self.levels.items()})

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def is_categorical(self, j: int) -> bool:
        return self.feature_kinds[j] is FeatureKind.CATEGORICAL

    def n_levels(self, j: int) -> int:
        """K_j for a categorical column."""
        if j in self.levels:
            return len(self.levels[j])
        return int(self.X[:, j].max()) + 1

    def index_of(self, name_or_index: str | int) -> int:
        if isinstance(name_or_index, (int, np.integer)):
            j = int(name_or_index)
            if not 0 <= j < self.p:
                raise DataError(f"feature index {j} out of range [0, {self.p})")
            return j
        try:
            return self.feature_names.index(name_or_index)
        except ValueError:
            raise DataError(f"unknown feature {name_or_index!r}") from None

    def with_y(self, y: np.ndarray) -> "Dataset":
        return Dataset(self.feature_names, self.feature_kinds, self.X, y, self.levels)

    def take(self, rows: np.ndarray) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.feature_names, self.feature_kinds, self.X[rows], self.y[rows], self.levels)


@dataclass(frozen=True)
class Histogram:
    values: np.ndarray
    counts: np.ndarray

    @property
    def n_unique(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def encode_categoricals(raw: Sequence[str]) -> tuple[np.ndarray, list[str]]:
    """Lexicographic label encoding: ``levels`` sorted, ``codes[i]`` indexes it."""
    levels = sorted(set(raw))
    lookup = {level: code for code, level in enumerate(levels)}
    codes = np.fromiter((lookup[v] for v in raw), dtype=np.int64, count=len(raw))
    return codes, levels


def histogram(ds: Dataset, j: int) -> Histogram:
    if not 0 <= j < ds.p:
        raise DataError(f"feature index {j} out of range [0, {ds.p})")
    values, counts = np.unique(ds.X[:, j], return_counts=True)
    return Histogram(values=values, counts=counts)


def sample_rows(ds: Dataset, frac: float, replace: bool, seed: int) -> Dataset:
    """Draw ``ceil(frac * n)`` rows, with or without replacement, reproducibly."""
    if not 0.0 < frac <= 1.0:
        raise DataError(f"frac must be in (0, 1], got {frac}")
    size = math.ceil(frac * ds.n)
    if size < 2:
        raise DataError(f"sample of {size} row(s) is too small; need at least 2")
    rng = np.random.default_rng(seed)
    rows = rng.choice(ds.n, size=size, replace=replace)
    return ds.take(rows)


def load_csv(path: str | os.PathLike, target: str, categorical_cols: Iterable[str] = ()) -> Dataset:
    """Read a header-first comma-separated file into a :class:`Dataset`.

    Every non-target column must parse as float unless it is listed in
    ``categorical_cols``; those are label-encoded lexicographically. Rows with
    an empty cell are rejected.
    """
    categorical_cols = set(categorical_cols)
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    if target not in header:
        raise DataError(f"target column {target!r} not found in {path}")
    unknown = categorical_cols - set(header)
    if unknown:
        raise DataError(f"categorical columns not found: {sorted(unknown)}")
    if len(set(header)) != len(header):
        raise DataError("duplicate column names in header")
    if not rows:
        raise DataError(f"{path}: no data rows")

    width = len(header)
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataError(f"row {i + 1}: expected {width} fields, got {len(r)}")
        for c, cell in enumerate(r):
            if cell.strip() == "":
                raise DataError(f"row {i + 1}: missing value in column {header[c]!r}")

    def parse_float_column(c: int) -> np.ndarray:
        out = np.empty(len(rows))
        for i, r in enumerate(rows):
            try:
                out[i] = float(r[c])
            except ValueError:
                raise DataError(f"row {i + 1}: cannot parse {r[c]!r} in column {header[c]!r} as a number") from None
            if not math.isfinite(out[i]):
                raise DataError(f"row {i + 1}: non-finite value in column {header[c]!r}")
        return out

    t = header.index(target)
    y = parse_float_column(t)
    names, kinds, cols, levels = [], [], [], {}
    for c, name in enumerate(header):
        if c == t:
            continue
        if name in categorical_cols:
            codes, lv = encode_categoricals([r[c].strip() for r in rows])
            levels[len(names)] = tuple(lv)
            cols.append(codes.astype(float))
            kinds.append(FeatureKind.CATEGORICAL)
        else:
            cols.append(parse_float_column(c))
            kinds.append(FeatureKind.NUMERIC)
        names.append(name)
    if not names:
        raise DataError("no feature columns besides the target")
    X = np.column_stack(cols)
    return Dataset(tuple(names), tuple(kinds), X, y, levels)


def to_csv_text(ds: Dataset, target: str = "y") -> str:
    """Serialize back to CSV; categorical codes are written as level text when known."""
    lines = [",".join([*ds.feature_names, target])]
    for i in range(ds.n):
        cells = []
        for j in range(ds.p):
            v = ds.X[i, j]
            if ds.is_categorical(j):
                code = int(v)
                cells.append(ds.levels[j][code] if j in ds.levels else str(code))
            else:
                cells.append(repr(float(v)))
        cells.append(repr(float(ds.y[i])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
