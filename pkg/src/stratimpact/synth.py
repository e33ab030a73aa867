"""Synthetic regression data with analytically known partial dependence.

All draws use numpy's ``default_rng`` (PCG64 bit generator), so a given seed
reproduces a dataset row-for-row on any numpy >= 1.17.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, FeatureKind
from .errors import DataError


@dataclass(frozen=True)
class SynthSpec:
    kind: str = "linear"
    n: int = 1000
    seed: int = 1
    betas: Sequence[float] = (1.0,)
    ranges: Sequence[tuple[float, float]] = ((0.0, 1.0),)
    noise_sd: float = 0.0

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic"):
            raise DataError(f"unknown synthetic kind {self.kind!r}")
        if self.n < 10:
            raise DataError("n must be >= 10")
        if self.noise_sd < 0:
            raise DataError("noise_sd must be >= 0")
        for lo, hi in self.ranges:
            if not hi > lo:
                raise DataError(f"invalid range ({lo}, {hi})")


def _numeric(names, X, y) -> Dataset:
    return Dataset(tuple(names), (FeatureKind.NUMERIC,) * len(names), X, y)


def gen_quadratic(n: int = 1000, seed: int = 1, with_noise_feature: bool = False) -> Dataset:
    """``y = x1**2 + x2 + 100`` with ``x1, x2 ~ U(0, 3)``; optional unused ``x3 ~ U(0, 3)``."""
    if n < 10:
        raise DataError("n must be >= 10")
    rng = np.random.default_rng(seed)
    p = 3 if with_noise_feature else 2
    X = rng.uniform(0.0, 3.0, size=(n, p))
    y = X[:, 0] ** 2 + X[:, 1] + 100
    return _numeric([f"x{i + 1}" for i in range(p)], X, y)


def gen_linear(spec: SynthSpec) -> Dataset:
    """``y = sum_j beta_j * x_j + N(0, noise_sd**2)`` with independent uniform features."""
    betas = np.asarray(spec.betas, dtype=float)
    if len(betas) != len(spec.ranges):
        raise DataError(f"{len(betas)} betas but {len(spec.ranges)} ranges")
    rng = np.random.default_rng(spec.seed)
    lo = np.array([r[0] for r in spec.ranges], dtype=float)
    hi = np.array([r[1] for r in spec.ranges], dtype=float)
    X = rng.uniform(lo, hi, size=(spec.n, len(betas)))
    y = X @ betas
    if spec.noise_sd > 0:
        y = y + rng.normal(0.0, spec.noise_sd, size=spec.n)
    return _numeric([f"x{i + 1}" for i in range(len(betas))], X, y)

