"""Nonparametric feature impact and importance estimated directly from data."""

__version__ = "0.1.0"

from .dataset import Dataset, FeatureKind, Histogram, encode_categoricals, histogram, load_csv, sample_rows
from .errors import DataError, NumericError, StratImpactError
from .impact import FeatureScore, ImportanceReport, compute_all, stability_trials
from .pd_estimation import CatPD, PDCurve, StratParams, catstratpd, stratpd_numeric
from .synth import SynthSpec, gen_linear, gen_quadratic

__all__ = [
    "CatPD",
    "DataError",
    "Dataset",
    "FeatureKind",
    "FeatureScore",
    "Histogram",
    "ImportanceReport",
    "NumericError",
    "PDCurve",
    "StratImpactError",
    "StratParams",
    "SynthSpec",
    "catstratpd",
    "compute_all",
    "encode_categoricals",
    "gen_linear",
    "gen_quadratic",
    "histogram",
    "load_csv",
    "sample_rows",
    "stability_trials",
    "stratpd_numeric",
]
