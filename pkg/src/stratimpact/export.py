"""CSV/JSON writers for reports, curves and rankings.

Floats are written with ``repr`` (shortest round-trip form) so reruns are
byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict
from typing import Iterable

from .dataset import Dataset
from .evaluator import MAECurve
from .impact import ImportanceReport
from .pd_estimation import CatPD, PDCurve
from .rankers import Ranking

REPORT_COLUMNS = (
    "feature",
    "kind",
    "impact",
    "impact_norm",
    "importance",
    "importance_norm",
    "impact_sd",
    "importance_sd",
    "coverage",
)


def fmt(x) -> str:
    return repr(float(x))


def _csv(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"' if any(c in s for c in ',"\n') else s


def report_rows(report: ImportanceReport) -> list[dict]:
    return [
        {
            "feature": s.name,
            "kind": s.kind,
            "impact": s.impact_raw,
            "impact_norm": s.impact_norm,
            "importance": s.importance_raw,
            "importance_norm": s.importance_norm,
            "impact_sd": s.impact_sd,
            "importance_sd": s.importance_sd,
            "coverage": s.coverage,
        }
        for s in report.scores
    ]


def report_csv(report: ImportanceReport) -> str:
    return _csv(
        REPORT_COLUMNS,
        ([_quote(r["feature"]), r["kind"], *(fmt(r[c]) for c in REPORT_COLUMNS[2:])] for r in report_rows(report)),
    )


def report_json(report: ImportanceReport, meta: dict | None = None) -> str:
    doc = {
        "meta": {
            "seed": report.seed,
            "trials": report.trials,
            "sample_frac": report.sample_frac,
            "mode": report.mode,
            "params": asdict(report.params),
            **(meta or {}),
        },
        "features": report_rows(report),
    }
    return json.dumps(doc, indent=2) + "\n"


def pd_curve_csv(curve: PDCurve) -> str:
    return _csv(("x", "pd", "count"), ((fmt(x), fmt(v), str(int(c))) for x, v, c in zip(curve.xs, curve.pd, curve.counts)))


def catpd_csv(c: CatPD, ds: Dataset | None = None) -> str:
    names = ds.levels.get(c.feature) if ds is not None else None
    rows = []
    for code in c.levels:
        level = names[code] if names is not None else str(int(code))
        rows.append((_quote(level), str(int(code)), fmt(c.pd_centered[code]), str(int(c.counts[code])), str(bool(c.observed[code])).lower()))
    return _csv(("level", "code", "pd_centered", "count", "observed"), rows)


def curves_csv(curves: list[MAECurve]) -> str:
    rows = []
    for c in curves:
        for k, m, s in zip(c.k_values, c.mae, c.mae_sd):
            rows.append((c.method, str(int(k)), fmt(m), fmt(s)))
    return _csv(("method", "k", "mae", "mae_sd"), rows)


def rankings_csv(rankings: list[Ranking], ds: Dataset) -> str:
    rows = []
    for r in rankings:
        for rank, j in enumerate(r.order, start=1):
            rows.append((r.method, str(rank), _quote(ds.feature_names[j]), fmt(r.scores[j])))
    return _csv(("method", "rank", "feature", "score"), rows)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
