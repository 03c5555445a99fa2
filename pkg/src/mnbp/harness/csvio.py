"""CSV emission. Floats use 6 significant digits; NaN is written as ``nan``."""
from __future__ import annotations

import csv
import math
from pathlib import Path

from .experiment import DeltaPCurve, ExperimentStats, TrialRecord

TRIALS_FIELDS = ("trial", "seed", "t_sus", "t_pus", "conv_sus", "conv_pus", "errs_sus", "errs_pus")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6g}"
    if value is None:
        return ""
    return str(value)


def _write(path, header, rows) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_stats_csv(stats: list[ExperimentStats], path) -> None:
    rows = [[getattr(s, f) for f in ExperimentStats.CSV_FIELDS] for s in stats]
    _write(path, ExperimentStats.CSV_FIELDS, rows)


def write_curve_csv(curve: DeltaPCurve, path) -> None:
    rows = [[b.low, b.high, b.mean_dp_pus, b.mean_dp_sus,
             "" if math.isnan(b.ratio) else b.ratio, b.n_pus, b.n_sus]
            for b in curve.bins]
    _write(path, DeltaPCurve.CSV_FIELDS, rows)


def write_trials_csv(records: list[TrialRecord], path) -> None:
    rows = [[r.trial, r.seed,
             r.iterations.get("sus"), r.iterations.get("pus"),
             r.converged.get("sus"), r.converged.get("pus"),
             r.bit_errors.get("sus"), r.bit_errors.get("pus")]
            for r in sorted(records, key=lambda r: r.trial)]
    _write(path, TRIALS_FIELDS, rows)


def write_csv(obj, path) -> None:
    """Dispatch on the object type: stats list, single stats row, or curve."""
    if isinstance(obj, DeltaPCurve):
        write_curve_csv(obj, path)
    elif isinstance(obj, ExperimentStats):
        write_stats_csv([obj], path)
    else:
        write_stats_csv(list(obj), path)
