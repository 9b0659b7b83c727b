"""CSV ingestion of datasets and CSV emission of experiment results."""

import csv
import math
import warnings

import numpy as np

from .exceptions import InputError
from .krr import Dataset
from .sim import ErrorRecord, FrontierRecord

RECORD_HEADER = ("N", "m", "lambda", "trial", "mse", "fit_seconds", "status")
THEORY_HEADER = ("N", "m", "lambda", "d", "gamma", "T1", "T2", "T3", "leading", "total", "constant_caveat")
FRONTIER_HEADER = ("method", "setting", "lambda", "mse", "fit_seconds")


class ConstantColumnWarning(UserWarning):
    """A feature column has zero spread and was left unscaled."""


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def ingest_csv(path, target_column, standardize=False):
    """Read a headed numeric CSV into a :class:`Dataset`.

    Every column other than ``target_column`` is a feature. With
    ``standardize`` each feature column is divided by its population
    standard deviation (``ddof=0``); means are left untouched and constant
    columns are left as they are, with a :class:`ConstantColumnWarning`.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise InputError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise InputError(f"{path}: no data rows")
    if target_column not in header:
        raise InputError(f"{path}: target column {target_column!r} not in header {header}")
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise InputError(f"{path}: row {i} has {len(row)} fields, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                values[i - 1, j] = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}: non-numeric value {cell!r} in column {header[j]!r} at row {i} (line {i + 1})"
                ) from None
    t = header.index(target_column)
    y = values[:, t]
    feature_names = [h for j, h in enumerate(header) if j != t]
    X = np.delete(values, t, axis=1)
    if X.shape[1] == 0:
        raise InputError(f"{path}: no feature columns besides the target")
    if standardize:
        sd = X.std(axis=0)
        const = sd == 0
        for j in np.flatnonzero(const):
            warnings.warn(f"{path}: feature column {feature_names[j]!r} is constant; left unscaled", ConstantColumnWarning)
        sd[const] = 1.0
        X = X / sd
    return Dataset(X, y)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_records(records, path, timing=True):
    """Write :class:`ErrorRecord` rows sorted by ``(N, m, trial)``.

    With ``timing=False`` the ``fit_seconds`` column is written as 0 so
    reruns produce byte-identical files.
    """
    rows = []
    for r in sorted(records, key=ErrorRecord.sort_key):
        secs = r.fit_seconds if timing else 0.0
        rows.append([fmt(r.N), fmt(r.m), fmt(r.lam), fmt(r.trial), fmt(r.mse), fmt(secs), r.status])
    _write(path, RECORD_HEADER, rows)


def read_records(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != RECORD_HEADER:
            raise InputError(f"{path}: unexpected header {header}")
        return [
            ErrorRecord(int(N), int(m), float(lam), int(t), float(mse), float(s), status)
            for N, m, lam, t, mse, s, status in reader
        ]


def emit_theory(reports, path):
    rows = [
        [
            fmt(r.N), fmt(r.m), fmt(r.lam), fmt(r.best_d), fmt(r.gamma), fmt(r.T1), fmt(r.T2),
            fmt(r.T3), fmt(r.leading), fmt(r.total), fmt(r.constant_caveat),
        ]
        for r in sorted(reports, key=lambda r: (r.N, r.m, r.lam, r.best_d))
    ]
    _write(path, THEORY_HEADER, rows)


def emit_frontier(records, path, timing=True):
    rows = [
        [r.method, fmt(r.setting), fmt(r.lam), fmt(r.mse), fmt(r.fit_seconds if timing else 0.0)]
        for r in sorted(records, key=FrontierRecord.sort_key)
    ]
    _write(path, FRONTIER_HEADER, rows)


def emit_table(header, rows, path):
    _write(path, header, [[fmt(v) if not isinstance(v, str) else v for v in row] for row in rows])
