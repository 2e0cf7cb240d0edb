"""Simulation log container, CSV round-trip and summary metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

COLUMNS = (
    "t", "v", "v_hat", "omega_r", "omega_ref_f", "beta", "beta_ref_tilde", "T_g_tilde",
    "P_g", "x_T", "x_I", "x_I_pitch", "h_a1", "h_a2", "h_a3", "h_a4", "f1", "f2",
)

PARTIAL_F1 = 0.01
FULL_F1 = 0.99


class LogParseError(ValueError):
    pass


class MetricsError(ValueError):
    pass


class TimeSeriesLog:
    """Column store with a fixed column order; rows are appended per step."""

    def __init__(self, data: dict | None = None):
        if data is None:
            self._rows: list[tuple] = []
            self._cols = None
        else:
            missing = [c for c in COLUMNS if c not in data]
            if missing:
                raise ValueError(f"missing columns {missing}")
            self._rows = []
            self._cols = {c: np.asarray(data[c], dtype=float) for c in COLUMNS}

    def append(self, row: tuple) -> None:
        if self._cols is not None:
            raise RuntimeError("log is frozen")
        self._rows.append(row)

    def _columns(self) -> dict:
        if self._cols is None:
            arr = (np.array(self._rows, dtype=float) if self._rows
                   else np.empty((0, len(COLUMNS))))
            self._cols = {c: arr[:, i] for i, c in enumerate(COLUMNS)}
            self._rows = []
        return self._cols

    def __getitem__(self, name: str) -> np.ndarray:
        return self._columns()[name]

    def __len__(self) -> int:
        return len(self._columns()["t"])

    def as_array(self) -> np.ndarray:
        cols = self._columns()
        return np.column_stack([cols[c] for c in COLUMNS]) if len(self) else np.empty((0, len(COLUMNS)))


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def write_csv(log: TimeSeriesLog, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in log.as_array():
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_csv(path) -> TimeSeriesLog:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise LogParseError(f"{path}:1: empty file") from None
        for name in COLUMNS:
            if name not in header:
                raise LogParseError(f"{path}:1: missing column {name!r}")
        index = [header.index(c) for c in COLUMNS]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise LogParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(row[i]) for i in index])
            except ValueError:
                raise LogParseError(f"{path}:{lineno}: non-numeric field") from None
    arr = np.array(rows, dtype=float).reshape(-1, len(COLUMNS))
    return TimeSeriesLog({c: arr[:, i] for i, c in enumerate(COLUMNS)})


def write_long_csv(log: TimeSeriesLog, path) -> None:
    """Plot-ready long format: ``t, variable, value``."""
    cols = log._columns()
    with Path(path).open("w", newline="") as fh:
        fh.write("t,variable,value\n")
        for name in COLUMNS[1:]:
            for t, x in zip(cols["t"], cols[name]):
                fh.write(f"{_fmt(t)},{name},{_fmt(x)}\n")


@dataclass
class Metrics:
    max_step_jump_Tg: float
    max_step_jump_beta: float
    power_rmse_fullload: float
    lambda_rmse_partialload: float
    tower_std: float
    transition_count: int
    rows_partial: int
    rows_full: int
    rows_transition: int

    def to_dict(self) -> dict:
        return asdict(self)


def classify_rows(log: TimeSeriesLog) -> np.ndarray:
    """``0`` partial load, ``1`` full load, ``2`` transition, by the pitch gate ``f1``."""
    f1 = log["f1"]
    return np.where(f1 < PARTIAL_F1, 0, np.where(f1 > FULL_F1, 1, 2))


def count_transitions(signal: np.ndarray, window: int) -> int:
    """Sign changes of ``signal`` that persist for at least ``window`` samples."""
    signs = np.where(signal >= 0.0, 1, -1)
    count, confirmed, run_sign, run = 0, signs[0], signs[0], 0
    for s in signs:
        if s == run_sign:
            run += 1
        else:
            run_sign, run = s, 1
        if run_sign != confirmed and run >= window:
            confirmed = run_sign
            count += 1
    return count


def compute_metrics(log: TimeSeriesLog, params, debounce: float = 1.0) -> Metrics:
    """Summary metrics; ``lambda_rmse_partialload`` is relative to ``lambda_opt``."""
    n = len(log)
    if n < 2:
        raise MetricsError("log needs at least two rows")
    t = log["t"]
    dt = float(np.median(np.diff(t)))
    window = max(int(round(debounce / dt)), 1)
    if n < window:
        raise MetricsError(f"log spans {n} rows, shorter than the {debounce} s debounce window")
    cls = classify_rows(log)

    def rmse(x):
        return float(math.sqrt(np.mean(x ** 2))) if x.size else 0.0

    lam = log["omega_r"] * params.R / log["v"]
    return Metrics(
        max_step_jump_Tg=float(np.max(np.abs(np.diff(log["T_g_tilde"])))),
        max_step_jump_beta=float(np.max(np.abs(np.diff(log["beta_ref_tilde"])))),
        power_rmse_fullload=rmse(log["P_g"][cls == 1] - 1.0),
        lambda_rmse_partialload=rmse(lam[cls == 0] / params.lambda_opt - 1.0),
        tower_std=float(np.std(log["x_T"])),
        transition_count=count_transitions(log["omega_r"] - params.omega_r_rated, window),
        rows_partial=int(np.sum(cls == 0)),
        rows_full=int(np.sum(cls == 1)),
        rows_transition=int(np.sum(cls == 2)),
    )
