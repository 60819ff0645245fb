"""Reconstruction error metrics: MSE@N, VAR@N and relative improvement."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


def _squared_errors(truth, recon, mask):
    truth = np.asarray(truth, dtype=np.float64)
    recon = np.asarray(recon, dtype=np.float64)
    if truth.ndim == 1:
        truth = truth[:, None]
    if recon.ndim == 1:
        recon = recon[:, None]
    if truth.shape != recon.shape:
        raise ArgumentError(f"shape mismatch: truth {truth.shape} vs recon {recon.shape}")
    if truth.ndim != 2 or truth.shape[1] < 1:
        raise ArgumentError("expected an (m, M) matrix with M >= 1")
    err = (truth - recon) ** 2
    if mask is not None:
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.size != err.shape[0]:
            raise ArgumentError(f"mask has {mask.size} cells, data has {err.shape[0]}")
        err = err[mask]
    return err


def per_cell_mse(truth, recon, mask=None) -> np.ndarray:
    """Temporal mean of the squared error at each (valid) cell."""
    return _squared_errors(truth, recon, mask).mean(axis=1)


def mse_at_n(truth, recon, mask=None) -> float:
    """Mean squared error over all valid cells and snapshots of ``(m, M)`` matrices."""
    return float(_squared_errors(truth, recon, mask).mean())


def var_at_n(truth, recon, mask=None) -> float:
    """Population variance across cells of each cell's temporal-mean squared error."""
    err = _squared_errors(truth, recon, mask)
    cell = err.mean(axis=1)
    return float(np.mean((cell - err.mean()) ** 2))


def improvement_pct(benchmark: float, proposed: float) -> float:
    if benchmark == 0:
        raise ArgumentError("benchmark value must be non-zero")
    return (benchmark - proposed) / benchmark * 100.0


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one strategy; ``per_cell_var`` averages to ``var``."""

    strategy: str
    n_sensors: int
    mse: float
    var: float
    per_cell_mse: np.ndarray
    per_cell_var: np.ndarray
    error: str | None = None  # set when the strategy could not be evaluated

    @classmethod
    def compute(cls, strategy, n_sensors, truth, recon, mask=None) -> "EvalReport":
        err = _squared_errors(truth, recon, mask)
        cell = err.mean(axis=1)
        spread = (cell - err.mean()) ** 2
        return cls(
            strategy=strategy,
            n_sensors=n_sensors,
            mse=float(err.mean()),
            var=float(np.mean(spread)),
            per_cell_mse=cell,
            per_cell_var=spread,
        )

    @property
    def n_cells(self) -> int:
        return self.per_cell_mse.size


CSV_HEADER = ("strategy", "n_sensors", "mse", "var")


def reports_to_csv(reports) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in reports:
        writer.writerow([rep.strategy, rep.n_sensors, repr(rep.mse), repr(rep.var)])
    return out.getvalue()


def read_metrics_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        row["n_sensors"] = int(row["n_sensors"])
        row["mse"] = float(row["mse"])
        row["var"] = float(row["var"])
    return rows


def per_cell_csv(report: EvalReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("cell", "mse", "var"))
    for k, (a, b) in enumerate(zip(report.per_cell_mse, report.per_cell_var)):
        writer.writerow([k, repr(float(a)), repr(float(b))])
    return out.getvalue()
