"""End-to-end comparison of placement strategies and reconstructors.

Every strategy is evaluated on the held-out (later-in-time) part of a
series. Placement and bases are fitted on the training part only.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data_io import SnapshotSeries, split_series
from .errors import NumericalError
from .linear_recon import fit_principal_basis, random_placement, reconstruct_linear
from .metrics import EvalReport
from .neural_recon import NeuralReconstructor, TrainConfig, reconstruct_series, train
from .placement import Placement, measure, select_sampling_locations

STRATEGIES = ("qr+linear", "rand+linear", "qr+neural", "rand+neural")


@dataclass
class ExperimentConfig:
    n_sensors: int
    train_fraction: float = 0.7
    rand_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    hidden_layer_count: int = 2
    strategies: tuple = STRATEGIES
    # "raise" propagates numerical failures; "nan" records a NaN row instead
    on_error: str = "raise"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SPARSEFIELD_THREADS", "1")))
    except ValueError:
        return 1


def make_placement(kind: str, train: SnapshotSeries, n_sensors: int, seed: int = 0) -> Placement:
    if kind == "qr":
        return select_sampling_locations(train, n_sensors)
    if kind == "rand":
        return random_placement(train.n_cells, n_sensors, seed, mask=train.valid,
                                height=train.height, width=train.width)
    raise ValueError(f"unknown placement strategy {kind!r}")


def linear_prediction(train: SnapshotSeries, test: SnapshotSeries, placement: Placement) -> np.ndarray:
    basis = fit_principal_basis(train, placement_rank(placement, train))
    recon = reconstruct_linear(basis, placement, measure(placement, test.matrix))
    recon[~test.valid] = 0.0
    return recon


def placement_rank(placement: Placement, train: SnapshotSeries) -> int:
    return min(len(placement), train.n_cells, train.n_snapshots)


def neural_prediction(train_part: SnapshotSeries, test: SnapshotSeries, placement: Placement,
                      config: TrainConfig, hidden_layer_count: int = 2):
    model = NeuralReconstructor.initialize(placement, seed=config.seed,
                                           hidden_layer_count=hidden_layer_count)
    result = train(model, train_part, config)
    recon, _ = reconstruct_series(result.model, test)
    return recon, result


def run_experiment(series: SnapshotSeries, config: ExperimentConfig) -> list[EvalReport]:
    """Evaluate each requested strategy; rows come back in ``config.strategies`` order."""
    train_part, test_part = split_series(series, config.train_fraction)
    placements = {}
    for name in config.strategies:
        kind = name.split("+")[0]
        if kind not in placements:
            placements[kind] = make_placement(kind, train_part, config.n_sensors, config.rand_seed)

    def evaluate(name):
        try:
            return _evaluate(name)
        except NumericalError as exc:
            if config.on_error != "nan":
                raise
            nan = np.full(int(test_part.valid.sum()), np.nan)
            return EvalReport(name, len(placements[name.split("+")[0]]), math.nan, math.nan,
                              nan, nan.copy(), error=str(exc))

    def _evaluate(name):
        kind, recon_kind = name.split("+")
        pl = placements[kind]
        if recon_kind == "linear":
            recon = linear_prediction(train_part, test_part, pl)
        elif recon_kind == "neural":
            recon, _ = neural_prediction(train_part, test_part, pl, config.train,
                                         config.hidden_layer_count)
        else:
            raise ValueError(f"unknown reconstructor {recon_kind!r}")
        return EvalReport.compute(name, len(pl), test_part.matrix, recon, test_part.valid)

    workers = min(thread_count(), len(config.strategies))
    if workers == 1:
        return [evaluate(name) for name in config.strategies]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, config.strategies))


def average_reports(runs: list[list[EvalReport]]) -> list[EvalReport]:
    """Average matching rows across repeated runs (e.g. several training seeds)."""
    out = []
    for rows in zip(*runs):
        out.append(EvalReport(
            strategy=rows[0].strategy,
            n_sensors=rows[0].n_sensors,
            mse=float(np.mean([r.mse for r in rows])),
            var=float(np.mean([r.var for r in rows])),
            per_cell_mse=np.mean([r.per_cell_mse for r in rows], axis=0),
            per_cell_var=np.mean([r.per_cell_var for r in rows], axis=0),
        ))
    return out
