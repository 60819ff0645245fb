"""Sparse sensor placement and field reconstruction on gridded spatiotemporal data."""
from .data_io import FieldSnapshot, SnapshotSeries, load_series, save_series, split_series, synth_series
from .errors import (
    ArgumentError,
    ConvergenceError,
    DegeneracyError,
    NumericalError,
    ParseError,
    SingularityError,
    SparseFieldError,
)
from .linear_recon import PrincipalBasis, fit_principal_basis, random_placement, reconstruct_linear
from .metrics import EvalReport, improvement_pct, mse_at_n, var_at_n
from .neural_recon import NeuralReconstructor, TrainConfig, gradient_check, reconstruct_series, train
from .placement import Placement, analyze_connectivity, insert_bridges, measure, select_sampling_locations

__version__ = "0.1.0"
