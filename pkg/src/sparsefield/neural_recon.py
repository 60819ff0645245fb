"""Recurrent field reconstructor: sensor readings -> LSTM cell -> ReLU MLP -> field.

The model reads the ``r`` sensor values of each (min-max normalized)
snapshot, advances an LSTM cell whose state size is also ``r``, and maps the
hidden state back to all ``m`` grid cells through an even number of hidden
ReLU layers (alternating widths ``m`` and ``r``) followed by a ReLU output
layer. Gradients are computed by hand with backpropagation through time over
one training window; everything runs in float64 numpy.

Parameters live in a flat ordered dict whose keys double as checkpoint order
and as the paths named in gradient-check reports::

    lstm.w_f lstm.b_f lstm.w_i lstm.b_i lstm.w_c lstm.b_c lstm.w_o lstm.b_o
    mlp.0.w mlp.0.b ... mlp.out.w mlp.out.b
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import expit

from .data_io import FieldSnapshot, SnapshotSeries
from .errors import ArgumentError, ParseError
from .placement import Placement

GATES = ("f", "i", "c", "o")


sigmoid = expit


@dataclass(frozen=True)
class LstmState:
    c: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, size: int) -> "LstmState":
        return cls(np.zeros(size), np.zeros(size))


@dataclass(frozen=True)
class LstmCellParams:
    """Gate weights act on the concatenation ``[h_prev, y]`` (shape ``r x 2r``)."""

    w_f: np.ndarray
    b_f: np.ndarray
    w_i: np.ndarray
    b_i: np.ndarray
    w_c: np.ndarray
    b_c: np.ndarray
    w_o: np.ndarray
    b_o: np.ndarray

    @property
    def size(self) -> int:
        return self.b_f.shape[0]


@dataclass(frozen=True)
class LstmGates:
    f: np.ndarray
    i: np.ndarray
    c_tilde: np.ndarray
    o: np.ndarray


@dataclass(frozen=True)
class ReconstructorParams:
    layers: tuple  # ((W, b), ...) hidden layers then the output layer

    @property
    def hidden_layer_count(self) -> int:
        return len(self.layers) - 1


@dataclass(frozen=True)
class Normalizer:
    """Min-max scaling to [0, 1]; a constant field maps to zeros."""

    lo: float = 0.0
    hi: float = 1.0

    @classmethod
    def fit(cls, series: SnapshotSeries) -> "Normalizer":
        vals = series.values[:, series.valid]
        return cls(float(vals.min()), float(vals.max()))

    @property
    def zero_range(self) -> bool:
        return self.hi == self.lo

    def normalize(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.zero_range:
            return np.zeros_like(x)
        return (x - self.lo) / (self.hi - self.lo)

    def denormalize(self, x):
        return np.asarray(x, dtype=np.float64) * (self.hi - self.lo) + self.lo


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 20
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    cosine_decay: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ArgumentError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ArgumentError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ArgumentError(f"epochs must be >= 0, got {self.epochs}")


def param_shapes(r: int, m: int, hidden_layer_count: int = 2) -> dict[str, tuple]:
    if hidden_layer_count < 0 or hidden_layer_count % 2:
        raise ArgumentError(f"hidden layer count must be even, got {hidden_layer_count}")
    shapes = {}
    for g in GATES:
        shapes[f"lstm.w_{g}"] = (r, 2 * r)
        shapes[f"lstm.b_{g}"] = (r,)
    for k in range(hidden_layer_count):
        n_out, n_in = (m, r) if k % 2 == 0 else (r, m)
        shapes[f"mlp.{k}.w"] = (n_out, n_in)
        shapes[f"mlp.{k}.b"] = (n_out,)
    shapes["mlp.out.w"] = (m, r)
    shapes["mlp.out.b"] = (m,)
    return shapes


# Positive starts for the biases of ReLU layers. Their inputs are
# non-negative, so with zero biases about half the units begin (and stay)
# dead; a dead output unit would pin its cell to the training minimum.
# Output units start at the centre of the normalized target range.
RELU_BIAS_INIT = 0.1
OUTPUT_BIAS_INIT = 0.5


@dataclass
class NeuralReconstructor:
    placement: Placement
    params: dict
    norm: Normalizer = field(default_factory=Normalizer)
    state: LstmState | None = None

    def __post_init__(self):
        r = len(self.placement)
        if self.params["lstm.b_f"].shape[0] != r:
            raise ArgumentError("LSTM state size must equal the number of sensors")
        if self.params["mlp.out.b"].shape[0] != self.placement.n_cells:
            raise ArgumentError("output layer must cover every grid cell")
        if self.state is None:
            self.state = LstmState.zeros(r)

    @classmethod
    def initialize(cls, placement: Placement, seed: int = 0, hidden_layer_count: int = 2,
                   norm: Normalizer | None = None,
                   relu_bias: float = RELU_BIAS_INIT,
                   output_bias: float = OUTPUT_BIAS_INIT) -> "NeuralReconstructor":
        """Seeded initialization.

        Weights are zero-mean uniform with the Glorot half-width
        ``sqrt(6 / (fan_in + fan_out))``. LSTM biases start at zero, hidden
        ReLU biases at ``relu_bias`` and output biases at ``output_bias``.
        """
        shapes = param_shapes(len(placement), placement.n_cells, hidden_layer_count)
        rng = np.random.Generator(np.random.PCG64(seed))
        params = {}
        for name, shape in shapes.items():
            if len(shape) == 2:
                bound = math.sqrt(6.0 / (shape[0] + shape[1]))
                params[name] = rng.uniform(-bound, bound, size=shape)
            elif name == "mlp.out.b":
                params[name] = np.full(shape, output_bias)
            elif name.startswith("mlp."):
                params[name] = np.full(shape, relu_bias)
            else:
                params[name] = np.zeros(shape)
        return cls(placement, params, norm or Normalizer())

    @classmethod
    def zeros(cls, placement: Placement, hidden_layer_count: int = 2,
              norm: Normalizer | None = None) -> "NeuralReconstructor":
        shapes = param_shapes(len(placement), placement.n_cells, hidden_layer_count)
        return cls(placement, {k: np.zeros(s) for k, s in shapes.items()}, norm or Normalizer())

    @property
    def r(self) -> int:
        return len(self.placement)

    @property
    def m(self) -> int:
        return self.placement.n_cells

    @property
    def hidden_layer_count(self) -> int:
        return sum(1 for k in self.params if k.startswith("mlp.") and k.endswith(".w")) - 1

    @property
    def lstm(self) -> LstmCellParams:
        return LstmCellParams(**{k.split(".", 1)[1]: v for k, v in self.params.items() if k.startswith("lstm.")})

    @property
    def mlp(self) -> ReconstructorParams:
        names = [f"mlp.{k}" for k in range(self.hidden_layer_count)] + ["mlp.out"]
        return ReconstructorParams(tuple((self.params[n + ".w"], self.params[n + ".b"]) for n in names))

    def copy(self) -> "NeuralReconstructor":
        return NeuralReconstructor(
            self.placement,
            {k: v.copy() for k, v in self.params.items()},
            self.norm,
            LstmState(self.state.c.copy(), self.state.h.copy()),
        )

    def reset_state(self) -> "NeuralReconstructor":
        return replace(self, state=LstmState.zeros(self.r))


# --------------------------------------------------------------------------
# single-step operations


def lstm_gates(params: LstmCellParams, state: LstmState, y) -> LstmGates:
    z = np.concatenate([state.h, np.asarray(y, dtype=np.float64)])
    if z.shape[0] != params.w_f.shape[1] or state.c.shape[0] != params.size:
        raise ArgumentError(
            f"LSTM expects state size {params.size} and {params.w_f.shape[1] - params.size} inputs"
        )
    return LstmGates(
        f=sigmoid(params.w_f @ z + params.b_f),
        i=sigmoid(params.w_i @ z + params.b_i),
        c_tilde=np.tanh(params.w_c @ z + params.b_c),
        o=sigmoid(params.w_o @ z + params.b_o),
    )


def lstm_step(params: LstmCellParams, state: LstmState, y) -> LstmState:
    g = lstm_gates(params, state, y)
    c = g.f * state.c + g.i * g.c_tilde
    return LstmState(c, g.o * np.tanh(c))


def mlp_forward(params: ReconstructorParams, h) -> np.ndarray:
    x = np.asarray(h, dtype=np.float64)
    if x.shape[-1] != params.layers[0][0].shape[1]:
        raise ArgumentError(f"reconstructor expects {params.layers[0][0].shape[1]} inputs, got {x.shape[-1]}")
    for w, b in params.layers:
        x = np.maximum(x @ w.T + b, 0.0)
    return x


def forward(model: NeuralReconstructor, snapshot: FieldSnapshot | np.ndarray):
    """One time step: returns ``(reconstruction, new_state)``; the model is not mutated."""
    values = snapshot.values if isinstance(snapshot, FieldSnapshot) else np.asarray(snapshot, dtype=float)
    if values.shape != (model.m,):
        raise ArgumentError(f"snapshot has shape {values.shape}, model expects ({model.m},)")
    y = model.norm.normalize(values[model.placement.indices])
    state = lstm_step(model.lstm, model.state, y)
    out = model.norm.denormalize(mlp_forward(model.mlp, state.h))
    if isinstance(snapshot, FieldSnapshot):
        out = FieldSnapshot(out, snapshot.height, snapshot.width, snapshot.timestamp)
    return out, state


def reconstruct_series(model: NeuralReconstructor, series: SnapshotSeries, reset: bool = True):
    """Stateful reconstruction of a whole sequence; returns ``(m x K matrix, final_state)``.

    The LSTM state is zeroed once before the first snapshot (unless
    ``reset=False``) and carried forward in time order.
    """
    y = model.norm.normalize(series.values[:, model.placement.indices])
    state = LstmState.zeros(model.r) if reset else model.state
    cache = _run_window(model.params, y, state, model.hidden_layer_count)
    out = model.norm.denormalize(cache["out"]).T
    out[~series.valid] = 0.0
    return out, LstmState(cache["c"][-1].copy(), cache["h"][-1].copy())


# --------------------------------------------------------------------------
# window forward / backward


def _mlp_names(hidden_layer_count):
    return [f"mlp.{k}" for k in range(hidden_layer_count)] + ["mlp.out"]


def _run_window(params, y, state, hidden_layer_count):
    """Forward over ``T`` consecutive readings ``y`` (``T x r``) keeping what backward needs."""
    n_steps, r = y.shape
    w_all = np.concatenate([params[f"lstm.w_{g}"] for g in GATES])  # 4r x 2r
    b_all = np.concatenate([params[f"lstm.b_{g}"] for g in GATES])
    z = np.empty((n_steps, 2 * r))
    gates = np.empty((n_steps, 4 * r))
    c = np.empty((n_steps + 1, r))
    h = np.empty((n_steps + 1, r))
    c[0], h[0] = state.c, state.h
    z[:, r:] = y
    # input contributions for all steps at once; only the recurrent part is sequential
    a_in = y @ w_all[:, r:].T + b_all
    w_h = w_all[:, :r]
    for t in range(n_steps):
        z[t, :r] = h[t]
        a = a_in[t] + w_h @ h[t]
        gt = gates[t]
        expit(a, out=gt)
        np.tanh(a[2 * r : 3 * r], out=gt[2 * r : 3 * r])
        c[t + 1] = gt[:r] * c[t] + gt[r : 2 * r] * gt[2 * r : 3 * r]
        h[t + 1] = gt[3 * r :] * np.tanh(c[t + 1])

    xs = [h[1:]]
    pre = []
    for name in _mlp_names(hidden_layer_count):
        a = xs[-1] @ params[name + ".w"].T + params[name + ".b"]
        pre.append(a)
        xs.append(np.maximum(a, 0.0))
    return {"z": z, "gates": gates, "c": c, "h": h, "xs": xs, "pre": pre, "out": xs[-1]}


def _window_backward(params, cache, d_out, hidden_layer_count):
    grads = {}
    names = _mlp_names(hidden_layer_count)
    delta = d_out
    for k in reversed(range(len(names))):
        delta = delta * (cache["pre"][k] > 0)
        grads[names[k] + ".w"] = delta.T @ cache["xs"][k]
        grads[names[k] + ".b"] = delta.sum(axis=0)
        delta = delta @ params[names[k] + ".w"]
    dh_seq = delta  # T x r, loss gradient reaching each h_t through the MLP

    z, gates, c = cache["z"], cache["gates"], cache["c"]
    n_steps, r = dh_seq.shape
    w_h_t = np.concatenate([params[f"lstm.w_{g}"] for g in GATES])[:, :r].T.copy()
    das = np.empty((n_steps, 4 * r))
    dh_next = np.zeros(r)
    dc_next = np.zeros(r)
    for t in reversed(range(n_steps)):
        da = das[t]
        f, i, g, o = gates[t, :r], gates[t, r : 2 * r], gates[t, 2 * r : 3 * r], gates[t, 3 * r :]
        tc = np.tanh(c[t + 1])
        dh = dh_seq[t] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        da[:r] = dc * c[t] * f * (1.0 - f)
        da[r : 2 * r] = dc * g * i * (1.0 - i)
        da[2 * r : 3 * r] = dc * i * (1.0 - g * g)
        da[3 * r :] = dh * tc * o * (1.0 - o)
        dh_next = w_h_t @ da
        dc_next = dc * f
    dw = das.T @ z
    db = das.sum(axis=0)
    for k, gname in enumerate(GATES):
        grads[f"lstm.w_{gname}"] = dw[k * r : (k + 1) * r]
        grads[f"lstm.b_{gname}"] = db[k * r : (k + 1) * r]
    return grads


def _window_loss(model, targets, y, state, weights):
    cache = _run_window(model.params, y, state, model.hidden_layer_count)
    diff = (cache["out"] - targets) * weights
    loss = float(np.sum(diff * diff) / targets.shape[0])
    return loss, cache, diff


def _normalized_batch(model, batch: SnapshotSeries):
    if batch.n_cells != model.m:
        raise ArgumentError(f"batch grid has {batch.n_cells} cells, model expects {model.m}")
    targets = model.norm.normalize(batch.values)
    return targets, targets[:, model.placement.indices], batch.valid.astype(np.float64)


def loss_mse(model: NeuralReconstructor, batch: SnapshotSeries) -> float:
    """Mean over the batch of squared L2 reconstruction error, in normalized units.

    The batch is processed in time order starting from ``model.state``;
    masked cells do not contribute.
    """
    targets, y, weights = _normalized_batch(model, batch)
    return _window_loss(model, targets, y, model.state, weights)[0]


def loss_and_grad(model: NeuralReconstructor, batch: SnapshotSeries):
    """``(loss, grads, end_state)`` for one window; the incoming state is treated as a constant."""
    targets, y, weights = _normalized_batch(model, batch)
    return _loss_and_grad_arrays(model, targets, y, weights, model.state)


def _loss_and_grad_arrays(model, targets, y, weights, state):
    loss, cache, diff = _window_loss(model, targets, y, state, weights)
    d_out = (2.0 / targets.shape[0]) * diff * weights
    grads = _window_backward(model.params, cache, d_out, model.hidden_layer_count)
    end = LstmState(cache["c"][-1].copy(), cache["h"][-1].copy())
    return loss, {k: grads[k] for k in model.params}, end


def backward(model: NeuralReconstructor, batch: SnapshotSeries) -> dict:
    """Gradients of :func:`loss_mse` with respect to every trainable parameter."""
    return loss_and_grad(model, batch)[1]


# --------------------------------------------------------------------------
# optimisation


def learning_rate_at(config: TrainConfig, step_index: int, total_steps: int | None) -> float:
    if not config.cosine_decay or not total_steps:
        return config.learning_rate
    return config.learning_rate * 0.5 * (1.0 + math.cos(math.pi * step_index / total_steps))


def init_moments(params: dict) -> dict:
    return {
        "m": {k: np.zeros_like(v) for k, v in params.items()},
        "v": {k: np.zeros_like(v) for k, v in params.items()},
    }


def adam_step(params: dict, grads: dict, moments: dict, step_index: int, config: TrainConfig,
              total_steps: int | None = None):
    """One bias-corrected Adam update; returns ``(new_params, new_moments)``."""
    if step_index < 1:
        raise ArgumentError(f"step_index must be >= 1, got {step_index}")
    lr = learning_rate_at(config, step_index, total_steps)
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1**step_index
    c2 = 1.0 - b2**step_index
    new_params, new_m, new_v = {}, {}, {}
    for k, p in params.items():
        g = grads[k]
        m = b1 * moments["m"][k] + (1.0 - b1) * g
        v = b2 * moments["v"][k] + (1.0 - b2) * (g * g)
        new_params[k] = p - lr * (m / c1) / (np.sqrt(v / c2) + config.epsilon)
        new_m[k], new_v[k] = m, v
    return new_params, {"m": new_m, "v": new_v}


@dataclass
class TrainResult:
    model: NeuralReconstructor
    loss_history: list[float]


def train(model: NeuralReconstructor, train_series: SnapshotSeries, config: TrainConfig) -> TrainResult:
    """Fit the model to a time-ordered training series with Adam.

    Each epoch zeroes the LSTM state and walks the series in consecutive
    windows of ``batch_size`` snapshots (the last one may be shorter). The
    state is carried from window to window, while gradients stop at window
    boundaries. Normalization constants are fitted on ``train_series``.
    The returned history holds the loss of every optimizer step.
    """
    n = train_series.n_snapshots
    if config.batch_size > n:
        raise ArgumentError(f"batch_size {config.batch_size} exceeds the {n} training snapshots")
    model = replace(model.copy(), norm=Normalizer.fit(train_series))
    targets, y, weights = _normalized_batch(model, train_series)
    starts = list(range(0, n, config.batch_size))
    total = config.epochs * len(starts)
    moments = init_moments(model.params)
    history = []
    step = 0
    for _ in range(config.epochs):
        state = LstmState.zeros(model.r)
        for s in starts:
            e = min(s + config.batch_size, n)
            loss, grads, state = _loss_and_grad_arrays(model, targets[s:e], y[s:e], weights, state)
            if not math.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at optimizer step {step + 1}")
            step += 1
            model.params, moments = adam_step(model.params, grads, moments, step, config, total)
            history.append(loss)
        model.state = state
    for k, v in model.params.items():
        if not np.all(np.isfinite(v)):
            raise FloatingPointError(f"parameter {k} became non-finite during training")
    return TrainResult(model, history)


# --------------------------------------------------------------------------
# gradient verification


@dataclass
class GradientCheckReport:
    max_deviation: float
    group_deviation: dict
    worst_path: str
    passed: bool
    tolerance: float
    n_checked: int
    n_kink_skipped: int

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} max_rel_dev={self.max_deviation:.3e} at {self.worst_path} (tol {self.tolerance:g})"


def _group(name: str) -> str:
    if name.startswith("lstm."):
        return "lstm." + name[-1]
    return name.rsplit(".", 1)[0]


def _relu_pattern(cache):
    return [p > 0 for p in cache["pre"]]


def gradient_check(model: NeuralReconstructor, batch: SnapshotSeries, tolerance: float = 1e-5,
                   step: float = 1e-5, analytic: dict | None = None,
                   floor: float = 1e-6) -> GradientCheckReport:
    """Compare analytic gradients with central differences, component by component.

    Deviation is ``|a - n| / max(|a|, |n|, floor)``. Components whose
    perturbation flips any ReLU on or off are excluded, since the loss is not
    differentiable there; they are counted in ``n_kink_skipped``.
    """
    targets, y, weights = _normalized_batch(model, batch)
    if analytic is None:
        analytic = _loss_and_grad_arrays(model, targets, y, weights, model.state)[1]
    probe = model.copy()
    worst, worst_path = 0.0, "none"
    groups: dict[str, float] = {}
    checked = skipped = 0
    for name, value in probe.params.items():
        groups.setdefault(_group(name), 0.0)
        flat = value.reshape(-1)
        grad = np.asarray(analytic[name]).reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + step
            lp, cp, _ = _window_loss(probe, targets, y, probe.state, weights)
            flat[j] = orig - step
            lm, cm, _ = _window_loss(probe, targets, y, probe.state, weights)
            flat[j] = orig
            if any(np.any(a != b) for a, b in zip(_relu_pattern(cp), _relu_pattern(cm))):
                skipped += 1
                continue
            numeric = (lp - lm) / (2.0 * step)
            dev = abs(grad[j] - numeric) / max(abs(grad[j]), abs(numeric), floor)
            checked += 1
            groups[_group(name)] = max(groups[_group(name)], dev)
            if dev > worst:
                worst, worst_path = dev, f"{name}{list(int(i) for i in np.unravel_index(j, value.shape))}"
    return GradientCheckReport(worst, groups, worst_path, worst <= tolerance, tolerance, checked, skipped)


# --------------------------------------------------------------------------
# checkpoints

CHECKPOINT_MAGIC = b"SFNR"
CHECKPOINT_VERSION = 1
_CKPT_HEADER = struct.Struct("<4sIIII")


def checkpoint_bytes(model: NeuralReconstructor) -> bytes:
    """Serialize: header, norm constants, grid + sensor indices, parameters, carried state."""
    parts = [
        _CKPT_HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, model.r, model.m, model.hidden_layer_count),
        struct.pack("<dd", model.norm.lo, model.norm.hi),
        struct.pack("<II", model.placement.grid_height, model.placement.grid_width),
        np.asarray(model.placement.gamma, dtype="<u4").tobytes(),
    ]
    for k in param_shapes(model.r, model.m, model.hidden_layer_count):
        parts.append(np.ascontiguousarray(model.params[k], dtype="<f8").tobytes())
    parts.append(np.ascontiguousarray(model.state.c, dtype="<f8").tobytes())
    parts.append(np.ascontiguousarray(model.state.h, dtype="<f8").tobytes())
    return b"".join(parts)


def model_from_bytes(data: bytes) -> NeuralReconstructor:
    if len(data) < _CKPT_HEADER.size + 24:
        raise ParseError(f"truncated checkpoint: {len(data)} bytes")
    magic, version, r, m, hidden = _CKPT_HEADER.unpack_from(data, 0)
    if magic != CHECKPOINT_MAGIC:
        raise ParseError(f"bad checkpoint magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise ParseError(f"unsupported checkpoint version {version}")
    off = _CKPT_HEADER.size
    lo, hi = struct.unpack_from("<dd", data, off)
    off += 16
    h, w = struct.unpack_from("<II", data, off)
    off += 8
    try:
        shapes = param_shapes(r, m, hidden)
    except ArgumentError as exc:
        raise ParseError(str(exc)) from exc
    expected = off + 4 * r + 8 * (sum(math.prod(s) for s in shapes.values()) + 2 * r)
    if len(data) != expected:
        raise ParseError(f"checkpoint size mismatch: expected {expected} bytes, found {len(data)}")
    gamma = np.frombuffer(data, dtype="<u4", count=r, offset=off)
    off += 4 * r
    params = {}
    for k, shape in shapes.items():
        n = math.prod(shape)
        params[k] = np.frombuffer(data, dtype="<f8", count=n, offset=off).astype(np.float64).reshape(shape)
        off += 8 * n
    c = np.frombuffer(data, dtype="<f8", count=r, offset=off).astype(np.float64)
    hs = np.frombuffer(data, dtype="<f8", count=r, offset=off + 8 * r).astype(np.float64)
    try:
        placement = Placement(tuple(int(i) for i in gamma), h, w)
    except ArgumentError as exc:
        raise ParseError(f"checkpoint placement invalid: {exc}") from exc
    return NeuralReconstructor(placement, params, Normalizer(lo, hi), LstmState(c, hs))


def save_checkpoint(model: NeuralReconstructor, path) -> None:
    Path(path).write_bytes(checkpoint_bytes(model))


def load_checkpoint(path) -> NeuralReconstructor:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    return model_from_bytes(path.read_bytes())
