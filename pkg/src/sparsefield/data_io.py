"""Gridded snapshot containers, file formats and synthetic field generators.

A series of ``M`` snapshots on an ``H x W`` grid is stored time-major as an
``(M, H*W)`` array; :attr:`SnapshotSeries.matrix` exposes the conventional
``m x M`` snapshot matrix with one column per time step. Grid cells are
flattened row-major (``flat = row * W + col``).

Binary layout (``.sfgd``), all integers little-endian::

    b"SFGD"              magic
    uint32 version       currently 1
    uint32 H, W, M
    uint8  has_mask
    [ceil(H*W/8) bytes]  mask bits, row-major, MSB-first, 1 = valid cell
    float64[M*H*W]       values, little-endian, time-major then row-major

Stacked CSV layout: the first line is ``H,W``; every following line is
``timestamp,v_0,...,v_{m-1}``. An empty field marks a masked cell and must
be empty in every row. A directory (or list) of per-snapshot CSV files, each
holding ``H`` lines of ``W`` comma-separated values, is also accepted; files
are ordered by name.
"""
from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ParseError

MAGIC = b"SFGD"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass(frozen=True)
class FieldSnapshot:
    """One time slice of a gridded field, flattened row-major."""

    values: np.ndarray
    height: int
    width: int
    timestamp: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.height * self.width:
            raise ArgumentError(
                f"snapshot has {values.size} values, grid is {self.height}x{self.width}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grid(self) -> np.ndarray:
        return self.values.reshape(self.height, self.width)


@dataclass(frozen=True)
class SnapshotSeries:
    """Time-ordered snapshots sharing one grid and an optional validity mask.

    ``mask`` is an ``(H, W)`` boolean array with True on valid cells; values
    under masked cells are held at 0 and carry no meaning.
    """

    values: np.ndarray
    height: int
    width: int
    timestamps: np.ndarray | None = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        m = self.height * self.width
        if self.height < 1 or self.width < 1:
            raise ArgumentError(f"grid must be non-empty, got {self.height}x{self.width}")
        if values.ndim == 3:
            values = values.reshape(values.shape[0], -1)
        if values.ndim != 2 or values.shape[1] != m:
            raise ArgumentError(
                f"values must have shape (M, {m}) for a {self.height}x{self.width} grid, "
                f"got {values.shape}"
            )
        if values.shape[0] < 1:
            raise ArgumentError("series must hold at least one snapshot")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("series values must be finite")

        if self.timestamps is None:
            stamps = np.arange(values.shape[0], dtype=np.int64)
        else:
            stamps = np.array(self.timestamps, dtype=np.int64).reshape(-1)
            if stamps.size != values.shape[0]:
                raise ArgumentError("one timestamp per snapshot is required")
            if stamps.size > 1 and np.any(np.diff(stamps) <= 0):
                raise ArgumentError("timestamps must be strictly increasing")

        mask = self.mask
        if mask is not None:
            mask = np.array(mask, dtype=bool).reshape(self.height, self.width)
            if not mask.any():
                raise ArgumentError("mask leaves no valid cells")
            values[:, ~mask.reshape(-1)] = 0.0
            mask.setflags(write=False)

        values.setflags(write=False)
        stamps.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", stamps)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[FieldSnapshot], mask=None) -> "SnapshotSeries":
        if not snapshots:
            raise ArgumentError("no snapshots given")
        h, w = snapshots[0].height, snapshots[0].width
        if any((s.height, s.width) != (h, w) for s in snapshots):
            raise ArgumentError("snapshots must share one grid")
        return cls(
            np.stack([s.values for s in snapshots]),
            h,
            w,
            timestamps=[s.timestamp for s in snapshots],
            mask=mask,
        )

    @property
    def n_cells(self) -> int:
        return self.height * self.width

    @property
    def n_snapshots(self) -> int:
        return self.values.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Snapshot matrix of shape ``(m, M)``, one column per time step."""
        return self.values.T

    @property
    def valid(self) -> np.ndarray:
        """Flat boolean validity vector of length ``m``."""
        if self.mask is None:
            return np.ones(self.n_cells, dtype=bool)
        return self.mask.reshape(-1)

    def __len__(self) -> int:
        return self.n_snapshots

    def __getitem__(self, index):
        if isinstance(index, slice):
            return SnapshotSeries(
                self.values[index],
                self.height,
                self.width,
                timestamps=self.timestamps[index],
                mask=self.mask,
            )
        return FieldSnapshot(
            self.values[index], self.height, self.width, int(self.timestamps[index])
        )

    def __iter__(self):
        for i in range(self.n_snapshots):
            yield self[i]

    def scaled(self, factor: float) -> "SnapshotSeries":
        return SnapshotSeries(
            self.values * factor, self.height, self.width, self.timestamps, self.mask
        )


def split_series(series: SnapshotSeries, train_fraction: float):
    """Split by time order: the first ``floor(fraction * M)`` snapshots train."""
    if not 0.0 < train_fraction < 1.0:
        raise ArgumentError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.floor(train_fraction * series.n_snapshots)
    if n_train < 1 or n_train >= series.n_snapshots:
        raise ArgumentError(
            f"train_fraction {train_fraction} on {series.n_snapshots} snapshots "
            f"leaves an empty side ({n_train} train)"
        )
    return series[:n_train], series[n_train:]


# --------------------------------------------------------------------------
# synthetic fields


def _plane_wave_modes(height, width, n_components, rng):
    """Distinct plane-wave wave vectors, so each component adds exactly rank 2."""
    p_max = max(1, height // 2 - 1)
    q_max = max(1, width // 2 - 1)
    pool = [(p, q) for p in range(0, p_max + 1) for q in range(0, q_max + 1) if (p, q) != (0, 0)]
    order = rng.permutation(len(pool))
    return [pool[i] for i in order[: min(n_components, len(pool))]]


def _standing_waves(height, width, n_snapshots, n_components, rng):
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    t = np.arange(n_snapshots)[:, None]
    field = np.zeros((n_snapshots, height * width))
    modes = _plane_wave_modes(height, width, n_components, rng)
    freqs = np.sort(rng.uniform(0.1, 0.9, size=len(modes)))
    for (p, q), omega in zip(modes, freqs):
        amp = rng.uniform(0.5, 1.5)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        arg = 2.0 * np.pi * (p * rows / height + q * cols / width) + phase
        mode_a = np.cos(arg).reshape(-1)
        mode_b = np.sin(arg).reshape(-1)
        field += amp * (np.cos(omega * t) * mode_a + np.sin(omega * t) * mode_b)
    return field


def _traveling_gaussians(height, width, n_snapshots, n_components, rng):
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    rows = rows.reshape(-1)
    cols = cols.reshape(-1)
    scale = min(height, width)
    field = np.zeros((n_snapshots, height * width))
    for _ in range(n_components):
        amp = rng.uniform(0.5, 1.5)
        sigma = rng.uniform(0.12, 0.25) * scale
        r0, c0 = rng.uniform(0, height), rng.uniform(0, width)
        vr, vc = rng.uniform(-0.4, 0.4, size=2)
        for k in range(n_snapshots):
            # periodic domain, minimum-image distance
            dr = (rows - (r0 + vr * k) + height / 2) % height - height / 2
            dc = (cols - (c0 + vc * k) + width / 2) % width - width / 2
            field[k] += amp * np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
    return field


def synth_series(
    kind: str,
    height: int,
    width: int,
    n_snapshots: int,
    seed: int = 0,
    noise_level: float = 0.0,
    n_components: int | None = None,
) -> SnapshotSeries:
    """Generate a deterministic synthetic spatiotemporal field.

    Parameters
    ----------
    kind : {"traveling_gaussians", "standing_waves", "mixed"}
        ``standing_waves`` sums ``k`` plane-wave oscillations, each of exact
        rank 2, so the noiseless snapshot matrix has rank ``<= 2k``.
        ``traveling_gaussians`` sums ``k`` Gaussian bumps drifting with
        constant velocities on a periodic grid. ``mixed`` adds both.
    n_components : int, optional
        ``k``; defaults to 2 for standing waves and 3 for Gaussians.
    noise_level : float
        Standard deviation of additive white noise.

    All randomness comes from ``numpy.random.Generator(PCG64(seed))``.
    """
    if min(height, width, n_snapshots) < 1:
        raise ArgumentError("height, width and n_snapshots must be >= 1")
    if noise_level < 0:
        raise ArgumentError("noise_level must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "standing_waves":
        field = _standing_waves(height, width, n_snapshots, n_components or 2, rng)
    elif kind == "traveling_gaussians":
        field = _traveling_gaussians(height, width, n_snapshots, n_components or 3, rng)
    elif kind == "mixed":
        k = n_components or 2
        field = 0.5 * _standing_waves(height, width, n_snapshots, k, rng)
        field += _traveling_gaussians(height, width, n_snapshots, k, rng)
    else:
        raise ArgumentError(f"unknown synthetic kind {kind!r}")
    if noise_level > 0:
        field = field + noise_level * rng.standard_normal(field.shape)
    return SnapshotSeries(field, height, width)


# --------------------------------------------------------------------------
# binary format


def _pack_mask(mask: np.ndarray) -> bytes:
    return np.packbits(mask.reshape(-1).astype(np.uint8)).tobytes()


def series_to_bytes(series: SnapshotSeries) -> bytes:
    buf = io.BytesIO()
    buf.write(_HEADER.pack(MAGIC, VERSION, series.height, series.width, series.n_snapshots))
    if series.mask is None:
        buf.write(b"\x00")
    else:
        buf.write(b"\x01")
        buf.write(_pack_mask(series.mask))
    buf.write(np.ascontiguousarray(series.values, dtype="<f8").tobytes())
    return buf.getvalue()


def series_from_bytes(data: bytes) -> SnapshotSeries:
    if len(data) < _HEADER.size + 1:
        raise ParseError(
            f"truncated header: expected at least {_HEADER.size + 1} bytes, found {len(data)}"
        )
    magic, version, h, w, n = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r} at offset 0, expected {MAGIC!r}")
    if version != VERSION:
        raise ParseError(f"unsupported format version {version} at offset 4")
    if h == 0 or w == 0 or n == 0:
        raise ParseError(f"empty dimensions in header: H={h} W={w} M={n}")
    offset = _HEADER.size
    flag = data[offset]
    offset += 1
    m = h * w
    mask = None
    if flag not in (0, 1):
        raise ParseError(f"mask flag must be 0 or 1 at offset {offset - 1}, found {flag}")
    mask_bytes = (m + 7) // 8 if flag else 0
    expected = offset + mask_bytes + 8 * m * n
    if len(data) != expected:
        raise ParseError(
            f"payload size mismatch: expected {expected} bytes for H={h} W={w} M={n}, "
            f"found {len(data)}"
        )
    if flag:
        bits = np.frombuffer(data, dtype=np.uint8, count=mask_bytes, offset=offset)
        mask = np.unpackbits(bits)[:m].astype(bool).reshape(h, w)
        offset += mask_bytes
    values = np.frombuffer(data, dtype="<f8", count=m * n, offset=offset).reshape(n, m)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        k, c = bad[0]
        raise ParseError(
            f"non-finite value at snapshot {k}, cell {c} (byte offset {offset + 8 * (k * m + c)})"
        )
    try:
        return SnapshotSeries(values.astype(np.float64), h, w, mask=mask)
    except ArgumentError as exc:
        raise ParseError(str(exc)) from exc


# --------------------------------------------------------------------------
# CSV formats


def _parse_cell(text: str, where: str) -> float:
    text = text.strip()
    if text == "":
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric value {text!r} at {where}") from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r} at {where}")
    return value


def _series_from_rows(rows, h, w, stamps, source):
    values = np.array(rows, dtype=np.float64)
    empty = np.isnan(values)
    mask = None
    if empty.any():
        holes = empty.all(axis=0)
        partial = empty.any(axis=0) & ~holes
        if partial.any():
            cell = int(np.argmax(partial))
            raise ParseError(
                f"{source}: cell {cell} (row {cell // w}, col {cell % w}) is empty in "
                "some snapshots but not all"
            )
        mask = ~holes.reshape(h, w)
        values[:, holes] = 0.0
    try:
        return SnapshotSeries(values, h, w, timestamps=stamps, mask=mask)
    except ArgumentError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def _read_stacked_csv(text: str, source: str) -> SnapshotSeries:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{source}: empty file") from None
    try:
        h, w = (int(x) for x in header)
    except ValueError:
        raise ParseError(f"{source}: line 1 must be 'H,W', found {','.join(header)!r}") from None
    m = h * w
    rows, stamps = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != m + 1:
            raise ParseError(f"{source}: line {lineno} has {len(row)} fields, expected {m + 1}")
        try:
            stamps.append(int(row[0]))
        except ValueError:
            raise ParseError(f"{source}: line {lineno}, column 1: bad timestamp {row[0]!r}") from None
        rows.append(
            [_parse_cell(x, f"{source}: line {lineno}, column {j + 2}") for j, x in enumerate(row[1:])]
        )
    if not rows:
        raise ParseError(f"{source}: no snapshot rows")
    return _series_from_rows(rows, h, w, stamps, source)


def _read_grid_csv(path: Path) -> list[list[float]]:
    grid = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            grid.append([_parse_cell(x, f"{path}: row {lineno}, column {j + 1}") for j, x in enumerate(row)])
    if not grid:
        raise ParseError(f"{path}: empty grid file")
    widths = {len(r) for r in grid}
    if len(widths) != 1:
        raise ParseError(f"{path}: ragged grid, row widths {sorted(widths)}")
    return grid


def load_grid_csvs(paths: Iterable[str | Path]) -> SnapshotSeries:
    """Stack per-snapshot grid CSV files (one ``H x W`` grid each) in the given order."""
    paths = [Path(p) for p in paths]
    if not paths:
        raise ParseError("no grid files given")
    grids = [_read_grid_csv(p) for p in paths]
    h, w = len(grids[0]), len(grids[0][0])
    for p, g in zip(paths, grids):
        if (len(g), len(g[0])) != (h, w):
            raise ParseError(f"{p}: grid is {len(g)}x{len(g[0])}, expected {h}x{w}")
    rows = [sum(g, []) for g in grids]
    return _series_from_rows(rows, h, w, None, str(paths[0].parent))


def series_to_csv(series: SnapshotSeries) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([series.height, series.width])
    valid = series.valid
    for stamp, row in zip(series.timestamps, series.values):
        writer.writerow([int(stamp)] + [repr(float(v)) if ok else "" for v, ok in zip(row, valid)])
    return out.getvalue()


def _infer_format(path: Path) -> str:
    if path.is_dir() or path.suffix.lower() == ".csv":
        return "csv"
    return "binary"


def save_series(series: SnapshotSeries, path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    format = format or _infer_format(path)
    if format == "binary":
        path.write_bytes(series_to_bytes(series))
    elif format == "csv":
        path.write_text(series_to_csv(series))
    else:
        raise ArgumentError(f"unknown format {format!r}")


def load_series(path: str | Path, format: str | None = None) -> SnapshotSeries:
    """Load a series from a binary file, a stacked CSV, or a directory of grid CSVs."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file or directory")
    format = format or _infer_format(path)
    if format == "binary":
        return series_from_bytes(path.read_bytes())
    if format == "csv":
        if path.is_dir():
            return load_grid_csvs(sorted(path.glob("*.csv")))
        return _read_stacked_csv(path.read_text(), str(path))
    raise ArgumentError(f"unknown format {format!r}")
