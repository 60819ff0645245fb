"""Sensor placement: greedy QR selection, measurement, and network connectivity.

A :class:`Placement` stores only the ordered flat indices of the sensed grid
cells; the one-hot measurement operator is never formed. Grid coordinates
are row-major: ``row = idx // W``, ``col = idx % W``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data_io import FieldSnapshot, SnapshotSeries
from .errors import ArgumentError, DegeneracyError, ParseError
from .tensor_linalg import qr_row_pivot, thin_svd


@dataclass(frozen=True)
class Placement:
    gamma: tuple[int, ...]
    grid_height: int
    grid_width: int

    def __post_init__(self):
        gamma = tuple(int(i) for i in self.gamma)
        m = self.grid_height * self.grid_width
        if not gamma:
            raise ArgumentError("placement needs at least one sensor")
        if len(set(gamma)) != len(gamma):
            raise ArgumentError(f"placement indices must be distinct: {gamma}")
        bad = [i for i in gamma if not 0 <= i < m]
        if bad:
            raise ArgumentError(f"indices {bad} out of range for a grid of {m} cells")
        object.__setattr__(self, "gamma", gamma)

    def __len__(self):
        return len(self.gamma)

    @property
    def n_cells(self) -> int:
        return self.grid_height * self.grid_width

    @property
    def indices(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=np.intp)

    def coordinates(self) -> np.ndarray:
        """``(r, 2)`` array of (row, col) grid coordinates."""
        idx = self.indices
        return np.stack([idx // self.grid_width, idx % self.grid_width], axis=1)

    def measurement_matrix(self) -> np.ndarray:
        """Dense one-hot ``r x m`` operator; for tests and small grids only."""
        c = np.zeros((len(self.gamma), self.n_cells))
        c[np.arange(len(self.gamma)), self.indices] = 1.0
        return c

    def to_text(self) -> str:
        lines = [f"{len(self.gamma)} {self.grid_height} {self.grid_width}"]
        lines += [str(i) for i in self.gamma]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, source: str = "<placement>") -> "Placement":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError(f"{source}: empty placement file")
        try:
            r, h, w = (int(x) for x in lines[0].split())
        except ValueError:
            raise ParseError(f"{source}: line 1 must be 'r H W', found {lines[0]!r}") from None
        if len(lines) - 1 != r:
            raise ParseError(f"{source}: header declares {r} indices, found {len(lines) - 1}")
        gamma = []
        for lineno, ln in enumerate(lines[1:], start=2):
            try:
                gamma.append(int(ln))
            except ValueError:
                raise ParseError(f"{source}: line {lineno}: bad index {ln!r}") from None
        try:
            return cls(tuple(gamma), h, w)
        except ArgumentError as exc:
            raise ParseError(f"{source}: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Placement":
        path = Path(path)
        if not path.exists():
            raise ParseError(f"{path}: no such file")
        return cls.from_text(path.read_text(), str(path))


def effective_rank(singular_values, shape) -> int:
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0.0:
        return 0
    tol = s[0] * max(shape) * np.finfo(np.float64).eps
    return int(np.count_nonzero(s > tol))


def select_sampling_locations(series: SnapshotSeries, r: int) -> Placement:
    """Choose ``r`` sensor cells by pivoted QR on the rank-``r`` principal basis.

    The basis ``T_r = U_r diag(s_r)`` comes from the thin SVD of the snapshot
    matrix; masked cells are never candidates.
    """
    m, n_snap = series.n_cells, series.n_snapshots
    if n_snap < 2:
        raise ArgumentError(f"placement needs at least 2 snapshots, got {n_snap}")
    if not 1 <= r <= min(m, n_snap):
        raise ArgumentError(f"r must lie in [1, {min(m, n_snap)}], got {r}")
    valid = np.flatnonzero(series.valid)
    if r > valid.size:
        raise ArgumentError(f"r={r} exceeds the {valid.size} valid cells")

    phi = series.matrix[valid]
    svd = thin_svd(phi)
    rank = effective_rank(svd.s, phi.shape)
    if r > rank:
        raise DegeneracyError(
            f"snapshot matrix has effective rank {rank}; cannot place {r} informative sensors",
            effective_rank=rank,
        )
    t_r = svd.u[:, :r] * svd.s[:r]
    pivots = qr_row_pivot(t_r, r).pivots
    return Placement(tuple(int(valid[p]) for p in pivots), series.height, series.width)


def measure(placement: Placement, snapshot) -> np.ndarray:
    """Sensor readings ``y[i] = snapshot[gamma[i]]``, i.e. ``C @ phi``.

    Accepts a :class:`FieldSnapshot`, a flat ``m``-vector, or an ``(m, K)``
    matrix of column snapshots (returns ``(r, K)``).
    """
    values = snapshot.values if isinstance(snapshot, FieldSnapshot) else np.asarray(snapshot)
    if values.shape[0] != placement.n_cells:
        raise ArgumentError(
            f"snapshot has {values.shape[0]} cells, placement grid has {placement.n_cells}"
        )
    return values[placement.indices]


@dataclass(frozen=True)
class ConnectivityReport:
    """Nearest-neighbour summary of a sensor network under an L1 radius.

    ``connected`` is the per-node criterion (every node has a neighbour within
    ``tau_com``); ``graph_connected`` says whether the radius graph forms a
    single component. ``omega`` is None for a single node.
    """

    omega: int | None
    per_node_nearest: tuple[int, ...]
    connected: bool
    graph_connected: bool
    n_components: int
    tau_com: int
    bridges_added: tuple[int, ...] = field(default=())

    @property
    def omega_defined(self) -> bool:
        return self.omega is not None


def _l1_distances(coords: np.ndarray) -> np.ndarray:
    return np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=-1)


def _components(dist: np.ndarray, tau: int) -> list[list[int]]:
    """Connected components of the radius graph, each sorted, in order of lowest node."""
    n = dist.shape[0]
    adj = dist <= tau
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        comp, queue = [], deque([start])
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                queue.append(int(j))
        comps.append(sorted(comp))
    return comps


def analyze_connectivity(placement: Placement, tau_com: int) -> ConnectivityReport:
    coords = placement.coordinates()
    dist = _l1_distances(coords)
    n_comp = len(_components(dist, tau_com))
    if len(placement) == 1:
        return ConnectivityReport(None, (), False, True, 1, tau_com)
    off = dist + np.diag(np.full(len(placement), np.iinfo(np.int64).max))
    nearest = off.min(axis=1)
    omega = int(nearest.max())
    return ConnectivityReport(
        omega=omega,
        per_node_nearest=tuple(int(d) for d in nearest),
        connected=omega <= tau_com,
        graph_connected=n_comp == 1,
        n_components=n_comp,
        tau_com=tau_com,
    )


def _lattice_path(a, b):
    """Cells on an L1-shortest path from a to b: rows first, then columns."""
    (r0, c0), (r1, c1) = a, b
    path = [(r0, c0)]
    step = 1 if r1 > r0 else -1
    for r in range(r0 + step, r1 + step, step) if r1 != r0 else ():
        path.append((r, c0))
    step = 1 if c1 > c0 else -1
    for c in range(c0 + step, c1 + step, step) if c1 != c0 else ():
        path.append((r1, c))
    return path


def insert_bridges(placement: Placement, tau_com: int):
    """Append relay nodes until the radius-``tau_com`` graph is one component.

    Repeatedly joins the closest pair of nodes lying in different
    components by placing relays every ``tau_com`` cells along an L1
    shortest path between them. Returns ``(new_placement, report)``.
    """
    if tau_com < 1:
        raise ArgumentError(f"tau_com must be >= 1, got {tau_com}")
    w = placement.grid_width
    gamma = list(placement.gamma)
    added: list[int] = []
    while True:
        coords = np.stack([np.asarray(gamma) // w, np.asarray(gamma) % w], axis=1)
        dist = _l1_distances(coords)
        comps = _components(dist, tau_com)
        if len(comps) == 1:
            break
        label = np.empty(len(gamma), dtype=int)
        for k, comp in enumerate(comps):
            label[comp] = k
        cross = np.where(label[:, None] != label[None, :], dist, np.iinfo(np.int64).max)
        i, j = np.unravel_index(np.argmin(cross), cross.shape)
        path = _lattice_path(tuple(coords[i]), tuple(coords[j]))
        occupied = set(gamma)
        for pos in path[tau_com : len(path) - 1 : tau_com]:
            flat = int(pos[0] * w + pos[1])
            if flat not in occupied:
                gamma.append(flat)
                added.append(flat)
                occupied.add(flat)
    bridged = Placement(tuple(gamma), placement.grid_height, w)
    report = analyze_connectivity(bridged, tau_com)
    return bridged, ConnectivityReport(
        omega=report.omega,
        per_node_nearest=report.per_node_nearest,
        connected=report.connected,
        graph_connected=report.graph_connected,
        n_components=report.n_components,
        tau_com=tau_com,
        bridges_added=tuple(added),
    )
