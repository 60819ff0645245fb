"""Principal-basis fitting and closed-form gappy reconstruction.

With the rank-``r`` score basis ``T_r = U_r diag(s_r)``, a field observed at
the rows ``gamma`` is recovered as ``T_r x`` where ``x`` solves
``T_r[gamma] x = y``. The one-hot selection operator itself is never
inverted or formed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .data_io import SnapshotSeries
from .errors import ArgumentError, SingularityError
from .placement import Placement
from .tensor_linalg import MAX_CONDITION, condition_number, solve_least_squares, thin_svd


@dataclass(frozen=True)
class PrincipalBasis:
    t_r: np.ndarray  # m x r score basis
    v_r: np.ndarray  # r x M right factors of the training matrix
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        return self.t_r.shape[1]

    def reconstruct_training(self) -> np.ndarray:
        """Best rank-r approximation of the training matrix."""
        return self.t_r @ self.v_r


def fit_principal_basis(series: SnapshotSeries | np.ndarray, r: int) -> PrincipalBasis:
    phi = series.matrix if isinstance(series, SnapshotSeries) else np.asarray(series, dtype=float)
    m, n = phi.shape
    if not 1 <= r <= min(m, n):
        raise ArgumentError(f"rank r must lie in [1, {min(m, n)}], got {r}")
    svd = thin_svd(phi)
    return PrincipalBasis(
        t_r=svd.u[:, :r] * svd.s[:r],
        v_r=svd.vt[:r].copy(),
        singular_values=svd.s[:r].copy(),
    )


def reconstruction_operator(basis: PrincipalBasis, placement: Placement) -> np.ndarray:
    """The ``m x len(gamma)`` map ``T_r (C T_r)^+`` taking readings to fields."""
    if placement.n_cells != basis.t_r.shape[0]:
        raise ArgumentError(
            f"placement grid has {placement.n_cells} cells, basis has {basis.t_r.shape[0]}"
        )
    if len(placement) < basis.rank:
        raise ArgumentError(
            f"{len(placement)} sensors cannot determine {basis.rank} basis coefficients"
        )
    sensed = basis.t_r[placement.indices]
    cond = condition_number(sensed)
    if not cond <= MAX_CONDITION:
        raise SingularityError(
            f"sensed basis is ill-conditioned (condition {cond:.3e}); choose a different placement",
            condition=cond,
        )
    coef = solve_least_squares(sensed, np.eye(len(placement)))
    return basis.t_r @ coef


def reconstruct_linear(basis: PrincipalBasis, placement: Placement, y) -> np.ndarray:
    """Reconstruct full fields from readings ``y`` of shape ``(r, K)`` (or ``(r,)``).

    More sensors than basis vectors are handled in the least-squares sense.
    Each output column depends only on the matching column of ``y``, with a
    fixed summation order, so results do not depend on how snapshots are
    batched.
    """
    y = np.asarray(y, dtype=np.float64)
    vector = y.ndim == 1
    if vector:
        y = y[:, None]
    if y.shape[0] != len(placement):
        raise ArgumentError(f"y has {y.shape[0]} rows, placement has {len(placement)} sensors")
    op = reconstruction_operator(basis, placement)
    out = np.zeros((op.shape[0], y.shape[1]))
    for k in range(op.shape[1]):
        out += op[:, k : k + 1] * y[k : k + 1, :]
    return out[:, 0] if vector else out


def random_placement(m: int, r: int, seed: int, mask=None, height: int | None = None,
                     width: int | None = None) -> Placement:
    """Uniform draw of ``r`` distinct valid cells.

    The generator is pinned to Python's Mersenne Twister ``random.Random(seed)``
    and a partial Fisher-Yates shuffle driven only by ``random()``, whose
    output stream is stable across Python releases.
    """
    if height is None or width is None:
        height, width = 1, m
    if height * width != m:
        raise ArgumentError(f"grid {height}x{width} does not hold {m} cells")
    valid = list(range(m)) if mask is None else [int(i) for i in np.flatnonzero(np.asarray(mask).reshape(-1))]
    if not 1 <= r <= len(valid):
        raise ArgumentError(f"cannot draw {r} sensors from {len(valid)} valid cells")
    rng = random.Random(seed)
    pool = valid[:]
    n = len(pool)
    for i in range(r):
        j = i + int(rng.random() * (n - i))
        pool[i], pool[j] = pool[j], pool[i]
    return Placement(tuple(pool[:r]), height, width)
