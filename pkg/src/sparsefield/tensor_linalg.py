"""Dense real-matrix kernels: thin SVD, row-pivoted Householder QR, least squares.

Matrices are plain 2-D ``float64`` numpy arrays. The SVD follows the
conventional factorization ``A = U @ diag(s) @ Vt``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ConvergenceError, SingularityError

# condition number above which a linear solve is refused
MAX_CONDITION = 1e12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite, non-empty 2-D float64 array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ArgumentError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise ArgumentError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ArgumentError(f"{name} contains NaN or Inf")
    return a


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray

    def reconstruct(self, rank: int | None = None) -> np.ndarray:
        k = len(self.s) if rank is None else rank
        return (self.u[:, :k] * self.s[:k]) @ self.vt[:k]


@dataclass(frozen=True)
class PivotedQrResult:
    """Greedy row selection of ``t``.

    ``pivots`` lists the selected rows in selection order and
    ``t[pivots].T == q @ r_factor``, with ``r_factor`` upper trapezoidal.
    """

    pivots: tuple[int, ...]
    q: np.ndarray
    r_factor: np.ndarray


def thin_svd(a) -> SvdResult:
    """Thin SVD with a reproducible sign convention.

    Each left singular vector is flipped so that its largest-magnitude entry
    (first one on ties) is non-negative; the matching row of ``vt`` flips
    with it.
    """
    a = as_matrix(a)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge within the LAPACK iteration cap: {exc}") from exc
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[lead, np.arange(u.shape[1])] < 0, -1.0, 1.0)
    return SvdResult(u * signs, s, vt * signs[:, None])


def _householder(x: np.ndarray):
    """Return (v, beta, alpha) with (I - beta v v^T) x = alpha e_0."""
    norm = np.sqrt(x @ x)
    v = x.copy()
    if norm == 0.0:
        return v, 0.0, 0.0
    alpha = -norm if x[0] >= 0 else norm
    v[0] -= alpha
    vnorm2 = v @ v
    if vnorm2 == 0.0:
        return v, 0.0, alpha
    return v, 2.0 / vnorm2, alpha


def qr_row_pivot(t, r: int) -> PivotedQrResult:
    """Greedily pick ``r`` rows of ``t`` by Householder QR with pivoting.

    This is column-pivoted QR of ``t.T``: at each step the row with the
    largest residual norm (after projecting out the rows already chosen) is
    selected, ties going to the lowest row index, and a Householder
    reflection deflates it from the remaining rows.
    """
    t = as_matrix(t, "t")
    n, k = t.shape
    if not 1 <= r <= n:
        raise ArgumentError(f"cannot select {r} rows from a matrix with {n} rows")

    work = t.T.copy()  # k x n, candidate rows of t become columns
    order = np.arange(n)
    q = np.eye(k)
    for j in range(r):
        if j < k:
            tail = work[j:, j:]
            norms = np.einsum("ij,ij->j", tail, tail)
        else:
            norms = np.zeros(n - j)
        best = norms.max()
        # lowest original index among exact ties
        ties = np.flatnonzero(norms == best)
        p = j + ties[np.argmin(order[j + ties])]
        if p != j:
            work[:, [j, p]] = work[:, [p, j]]
            order[[j, p]] = order[[p, j]]
        if j < k - 1:
            v, beta, alpha = _householder(work[j:, j])
            if beta != 0.0:
                work[j:, j:] -= beta * np.outer(v, v @ work[j:, j:])
                q[:, j:] -= beta * np.outer(q[:, j:] @ v, v)
            work[j, j] = alpha
            work[j + 1 :, j] = 0.0
    r_factor = np.triu(work[:, :r])
    return PivotedQrResult(tuple(int(i) for i in order[:r]), q, r_factor)


def condition_number(a) -> float:
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def solve_least_squares(a, b) -> np.ndarray:
    """Minimize ``||a @ x - b||_F``; refuse systems with condition above 1e12."""
    a = as_matrix(a, "a")
    b = np.asarray(b, dtype=np.float64)
    vector = b.ndim == 1
    b = as_matrix(b.reshape(-1, 1) if vector else b, "b")
    if a.shape[0] < a.shape[1]:
        raise ArgumentError(f"a must have at least as many rows as columns, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ArgumentError(f"b has {b.shape[0]} rows, a has {a.shape[0]}")
    cond = condition_number(a)
    if not cond <= MAX_CONDITION:
        raise SingularityError(
            f"matrix is numerically rank deficient (condition estimate {cond:.3e} > {MAX_CONDITION:.0e})",
            condition=cond,
        )
    if a.shape[0] == a.shape[1]:
        x = np.linalg.solve(a, b)
    else:
        x = np.linalg.lstsq(a, b, rcond=None)[0]
    return x[:, 0] if vector else x
