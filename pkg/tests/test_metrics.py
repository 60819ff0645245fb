import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsefield.errors import ArgumentError
from sparsefield.metrics import (
    EvalReport,
    improvement_pct,
    mse_at_n,
    per_cell_csv,
    per_cell_mse,
    read_metrics_csv,
    reports_to_csv,
    var_at_n,
)


def two_pass_oracle(truth, recon):
    """Scalar loops: first the global mean, then the spread of per-cell means."""
    m, n = len(truth), len(truth[0])
    total = 0.0
    cell_means = []
    for i in range(m):
        acc = 0.0
        for j in range(n):
            d = truth[i][j] - recon[i][j]
            acc += d * d
        total += acc
        cell_means.append(acc / n)
    mse = total / (m * n)
    var = sum((c - mse) ** 2 for c in cell_means) / m
    return mse, var


def test_mse_worked_example():
    assert mse_at_n([[1, 2], [3, 4]], [[1, 2], [3, 6]]) == 1.0


def test_var_worked_example():
    truth = np.zeros((2, 2))
    recon = np.array([[0.0, np.sqrt(2.0)], [0.0, 0.0]])
    assert var_at_n(truth, recon) == pytest.approx(0.25, abs=1e-15)
    assert mse_at_n(truth, recon) == pytest.approx(0.5, abs=1e-15)


def test_identity_and_uniform_offset():
    a = np.random.default_rng(0).standard_normal((4, 5))
    assert mse_at_n(a, a) == 0.0 and var_at_n(a, a) == 0.0
    assert mse_at_n(a, a + 0.5) == pytest.approx(0.25, rel=1e-14)
    assert var_at_n(a, a + 0.5) == pytest.approx(0.0, abs=1e-28)


@pytest.mark.parametrize("seed", range(10))
def test_against_two_pass_oracle(seed):
    rng = np.random.default_rng(seed)
    truth, recon = rng.standard_normal((6, 9)), rng.standard_normal((6, 9))
    mse, var = two_pass_oracle(truth.tolist(), recon.tolist())
    assert abs(mse_at_n(truth, recon) - mse) <= 1e-12
    assert abs(var_at_n(truth, recon) - var) <= 1e-12


def test_table_improvements():
    assert improvement_pct(0.4192, 0.3910) == pytest.approx(6.727, abs=1e-3)
    assert round(improvement_pct(0.4192, 0.3910), 2) == 6.73
    assert round(improvement_pct(0.0096, 0.0056), 2) == 41.67
    assert improvement_pct(0.3, 0.3) == 0.0
    with pytest.raises(ArgumentError):
        improvement_pct(0.0, 0.1)


def test_shape_mismatch():
    with pytest.raises(ArgumentError):
        mse_at_n(np.zeros((2, 3)), np.zeros((3, 2)))
    with pytest.raises(ArgumentError):
        var_at_n(np.zeros((2, 3)), np.zeros((2, 2)))


def test_mask_excludes_cells_from_sum_and_divisor():
    truth = np.zeros((3, 2))
    recon = np.array([[1.0, 1.0], [100.0, 100.0], [3.0, 3.0]])
    mask = np.array([True, False, True])
    assert mse_at_n(truth, recon, mask) == pytest.approx(5.0)
    rep = EvalReport.compute("qr+linear", 2, truth, recon, mask)
    assert rep.n_cells == 2
    assert rep.var == pytest.approx(((1 - 5) ** 2 + (9 - 5) ** 2) / 2)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-100, 100, width=64)),
       st.randoms(use_true_random=False))
def test_mse_permutation_invariant(truth, rnd):
    recon = truth[::-1, ::-1] * 0.5 + 1.0
    rows = list(range(truth.shape[0]))
    cols = list(range(truth.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    base = mse_at_n(truth, recon)
    permuted = mse_at_n(truth[rows][:, cols], recon[rows][:, cols])
    assert permuted == pytest.approx(base, rel=1e-12, abs=1e-300)
    assert var_at_n(truth, recon) >= 0.0


def test_report_consistency():
    rng = np.random.default_rng(3)
    truth, recon = rng.standard_normal((8, 5)), rng.standard_normal((8, 5))
    rep = EvalReport.compute("rand+neural", 3, truth, recon)
    assert rep.mse == pytest.approx(mse_at_n(truth, recon), rel=1e-15)
    assert rep.var == pytest.approx(var_at_n(truth, recon), rel=1e-15)
    np.testing.assert_allclose(rep.per_cell_mse, per_cell_mse(truth, recon))
    assert rep.per_cell_var.mean() == pytest.approx(rep.var, rel=1e-12)


def test_csv_round_trip():
    rng = np.random.default_rng(4)
    truth = rng.standard_normal((4, 3))
    reps = [EvalReport.compute(s, 2, truth, truth + k) for k, s in enumerate(["qr+linear", "rand+linear"])]
    text = reports_to_csv(reps)
    assert text.splitlines()[0] == "strategy,n_sensors,mse,var"
    rows = read_metrics_csv(text)
    assert [r["strategy"] for r in rows] == ["qr+linear", "rand+linear"]
    assert rows[1]["mse"] == reps[1].mse and rows[1]["n_sensors"] == 2
    cells = per_cell_csv(reps[1]).splitlines()
    assert cells[0] == "cell,mse,var" and len(cells) == 5
