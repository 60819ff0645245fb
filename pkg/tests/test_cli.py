import numpy as np
import pytest

from sparsefield.cli import main
from sparsefield.data_io import SnapshotSeries, load_series, save_series, split_series
from sparsefield.linear_recon import fit_principal_basis, random_placement, reconstruct_linear
from sparsefield.metrics import mse_at_n, read_metrics_csv
from sparsefield.neural_recon import TrainConfig, load_checkpoint
from sparsefield.placement import Placement, measure
from sparsefield.render import read_pgm


def synth(tmp_path, name="s.sfgd", *extra):
    path = tmp_path / name
    assert main(["synth", *extra, "--out", str(path)]) == 0
    return path


# ---- synth


def test_synth_header(tmp_path):
    path = synth(tmp_path, "s.sfgd", "--kind", "standing_waves", "--h", "8", "--w", "8", "--m", "40", "--seed", "1")
    data = path.read_bytes()
    assert data[:4] == b"SFGD"
    assert [int.from_bytes(data[k:k + 4], "little") for k in (8, 12, 16)] == [8, 8, 40]


def test_synth_usage_errors(tmp_path, capsys):
    assert main(["synth", "--h", "8", "--w", "8", "--m", "40"]) == 2
    assert main(["synth", "--h", "8", "--w", "8", "--m", "0", "--out", str(tmp_path / "x")]) == 2
    assert "--m" in capsys.readouterr().err
    assert main([]) == 2


def test_missing_input_is_parse_error(tmp_path):
    assert main(["place", "--series", str(tmp_path / "nope.sfgd"), "--r", "2",
                 "--out", str(tmp_path / "p.txt")]) == 3


# ---- place


def test_place_qr_recovers_rank_two_field(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--kind", "standing_waves", "--components", "1",
                        "--h", "9", "--w", "7", "--m", "40", "--seed", "3")
    out = tmp_path / "p.txt"
    assert main(["place", "--series", str(series_path), "--r", "2", "--out", str(out)]) == 0
    placement = Placement.load(out)
    train, test = split_series(load_series(series_path), 0.7)
    basis = fit_principal_basis(train, 2)
    recon = reconstruct_linear(basis, placement, measure(placement, test.matrix))
    assert mse_at_n(test.matrix, recon) <= 1e-8


def test_place_rand_is_deterministic(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "6", "--w", "6", "--m", "20")
    outs = []
    for k in range(2):
        out = tmp_path / f"p{k}.txt"
        assert main(["place", "--series", str(series_path), "--r", "4", "--strategy", "rand",
                     "--seed", "7", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_place_connectivity_report_and_bridges(tmp_path, capsys):
    series_path = synth(tmp_path, "s.sfgd", "--h", "20", "--w", "20", "--m", "30")
    capsys.readouterr()
    plain, bridged = tmp_path / "p.txt", tmp_path / "b.txt"
    args = ["place", "--series", str(series_path), "--r", "4", "--strategy", "rand", "--seed", "2", "--tau", "3"]
    assert main(args + ["--out", str(plain)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("connected=false omega=")
    assert int(out.split("omega=")[1].split()[0]) > 3
    assert main(args + ["--bridge", "--out", str(bridged)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("bridges_added=") and "connected=true" in lines[1]
    before, after = Placement.load(plain), Placement.load(bridged)
    assert after.gamma[:4] == before.gamma and len(after) > 4


def test_place_bridge_needs_tau(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "5", "--m", "20")
    assert main(["place", "--series", str(series_path), "--r", "2", "--bridge",
                 "--out", str(tmp_path / "p.txt")]) == 2


# ---- train


def test_train_defaults_mirror_reference_settings():
    d = TrainConfig()
    assert (d.learning_rate, d.batch_size, d.beta1, d.beta2, d.epsilon, d.cosine_decay) == \
        (0.001, 20, 0.9, 0.999, 1e-8, True)


def test_train_deterministic_and_loss_csv(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "5", "--m", "40", "--seed", "2")
    pl = tmp_path / "p.txt"
    assert main(["place", "--series", str(series_path), "--r", "3", "--out", str(pl)]) == 0
    ckpts = []
    for k in range(2):
        ck, loss = tmp_path / f"m{k}.sfnr", tmp_path / f"loss{k}.csv"
        assert main(["train", "--series", str(series_path), "--placement", str(pl), "--epochs", "3",
                     "--batch-size", "7", "--out", str(ck), "--loss-csv", str(loss)]) == 0
        ckpts.append(ck.read_bytes())
    assert ckpts[0] == ckpts[1]
    rows = loss.read_text().splitlines()
    # 28 training snapshots in windows of 7 -> 4 steps per epoch
    assert rows[0] == "step,loss" and len(rows) - 1 == 3 * 4
    assert load_checkpoint(ck).placement == Placement.load(pl)


def test_train_rejects_mismatched_placement(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "5", "--m", "20")
    pl = tmp_path / "p.txt"
    Placement((0, 1), 3, 3).save(pl)
    assert main(["train", "--series", str(series_path), "--placement", str(pl),
                 "--out", str(tmp_path / "m.sfnr")]) == 2


# ---- evaluate


def test_evaluate_debug_identity(tmp_path, capsys):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "5", "--m", "20")
    capsys.readouterr()
    out = tmp_path / "metrics.csv"
    assert main(["evaluate", "--series", str(series_path), "--r", "3", "--debug-identity", "--out", str(out)]) == 0
    rows = read_metrics_csv(out.read_text())
    assert [r["strategy"] for r in rows] == ["qr+linear", "rand+linear", "qr+neural", "rand+neural"]
    assert all(r["mse"] == 0.0 and r["var"] == 0.0 for r in rows)
    assert capsys.readouterr().out == out.read_text()


def test_evaluate_exact_rank_linear(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--kind", "standing_waves", "--h", "12", "--w", "12", "--m", "50")
    out = tmp_path / "metrics.csv"
    assert main(["evaluate", "--series", str(series_path), "--r", "4",
                 "--strategies", "rand+linear,qr+linear", "--out", str(out)]) == 0
    rows = read_metrics_csv(out.read_text())
    assert [r["strategy"] for r in rows] == ["qr+linear", "rand+linear"]
    assert rows[0]["mse"] <= 1e-12


def test_evaluate_unknown_strategy(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "5", "--m", "20")
    assert main(["evaluate", "--series", str(series_path), "--r", "2", "--strategies", "qr+magic",
                 "--out", str(tmp_path / "m.csv")]) == 2


def test_evaluate_singular_random_placement_gives_nan_row(tmp_path, capsys):
    # rank-2 field sampled on one row only: random sensors in a row of zeros are singular
    values = np.zeros((20, 12))
    t = np.arange(20)
    values[:, :6] = np.outer(np.cos(0.3 * t), np.arange(1, 7)) + np.outer(np.sin(0.3 * t), np.arange(6, 0, -1))
    path = tmp_path / "s.sfgd"
    save_series(SnapshotSeries(values, 2, 6), path)
    out = tmp_path / "m.csv"
    seed = next(s for s in range(50) if all(i >= 6 for i in random_placement(12, 2, s).indices))
    code = main(["evaluate", "--series", str(path), "--r", "2", "--strategies", "qr+linear,rand+linear",
                 "--rand-seed", str(seed), "--out", str(out)])
    assert code == 4
    rows = read_metrics_csv(out.read_text())
    assert rows[0]["mse"] <= 1e-12 and np.isnan(rows[1]["mse"])
    assert "rand+linear" in capsys.readouterr().err


# ---- render


def test_render_worked_example(tmp_path):
    path = tmp_path / "s.sfgd"
    save_series(SnapshotSeries(np.array([[0.0, 1.0, 0.5, 0.25]]), 2, 2), path)
    out = tmp_path / "a.pgm"
    assert main(["render", "--series", str(path), "--out", str(out)]) == 0
    assert read_pgm(out).ravel().tolist() == [0, 255, 128, 64]
    assert out.read_bytes().startswith(b"P5\n2 2\n255\n")


def test_render_constant_and_marked_sensor(tmp_path):
    path = tmp_path / "s.sfgd"
    save_series(SnapshotSeries(np.full((2, 6), 4.0), 2, 3), path)
    pl = tmp_path / "p.txt"
    Placement((0,), 2, 3).save(pl)
    out = tmp_path / "c.pgm"
    assert main(["render", "--series", str(path), "--index", "1", "--out", str(out)]) == 0
    assert np.all(read_pgm(out) == 128)
    assert main(["render", "--series", str(path), "--placement", str(pl), "--mark-sensors", "--out", str(out)]) == 0
    assert read_pgm(out).ravel().tolist() == [255, 128, 128, 128, 128, 128]
    assert main(["render", "--series", str(path), "--index", "2", "--out", str(out)]) == 2
    assert main(["render", "--series", str(path), "--mark-sensors", "--out", str(out)]) == 2


def test_render_checkpoint_reconstruction(tmp_path):
    series_path = synth(tmp_path, "s.sfgd", "--h", "5", "--w", "4", "--m", "30")
    pl, ck, out = tmp_path / "p.txt", tmp_path / "m.sfnr", tmp_path / "r.pgm"
    assert main(["place", "--series", str(series_path), "--r", "3", "--out", str(pl)]) == 0
    assert main(["train", "--series", str(series_path), "--placement", str(pl), "--epochs", "2",
                 "--batch-size", "7", "--out", str(ck)]) == 0
    assert main(["render", "--series", str(series_path), "--checkpoint", str(ck), "--index", "4",
                 "--mark-sensors", "--out", str(out)]) == 0
    pixels = read_pgm(out)
    assert pixels.shape == (5, 4)
    assert all(pixels.ravel()[i] == 255 for i in Placement.load(pl).indices)
