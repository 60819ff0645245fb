import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsefield.data_io import FieldSnapshot, SnapshotSeries
from sparsefield.errors import ArgumentError, DegeneracyError, ParseError
from sparsefield.placement import (
    Placement,
    analyze_connectivity,
    insert_bridges,
    measure,
    select_sampling_locations,
)


def bfs_components(coords, tau):
    """Plain-Python traversal oracle: number of components of the L1 radius graph."""
    coords = [tuple(int(v) for v in c) for c in coords]
    unvisited = set(range(len(coords)))
    count = 0
    while unvisited:
        count += 1
        frontier = [unvisited.pop()]
        while frontier:
            i = frontier.pop()
            near = [j for j in unvisited
                    if abs(coords[i][0] - coords[j][0]) + abs(coords[i][1] - coords[j][1]) <= tau]
            for j in near:
                unvisited.remove(j)
                frontier.append(j)
    return count


def at(points, w):
    return tuple(r * w + c for r, c in points)


def series_from_basis(t_r, n_snapshots=6, seed=0):
    """A series whose rank-r score basis is exactly ``t_r`` (columns orthogonal)."""
    m, r = t_r.shape
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n_snapshots, r)))
    return SnapshotSeries((t_r @ q.T).T, 1, m)


# ---- Placement type and file format


def test_placement_validation():
    with pytest.raises(ArgumentError):
        Placement((1, 1), 2, 2)
    with pytest.raises(ArgumentError):
        Placement((4,), 2, 2)
    with pytest.raises(ArgumentError):
        Placement((), 2, 2)


def test_placement_text_round_trip(tmp_path):
    pl = Placement((7, 0, 13), 4, 5)
    assert pl.to_text() == "3 4 5\n7\n0\n13\n"
    path = tmp_path / "p.txt"
    pl.save(path)
    assert Placement.load(path) == pl
    assert path.read_bytes() == pl.to_text().encode()


@pytest.mark.parametrize("text", ["", "2 3 3\n1\n", "x y z\n", "1 2 2\nfoo\n", "1 2 2\n9\n"])
def test_placement_parse_errors(text):
    with pytest.raises(ParseError):
        Placement.from_text(text)


def test_coordinates_row_major():
    pl = Placement((0, 5, 11), 3, 4)
    np.testing.assert_array_equal(pl.coordinates(), [[0, 0], [1, 1], [2, 3]])


# ---- measure


def test_measure_figure_example():
    pl = Placement((1, 6, 4), 1, 8)
    phi = np.array([10, 20, 30, 40, 50, 60, 70, 80], dtype=float)
    np.testing.assert_array_equal(measure(pl, phi), [20, 70, 50])


def test_measure_trivial_cases():
    np.testing.assert_array_equal(measure(Placement((0,), 1, 3), np.array([4.0, 5, 6])), [4.0])
    np.testing.assert_array_equal(measure(Placement((2, 0), 1, 3), np.array([1.0, 2, 3])), [3.0, 1.0])


def test_measure_snapshot_and_matrix():
    pl = Placement((3, 1), 2, 2)
    snap = FieldSnapshot(np.array([1.0, 2, 3, 4]), 2, 2)
    np.testing.assert_array_equal(measure(pl, snap), [4, 2])
    mat = np.arange(8.0).reshape(4, 2)
    np.testing.assert_array_equal(measure(pl, mat), [[6, 7], [2, 3]])
    with pytest.raises(ArgumentError):
        measure(pl, np.zeros(5))


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 32), data=st.data())
def test_measure_equals_dense_product(m, data):
    r = data.draw(st.integers(1, m))
    gamma = data.draw(st.permutations(range(m)))[:r]
    phi = np.array(data.draw(st.lists(st.floats(-1e3, 1e3), min_size=m, max_size=m)))
    pl = Placement(tuple(gamma), 1, m)
    np.testing.assert_array_equal(measure(pl, phi), pl.measurement_matrix() @ phi)


# ---- select_sampling_locations


def test_select_hand_example_is_global_max():
    t_r = np.array([[1.0, 0], [0, 3], [2, 0], [0, 1]])
    series = series_from_basis(t_r)
    pl = select_sampling_locations(series, 2)
    assert pl.gamma == (1, 2)
    dets = {c: abs(np.linalg.det(t_r[list(c)])) for c in itertools.combinations(range(4), 2)}
    assert max(dets.values()) == pytest.approx(6.0)
    assert dets[(1, 2)] == pytest.approx(6.0)


def test_select_rank_one():
    u = np.array([1.0, 2.0, 0.0])
    v = np.array([1.0, -0.5, 2.0, 0.25])
    series = SnapshotSeries(np.outer(u, v).T, 1, 3)
    assert select_sampling_locations(series, 1).gamma == (1,)


def test_select_constant_in_space_is_degenerate():
    values = np.repeat(np.linspace(1.0, 2.0, 5)[:, None], 6, axis=1)
    with pytest.raises(DegeneracyError, match="effective rank 1") as info:
        select_sampling_locations(SnapshotSeries(values, 2, 3), 2)
    assert info.value.effective_rank == 1


def test_select_all_zero_is_degenerate():
    with pytest.raises(DegeneracyError):
        select_sampling_locations(SnapshotSeries(np.zeros((4, 6)), 2, 3), 1)


def test_select_preconditions():
    series = SnapshotSeries(np.random.default_rng(0).standard_normal((4, 6)), 2, 3)
    with pytest.raises(ArgumentError):
        select_sampling_locations(series[:1], 1)
    with pytest.raises(ArgumentError):
        select_sampling_locations(series, 5)


@pytest.mark.parametrize("scale", [1e-3, 0.5, 7.0, 1e4])
def test_select_scale_invariant(scale):
    series = SnapshotSeries(np.random.default_rng(5).standard_normal((12, 20)), 4, 5)
    base = select_sampling_locations(series, 5).gamma
    assert select_sampling_locations(series.scaled(scale), 5).gamma == base


def test_select_skips_masked_cells():
    rng = np.random.default_rng(2)
    values = rng.standard_normal((10, 9))
    values[:, 4] *= 100.0  # would win the first pivot if it were allowed
    mask = np.ones((3, 3), dtype=bool)
    mask[1, 1] = False
    pl = select_sampling_locations(SnapshotSeries(values, 3, 3, mask=mask), 4)
    assert 4 not in pl.gamma and len(pl) == 4


# ---- connectivity


def test_connectivity_examples():
    rep = analyze_connectivity(Placement(at([(0, 0), (0, 2), (5, 5)], 8), 8, 8), 3)
    assert rep.per_node_nearest == (2, 2, 8)
    assert rep.omega == 8 and not rep.connected and rep.bridges_added == ()

    rep = analyze_connectivity(Placement(at([(0, 0), (0, 1)], 8), 8, 8), 1)
    assert rep.omega == 1 and rep.connected

    rep = analyze_connectivity(Placement(at([(0, 0), (3, 0), (6, 0)], 8), 8, 8), 3)
    assert rep.omega == 3 and rep.connected and rep.graph_connected


def test_connectivity_single_node_flags_undefined_omega():
    rep = analyze_connectivity(Placement((5,), 3, 3), 2)
    assert rep.omega is None and not rep.omega_defined
    assert rep.per_node_nearest == ()


def test_pairwise_criterion_differs_from_graph_connectivity():
    # two tight pairs far apart: every node has a close neighbour, graph is split
    pl = Placement(at([(0, 0), (0, 1), (9, 9), (9, 8)], 10), 10, 10)
    rep = analyze_connectivity(pl, 1)
    assert rep.connected and not rep.graph_connected and rep.n_components == 2


def test_bridges_examples():
    pl = Placement(at([(0, 0), (0, 4)], 10), 10, 10)
    out, rep = insert_bridges(pl, 2)
    assert out.gamma[:2] == pl.gamma
    assert rep.bridges_added == (2,)
    assert rep.connected and rep.graph_connected

    pl = Placement(at([(0, 0), (0, 9)], 10), 10, 10)
    out, rep = insert_bridges(pl, 3)
    assert len(rep.bridges_added) <= 2 and rep.graph_connected


def test_bridges_noop_when_connected():
    pl = Placement(at([(0, 0), (1, 1), (2, 2)], 5), 5, 5)
    out, rep = insert_bridges(pl, 2)
    assert out == pl and rep.bridges_added == ()


def test_bridges_reject_bad_tau():
    with pytest.raises(ArgumentError):
        insert_bridges(Placement((0, 3), 2, 2), 0)


@pytest.mark.parametrize("tau", [2, 3, 4])
def test_connectivity_against_bfs_oracle(tau):
    rng = np.random.default_rng(tau)
    for _ in range(20):
        gamma = tuple(int(i) for i in rng.choice(400, size=12, replace=False))
        pl = Placement(gamma, 20, 20)
        rep = analyze_connectivity(pl, tau)
        coords = pl.coordinates()
        assert rep.n_components == bfs_components(coords, tau)
        assert rep.graph_connected == (rep.n_components == 1)
        assert rep.omega == max(rep.per_node_nearest)
        assert rep.connected == (rep.omega <= tau)
        out, brep = insert_bridges(pl, tau)
        assert out.gamma[:12] == gamma
        assert bfs_components(out.coordinates(), tau) == 1
        assert brep.graph_connected and brep.connected
