import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emdof.errors import GeometryError
from emdof.geometry import (
    ArrayGeometry,
    PlaneSpec,
    Vec3,
    make_paired_planes,
    make_planar_array,
    min_cross_separation,
)


def as_set(pos, scale):
    return {tuple(np.round(p / scale, 9)) for p in pos}


def test_edge_grid_two_by_two():
    a = make_planar_array(PlaneSpec(2, 2, Vec3(0, 0, 0), grid="edge"))
    assert as_set(a.positions, 1) == {(-1, -1, 0), (1, -1, 0), (-1, 1, 0), (1, 1, 0)}


def test_cell_grid_two_by_two():
    a = make_planar_array(PlaneSpec(2, 2))
    assert as_set(a.positions, 1) == {(-.5, -.5, 0), (.5, -.5, 0), (-.5, .5, 0), (.5, .5, 0)}


@pytest.mark.parametrize("grid", ["cell", "edge"])
def test_single_element_is_center(grid):
    a = make_planar_array(PlaneSpec(10, 1, Vec3(0, 0, 5), grid=grid))
    assert len(a) == 1
    assert a[0] == Vec3(0, 0, 5)


def test_edge_grid_spacing_20():
    a = make_planar_array(PlaneSpec(10, 20, grid="edge"))
    assert len(a) == 400
    # brute-force nearest neighbour over every pair
    d = min(np.linalg.norm(p - q) for i, p in enumerate(a.positions) for q in a.positions[i + 1:])
    assert d == pytest.approx(10 / 19, rel=1e-12)


def test_cell_grid_spacing_20():
    a = make_planar_array(PlaneSpec(10, 20))
    x = np.unique(a.positions[:, 0])
    assert np.allclose(np.diff(x), 0.5)
    assert x[0] == pytest.approx(-4.75)


def test_row_major_x_fastest():
    a = make_planar_array(PlaneSpec(2, 3, grid="edge"))
    assert np.allclose(a.positions[:3, 0], [-1, 0, 1])
    assert np.allclose(a.positions[:3, 1], -1)
    assert np.allclose(a.positions[3:6, 1], 0)


@pytest.mark.parametrize("bad", [
    dict(side_length=0, grid_count=2),
    dict(side_length=-1, grid_count=2),
    dict(side_length=1, grid_count=0),
    dict(side_length=1, grid_count=2.5),
    dict(side_length=1, grid_count=2, grid="staggered"),
])
def test_plane_spec_rejects(bad):
    with pytest.raises(GeometryError):
        PlaneSpec(**bad)


def test_fig2_pair():
    src, rx = make_paired_planes(10, 20, 7)
    assert len(src) == len(rx) == 400
    assert np.all(src.positions[:, 2] == 0)
    assert np.all(rx.positions[:, 2] == 7)
    assert np.array_equal(src.positions[:, :2], rx.positions[:, :2])


def test_single_pair():
    src, rx = make_paired_planes(1, 1, 1)
    assert src[0] == Vec3(0, 0, 0) and rx[0] == Vec3(0, 0, 1)


def test_fig5_far_end():
    src, rx = make_paired_planes(5, 11, 13)
    assert len(src) == len(rx) == 121


@pytest.mark.parametrize("D", [0, -1, float("nan")])
def test_paired_rejects_distance(D):
    with pytest.raises(GeometryError):
        make_paired_planes(1, 2, D)


def test_cross_separation():
    assert min_cross_separation(*make_paired_planes(5, 4, 7)) == pytest.approx(7)
    assert min_cross_separation(*make_paired_planes(10, 20, 1)) == pytest.approx(1)
    a = ArrayGeometry([[0, 0, 0], [1, 0, 0]])
    b = ArrayGeometry([[1, 0, 0], [3, 3, 3]])
    assert min_cross_separation(a, b) == 0


def test_array_rejects_duplicates_and_empty():
    with pytest.raises(GeometryError):
        ArrayGeometry([[0, 0, 0], [0, 0, 0]])
    with pytest.raises(GeometryError):
        ArrayGeometry(np.zeros((0, 3)))


def test_positions_read_only():
    a = make_planar_array(PlaneSpec(1, 2))
    with pytest.raises(ValueError):
        a.positions[0, 0] = 3


@settings(max_examples=60, deadline=None)
@given(
    L=st.floats(0.1, 50),
    N=st.integers(1, 12),
    cx=st.floats(-10, 10), cy=st.floats(-10, 10), cz=st.floats(-10, 10),
    grid=st.sampled_from(["cell", "edge"]),
)
def test_grid_properties(L, N, cx, cy, cz, grid):
    spec = PlaneSpec(L, N, Vec3(cx, cy, cz), grid)
    a = make_planar_array(spec)
    p = a.positions
    assert len(a) == N * N
    tol = 1e-12 * L + 1e-12 * max(abs(cx), abs(cy))
    assert np.all(np.abs(p[:, 0] - cx) <= L / 2 + tol)
    assert np.all(np.abs(p[:, 1] - cy) <= L / 2 + tol)
    assert np.all(p[:, 2] == cz)
    rel = p - [cx, cy, cz]
    for mirror in ([-1, 1, 1], [1, -1, 1]):
        m = rel * mirror
        d = np.abs(m[:, None, :] - rel[None, :, :]).max(axis=-1).min(axis=1)
        assert d.max() <= 1e-12 * L + 1e-9


@settings(max_examples=30, deadline=None)
@given(L=st.floats(0.5, 20), N=st.integers(1, 10), D=st.floats(0.1, 100),
       grid=st.sampled_from(["cell", "edge"]))
def test_paired_separation_is_D(L, N, D, grid):
    assert min_cross_separation(*make_paired_planes(L, N, D, grid)) == pytest.approx(D, rel=1e-12)
