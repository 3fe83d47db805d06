import math

import numpy as np
import pytest
from scipy import stats

from sdfmcrt.errors import InvalidParameterError
from sdfmcrt.recording import RecordGrid
from sdfmcrt.rng import RandomStream
from sdfmcrt.sources import BeamSource, PlaneSource, PointSource, emit_positions_directions
from sdfmcrt.transport import emit, integrate_optical_depth
from sdfmcrt.validation import jacques_scene

N = 1_000_000


def test_point_isotropic_mean_direction():
    pos, d = emit_positions_directions(PointSource((0.1, 0.2, 0.3)), RandomStream(1), N)
    assert np.all(pos == [0.1, 0.2, 0.3])
    assert np.max(np.abs(np.linalg.norm(d, axis=1) - 1.0)) < 1e-12
    assert np.all(np.abs(d.mean(axis=0)) < 0.002)


def test_point_isotropic_chi_square_equal_solid_angle():
    _, d = emit_positions_directions(PointSource(), RandomStream(2), N)
    # 10 bands of equal height in cos(theta) x 10 azimuth sectors: 100 equal solid angles
    band = np.minimum(((d[:, 2] + 1.0) * 5.0).astype(int), 9)
    sector = np.minimum(((np.arctan2(d[:, 1], d[:, 0]) + np.pi) / (2 * np.pi) * 10).astype(int), 9)
    obs = np.bincount(band * 10 + sector, minlength=100)
    assert stats.chisquare(obs).pvalue > 0.01


def test_beam_radius_and_second_moment():
    src = BeamSource(center=(0.0, 0.0, 1.0), radius=0.3)
    pos, d = emit_positions_directions(src, RandomStream(3), N)
    r = np.hypot(pos[:, 0], pos[:, 1])
    assert r.max() <= 0.3
    assert np.all(pos[:, 2] == 1.0)
    assert np.all(d == [0.0, 0.0, -1.0])
    se = np.std(r * r) / math.sqrt(N)
    assert abs(np.mean(r * r) - 0.045) < 3 * se


def test_beam_equal_area_annuli():
    src = BeamSource(center=(0.0, 0.0, 0.0), radius=0.3)
    pos, _ = emit_positions_directions(src, RandomStream(4), N)
    r = np.hypot(pos[:, 0], pos[:, 1])
    edges = 0.3 * np.sqrt(np.linspace(0.0, 1.0, 21))
    edges[-1] = np.nextafter(0.3, 1.0)
    obs = np.histogram(r, bins=edges)[0]
    assert obs.sum() == N
    assert stats.chisquare(obs).pvalue > 0.01


def test_beam_oblique_disc_is_normal_to_direction():
    u = np.array([1.0, 1.0, -1.0]) / math.sqrt(3)
    src = BeamSource(center=(1.0, 2.0, 3.0), radius=0.5, direction=tuple(u))
    pos, d = emit_positions_directions(src, RandomStream(5), 100_000)
    off = pos - [1.0, 2.0, 3.0]
    assert np.max(np.abs(off @ u)) < 1e-12
    assert np.linalg.norm(off, axis=1).max() <= 0.5 + 1e-12
    assert np.allclose(d, u, atol=1e-15)
    assert np.all(np.abs(off.mean(axis=0)) < 0.01)


def test_plane_uniform_over_face():
    src = PlaneSource(z=2.0)
    pos, d = emit_positions_directions(src, RandomStream(6), N, lo=(-1, -2, 0), hi=(1, 2, 2))
    assert np.all(pos[:, 2] == 2.0)
    assert np.all((pos[:, 0] >= -1) & (pos[:, 0] < 1) & (pos[:, 1] >= -2) & (pos[:, 1] < 2))
    assert np.all(d == [0.0, 0.0, -1.0])
    obs = np.histogram2d(pos[:, 0], pos[:, 1], bins=10, range=[[-1, 1], [-2, 2]])[0].ravel()
    assert stats.chisquare(obs).pvalue > 0.01


def test_plane_explicit_ranges():
    src = PlaneSource(z=0.0, x_range=(0.2, 0.4), y_range=(-0.1, 0.0), direction=(0, 0, 2))
    pos, d = emit_positions_directions(src, RandomStream(7), 10_000)
    assert pos[:, 0].min() >= 0.2 and pos[:, 0].max() < 0.4
    assert pos[:, 1].min() >= -0.1 and pos[:, 1].max() < 0.0
    assert np.all(d == [0.0, 0.0, 1.0])


def test_plane_packets_enter_slab():
    scene = jacques_scene(630, dims=(10, 10, 20))
    cs = scene.compile()
    tissue = scene.material_index("tissue")
    rng = RandomStream(8)
    for _ in range(500):
        pk = emit(cs, rng)
        assert pk.weight == 1.0 and pk.n_scatters == 0 and pk.n_sdf_evals == 0
        assert pk.material == scene.material_index("air")
        pk.tau_remaining = 1e9
        event, root = integrate_optical_depth(cs, pk, rng, scene.new_grid())
        assert event == "boundary"
        assert scene.objects[root].material == "tissue"
        assert abs(pk.pos[2]) < 2e-6
    assert tissue == 1


@pytest.mark.parametrize("make", [
    lambda: BeamSource(center=(0, 0, 0), radius=0.0),
    lambda: BeamSource(center=(0, 0, 0), radius=1.0, direction=(0, 0, 0)),
    lambda: BeamSource(center=(0, 0), radius=1.0),
    lambda: PointSource((0.0, math.nan, 0.0)),
    lambda: PlaneSource(z=0.0, x_range=(1.0, 1.0)),
])
def test_invalid_sources(make):
    with pytest.raises(InvalidParameterError):
        make()


def test_direction_normalised():
    assert BeamSource(center=(0, 0, 0), radius=1.0, direction=(0, 3, 4)).direction == (0.0, 0.6, 0.8)


def test_streams_reproducible():
    a = emit_positions_directions(PointSource(), RandomStream(9, 2), 1000)
    b = emit_positions_directions(PointSource(), RandomStream(9, 2), 1000)
    c = emit_positions_directions(PointSource(), RandomStream(9, 3), 1000)
    assert np.array_equal(a[1], b[1])
    assert not np.array_equal(a[1], c[1])


def test_grid_extents_follow_scene_box():
    scene = jacques_scene(420, dims=(4, 4, 8))
    g = scene.new_grid()
    assert isinstance(g, RecordGrid)
    assert tuple(g.lo) == scene.bounds[0] and tuple(g.hi) == scene.bounds[1]
