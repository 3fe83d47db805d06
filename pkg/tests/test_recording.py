import math

import numpy as np
import pytest

from sdfmcrt.optics import OpticalProps
from sdfmcrt.recording import RecordGrid, normalize_fluence
from sdfmcrt.scene import RunParams, Scene
from sdfmcrt.sources import PlaneSource, PointSource
from sdfmcrt.transport import run_simulation


def chords(dims, lo, hi, p0, p1):
    """Per-cell chord length by clipping the segment against every cell box."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    h = (hi - lo) / np.asarray(dims)
    idx = np.stack(np.meshgrid(*[np.arange(n) for n in dims], indexing="ij"), -1)
    clo = lo + idx * h
    chi = clo + h
    p0 = np.asarray(p0, float)
    d = np.asarray(p1, float) - p0
    t0 = np.zeros(dims)
    t1 = np.ones(dims)
    for a in range(3):
        if d[a] == 0:
            outside = (p0[a] < clo[..., a]) | (p0[a] > chi[..., a])
            t1 = np.where(outside, 0.0, t1)
            continue
        ta = (clo[..., a] - p0[a]) / d[a]
        tb = (chi[..., a] - p0[a]) / d[a]
        t0 = np.maximum(t0, np.minimum(ta, tb))
        t1 = np.minimum(t1, np.maximum(ta, tb))
    return np.maximum(t1 - t0, 0.0) * np.linalg.norm(d)


def test_three_cells():
    g = RecordGrid((3, 1, 1), (0, 0, 0), (0.3, 1, 1))
    g.deposit_segment((0, 0.5, 0.5), (0.3, 0.5, 0.5), 1.0)
    assert np.allclose(g.path.ravel(), 0.1, atol=1e-15)
    assert g.clipped_length == 0.0


def test_zero_length_segment():
    g = RecordGrid((3, 3, 3), (0, 0, 0), (1, 1, 1))
    g.deposit_segment((0.4, 0.4, 0.4), (0.4, 0.4, 0.4), 5.0)
    assert not g.path.any()


def test_matches_per_cell_chord_oracle():
    rng = np.random.default_rng(0)
    dims, lo, hi = (5, 4, 3), (-1.0, 0.0, 2.0), (1.0, 1.0, 2.5)
    for _ in range(200):
        p0 = rng.uniform(lo, hi)
        p1 = rng.uniform(lo, hi)
        w = rng.uniform(0.1, 2.0)
        g = RecordGrid(dims, lo, hi)
        g.deposit_segment(p0, p1, w)
        assert np.allclose(g.path, w * chords(dims, lo, hi, p0, p1), rtol=0, atol=1e-12)


def test_axis_aligned_along_faces():
    # a segment running exactly along a cell face goes to the upper cell
    g = RecordGrid((4, 4, 1), (0, 0, 0), (1, 1, 1))
    g.deposit_segment((0.0, 0.5, 0.5), (1.0, 0.5, 0.5), 1.0)
    assert np.allclose(g.path[:, 2, 0], 0.25, atol=1e-15)
    assert g.path.sum() == pytest.approx(1.0, abs=1e-15)


def test_random_segments_total():
    rng = np.random.default_rng(1)
    lo, hi = np.array([-1.0, -2.0, 0.0]), np.array([1.0, 2.0, 3.0])
    g = RecordGrid((17, 23, 9), lo, hi)
    p0 = rng.uniform(lo, hi, size=(10_000, 3))
    p1 = rng.uniform(lo, hi, size=(10_000, 3))
    w = rng.uniform(0, 1, 10_000)
    for a, b, x in zip(p0, p1, w):
        g.deposit_segment(a, b, x)
    expected = math.fsum(w * np.linalg.norm(p1 - p0, axis=1))
    assert abs(g.path.sum() - expected) <= 1e-9 * expected
    assert g.path.min() >= 0


def test_refinement_invariance():
    rng = np.random.default_rng(2)
    lo, hi = np.zeros(3), np.ones(3)
    coarse = RecordGrid((4, 4, 4), lo, hi)
    fine = RecordGrid((12, 12, 12), lo, hi)
    odd = RecordGrid((7, 13, 5), lo, hi)
    for _ in range(2000):
        a = rng.uniform(-0.2, 1.2, 3)
        b = rng.uniform(-0.2, 1.2, 3)
        for g in (coarse, fine, odd):
            g.deposit_segment(a, b, 0.7)
    assert fine.path.sum() == pytest.approx(coarse.path.sum(), rel=1e-9)
    assert odd.path.sum() == pytest.approx(coarse.path.sum(), rel=1e-9)
    assert fine.clipped_length == pytest.approx(coarse.clipped_length, rel=1e-9)
    # nested refinement: each coarse cell equals the sum of its 3x3x3 children
    agg = fine.path.reshape(4, 3, 4, 3, 4, 3).sum(axis=(1, 3, 5))
    assert np.allclose(agg, coarse.path, rtol=1e-9, atol=1e-12)


def test_segments_clipped_to_extents():
    g = RecordGrid((2, 2, 2), (0, 0, 0), (1, 1, 1))
    g.deposit_segment((-1.0, 0.5, 0.5), (2.0, 0.5, 0.5), 2.0)
    assert g.path.sum() == pytest.approx(2.0, abs=1e-14)
    assert g.clipped_length == pytest.approx(4.0, abs=1e-14)
    g.deposit_segment((5, 5, 5), (6, 6, 6), 1.0)
    assert g.path.sum() == pytest.approx(2.0, abs=1e-14)


def test_point_deposit_and_half_open_binning():
    g = RecordGrid((3, 2, 2), (0, 0, 0), (0.3, 1, 1))
    assert g.deposit_absorption((0.05, 0.25, 0.25), 0.5)
    assert g.absorbed[0, 0, 0] == 0.5
    # faces belong to the upper cell, the outer face to the last cell
    g.deposit_absorption((0.1, 0.5, 0.0), 1.0)
    assert g.absorbed[1, 1, 0] == 1.0
    g.deposit_absorption((0.3, 1.0, 1.0), 2.0)
    assert g.absorbed[2, 1, 1] == 2.0
    assert g.record_sdf_evals((0.2, 0.5, 0.5), 7)
    assert g.evals[2, 1, 1] == 7 and g.evals.dtype == np.int64


def test_out_of_extents_discarded():
    g = RecordGrid((2, 2, 2), (0, 0, 0), (1, 1, 1))
    assert not g.deposit_absorption((1.5, 0.5, 0.5), 0.3)
    assert not g.record_sdf_evals((0.5, -0.1, 0.5), 4)
    assert not g.absorbed.any() and not g.evals.any()
    assert g.discarded_absorption == 0.3
    assert g.discarded_evals == 4


def test_merge():
    a = RecordGrid((2, 2, 2), (0, 0, 0), (1, 1, 1))
    b = a.empty_like()
    a.deposit_absorption((0.1, 0.1, 0.1), 1.0)
    b.deposit_absorption((0.1, 0.1, 0.1), 2.0)
    b.record_sdf_evals((0.9, 0.9, 0.9), 3)
    a.merge(b)
    assert a.absorbed[0, 0, 0] == 3.0 and a.evals[1, 1, 1] == 3
    with pytest.raises(ValueError):
        a.merge(RecordGrid((2, 2, 3), (0, 0, 0), (1, 1, 1)))


@pytest.mark.parametrize("dims,lo,hi", [((0, 1, 1), (0, 0, 0), (1, 1, 1)), ((1, 1), (0, 0, 0), (1, 1, 1)),
                                        ((1, 1, 1), (0, 0, 0), (1, 0, 1))])
def test_invalid_grid(dims, lo, hi):
    with pytest.raises(ValueError):
        RecordGrid(dims, lo, hi)


def test_normalize_fluence():
    g = RecordGrid((2, 1, 1), (0, 0, 0), (2, 1, 1))
    g.deposit_segment((0, 0.5, 0.5), (2, 0.5, 0.5), 1.0)
    assert np.allclose(normalize_fluence(g, 4), 0.25)
    assert np.array_equal(g.normalize_fluence(4), normalize_fluence(g, 4))
    with pytest.raises(ValueError):
        normalize_fluence(g, 0)


def _slab(props, n_photons, dims=(4, 4, 20), seed=0, source=None, bounds=((0, 0, 0), (1, 1, 1))):
    return Scene({"m": props}, "m", [], bounds, source or PlaneSource(z=bounds[1][2]), dims,
                 RunParams(n_photons=n_photons, seed=seed))


def test_transparent_beam_fluence_is_inverse_area():
    scene = _slab(OpticalProps(), 20_000, bounds=((0, 0, 0), (2, 0.5, 1)))
    res = run_simulation(scene)
    phi = res.fluence()
    area = 2 * 0.5
    # each depth layer sees every photon exactly once
    assert np.allclose(phi.mean(axis=(0, 1)), 1 / area, rtol=1e-12)
    # cell values scatter only through the lateral launch position (binomial)
    p = 1 / 16
    sd = math.sqrt(p * (1 - p) / 20_000) / p / area
    assert np.max(np.abs(phi - 1 / area)) < 5 * sd
    assert res.escaped == pytest.approx(20_000)


def test_beer_lambert_depth_profile():
    mu_a = 2.0
    n = 100_000
    res = run_simulation(_slab(OpticalProps(mu_a=mu_a), n))
    layer = res.grid.path.sum(axis=(0, 1))[::-1] / n      # per photon, from the top down
    z = np.linspace(0, 1, 21)
    expected = (np.exp(-mu_a * z[:-1]) - np.exp(-mu_a * z[1:])) / mu_a
    # per-photon chord in a layer is bounded by the layer width: binomial-like variance
    sd = np.sqrt(0.05 * expected / n)
    assert np.all(np.abs(layer - expected) < 4 * sd)
    assert res.escaped / n == pytest.approx(math.exp(-mu_a), abs=4 * math.sqrt(math.exp(-2) / n))


def test_absorbed_matches_mu_a_times_path():
    props = OpticalProps(mu_s=10.0, mu_a=1.0, g=0.0)
    seeds = range(16)
    diffs = []
    for s in seeds:
        res = run_simulation(_slab(props, 5_000, dims=(5, 5, 5), seed=s,
                                   source=PointSource((0.5, 0.5, 0.5))))
        diffs.append(res.grid.absorbed - props.mu_a * res.grid.path)
        assert abs(res.energy_balance()) < 1e-12 * res.n_photons
    diffs = np.array(diffs)
    # expected interactions per cell in the whole run
    events = props.mu_t * res.grid.path * len(seeds)
    mean = diffs.mean(axis=0)
    se = diffs.std(axis=0, ddof=1) / math.sqrt(len(seeds))
    busy = events >= 1000
    assert busy.sum() >= 50
    z = np.abs(mean[busy]) / se[busy]
    assert np.mean(z > 3) <= 0.05
    total = diffs.sum(axis=(1, 2, 3))
    assert abs(total.mean()) < 3 * total.std(ddof=1) / math.sqrt(len(seeds))
