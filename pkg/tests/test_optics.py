import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from oracles import fresnel_unpolarised, hg_bin_probabilities, hg_mean_cosine, snell_angle
from sdfmcrt.errors import InvalidParameterError
from sdfmcrt.optics import (
    REFLECTED,
    REFRACTED,
    OpticalProps,
    fresnel_reflectance,
    hg_cos_theta,
    hg_pdf,
    penetration_depth,
    reflect,
    reflect_or_refract,
    reflect_or_refract_many,
    refract,
    rotate_direction,
    sample_azimuth,
    sample_hg_cosines,
    sample_hg_direction,
    sample_hg_directions,
    sample_optical_depth,
    sample_optical_depths,
    tau_from_uniform,
)
from sdfmcrt.rng import RandomStream

N = 1_000_000


# --- OpticalProps -------------------------------------------------------------

def test_props_derived():
    p = OpticalProps(mu_s=9.0, mu_a=1.0, g=0.5, n=1.4)
    assert p.mu_t == 10.0
    assert p.albedo == 0.9
    assert p.as_row() == [9.0, 1.0, 0.5, 1.4]


def test_props_albedo_undefined_without_extinction():
    with pytest.raises(ZeroDivisionError):
        OpticalProps().albedo


@pytest.mark.parametrize("kw", [
    {"mu_s": -1.0}, {"mu_a": -0.1}, {"g": 1.01}, {"g": -1.5}, {"n": 0.99}, {"mu_s": math.nan},
    {"mu_a": math.inf},
])
def test_props_invalid(kw):
    with pytest.raises(InvalidParameterError):
        OpticalProps(**kw)


@given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(-1, 1), st.floats(1, 4))
def test_props_invariants(mu_s, mu_a, g, n):
    p = OpticalProps(mu_s, mu_a, g, n)
    assert p.mu_t == mu_s + mu_a
    if p.mu_t > 0:
        assert 0.0 <= p.albedo <= 1.0


# --- optical depth --------------------------------------------------------------

def test_tau_at_inverse_e():
    assert tau_from_uniform(math.exp(-1.0)) == pytest.approx(1.0, abs=1e-15)


def test_tau_positive_and_scalar_matches_batch():
    a = RandomStream(4)
    b = RandomStream(4)
    batch = sample_optical_depths(a, 100)
    single = np.array([sample_optical_depth(b) for _ in range(100)])
    assert np.array_equal(batch, single)
    assert np.all(batch > 0)


def test_tau_moments():
    tau = sample_optical_depths(RandomStream(11), N)
    assert np.all(tau > 0) and np.all(np.isfinite(tau))
    assert abs(tau.mean() - 1.0) < 0.003
    assert abs(np.mean(tau * tau) - 2.0) < 0.02


def test_tau_ks():
    tau = sample_optical_depths(RandomStream(12), N)
    ks = stats.kstest(tau, "expon").statistic
    assert ks < 1.63 / math.sqrt(N)


# --- Henyey-Greenstein ------------------------------------------------------------

def test_hg_mean_cosine_isotropic():
    c = sample_hg_cosines(0.0, RandomStream(21), N)
    assert abs(c.mean()) < 0.002


def test_hg_mean_cosine_forward():
    expected = hg_mean_cosine(0.9)
    assert expected == pytest.approx(0.9, abs=1e-9)
    c = sample_hg_cosines(0.9, RandomStream(22), N)
    assert abs(c.mean() - expected) < 0.001


@pytest.mark.parametrize("g", [-0.5, 0.0, 0.5, 0.9])
def test_hg_chi_square(g):
    edges = np.linspace(-1.0, 1.0, 101)
    c = sample_hg_cosines(g, RandomStream(30 + int(10 * g)), N)
    obs = np.histogram(c, bins=edges)[0]
    exp = hg_bin_probabilities(g, edges) * N
    assert exp.sum() == pytest.approx(N, rel=1e-12)
    assert stats.chisquare(obs, exp).pvalue > 0.01


@pytest.mark.parametrize("g", [-0.9, -0.5, 0.3, 0.9])
def test_hg_pdf_normalised(g):
    from scipy import integrate
    assert integrate.quad(lambda c: hg_pdf(c, g), -1, 1)[0] == pytest.approx(1.0, rel=1e-8)


def test_hg_inverse_cdf_endpoints():
    for g in (-0.7, 0.0, 0.4, 0.9):
        assert hg_cos_theta(g, 0.0) == pytest.approx(-1.0, abs=1e-12)
        assert hg_cos_theta(g, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert hg_cos_theta(1.0, 0.3) == 1.0
    assert hg_cos_theta(-1.0, 0.3) == -1.0


def test_forced_no_deflection():
    assert rotate_direction(0.0, 0.0, 1.0, 1.0, 1.0, 0.0) == (0.0, 0.0, 1.0)
    u = np.array([0.3, -0.4, np.sqrt(0.75)])
    out = np.array(rotate_direction(*u, 1.0, 0.6, 0.8))
    assert np.allclose(out, u, atol=1e-15)


def test_g_one_keeps_direction():
    u = np.array([0.0, 0.6, 0.8])
    assert np.allclose(sample_hg_direction(u, 1.0, RandomStream(3)), u, atol=1e-15)


@pytest.mark.parametrize("u", [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0.36, 0.48, 0.8)])
def test_hg_directions_unit_and_mean_cosine(u):
    u = np.asarray(u, float)
    d = sample_hg_directions(u, 0.5, RandomStream(5), 200_000)
    assert np.allclose(np.linalg.norm(d, axis=1), 1.0, atol=1e-12)
    assert abs((d @ u).mean() - 0.5) < 0.005


def test_hg_azimuth_uniform():
    u = np.array([0.0, 0.0, 1.0])
    d = sample_hg_directions(u, 0.0, RandomStream(6), 200_000)
    phi = np.arctan2(d[:, 1], d[:, 0])
    obs = np.histogram(phi, bins=36, range=(-np.pi, np.pi))[0]
    assert stats.chisquare(obs).pvalue > 0.01


def test_azimuth_on_unit_circle():
    s = RandomStream(8).state
    for _ in range(1000):
        c, si = sample_azimuth(s)
        assert abs(c * c + si * si - 1.0) < 1e-15


# --- Fresnel ---------------------------------------------------------------------

def test_fresnel_examples():
    assert fresnel_reflectance(1.0, 1.5, 1.0) == 0.04
    crit = math.cos(math.asin(1 / 1.5))
    assert fresnel_reflectance(1.5, 1.0, crit * 0.99) == 1.0
    assert fresnel_reflectance(1.5, 1.0, 0.1) == 1.0
    assert fresnel_reflectance(1.3, 1.3, 0.4) == 0.0


@pytest.mark.parametrize("n1,n2", [(1.0, 1.5), (1.5, 1.0), (1.0, 1.38), (1.46, 1.0)])
def test_fresnel_vs_textbook(n1, n2):
    for th in np.linspace(0.0, 0.5 * np.pi - 1e-3, 200):
        assert fresnel_reflectance(n1, n2, math.cos(th)) == pytest.approx(
            fresnel_unpolarised(n1, n2, th), abs=1e-12)


@given(st.floats(1, 3), st.floats(1, 3), st.floats(0, 1))
def test_fresnel_in_unit_interval(n1, n2, c):
    assert 0.0 <= fresnel_reflectance(n1, n2, c) <= 1.0


@given(st.floats(1, 3), st.floats(1, 3))
def test_fresnel_symmetric_at_normal_incidence(n1, n2):
    assert fresnel_reflectance(n1, n2, 1.0) == pytest.approx(fresnel_reflectance(n2, n1, 1.0), abs=1e-15)


@pytest.mark.parametrize("n1,n2", [(1.0, 1.5), (1.5, 1.0), (1.38, 1.0)])
def test_fresnel_continuous_away_from_cusps(n1, n2):
    crit = math.sqrt(1.0 - (n2 / n1) ** 2) if n1 > n2 else 0.0
    c = np.linspace(crit + 0.01, 1.0, 100_001)
    r = np.array([fresnel_reflectance(n1, n2, x) for x in c])
    h = c[1] - c[0]
    assert np.max(np.abs(np.diff(r))) < 50 * h


@pytest.mark.parametrize("n1,n2", [(1.5, 1.0), (1.38, 1.0), (1.0, 1.5)])
def test_fresnel_continuous_at_cusp(n1, n2):
    # R -> 1 at the critical angle (or grazing incidence) with a sqrt cusp
    crit = math.sqrt(1.0 - (n2 / n1) ** 2) if n1 > n2 else 0.0
    gaps = [1.0 - fresnel_reflectance(n1, n2, crit + eps) for eps in (1e-4, 1e-6, 1e-8)]
    assert fresnel_reflectance(n1, n2, crit) == pytest.approx(1.0, abs=1e-6)
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[2] < 1e-2


# --- reflect / refract ----------------------------------------------------------------

def test_index_match_is_noop():
    d = np.array([0.0, 0.0, -1.0])
    new, kind = reflect_or_refract(d, [0, 0, 1], 1.2, 1.2, RandomStream(0))
    assert kind == "refracted"
    assert np.array_equal(new, d)


@given(st.floats(0.01, 1.5), st.floats(-np.pi, np.pi))
def test_mirror_law(theta, phi):
    m = np.array([0.0, 0.0, 1.0])
    d = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), -math.cos(theta)])
    r = reflect(d, m)
    assert r @ m == pytest.approx(-(d @ m), abs=1e-15)
    assert np.allclose(r[:2], d[:2], atol=1e-15)


def test_forced_reflection_branch_by_tir():
    th = math.radians(60)
    d = np.array([math.sin(th), 0.0, -math.cos(th)])
    m = np.array([0.0, 0.0, 1.0])
    rng = RandomStream(1)
    for _ in range(50):
        new, kind = reflect_or_refract(d, m, 1.5, 1.0, rng)
        assert kind == "reflected"
        assert np.allclose(new, [d[0], 0.0, -d[2]], atol=1e-15)


def test_snell_thirty_degrees():
    th1 = math.radians(30)
    d = np.array([math.sin(th1), 0.0, -math.cos(th1)])
    t = refract(d, [0, 0, 1], 1.0, 1.5)
    th2 = math.acos(-t[2])
    assert math.degrees(th2) == pytest.approx(19.47, abs=0.005)
    assert th2 == pytest.approx(snell_angle(th1, 1.0, 1.5), abs=1e-12)
    assert abs(1.0 * math.sin(th1) - 1.5 * math.hypot(t[0], t[1])) < 1e-12


@given(st.floats(0.0, 1.55), st.floats(-np.pi, np.pi), st.floats(1, 2.5), st.floats(1, 2.5))
def test_snell_law_and_coplanarity(theta, phi, n1, n2):
    d = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), -math.cos(theta)])
    m = np.array([0.0, 0.0, 1.0])
    if n1 * math.sin(theta) >= n2:
        with pytest.raises(ValueError):
            refract(d, m, n1, n2)
        return
    t = refract(d, m, n1, n2)
    assert abs(np.linalg.norm(t) - 1.0) < 1e-12
    assert abs(n1 * math.sin(theta) - n2 * math.hypot(t[0], t[1])) < 1e-12
    assert abs(np.cross(d, m) @ t) < 1e-12
    assert t[2] < 0


def test_branch_frequency_matches_fresnel():
    th = math.radians(70)
    d = np.tile([math.sin(th), 0.0, -math.cos(th)], (200_000, 1))
    m = np.tile([0.0, 0.0, 1.0], (200_000, 1))
    _, kinds = reflect_or_refract_many(d, m, 1.0, 1.5, RandomStream(2))
    r = fresnel_reflectance(1.0, 1.5, math.cos(th))
    frac = np.mean(kinds == REFLECTED)
    assert abs(frac - r) < 4 * math.sqrt(r * (1 - r) / len(kinds))


def test_unit_norm_on_a_million_inputs():
    rng = np.random.default_rng(7)
    d = rng.normal(size=(N, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    m = rng.normal(size=(N, 3))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    m[np.einsum("ij,ij->i", d, m) > 0] *= -1
    n1 = rng.uniform(1, 2, N)
    n2 = rng.uniform(1, 2, N)
    out, kinds = reflect_or_refract_many(d, m, n1, n2, RandomStream(9))
    assert np.max(np.abs(np.linalg.norm(out, axis=1) - 1.0)) < 1e-12
    assert set(np.unique(kinds)) <= {REFLECTED, REFRACTED}
    refr = kinds == REFRACTED
    # every refracted ray keeps travelling through the surface
    assert np.all(np.einsum("ij,ij->i", out[refr], m[refr]) < 0)
    assert np.all(np.einsum("ij,ij->i", out[~refr], m[~refr]) >= 0)


# --- penetration depth ---------------------------------------------------------------

def test_penetration_depth_examples():
    # reduced scattering given directly: mu_s (1 - g) with g = 0
    assert penetration_depth(1.8, 82.0) == pytest.approx(0.047, abs=5e-4)
    assert penetration_depth(0.23, 21.0) == pytest.approx(0.261, abs=5e-4)
    assert penetration_depth(1 / 3, 0.0, 0.7) == pytest.approx(math.sqrt(3), rel=1e-15)
    assert penetration_depth(1.8, 820.0, 0.9) == pytest.approx(penetration_depth(1.8, 82.0), rel=1e-12)


@pytest.mark.parametrize("mu_a", [0.0, -1.0])
def test_penetration_depth_domain(mu_a):
    with pytest.raises(InvalidParameterError):
        penetration_depth(mu_a, 10.0)
