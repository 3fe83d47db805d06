"""Analytical oracles, reference scenes and the fits used to check the simulator.

Reference scenes:

* isotropic sphere: r = 0.5 cm, point source at the centre, mu_s = tau / r,
  used for the mean-scatter law ``N = tau^2/2 + tau``;
* Jacques slab: uniformly lit semi-infinite tissue (g = 0.9, n = 1.38 under
  air) whose depth fluence is fitted with a two-exponential model;
* glass sphere: n = 1.46 ball lens under a 0.3 cm top-hat beam;
* vessel network: capsules unioned inside a skin slab.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import InvalidParameterError
from .optics import OpticalProps, penetration_depth
from .scene import RunParams, Scene, SceneObject
from .sdf import Box, Capsule, Sphere, Translate, evaluate_compiled, union_all
from .sources import BeamSource, PlaneSource, PointSource
from .transport import SimulationResult, run_simulation

AIR = OpticalProps(mu_s=0.0, mu_a=0.0, g=0.0, n=1.0)


# --------------------------------------------------------------------------
# scatter-count law
# --------------------------------------------------------------------------

def expected_scatterings(tau_max):
    """Mean scatterings before escape from an isotropic sphere: ``tau^2/2 + tau``."""
    t = np.asarray(tau_max, dtype=float)
    if np.any(t < 0) or np.any(~np.isfinite(t)):
        raise InvalidParameterError("tau_max must be finite and >= 0")
    n = 0.5 * t * t + t
    return float(n) if n.ndim == 0 else n


SPHERE_RADIUS = 0.5


def isotropic_sphere_scene(tau_max: float, n_photons: int = 1_000_000, seed: int = 0,
                           workers: int = 1) -> Scene:
    """Index-matched, non-absorbing sphere with an isotropic point source at its centre."""
    if not tau_max >= 0:
        raise InvalidParameterError(f"tau_max must be >= 0, got {tau_max}")
    r = SPHERE_RADIUS
    half = 1.1 * r
    return Scene(
        materials={"air": AIR, "medium": OpticalProps(mu_s=tau_max / r, mu_a=0.0, g=0.0, n=1.0)},
        ambient="air",
        objects=[SceneObject("sphere", Sphere(r), "medium")],
        bounds=((-half,) * 3, (half,) * 3),
        source=PointSource((0.0, 0.0, 0.0)),
        grid_dims=(1, 1, 1),
        run=RunParams(n_photons=n_photons, seed=seed, workers=workers, roulette=False),
    )


@dataclass(frozen=True)
class ScatterRow:
    tau: float
    measured: float
    predicted: float
    std_error: float
    n_photons: int

    @property
    def rel_error(self) -> float:
        return (self.measured - self.predicted) / self.predicted if self.predicted else 0.0

    def within(self, n_sigma: float = 3.0, rel: float = 0.02) -> bool:
        return abs(self.measured - self.predicted) <= max(n_sigma * self.std_error, rel * self.predicted)


def mean_scatter_experiment(tau_list: Sequence[float], n_photons, seed: int = 0,
                            workers: int = 1) -> list[ScatterRow]:
    """Measured vs predicted mean scatter count per tau.

    ``n_photons`` is one count for every tau or a sequence matching ``tau_list``.
    """
    counts = [int(n_photons)] * len(tau_list) if np.isscalar(n_photons) else [int(n) for n in n_photons]
    if len(counts) != len(tau_list):
        raise InvalidParameterError("n_photons must be a scalar or match tau_list")
    rows = []
    for tau, n in zip(tau_list, counts):
        scene = isotropic_sphere_scene(float(tau), n_photons=n, seed=seed, workers=workers)
        res = run_simulation(scene)
        rows.append(ScatterRow(float(tau), res.mean_scatters, expected_scatterings(tau),
                               res.scatter_std_error, n))
    return rows


# --------------------------------------------------------------------------
# two-exponential depth model and its fit
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FluenceFitParams:
    """``psi(z) = psi0 * (C1 exp(-z k1/delta) - C2 exp(-z k2/delta))``."""

    psi0: float = 1.0
    C1: float = 1.0
    k1: float = 1.0
    C2: float = 0.0
    k2: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        for name in ("psi0", "C1", "k1", "C2", "k2", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.delta > 0:
            raise InvalidParameterError(f"delta must be > 0, got {self.delta}")
        if self.C1 < 0 or self.C2 < 0:
            raise InvalidParameterError(f"C1, C2 must be >= 0, got {self.C1}, {self.C2}")

    @classmethod
    def unchecked(cls, **values) -> "FluenceFitParams":
        """Build without the invariant checks (for flagged, out-of-domain fits)."""
        obj = object.__new__(cls)
        for f in ("psi0", "C1", "k1", "C2", "k2", "delta"):
            object.__setattr__(obj, f, float(values.get(f, getattr(cls, f))))
        return obj

    @property
    def penetration(self) -> float:
        """Decay length of the deep exponential, ``delta / k1``."""
        return self.delta / self.k1


# rows of the reference table: mu_a, reduced scattering, fitted C/k and delta
JACQUES_TABLE = {
    420: dict(mu_a=1.8, mu_s_reduced=82.0, C1=5.76, k1=1.00, C2=1.31, k2=10.2, delta=0.047),
    630: dict(mu_a=0.23, mu_s_reduced=21.0, C1=6.27, k1=1.00, C2=1.18, k2=14.4, delta=0.261),
}
JACQUES_G = 0.9
JACQUES_N = 1.38


def table_params(wavelength: int) -> FluenceFitParams:
    row = JACQUES_TABLE[int(wavelength)]
    return FluenceFitParams(1.0, row["C1"], row["k1"], row["C2"], row["k2"], row["delta"])


def fluence_depth_model(z, params: FluenceFitParams):
    z = np.asarray(z, dtype=float)
    p = params
    v = p.psi0 * (p.C1 * np.exp(-z * p.k1 / p.delta) - p.C2 * np.exp(-z * p.k2 / p.delta))
    return float(v) if v.ndim == 0 else v


@dataclass
class FitResult:
    params: FluenceFitParams
    rms: float
    converged: bool
    degenerate: bool
    n_evals: int
    free_delta: bool
    message: str = ""

    @property
    def delta(self) -> float:
        return self.params.delta


def _initial_guess(z, psi, delta):
    pos = psi > 0
    if pos.sum() < 2:
        return 0.0, 0.0, 10.0, delta if delta else max(z[-1] - z[0], 1e-3)
    zp, lp = z[pos], np.log(psi[pos])
    # deep half of the profile is dominated by the slow exponential
    half = slice(len(zp) // 2, None)
    if len(zp[half]) >= 2 and np.ptp(zp[half]) > 0:
        slope, icpt = np.polyfit(zp[half], lp[half], 1)
    else:
        slope, icpt = np.polyfit(zp, lp, 1)
    d = delta if delta else (-1.0 / slope if slope < 0 else np.ptp(z))
    c1 = math.exp(icpt)
    c2 = max(c1 - psi[0] * math.exp(z[0] / d), 0.05 * c1)
    return c1, c2, 10.0, d


def fit_fluence_depth(z, psi, *, delta: Optional[float] = None, free_delta: bool = False,
                      psi0: float = 1.0, xtol: float = 1e-8, max_evals: int = 500) -> FitResult:
    """Least-squares fit of the two-exponential model to a depth profile.

    With ``delta`` fixed, C1, k1, C2, k2 are fitted. With ``free_delta`` the
    model is only identifiable through ``delta/k1``, so k1 is pinned to 1 and
    C1, C2, k2, delta are fitted. ``psi0`` is held fixed (it only rescales C1, C2).
    """
    z = np.asarray(z, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if z.ndim != 1 or z.shape != psi.shape:
        raise InvalidParameterError("z and psi must be 1-D arrays of equal length")
    if len(z) < 5:
        raise InvalidParameterError(f"need at least 5 points, got {len(z)}")
    if np.any(np.diff(z) <= 0):
        raise InvalidParameterError("z must be strictly increasing")
    if not free_delta and not (delta and delta > 0):
        raise InvalidParameterError("a fixed delta > 0 is required unless free_delta is set")

    c1, c2, k2, d0 = _initial_guess(z, psi / psi0, None if free_delta else delta)

    # C1 = a^2 and C2 = b^2 keep the amplitudes non-negative under an unbounded LM step
    if free_delta:
        def unpack(x):
            return x[0] * x[0], 1.0, x[1] * x[1], x[2], x[3]
        x0 = np.array([math.sqrt(c1), math.sqrt(c2), k2, d0])
    else:
        def unpack(x):
            return x[0] * x[0], x[1], x[2] * x[2], x[3], float(delta)
        x0 = np.array([math.sqrt(c1), 1.0, math.sqrt(c2), k2])

    def resid(x):
        C1, k1, C2, k2_, d = unpack(x)
        return psi0 * (C1 * np.exp(-z * k1 / d) - C2 * np.exp(-z * k2_ / d)) - psi

    def jac(x):
        C1, k1, C2, k2_, d = unpack(x)
        e1 = np.exp(-z * k1 / d)
        e2 = np.exp(-z * k2_ / d)
        da = 2 * x[0] * psi0 * e1
        dk1 = -psi0 * C1 * z / d * e1
        dk2 = psi0 * C2 * z / d * e2
        if free_delta:
            db = -2 * x[1] * psi0 * e2
            dd = psi0 * z / (d * d) * (C1 * k1 * e1 - C2 * k2_ * e2)
            return np.column_stack([da, db, dk2, dd])
        db = -2 * x[2] * psi0 * e2
        return np.column_stack([da, dk1, db, dk2])

    with np.errstate(over="ignore", invalid="ignore"):
        sol = least_squares(resid, x0, jac=jac, method="lm", xtol=xtol, ftol=1e-15,
                            gtol=1e-15, max_nfev=max_evals)
    C1, k1, C2, k2_, d = unpack(sol.x)
    values = dict(psi0=psi0, C1=C1, k1=k1, C2=C2, k2=k2_, delta=d)
    r = sol.fun
    rms = float(np.sqrt(np.mean(r * r))) if np.all(np.isfinite(r)) else math.inf
    finite = all(math.isfinite(v) for v in values.values())
    amplitude = abs(psi0) * (abs(C1) + abs(C2)) if finite else 0.0
    scale = float(np.max(np.abs(psi))) if len(psi) else 0.0
    degenerate = (not finite or amplitude <= 1e-12 * max(scale, 1.0) or d <= 0 or C1 < 0 or C2 < 0)
    try:
        params = FluenceFitParams(**values)
    except InvalidParameterError:
        params = FluenceFitParams.unchecked(**values)
    converged = bool(sol.status > 0)
    msg = sol.message
    if degenerate:
        msg = f"degenerate fit (model amplitude or parameters collapsed); {msg}"
    return FitResult(params, rms, converged, degenerate, int(sol.nfev), free_delta, msg)


# --------------------------------------------------------------------------
# Jacques slab
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SlabLayout:
    """Geometry of the slab experiment; tissue surface at z = 0, light along -z."""

    depth: float       # tissue depth covered by the grid, cm
    width: float       # lateral extent of the grid, cm
    air: float         # air layer above the surface (one grid cell), cm
    dims: tuple[int, int, int]


def slab_layout(delta: float, dims=(100, 100, 200), lateral_factor: float = 40.0,
                depth_factor: float = 10.0) -> SlabLayout:
    nz = dims[2]
    depth = depth_factor * delta
    # the top grid cell is air, the remaining nz-1 cells are tissue
    air = depth / (nz - 1)
    return SlabLayout(depth, lateral_factor * delta, air, tuple(dims))


def slab_objects(layout: SlabLayout):
    """Tissue box under z = 0 plus the grid bounds for ``layout``."""
    w = layout.width / 2
    # tissue extends past the grid sideways and below so those walls act as open boundaries
    half = (1.25 * w, 1.25 * w, 0.625 * layout.depth)
    tissue_box = Translate(Box(half), (0.0, 0.0, -half[2]))
    return [SceneObject("tissue", tissue_box, "tissue")], ((-w, -w, -layout.depth), (w, w, layout.air))


def jacques_scene(wavelength: int, n_photons: int = 1_000_000, seed: int = 0, workers: int = 1,
                  dims=(100, 100, 200)) -> Scene:
    row = JACQUES_TABLE[int(wavelength)]
    mu_s = round(row["mu_s_reduced"] / (1.0 - JACQUES_G), 9)
    tissue = OpticalProps(mu_s=mu_s, mu_a=row["mu_a"], g=JACQUES_G, n=JACQUES_N)
    delta = penetration_depth(tissue.mu_a, tissue.mu_s, tissue.g)
    lay = slab_layout(delta, dims)
    objects, bounds = slab_objects(lay)
    return Scene(
        materials={"air": AIR, "tissue": tissue},
        ambient="air",
        objects=objects,
        bounds=bounds,
        source=PlaneSource(z=bounds[1][2], direction=(0.0, 0.0, -1.0)),
        grid_dims=tuple(dims),
        run=RunParams(n_photons=n_photons, seed=seed, workers=workers),
    )


def incident_irradiance(scene: Scene) -> float:
    """Launched photons per cm^2 of source area, per launched photon."""
    src = scene.source
    lo, hi = scene.bounds
    if isinstance(src, PlaneSource):
        xr = src.x_range or (lo[0], hi[0])
        yr = src.y_range or (lo[1], hi[1])
        return 1.0 / ((xr[1] - xr[0]) * (yr[1] - yr[0]))
    if isinstance(src, BeamSource):
        return 1.0 / (math.pi * src.radius ** 2)
    raise InvalidParameterError("incident irradiance is defined for plane and beam sources only")


def depth_profile(result: SimulationResult, central_fraction: float = 0.5):
    """Laterally averaged fluence per tissue layer, normalised to the incident irradiance.

    Returns ``(depth, psi)`` ordered from the surface down; ``depth`` is the
    cell-centre depth below z = 0 in cm. Air cells (z > 0) are dropped.
    """
    grid = result.grid
    phi = result.fluence() / incident_irradiance(result.scene)
    nx, ny, _ = grid.dims
    cx = _central(nx, central_fraction)
    cy = _central(ny, central_fraction)
    layer = phi[cx, cy, :].mean(axis=(0, 1))
    zc = grid.centers(2)
    tissue = zc < 0
    depth = -zc[tissue][::-1]
    return depth, layer[tissue][::-1]


def _central(n: int, frac: float) -> slice:
    k = max(1, int(round(n * frac)))
    start = (n - k) // 2
    return slice(start, start + k)


@dataclass
class JacquesReport:
    wavelength: int
    analytic_delta: float
    fit: FitResult
    depth: np.ndarray
    measured: np.ndarray
    fit_depth: np.ndarray
    model: np.ndarray
    surface_value: float
    peak_value: float
    peak_depth: float
    n_photons: int
    wall_time: float
    tolerance: float = 0.10

    @property
    def delta_rel_error(self) -> float:
        return abs(self.fit.delta - self.analytic_delta) / self.analytic_delta

    @property
    def delta_ok(self) -> bool:
        return self.delta_rel_error <= self.tolerance and not self.fit.degenerate

    @property
    def has_subsurface_peak(self) -> bool:
        return self.peak_value > self.surface_value

    @property
    def passed(self) -> bool:
        ok = self.delta_ok
        if self.wavelength == 420:
            ok = ok and self.has_subsurface_peak
        return ok

    def table(self) -> np.ndarray:
        """Rows of (depth, measured, model) over the fitted range."""
        keep = np.isin(self.depth, self.fit_depth)
        return np.column_stack([self.depth[keep], self.measured[keep], self.model])


def analyse_jacques(result: SimulationResult, wavelength: int, skip_cells: int = 2,
                    free_delta: bool = True) -> JacquesReport:
    """Fit the depth profile; the cells nearest the surface are left out of the fit."""
    tissue = result.scene.materials["tissue"]
    analytic = penetration_depth(tissue.mu_a, tissue.mu_s, tissue.g)
    depth, psi = depth_profile(result)
    zf, pf = depth[skip_cells:], psi[skip_cells:]
    fit = fit_fluence_depth(zf, pf, delta=analytic, free_delta=free_delta)
    model = fluence_depth_model(zf, fit.params)
    ipk = int(np.argmax(psi))
    return JacquesReport(int(wavelength), analytic, fit, depth, psi, zf, model,
                         float(psi[0]), float(psi[ipk]), float(depth[ipk]),
                         result.n_photons, result.wall_time)


def jacques_experiment(wavelength: int, n_photons: int = 1_000_000, seed: int = 0,
                       workers: int = 1, dims=(100, 100, 200), free_delta: bool = True,
                       scene: Optional[Scene] = None) -> JacquesReport:
    if scene is None:
        scene = jacques_scene(wavelength, n_photons, seed, workers, dims)
    res = run_simulation(scene, n_photons=n_photons, seed=seed, workers=workers)
    return analyse_jacques(res, wavelength, free_delta=free_delta)


# --------------------------------------------------------------------------
# glass sphere
# --------------------------------------------------------------------------

GLASS_N = 1.46
GLASS_CENTER = (0.5, 0.0, -1.0)
GLASS_RADIUS = 1.0
BEAM_RADIUS = 0.3


def glass_sphere_scene(n_photons: int = 1_000_000, seed: int = 0, workers: int = 1,
                       dims=(81, 81, 90)) -> Scene:
    """Ball lens under a top-hat beam. Odd lateral dims put the beam axis on a cell centre."""
    lo = (-1.5, -2.0, -4.0)
    hi = (2.5, 2.0, 0.5)
    return Scene(
        materials={"air": AIR, "glass": OpticalProps(mu_s=0.0, mu_a=0.0, g=0.0, n=GLASS_N)},
        ambient="air",
        objects=[SceneObject("sphere", Translate(Sphere(GLASS_RADIUS), GLASS_CENTER), "glass")],
        bounds=(lo, hi),
        source=BeamSource(center=(GLASS_CENTER[0], GLASS_CENTER[1], hi[2]), radius=BEAM_RADIUS,
                          direction=(0.0, 0.0, -1.0)),
        grid_dims=tuple(dims),
        run=RunParams(n_photons=n_photons, seed=seed, workers=workers, roulette=False),
    )


@dataclass
class GlassSphereReport:
    conservation_error: float     # |absorbed + escaped + lost - launched| / launched
    incident_level: float         # beam fluence per photon, 1/(pi R^2)
    axis_depth: np.ndarray        # z of on-axis cells below the sphere
    axis_fluence: np.ndarray
    max_axis_fluence: float
    focus_z: float
    top_escape: float             # weight leaving through +z, per photon

    @property
    def focus_ratio(self) -> float:
        return self.max_axis_fluence / self.incident_level


def analyse_glass_sphere(result: SimulationResult) -> GlassSphereReport:
    scene = result.scene
    src = scene.source
    grid = result.grid
    phi = result.fluence()
    i = int(np.argmin(np.abs(grid.centers(0) - src.center[0])))
    j = int(np.argmin(np.abs(grid.centers(1) - src.center[1])))
    zc = grid.centers(2)
    below = zc < GLASS_CENTER[2] - GLASS_RADIUS
    axis = phi[i, j, below]
    k = int(np.argmax(axis))
    n = result.n_photons
    launched = result.tallies()["launched"]
    bal = abs(result.energy_balance()) / launched
    return GlassSphereReport(bal, incident_irradiance(scene), zc[below], axis, float(axis[k]),
                             float(zc[below][k]), result.escaped_through("+z") / n)


# --------------------------------------------------------------------------
# vessel network
# --------------------------------------------------------------------------

SKIN = OpticalProps(mu_s=357.0, mu_a=0.459, g=0.9, n=1.38)
BLOOD = OpticalProps(mu_s=94.0, mu_a=231.0, g=0.9, n=1.38)
VESSEL_VOLUME = (0.0326, 0.0305, 0.0611)   # x, y, depth in cm

# (a, b, radius) in cm; tissue surface at z = 0
VESSEL_SEGMENTS = (
    ((-0.0120, -0.0152, -0.0150), (0.0040, 0.0152, -0.0180), 0.0025),
    ((-0.0030, -0.0020, -0.0165), (0.0130, 0.0090, -0.0300), 0.0018),
    ((0.0130, 0.0090, -0.0300), (0.0140, 0.0152, -0.0450), 0.0015),
    ((-0.0155, 0.0040, -0.0350), (0.0155, -0.0080, -0.0400), 0.0022),
    ((-0.0060, -0.0152, -0.0250), (-0.0040, 0.0000, -0.0370), 0.0016),
    ((0.0080, -0.0152, -0.0500), (-0.0100, 0.0152, -0.0520), 0.0028),
)


def vessel_network():
    return union_all(Capsule(a, b, r) for a, b, r in VESSEL_SEGMENTS)


def vessel_scene(n_photons: int = 100_000, seed: int = 0, workers: int = 1,
                 dims=(100, 100, 100)) -> Scene:
    sx, sy, depth = VESSEL_VOLUME
    air = depth / (dims[2] - 1)
    half = (0.625 * sx, 0.625 * sy, 0.625 * depth)
    tissue = Translate(Box(half), (0.0, 0.0, -half[2]))
    return Scene(
        materials={"air": AIR, "skin": SKIN, "blood": BLOOD},
        ambient="air",
        objects=[SceneObject("tissue", tissue, "skin"),
                 SceneObject("vessels", vessel_network(), "blood")],
        bounds=((-sx / 2, -sy / 2, -depth), (sx / 2, sy / 2, air)),
        source=PlaneSource(z=air, direction=(0.0, 0.0, -1.0)),
        grid_dims=tuple(dims),
        run=RunParams(n_photons=n_photons, seed=seed, workers=workers),
    )


@dataclass
class VesselReport:
    energy_balance: float          # relative
    vessel_density: float          # mean absorbed weight per cm^3 in vessel cells
    tissue_density: float          # same, tissue cells on the same layers
    layers: int                    # layers holding both kinds of cell
    evals_grid_total: int
    evals_packet_total: Optional[int]

    @property
    def vessels_absorb_more(self) -> bool:
        return self.vessel_density > self.tissue_density


def classify_cells(scene: Scene) -> np.ndarray:
    """Material index at every cell centre (shape of the grid)."""
    grid = scene.new_grid()
    pts = grid.cell_centers().reshape(-1, 3)
    mat = np.full(len(pts), scene.material_index(scene.ambient), dtype=np.int64)
    for o in scene.objects:
        inside = evaluate_compiled(o.sdf, pts) < 0
        mat[inside] = scene.material_index(o.material)
    return mat.reshape(grid.dims)


def analyse_vessels(result: SimulationResult) -> VesselReport:
    scene = result.scene
    grid = result.grid
    mat = classify_cells(scene)
    iv = scene.material_index("blood")
    it = scene.material_index("skin")
    dens = grid.absorbed / grid.cell_volume
    v_sum = t_sum = 0.0
    n_vessel = 0
    layers = 0
    for k in range(grid.dims[2]):
        mv = mat[:, :, k] == iv
        mt = mat[:, :, k] == it
        nv = int(mv.sum())
        if nv == 0 or not mt.any():
            continue
        layers += 1
        n_vessel += nv
        # weight each layer by its vessel-cell count so both means cover the same depths
        v_sum += dens[:, :, k][mv].sum()
        t_sum += nv * dens[:, :, k][mt].mean()
    vd = v_sum / n_vessel if n_vessel else 0.0
    td = t_sum / n_vessel if n_vessel else 0.0
    launched = result.tallies()["launched"]
    pk = None
    if result.packets is not None:
        pk = int(result.packets["n_sdf_evals"].sum())
    return VesselReport(abs(result.energy_balance()) / launched, float(vd), float(td), layers,
                        int(grid.evals.sum()), pk)


# --------------------------------------------------------------------------
# all-absorbing scene (conservation check)
# --------------------------------------------------------------------------

def absorbing_scene(n_photons: int = 1_000_000, seed: int = 0, workers: int = 1) -> Scene:
    """Point source inside a purely absorbing sphere thick enough that nothing escapes."""
    return Scene(
        materials={"air": AIR, "absorber": OpticalProps(mu_s=0.0, mu_a=1000.0, g=0.0, n=1.0)},
        ambient="air",
        objects=[SceneObject("sphere", Sphere(0.5), "absorber")],
        bounds=((-0.55,) * 3, (0.55,) * 3),
        source=PointSource((0.0, 0.0, 0.0)),
        grid_dims=(11, 11, 11),
        run=RunParams(n_photons=n_photons, seed=seed, workers=workers, roulette=False),
    )


REFERENCE_SCENES = {
    "isotropic_sphere": lambda: isotropic_sphere_scene(10.0),
    "jacques_420": lambda: jacques_scene(420),
    "jacques_630": lambda: jacques_scene(630),
    "glass_sphere": glass_sphere_scene,
    "vessels": vessel_scene,
    "absorbing_sphere": absorbing_scene,
}
