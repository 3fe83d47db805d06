"""Interaction physics: free paths, Henyey-Greenstein scattering, Fresnel boundaries."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .errors import InvalidParameterError
from .rng import RandomStream, uniform, uniform_open_closed

REFLECTED = 0
REFRACTED = 1
_KIND_NAMES = {REFLECTED: "reflected", REFRACTED: "refracted"}


@dataclass(frozen=True)
class OpticalProps:
    """Optical properties of one medium (coefficients in cm^-1)."""

    mu_s: float = 0.0
    mu_a: float = 0.0
    g: float = 0.0
    n: float = 1.0

    def __post_init__(self):
        for name in ("mu_s", "mu_a", "g", "n"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.mu_s < 0:
            raise InvalidParameterError(f"mu_s must be >= 0, got {self.mu_s}")
        if self.mu_a < 0:
            raise InvalidParameterError(f"mu_a must be >= 0, got {self.mu_a}")
        if not -1.0 <= self.g <= 1.0:
            raise InvalidParameterError(f"g must lie in [-1, 1], got {self.g}")
        if self.n < 1.0:
            raise InvalidParameterError(f"n must be >= 1, got {self.n}")

    @property
    def mu_t(self) -> float:
        return self.mu_s + self.mu_a

    @property
    def albedo(self) -> float:
        if self.mu_t <= 0:
            raise ZeroDivisionError("albedo undefined for mu_t = 0")
        return self.mu_s / self.mu_t

    def as_row(self) -> list[float]:
        return [self.mu_s, self.mu_a, self.g, self.n]


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@njit
def tau_from_uniform(xi):
    return -math.log(xi)


@njit
def sample_tau(s):
    return -math.log(uniform_open_closed(s))


@njit
def hg_cos_theta(g, xi):
    """Inverse CDF of the Henyey-Greenstein deflection cosine."""
    if g == 0.0:
        return 2.0 * xi - 1.0
    if g >= 1.0:
        return 1.0
    if g <= -1.0:
        return -1.0
    tmp = (1.0 - g * g) / (1.0 - g + 2.0 * g * xi)
    c = (1.0 + g * g - tmp * tmp) / (2.0 * g)
    return min(max(c, -1.0), 1.0)


@njit
def sample_azimuth(s):
    """``(cos phi, sin phi)`` with phi uniform, without calling cos/sin.

    A point drawn uniformly in the unit disc has a uniform polar angle psi;
    the double-angle formulas give phi = 2 psi. Arithmetic only, so compiled
    and interpreted kernels agree bit for bit.
    """
    while True:
        a = 2.0 * uniform(s) - 1.0
        b = 2.0 * uniform(s) - 1.0
        r2 = a * a + b * b
        if 0.0 < r2 <= 1.0:
            return (a * a - b * b) / r2, 2.0 * a * b / r2


@njit
def rotate_direction(ux, uy, uz, cos_t, cp, sp):
    """Deflect unit ``u`` by polar ``acos(cos_t)`` and azimuth ``(cos, sin) = (cp, sp)``."""
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    if abs(uz) > 1.0 - 1e-12:
        # frame degenerate along z: build directly in the lab frame
        nx = sin_t * cp
        ny = sin_t * sp
        nz = cos_t if uz > 0.0 else -cos_t
    else:
        temp = math.sqrt(1.0 - uz * uz)
        nx = sin_t * (ux * uz * cp - uy * sp) / temp + ux * cos_t
        ny = sin_t * (uy * uz * cp + ux * sp) / temp + uy * cos_t
        nz = -sin_t * cp * temp + uz * cos_t
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    return nx / norm, ny / norm, nz / norm


@njit
def sample_hg(s, ux, uy, uz, g):
    cos_t = hg_cos_theta(g, uniform(s))
    cp, sp = sample_azimuth(s)
    return rotate_direction(ux, uy, uz, cos_t, cp, sp)


@njit
def sample_isotropic(s):
    cos_t = 2.0 * uniform(s) - 1.0
    cp, sp = sample_azimuth(s)
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    return sin_t * cp, sin_t * sp, cos_t


@njit
def fresnel(n1, n2, cos_i):
    """Unpolarised Fresnel reflectance (mean of s and p)."""
    if n1 == n2:
        return 0.0
    cos_i = min(max(cos_i, 0.0), 1.0)
    sin_t = n1 / n2 * math.sqrt(max(0.0, 1.0 - cos_i * cos_i))
    if sin_t >= 1.0:
        return 1.0
    cos_t = math.sqrt(1.0 - sin_t * sin_t)
    a = n1 * cos_i - n2 * cos_t
    b = n1 * cos_i + n2 * cos_t
    c = n1 * cos_t - n2 * cos_i
    d = n1 * cos_t + n2 * cos_i
    # ratio of squares keeps normal incidence exact, e.g. 0.25 / 6.25
    rs = (a * a) / (b * b)
    rp = (c * c) / (d * d)
    return 0.5 * (rs + rp)


@njit
def reflect_dir(dx, dy, dz, nx, ny, nz):
    dn = dx * nx + dy * ny + dz * nz
    return dx - 2.0 * dn * nx, dy - 2.0 * dn * ny, dz - 2.0 * dn * nz


@njit
def refract_dir(dx, dy, dz, nx, ny, nz, n1, n2):
    """Snell refraction; the normal must point against ``d``. Caller excludes TIR."""
    cos_i = -(dx * nx + dy * ny + dz * nz)
    eta = n1 / n2
    k = 1.0 - eta * eta * (1.0 - cos_i * cos_i)
    f = eta * cos_i - math.sqrt(max(k, 0.0))
    tx = eta * dx + f * nx
    ty = eta * dy + f * ny
    tz = eta * dz + f * nz
    norm = math.sqrt(tx * tx + ty * ty + tz * tz)
    return tx / norm, ty / norm, tz / norm


@njit
def reflect_or_refract_kernel(s, dx, dy, dz, nx, ny, nz, n1, n2):
    """Stochastic Fresnel branch. Returns ``(kind, x, y, z)``."""
    cos_i = -(dx * nx + dy * ny + dz * nz)
    r = fresnel(n1, n2, cos_i)
    if r >= 1.0 or (r > 0.0 and uniform(s) < r):
        x, y, z = reflect_dir(dx, dy, dz, nx, ny, nz)
        return REFLECTED, x, y, z
    if n1 == n2:
        return REFRACTED, dx, dy, dz
    x, y, z = refract_dir(dx, dy, dz, nx, ny, nz, n1, n2)
    return REFRACTED, x, y, z


@njit
def _fill_tau(s, out):
    for i in range(out.shape[0]):
        out[i] = sample_tau(s)


@njit
def _fill_hg_cos(s, g, out):
    for i in range(out.shape[0]):
        out[i] = hg_cos_theta(g, uniform(s))


@njit
def _fill_hg_dirs(s, ux, uy, uz, g, out):
    for i in range(out.shape[0]):
        x, y, z = sample_hg(s, ux, uy, uz, g)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z


@njit
def _fill_reflect_or_refract(s, dirs, normals, n1, n2, out, kinds):
    for i in range(dirs.shape[0]):
        k, x, y, z = reflect_or_refract_kernel(s, dirs[i, 0], dirs[i, 1], dirs[i, 2],
                                               normals[i, 0], normals[i, 1], normals[i, 2],
                                               n1[i], n2[i])
        kinds[i] = k
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z


# --------------------------------------------------------------------------
# Python-facing operations
# --------------------------------------------------------------------------

def sample_optical_depth(rng: RandomStream) -> float:
    return sample_tau(rng.state)


def sample_optical_depths(rng: RandomStream, n: int) -> np.ndarray:
    out = np.empty(int(n))
    _fill_tau(rng.state, out)
    return out


def sample_hg_direction(incoming, g: float, rng: RandomStream) -> np.ndarray:
    u = np.asarray(incoming, dtype=float)
    return np.array(sample_hg(rng.state, u[0], u[1], u[2], float(g)))


def sample_hg_directions(incoming, g: float, rng: RandomStream, n: int) -> np.ndarray:
    u = np.asarray(incoming, dtype=float)
    out = np.empty((int(n), 3))
    _fill_hg_dirs(rng.state, u[0], u[1], u[2], float(g), out)
    return out


def sample_hg_cosines(g: float, rng: RandomStream, n: int) -> np.ndarray:
    out = np.empty(int(n))
    _fill_hg_cos(rng.state, float(g), out)
    return out


def hg_pdf(cos_t, g: float):
    """Henyey-Greenstein density of the deflection cosine on [-1, 1]."""
    cos_t = np.asarray(cos_t, dtype=float)
    return 0.5 * (1.0 - g * g) / (1.0 + g * g - 2.0 * g * cos_t) ** 1.5


def fresnel_reflectance(n1: float, n2: float, cos_i: float) -> float:
    return fresnel(float(n1), float(n2), float(cos_i))


def reflect(direction, normal) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    m = np.asarray(normal, dtype=float)
    return np.array(reflect_dir(d[0], d[1], d[2], m[0], m[1], m[2]))


def refract(direction, normal, n1: float, n2: float) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    m = np.asarray(normal, dtype=float)
    cos_i = -float(d @ m)
    if (n1 / n2) ** 2 * (1.0 - cos_i * cos_i) > 1.0:
        raise ValueError("total internal reflection: no refracted ray")
    return np.array(refract_dir(d[0], d[1], d[2], m[0], m[1], m[2], float(n1), float(n2)))


def reflect_or_refract(direction, normal, n1: float, n2: float,
                       rng: RandomStream) -> tuple[np.ndarray, str]:
    """Fresnel-weighted random choice between mirror reflection and refraction.

    ``normal`` must face against ``direction``.
    """
    d = np.asarray(direction, dtype=float)
    m = np.asarray(normal, dtype=float)
    kind, x, y, z = reflect_or_refract_kernel(rng.state, d[0], d[1], d[2], m[0], m[1], m[2],
                                              float(n1), float(n2))
    return np.array([x, y, z]), _KIND_NAMES[int(kind)]


def reflect_or_refract_many(directions, normals, n1, n2,
                            rng: RandomStream) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`reflect_or_refract`; kinds are REFLECTED / REFRACTED codes."""
    d = np.ascontiguousarray(directions, dtype=float).reshape(-1, 3)
    m = np.ascontiguousarray(normals, dtype=float).reshape(-1, 3)
    k = d.shape[0]
    a = np.broadcast_to(np.asarray(n1, dtype=float), (k,)).copy()
    b = np.broadcast_to(np.asarray(n2, dtype=float), (k,)).copy()
    out = np.empty((k, 3))
    kinds = np.empty(k, dtype=np.int64)
    _fill_reflect_or_refract(rng.state, d, m, a, b, out, kinds)
    return out, kinds


def penetration_depth(mu_a: float, mu_s: float, g: float = 0.0) -> float:
    """Diffusion-theory fluence decay length ``1/sqrt(3 mu_a (mu_a + mu_s (1-g)))`` in cm."""
    if not mu_a > 0:
        raise InvalidParameterError(f"penetration depth needs mu_a > 0, got {mu_a}")
    return 1.0 / math.sqrt(3.0 * mu_a * (mu_a + mu_s * (1.0 - g)))
