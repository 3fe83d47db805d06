"""Photon emission: isotropic point, uniform plane, collimated circular beam."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np

from ._jit import njit
from .errors import InvalidParameterError
from .optics import sample_azimuth, sample_isotropic
from .rng import RandomStream, uniform

SRC_POINT = 0
SRC_PLANE = 1
SRC_BEAM = 2
N_SOURCE_PARAMS = 10


def _unit(v, name):
    v = tuple(float(c) for c in v)
    if len(v) != 3:
        raise InvalidParameterError(f"{name}: expected 3 numbers")
    n = math.sqrt(sum(c * c for c in v))
    if not n > 0:
        raise InvalidParameterError(f"{name} must be non-zero")
    return tuple(c / n for c in v)


def _point(v, name):
    v = tuple(float(c) for c in v)
    if len(v) != 3 or not all(math.isfinite(c) for c in v):
        raise InvalidParameterError(f"{name}: expected 3 finite numbers")
    return v


@dataclass(frozen=True)
class PointSource:
    """Isotropic point emitter."""

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    kind: ClassVar[str] = "point"

    def __post_init__(self):
        object.__setattr__(self, "position", _point(self.position, "point source position"))

    def encode(self, lo, hi) -> tuple[int, np.ndarray]:
        p = np.zeros(N_SOURCE_PARAMS)
        p[:3] = self.position
        return SRC_POINT, p


@dataclass(frozen=True)
class PlaneSource:
    """Uniform illumination over a rectangle of the plane ``z = const``.

    ``x_range``/``y_range`` default to the bounding-box face.
    """

    z: float
    direction: tuple[float, float, float] = (0.0, 0.0, -1.0)
    x_range: Optional[tuple[float, float]] = None
    y_range: Optional[tuple[float, float]] = None
    kind: ClassVar[str] = "plane"

    def __post_init__(self):
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "direction", _unit(self.direction, "plane source direction"))
        for name in ("x_range", "y_range"):
            r = getattr(self, name)
            if r is not None:
                r = (float(r[0]), float(r[1]))
                if not r[1] > r[0]:
                    raise InvalidParameterError(f"plane source {name} must be increasing")
                object.__setattr__(self, name, r)

    def encode(self, lo, hi):
        xr = self.x_range or (lo[0], hi[0])
        yr = self.y_range or (lo[1], hi[1])
        p = np.zeros(N_SOURCE_PARAMS)
        p[:7] = [self.z, xr[0], xr[1], yr[0], yr[1], *self.direction[:2]]
        p[7] = self.direction[2]
        return SRC_PLANE, p


@dataclass(frozen=True)
class BeamSource:
    """Collimated top-hat beam: positions uniform over a disc normal to ``direction``."""

    center: tuple[float, float, float]
    radius: float
    direction: tuple[float, float, float] = (0.0, 0.0, -1.0)
    kind: ClassVar[str] = "beam"

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center, "beam center"))
        r = float(self.radius)
        if not r > 0:
            raise InvalidParameterError(f"beam radius must be > 0, got {r}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "direction", _unit(self.direction, "beam direction"))

    def encode(self, lo, hi):
        p = np.zeros(N_SOURCE_PARAMS)
        p[:3] = self.center
        p[3] = self.radius
        p[4:7] = self.direction
        return SRC_BEAM, p


SOURCES = {cls.kind: cls for cls in (PointSource, PlaneSource, BeamSource)}


@njit
def _perp_basis(ux, uy, uz):
    # any vector not parallel to u
    if abs(ux) < 0.9:
        ax, ay, az = 1.0, 0.0, 0.0
    else:
        ax, ay, az = 0.0, 1.0, 0.0
    # e1 = normalize(a x u), e2 = u x e1
    e1x = ay * uz - az * uy
    e1y = az * ux - ax * uz
    e1z = ax * uy - ay * ux
    n = math.sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
    e1x /= n
    e1y /= n
    e1z /= n
    e2x = uy * e1z - uz * e1y
    e2y = uz * e1x - ux * e1z
    e2z = ux * e1y - uy * e1x
    return e1x, e1y, e1z, e2x, e2y, e2z


@njit
def emit_kernel(s, kind, sp):
    """Returns ``(x, y, z, ux, uy, uz)`` for one launched packet."""
    if kind == SRC_POINT:
        ux, uy, uz = sample_isotropic(s)
        return sp[0], sp[1], sp[2], ux, uy, uz
    if kind == SRC_PLANE:
        x = sp[1] + (sp[2] - sp[1]) * uniform(s)
        y = sp[3] + (sp[4] - sp[3]) * uniform(s)
        return x, y, sp[0], sp[5], sp[6], sp[7]
    # beam
    r = sp[3] * math.sqrt(uniform(s))
    ca, sa = sample_azimuth(s)
    e1x, e1y, e1z, e2x, e2y, e2z = _perp_basis(sp[4], sp[5], sp[6])
    c = r * ca
    d = r * sa
    return (sp[0] + c * e1x + d * e2x, sp[1] + c * e1y + d * e2y, sp[2] + c * e1z + d * e2z,
            sp[4], sp[5], sp[6])


@njit
def _emit_many(s, kind, sp, out):
    for i in range(out.shape[0]):
        x, y, z, ux, uy, uz = emit_kernel(s, kind, sp)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z
        out[i, 3] = ux
        out[i, 4] = uy
        out[i, 5] = uz


def emit_positions_directions(source, rng: RandomStream, n: int, lo=(0, 0, 0), hi=(1, 1, 1)):
    """Sample ``n`` launches; returns ``(positions, directions)`` arrays of shape (n, 3)."""
    kind, sp = source.encode(np.asarray(lo, float), np.asarray(hi, float))
    out = np.empty((int(n), 6))
    _emit_many(rng.state, kind, sp, out)
    return out[:, :3], out[:, 3:]
