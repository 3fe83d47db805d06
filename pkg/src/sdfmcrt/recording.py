"""Cartesian tally grids: track-length fluence, absorbed weight, SDF-evaluation counts."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._jit import njit

# diagnostics slots of GridArrays.diag
DIAG_DISCARDED_ABS = 0      # absorption deposits outside the extents
DIAG_DISCARDED_EVALS = 1    # evaluation counts outside the extents
DIAG_CLIPPED_LENGTH = 2     # weighted path length falling outside the extents
N_DIAG = 3


class GridArrays(NamedTuple):
    """Kernel view of a :class:`RecordGrid`."""

    lo: np.ndarray        # (3,)
    hi: np.ndarray        # (3,)
    path: np.ndarray      # (nx, ny, nz) float64, weight * cm
    absorbed: np.ndarray  # (nx, ny, nz) float64
    evals: np.ndarray     # (nx, ny, nz) int64
    diag: np.ndarray      # (N_DIAG,) float64


@njit(inline="always")
def cell_index(lo, hi, n, x):
    """Half-open binning ``[lo, hi)`` with the last cell closed; -1 if outside."""
    if x < lo or x > hi:
        return -1
    i = int(math.floor((x - lo) / (hi - lo) * n))
    if i >= n:
        i = n - 1
    if i < 0:
        i = 0
    return i


@njit(inline="always")
def deposit_point(g, x, y, z, w):
    nx, ny, nz = g.absorbed.shape
    i = cell_index(g.lo[0], g.hi[0], nx, x)
    j = cell_index(g.lo[1], g.hi[1], ny, y)
    k = cell_index(g.lo[2], g.hi[2], nz, z)
    if i < 0 or j < 0 or k < 0:
        g.diag[DIAG_DISCARDED_ABS] += w
        return False
    g.absorbed[i, j, k] += w
    return True


@njit(inline="always")
def count_point(g, x, y, z, c):
    nx, ny, nz = g.evals.shape
    i = cell_index(g.lo[0], g.hi[0], nx, x)
    j = cell_index(g.lo[1], g.hi[1], ny, y)
    k = cell_index(g.lo[2], g.hi[2], nz, z)
    if i < 0 or j < 0 or k < 0:
        g.diag[DIAG_DISCARDED_EVALS] += c
        return False
    g.evals[i, j, k] += c
    return True


@njit(inline="always")
def deposit_segment_kernel(g, x0, y0, z0, x1, y1, z1, w):
    """Add ``w * chord`` to every cell crossed by the segment (Amanatides-Woo walk).

    The walk is parametrised by ``t`` in [0, 1] along the segment, so the
    deposited total is ``w * |p1 - p0|`` up to rounding.
    """
    dx = x1 - x0
    dy = y1 - y0
    dz = z1 - z0
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    if length == 0.0 or w == 0.0:
        return
    # clip to the extents (Liang-Barsky)
    t0, t1 = _clip_axis(g.lo[0], g.hi[0], x0, dx, 0.0, 1.0)
    t0, t1 = _clip_axis(g.lo[1], g.hi[1], y0, dy, t0, t1)
    t0, t1 = _clip_axis(g.lo[2], g.hi[2], z0, dz, t0, t1)
    if t1 <= t0:
        g.diag[DIAG_CLIPPED_LENGTH] += w * length
        return
    clipped = (1.0 - (t1 - t0)) * length
    if clipped > 0.0:
        g.diag[DIAG_CLIPPED_LENGTH] += w * clipped

    nx, ny, nz = g.path.shape
    cx, sx, tmx, tdx = _axis_setup(g.lo[0], g.hi[0], nx, x0, dx, t0)
    cy, sy, tmy, tdy = _axis_setup(g.lo[1], g.hi[1], ny, y0, dy, t0)
    cz, sz, tmz, tdz = _axis_setup(g.lo[2], g.hi[2], nz, z0, dz, t0)

    t = t0
    wl = w * length
    while True:
        if tmx <= tmy and tmx <= tmz:
            tn = tmx
            a = 0
        elif tmy <= tmz:
            tn = tmy
            a = 1
        else:
            tn = tmz
            a = 2
        if tn >= t1:
            g.path[cx, cy, cz] += wl * (t1 - t)
            return
        if tn > t:
            g.path[cx, cy, cz] += wl * (tn - t)
            t = tn
        if a == 0:
            nxt = cx + sx
            if nxt < 0 or nxt >= nx:
                break
            cx = nxt
            tmx += tdx
        elif a == 1:
            nxt = cy + sy
            if nxt < 0 or nxt >= ny:
                break
            cy = nxt
            tmy += tdy
        else:
            nxt = cz + sz
            if nxt < 0 or nxt >= nz:
                break
            cz = nxt
            tmz += tdz
    # rounding put the exit before t1; charge the remainder to the last cell
    g.path[cx, cy, cz] += wl * (t1 - t)


@njit(inline="always")
def _clip_axis(lo, hi, p, d, t0, t1):
    if d == 0.0:
        if p < lo or p > hi:
            return 1.0, 0.0
        return t0, t1
    ta = (lo - p) / d
    tb = (hi - p) / d
    if ta > tb:
        ta, tb = tb, ta
    return max(t0, ta), min(t1, tb)


@njit(inline="always")
def _axis_setup(lo, hi, n, x0, d, t0):
    h = (hi - lo) / n
    c = int(math.floor((x0 + t0 * d - lo) / h))
    if c < 0:
        c = 0
    if c >= n:
        c = n - 1
    if d > 0.0:
        return c, 1, (lo + (c + 1) * h - x0) / d, h / d
    if d < 0.0:
        return c, -1, (lo + c * h - x0) / d, -h / d
    return c, 0, np.inf, np.inf


class RecordGrid:
    """Three co-registered accumulators over an axis-aligned box."""

    def __init__(self, dims, lo, hi):
        dims = tuple(int(n) for n in dims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"grid dims must be three integers >= 1, got {dims}")
        lo = np.asarray(lo, dtype=float).copy()
        hi = np.asarray(hi, dtype=float).copy()
        if lo.shape != (3,) or hi.shape != (3,) or not np.all(hi > lo):
            raise ValueError("grid extents need lo < hi on every axis")
        self.dims = dims
        self.lo = lo
        self.hi = hi
        self.path = np.zeros(dims)
        self.absorbed = np.zeros(dims)
        self.evals = np.zeros(dims, dtype=np.int64)
        self.diag = np.zeros(N_DIAG)

    @property
    def cell_size(self) -> np.ndarray:
        return (self.hi - self.lo) / np.asarray(self.dims)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_size))

    def centers(self, axis: int) -> np.ndarray:
        h = self.cell_size[axis]
        return self.lo[axis] + (np.arange(self.dims[axis]) + 0.5) * h

    def cell_centers(self) -> np.ndarray:
        """All cell centres, shape ``(nx, ny, nz, 3)``."""
        X, Y, Z = np.meshgrid(self.centers(0), self.centers(1), self.centers(2), indexing="ij")
        return np.stack([X, Y, Z], axis=-1)

    @property
    def discarded_absorption(self) -> float:
        return float(self.diag[DIAG_DISCARDED_ABS])

    @property
    def discarded_evals(self) -> int:
        return int(self.diag[DIAG_DISCARDED_EVALS])

    @property
    def clipped_length(self) -> float:
        return float(self.diag[DIAG_CLIPPED_LENGTH])

    def arrays(self) -> GridArrays:
        return GridArrays(self.lo, self.hi, self.path, self.absorbed, self.evals, self.diag)

    def empty_like(self) -> "RecordGrid":
        return RecordGrid(self.dims, self.lo, self.hi)

    def merge(self, other: "RecordGrid") -> "RecordGrid":
        """Elementwise sum, in place."""
        if other.dims != self.dims or not (np.array_equal(other.lo, self.lo) and np.array_equal(other.hi, self.hi)):
            raise ValueError("cannot merge grids with different geometry")
        self.path += other.path
        self.absorbed += other.absorbed
        self.evals += other.evals
        self.diag += other.diag
        return self

    # -- deposits (Python entry points; kernels call the njit versions) --

    def deposit_segment(self, p0, p1, weight: float) -> None:
        a = np.asarray(p0, dtype=float)
        b = np.asarray(p1, dtype=float)
        deposit_segment_kernel(self.arrays(), a[0], a[1], a[2], b[0], b[1], b[2], float(weight))

    def deposit_absorption(self, p, w: float) -> bool:
        return deposit_point(self.arrays(), float(p[0]), float(p[1]), float(p[2]), float(w))

    def record_sdf_evals(self, p, count: int) -> bool:
        return count_point(self.arrays(), float(p[0]), float(p[1]), float(p[2]), int(count))

    def normalize_fluence(self, n_photons: int) -> np.ndarray:
        return normalize_fluence(self, n_photons)


def normalize_fluence(grid: RecordGrid, n_photons: int) -> np.ndarray:
    """Track-length fluence per launched photon, in cm^-2."""
    if n_photons < 1:
        raise ValueError("n_photons must be >= 1")
    return grid.path / (grid.cell_volume * n_photons)
