"""Photon-packet transport through SDF geometry.

The optical-depth integration marches each packet with sphere-tracing
steps: every step is bounded by the smallest ``|d_i|`` over the scene's
SDFs and by the distance to the bounding-box wall, and consumes
``step * mu_t`` of the packet's remaining optical depth. A packet whose
nearest surface is closer than ``delta`` is on an interface and is handed
to the boundary routine (Fresnel reflection/refraction when the refractive
index changes).

Kernels operate on a packet stored as a flat float64 array (layout below)
so they compile under numba and run unchanged as plain Python.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from ._jit import njit
from .errors import ConfigError, DegenerateGradientError
from .optics import (OpticalProps, hg_cos_theta, reflect_or_refract_kernel, rotate_direction,
                     sample_azimuth, sample_tau)
from .recording import RecordGrid, count_point, deposit_point, deposit_segment_kernel
from .rng import RandomStream, stream_state, uniform
from .scene import CompiledScene, Scene
from .sdf.kernels import eval_root, eval_root_inline, gradient_root, refine_hit
from .sources import emit_kernel

log = logging.getLogger(__name__)

# packet layout
PX, PY, PZ, UX, UY, UZ, W, TAU, MAT, NSCAT, NEVAL, ALIVE = range(12)
PACKET_LEN = 12

# integrate_optical_depth events
EV_INTERACTION = 0
EV_BOUNDARY = 1
EV_ESCAPED = 2
EV_STEP_LIMIT = 3
EVENT_NAMES = ("interaction", "boundary", "escaped", "step-limit")

# packet fates
FATE_ABSORBED = 0
FATE_ESCAPED = 1
FATE_STEP_LIMIT = 2
FATE_ERROR = 3
FATE_NAMES = ("absorbed", "escaped", "step-limit", "error")

FACE_NAMES = ("-x", "+x", "-y", "+y", "-z", "+z")

# tally slots
T_LAUNCHED = 0
T_ABSORBED = 1
T_ESCAPED = 2
T_LOST = 3            # weight removed by roulette kills and step-limit terminations
T_ROULETTE_GAIN = 4   # weight created by roulette survivors
T_NSCAT = 5
T_NSCAT_SQ = 6
T_NEVALS = 7
T_STEP_LIMIT = 8
T_ROULETTE_KILLS = 9
T_EMIT_ON_BOUNDARY = 10
T_BOUNDARY_EVENTS = 11
T_REFLECTIONS = 12
T_REFRACTIONS = 13
T_DEGENERATE = 14
T_INTERACTIONS = 15
T_ESC_FACE = 16       # six consecutive slots, order of FACE_NAMES
N_TALLY = 22

TALLY_NAMES = {
    T_LAUNCHED: "launched", T_ABSORBED: "absorbed", T_ESCAPED: "escaped", T_LOST: "lost",
    T_ROULETTE_GAIN: "roulette_gain", T_NSCAT: "n_scatters", T_NSCAT_SQ: "n_scatters_sq",
    T_NEVALS: "n_sdf_evals", T_STEP_LIMIT: "step_limited", T_ROULETTE_KILLS: "roulette_kills",
    T_EMIT_ON_BOUNDARY: "emitted_on_boundary", T_BOUNDARY_EVENTS: "boundary_events",
    T_REFLECTIONS: "reflections", T_REFRACTIONS: "refractions",
    T_DEGENERATE: "degenerate_normals", T_INTERACTIONS: "interactions",
}
for _i, _f in enumerate(FACE_NAMES):
    TALLY_NAMES[T_ESC_FACE + _i] = f"escaped{_f}"


class Workspace(NamedTuple):
    ps: np.ndarray     # SDF point stack
    vs: np.ndarray     # SDF value stack
    grad: np.ndarray   # (3,)


def new_workspace(cs: CompiledScene) -> Workspace:
    return Workspace(np.zeros((cs.point_depth, 3)), np.zeros(cs.value_depth), np.zeros(3))


# --------------------------------------------------------------------------
# geometry queries
# --------------------------------------------------------------------------

@njit(inline="always")
def nearest_surface(cs, ws, x, y, z):
    """``(root index, safe step)`` of the closest SDF; ``(-1, inf)`` when there are none."""
    best = np.inf
    ib = -1
    for r in range(cs.starts.shape[0]):
        d = eval_root_inline(cs.code, cs.fparams, cs.starts[r], cs.ends[r], x, y, z, ws.ps, ws.vs)
        a = abs(d) * cs.lipschitz[r]
        if a < best:
            best = a
            ib = r
    return ib, best


@njit(inline="always")
def material_at(cs, ws, x, y, z):
    """Material of the last listed SDF containing the point, else ambient."""
    m = cs.ambient
    for r in range(cs.starts.shape[0]):
        d = eval_root(cs.code, cs.fparams, cs.starts[r], cs.ends[r], x, y, z, ws.ps, ws.vs)
        if d < 0.0:
            m = cs.root_material[r]
    return m


@njit(inline="always")
def outside_box(cs, x, y, z):
    return (x < cs.lo[0] or x > cs.hi[0] or y < cs.lo[1] or y > cs.hi[1]
            or z < cs.lo[2] or z > cs.hi[2])


@njit(inline="always")
def box_exit(cs, x, y, z, ux, uy, uz):
    """Distance along ``u`` to the bounding-box wall and the face index hit."""
    t = np.inf
    face = -1
    if ux > 0.0:
        t = (cs.hi[0] - x) / ux
        face = 1
    elif ux < 0.0:
        t = (cs.lo[0] - x) / ux
        face = 0
    if uy > 0.0:
        ty = (cs.hi[1] - y) / uy
        if ty < t:
            t = ty
            face = 3
    elif uy < 0.0:
        ty = (cs.lo[1] - y) / uy
        if ty < t:
            t = ty
            face = 2
    if uz > 0.0:
        tz = (cs.hi[2] - z) / uz
        if tz < t:
            t = tz
            face = 5
    elif uz < 0.0:
        tz = (cs.lo[2] - z) / uz
        if tz < t:
            t = tz
            face = 4
    if t < 0.0:
        t = 0.0
    return t, face


@njit(inline="always")
def nearest_face(cs, x, y, z):
    best = abs(x - cs.lo[0])
    face = 0
    for a in range(3):
        for side in range(2):
            wall = cs.hi[a] if side == 1 else cs.lo[a]
            p = x if a == 0 else (y if a == 1 else z)
            dd = abs(p - wall)
            if dd < best:
                best = dd
                face = 2 * a + side
    return face


# --------------------------------------------------------------------------
# transport kernels
# --------------------------------------------------------------------------

@njit
def settle_on_interface(cs, ws, pk, g, root, mu_t, w):
    """Walk a packet that stopped within ``delta`` of SDF ``root`` up to the crossing.

    The move is allowed only if it stays short of every other SDF, of the box
    wall, and of the packet's remaining optical depth; otherwise the packet
    stays put. Evaluations are counted like march steps.
    """
    x = pk[PX]
    y = pk[PY]
    z = pk[PZ]
    ux = pk[UX]
    uy = pk[UY]
    uz = pk[UZ]
    d = eval_root(cs.code, cs.fparams, cs.starts[root], cs.ends[root], x, y, z, ws.ps, ws.vs)
    t, d, n = refine_hit(cs.code, cs.fparams, cs.starts[root], cs.ends[root], x, y, z,
                         ux, uy, uz, 0.0, d, cs.delta, ws.ps, ws.vs)
    n += 1
    limit, _ = box_exit(cs, x, y, z, ux, uy, uz)
    if mu_t > 0.0:
        limit = min(limit, pk[TAU] / mu_t)
    for r in range(cs.starts.shape[0]):
        if r != root and t < limit:
            dr = eval_root(cs.code, cs.fparams, cs.starts[r], cs.ends[r], x, y, z, ws.ps, ws.vs)
            n += 1
            limit = min(limit, abs(dr) * cs.lipschitz[r])
    pk[NEVAL] += n
    count_point(g, x, y, z, n)
    if t <= 0.0 or t >= limit:
        return
    x1 = x + t * ux
    y1 = y + t * uy
    z1 = z + t * uz
    deposit_segment_kernel(g, x, y, z, x1, y1, z1, w)
    pk[PX] = x1
    pk[PY] = y1
    pk[PZ] = z1
    pk[TAU] -= t * mu_t


@njit(inline="always")
def integrate_kernel(cs, ws, pk, g):
    """Advance the packet until interaction, interface, escape or step limit.

    Returns ``(event, info)``: info is the interface root for EV_BOUNDARY and
    the exit face for EV_ESCAPED.
    """
    m = int(pk[MAT])
    mu_t = cs.props[m, 0] + cs.props[m, 1]
    w = pk[W]
    ux = pk[UX]
    uy = pk[UY]
    uz = pk[UZ]
    steps = 0
    while True:
        x = pk[PX]
        y = pk[PY]
        z = pk[PZ]
        if outside_box(cs, x, y, z):
            return EV_ESCAPED, nearest_face(cs, x, y, z)
        if steps >= cs.max_steps:
            return EV_STEP_LIMIT, -1
        ib, dmin = nearest_surface(cs, ws, x, y, z)
        steps += 1
        pk[NEVAL] += 1.0
        count_point(g, x, y, z, 1)
        if dmin < cs.delta:
            settle_on_interface(cs, ws, pk, g, ib, mu_t, w)
            return EV_BOUNDARY, ib
        texit, face = box_exit(cs, x, y, z, ux, uy, uz)
        s = min(dmin, texit)
        if mu_t > 0.0 and pk[TAU] < s * mu_t:
            s = pk[TAU] / mu_t
            x1 = x + s * ux
            y1 = y + s * uy
            z1 = z + s * uz
            deposit_segment_kernel(g, x, y, z, x1, y1, z1, w)
            pk[PX] = x1
            pk[PY] = y1
            pk[PZ] = z1
            pk[TAU] = 0.0
            return EV_INTERACTION, -1
        if texit <= dmin:
            # land exactly on the wall
            x1 = x + texit * ux
            y1 = y + texit * uy
            z1 = z + texit * uz
            if face == 0:
                x1 = cs.lo[0]
            elif face == 1:
                x1 = cs.hi[0]
            elif face == 2:
                y1 = cs.lo[1]
            elif face == 3:
                y1 = cs.hi[1]
            elif face == 4:
                z1 = cs.lo[2]
            elif face == 5:
                z1 = cs.hi[2]
            deposit_segment_kernel(g, x, y, z, x1, y1, z1, w)
            pk[PX] = x1
            pk[PY] = y1
            pk[PZ] = z1
            pk[TAU] -= texit * mu_t
            return EV_ESCAPED, face
        x1 = x + s * ux
        y1 = y + s * uy
        z1 = z + s * uz
        deposit_segment_kernel(g, x, y, z, x1, y1, z1, w)
        pk[PX] = x1
        pk[PY] = y1
        pk[PZ] = z1
        pk[TAU] -= s * mu_t


@njit(inline="always")
def interaction_kernel(pk, mu_s, mu_a, gg, roulette, threshold, chance, g, tally, s):
    """Partial absorption, Henyey-Greenstein scatter, Russian roulette."""
    mu_t = mu_s + mu_a
    w = pk[W]
    dep = w * mu_a / mu_t
    if dep > 0.0:
        deposit_point(g, pk[PX], pk[PY], pk[PZ], dep)
        tally[T_ABSORBED] += dep
    tally[T_INTERACTIONS] += 1.0
    if mu_s == 0.0:
        pk[W] = 0.0
        pk[ALIVE] = 0.0
        return
    w = w - dep
    cos_t = hg_cos_theta(gg, uniform(s))
    cp, sp = sample_azimuth(s)
    ux, uy, uz = rotate_direction(pk[UX], pk[UY], pk[UZ], cos_t, cp, sp)
    pk[UX] = ux
    pk[UY] = uy
    pk[UZ] = uz
    pk[NSCAT] += 1.0
    if roulette and w < threshold:
        if uniform(s) < chance:
            tally[T_ROULETTE_GAIN] += w / chance - w
            w = w / chance
        else:
            tally[T_LOST] += w
            tally[T_ROULETTE_KILLS] += 1.0
            pk[W] = 0.0
            pk[ALIVE] = 0.0
            return
    pk[W] = w


@njit(inline="always")
def boundary_kernel(cs, ws, pk, root, tally, s):
    """Cross, reflect or refract at the interface of SDF ``root``.

    Returns False if the interface normal is degenerate.
    """
    nudge = 2.0 * cs.delta
    x = pk[PX]
    y = pk[PY]
    z = pk[PZ]
    ux = pk[UX]
    uy = pk[UY]
    uz = pk[UZ]
    tally[T_BOUNDARY_EVENTS] += 1.0
    m_cur = int(pk[MAT])
    m_next = material_at(cs, ws, x + nudge * ux, y + nudge * uy, z + nudge * uz)
    n1 = cs.props[m_cur, 3]
    n2 = cs.props[m_next, 3]
    if m_next == m_cur or n1 == n2:
        pk[PX] = x + nudge * ux
        pk[PY] = y + nudge * uy
        pk[PZ] = z + nudge * uz
        pk[MAT] = m_next
        return True
    norm = gradient_root(cs.code, cs.fparams, cs.starts[root], cs.ends[root], x, y, z,
                         cs.normal_eps, ws.ps, ws.vs, ws.grad)
    if not norm >= 1e-12:
        tally[T_DEGENERATE] += 1.0
        return False
    nx = ws.grad[0] / norm
    ny = ws.grad[1] / norm
    nz = ws.grad[2] / norm
    if nx * ux + ny * uy + nz * uz > 0.0:
        nx = -nx
        ny = -ny
        nz = -nz
    kind, vx, vy, vz = reflect_or_refract_kernel(s, ux, uy, uz, nx, ny, nz, n1, n2)
    if kind == 0:
        tally[T_REFLECTIONS] += 1.0
    else:
        tally[T_REFRACTIONS] += 1.0
    x += nudge * vx
    y += nudge * vy
    z += nudge * vz
    pk[PX] = x
    pk[PY] = y
    pk[PZ] = z
    pk[UX] = vx
    pk[UY] = vy
    pk[UZ] = vz
    pk[MAT] = material_at(cs, ws, x, y, z)
    return True


@njit(inline="always")
def emit_packet(cs, ws, pk, s, tally):
    x, y, z, ux, uy, uz = emit_kernel(s, cs.source_kind, cs.source_params)
    ib, dmin = nearest_surface(cs, ws, x, y, z)
    if dmin < cs.delta:
        x += 2.0 * cs.delta * ux
        y += 2.0 * cs.delta * uy
        z += 2.0 * cs.delta * uz
        tally[T_EMIT_ON_BOUNDARY] += 1.0
    pk[PX] = x
    pk[PY] = y
    pk[PZ] = z
    pk[UX] = ux
    pk[UY] = uy
    pk[UZ] = uz
    pk[W] = 1.0
    pk[TAU] = 0.0
    pk[MAT] = material_at(cs, ws, x, y, z)
    pk[NSCAT] = 0.0
    pk[NEVAL] = 0.0
    pk[ALIVE] = 1.0
    tally[T_LAUNCHED] += 1.0


@njit(inline="always")
def packet_kernel(cs, ws, pk, g, tally, s):
    """Run an emitted packet to termination. Returns ``(fate, exit face)``."""
    n_int = 0
    while True:
        pk[TAU] = sample_tau(s)
        while True:
            ev, info = integrate_kernel(cs, ws, pk, g)
            if ev != EV_BOUNDARY:
                break
            if not boundary_kernel(cs, ws, pk, info, tally, s):
                pk[ALIVE] = 0.0
                return FATE_ERROR, -1
        if ev == EV_ESCAPED:
            tally[T_ESCAPED] += pk[W]
            tally[T_ESC_FACE + info] += pk[W]
            pk[ALIVE] = 0.0
            return FATE_ESCAPED, info
        if ev == EV_STEP_LIMIT:
            tally[T_LOST] += pk[W]
            tally[T_STEP_LIMIT] += 1.0
            pk[ALIVE] = 0.0
            return FATE_STEP_LIMIT, -1
        m = int(pk[MAT])
        interaction_kernel(pk, cs.props[m, 0], cs.props[m, 1], cs.props[m, 2], cs.roulette,
                           cs.roulette_threshold, cs.roulette_chance, g, tally, s)
        if pk[ALIVE] == 0.0:
            return FATE_ABSORBED, -1
        n_int += 1
        if n_int >= cs.max_interactions:
            tally[T_LOST] += pk[W]
            tally[T_STEP_LIMIT] += 1.0
            pk[ALIVE] = 0.0
            return FATE_STEP_LIMIT, -1


@njit
def batch_kernel(cs, ws, g, tally, s, n, keep, rec_nscat, rec_nevals, rec_fate, rec_face, rec_weight):
    """Simulate ``n`` packets. Returns the index of a failed packet or -1."""
    pk = np.zeros(PACKET_LEN)
    for i in range(n):
        emit_packet(cs, ws, pk, s, tally)
        fate, face = packet_kernel(cs, ws, pk, g, tally, s)
        ns = pk[NSCAT]
        tally[T_NSCAT] += ns
        tally[T_NSCAT_SQ] += ns * ns
        tally[T_NEVALS] += pk[NEVAL]
        if keep:
            rec_nscat[i] = int(ns)
            rec_nevals[i] = int(pk[NEVAL])
            rec_fate[i] = fate
            rec_face[i] = face
            rec_weight[i] = pk[W]
        if fate == FATE_ERROR:
            return i
    return -1


# --------------------------------------------------------------------------
# Python-facing API
# --------------------------------------------------------------------------

@dataclass
class PhotonPacket:
    pos: np.ndarray
    dir: np.ndarray
    weight: float = 1.0
    tau_remaining: float = 0.0
    material: int = 0
    n_scatters: int = 0
    n_sdf_evals: int = 0
    alive: bool = True

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float).copy()
        d = np.asarray(self.dir, dtype=float)
        self.dir = d / np.sqrt(d @ d)

    def to_array(self) -> np.ndarray:
        pk = np.zeros(PACKET_LEN)
        pk[PX:PZ + 1] = self.pos
        pk[UX:UZ + 1] = self.dir
        pk[W] = self.weight
        pk[TAU] = self.tau_remaining
        pk[MAT] = self.material
        pk[NSCAT] = self.n_scatters
        pk[NEVAL] = self.n_sdf_evals
        pk[ALIVE] = 1.0 if self.alive else 0.0
        return pk

    def update_from(self, pk: np.ndarray) -> "PhotonPacket":
        self.pos = pk[PX:PZ + 1].copy()
        self.dir = pk[UX:UZ + 1].copy()
        self.weight = float(pk[W])
        self.tau_remaining = float(pk[TAU])
        self.material = int(pk[MAT])
        self.n_scatters = int(pk[NSCAT])
        self.n_sdf_evals = int(pk[NEVAL])
        self.alive = bool(pk[ALIVE])
        return self

    @classmethod
    def from_array(cls, pk: np.ndarray) -> "PhotonPacket":
        return cls(pos=pk[PX:PZ + 1], dir=pk[UX:UZ + 1]).update_from(pk)


SceneLike = Union[Scene, CompiledScene]


def _compiled(scene: SceneLike) -> CompiledScene:
    return scene if isinstance(scene, CompiledScene) else scene.compile()


def new_tally() -> np.ndarray:
    return np.zeros(N_TALLY)


def current_material(scene: SceneLike, p) -> int:
    """Index (into ``scene.material_names``) of the medium at ``p``."""
    cs = _compiled(scene)
    return int(material_at(cs, new_workspace(cs), float(p[0]), float(p[1]), float(p[2])))


def emit(scene: SceneLike, rng: RandomStream, tally: Optional[np.ndarray] = None) -> PhotonPacket:
    cs = _compiled(scene)
    pk = np.zeros(PACKET_LEN)
    emit_packet(cs, new_workspace(cs), pk, rng.state, new_tally() if tally is None else tally)
    return PhotonPacket.from_array(pk)


def integrate_optical_depth(scene: SceneLike, packet: PhotonPacket, rng: RandomStream,
                            recorder: RecordGrid) -> tuple[str, int]:
    """Move ``packet`` through its remaining optical depth.

    Returns ``(event, info)`` with event one of ``interaction``, ``boundary``,
    ``escaped``, ``step-limit``; info is the interface SDF index or exit face.
    ``rng`` is unused (the optical depth is drawn by the caller).
    """
    cs = _compiled(scene)
    pk = packet.to_array()
    ev, info = integrate_kernel(cs, new_workspace(cs), pk, recorder.arrays())
    packet.update_from(pk)
    return EVENT_NAMES[ev], int(info)


def handle_interaction(packet: PhotonPacket, props: OpticalProps, rng: RandomStream,
                       recorder: RecordGrid, *, roulette: bool = True, threshold: float = 1e-4,
                       chance: float = 0.1, tally: Optional[np.ndarray] = None) -> None:
    if props.mu_t <= 0:
        raise ValueError("interaction in a medium with mu_t = 0")
    pk = packet.to_array()
    interaction_kernel(pk, props.mu_s, props.mu_a, props.g, roulette, threshold, chance,
                       recorder.arrays(), new_tally() if tally is None else tally, rng.state)
    packet.update_from(pk)


def handle_boundary(scene: SceneLike, packet: PhotonPacket, rng: RandomStream,
                    root: Optional[int] = None, tally: Optional[np.ndarray] = None) -> None:
    """Resolve an interface crossing at the packet position.

    ``root`` is the interface SDF; defaults to the nearest one.
    """
    cs = _compiled(scene)
    ws = new_workspace(cs)
    if root is None:
        root, _ = nearest_surface(cs, ws, *(float(c) for c in packet.pos))
    pk = packet.to_array()
    ok = boundary_kernel(cs, ws, pk, int(root), new_tally() if tally is None else tally, rng.state)
    if not ok:
        raise DegenerateGradientError(f"degenerate interface normal at {tuple(packet.pos)}")
    packet.update_from(pk)


@dataclass(frozen=True)
class PacketRecord:
    fate: str
    n_scatters: int
    n_sdf_evals: int
    exit_face: Optional[str]
    residual_weight: float


def simulate_packet(scene: SceneLike, rng: RandomStream, recorder: RecordGrid,
                    tally: Optional[np.ndarray] = None) -> PacketRecord:
    cs = _compiled(scene)
    ws = new_workspace(cs)
    tally = new_tally() if tally is None else tally
    pk = np.zeros(PACKET_LEN)
    g = recorder.arrays()
    emit_packet(cs, ws, pk, rng.state, tally)
    fate, face = packet_kernel(cs, ws, pk, g, tally, rng.state)
    if fate == FATE_ERROR:
        raise DegenerateGradientError(f"degenerate interface normal near {tuple(pk[PX:PZ + 1])}")
    return PacketRecord(
        fate=FATE_NAMES[fate], n_scatters=int(pk[NSCAT]), n_sdf_evals=int(pk[NEVAL]),
        exit_face=FACE_NAMES[face] if fate == FATE_ESCAPED else None,
        residual_weight=float(pk[W]),
    )


@dataclass
class SimulationResult:
    scene: Scene
    grid: RecordGrid
    tally: np.ndarray
    n_photons: int
    workers: int
    wall_time: float
    packets: Optional[dict] = None
    worker_tallies: list = field(default_factory=list)

    def tallies(self) -> dict:
        return {name: float(self.tally[i]) for i, name in TALLY_NAMES.items()}

    @property
    def mean_scatters(self) -> float:
        return self.tally[T_NSCAT] / self.n_photons

    @property
    def scatter_std_error(self) -> float:
        n = self.n_photons
        m = self.mean_scatters
        var = max(self.tally[T_NSCAT_SQ] / n - m * m, 0.0)
        return math.sqrt(var / n)

    @property
    def absorbed(self) -> float:
        return float(self.tally[T_ABSORBED])

    @property
    def escaped(self) -> float:
        return float(self.tally[T_ESCAPED])

    def escaped_through(self, face: str) -> float:
        return float(self.tally[T_ESC_FACE + FACE_NAMES.index(face)])

    def energy_balance(self) -> float:
        """``absorbed + escaped + lost - (launched + roulette gain)``; zero up to rounding."""
        t = self.tally
        return float(t[T_ABSORBED] + t[T_ESCAPED] + t[T_LOST] - t[T_LAUNCHED] - t[T_ROULETTE_GAIN])

    def fluence(self) -> np.ndarray:
        return self.grid.normalize_fluence(self.n_photons)


def _split(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def run_simulation(scene: Scene, *, n_photons: Optional[int] = None, seed: Optional[int] = None,
                   workers: Optional[int] = None, keep_packets: bool = False) -> SimulationResult:
    """Simulate ``n_photons`` packets split over ``workers`` independent streams.

    Worker ``i`` draws from the stream derived from ``(seed, i)``; grids and
    tallies are summed in worker order, so results depend only on
    ``(scene, n_photons, seed, workers)``.
    """
    n = int(scene.run.n_photons if n_photons is None else n_photons)
    seed = int(scene.run.seed if seed is None else seed)
    k = int(scene.run.workers if workers is None else workers)
    if n < 1:
        raise ConfigError("n_photons must be >= 1")
    if k < 1:
        raise ConfigError("workers must be >= 1")
    k = min(k, n)
    cs = scene.compile()
    counts = _split(n, k)

    def work(i):
        grid = scene.new_grid()
        tally = new_tally()
        ws = new_workspace(cs)
        state = stream_state(seed, i)
        m = counts[i]
        size = m if keep_packets else 0
        rec = (np.zeros(size, np.int64), np.zeros(size, np.int64), np.zeros(size, np.int64),
               np.zeros(size, np.int64), np.zeros(size))
        bad = batch_kernel(cs, ws, grid.arrays(), tally, state, m, keep_packets, *rec)
        return grid, tally, rec, int(bad)

    t0 = time.perf_counter()
    if k == 1:
        outs = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=k) as pool:
            outs = list(pool.map(work, range(k)))
    wall = time.perf_counter() - t0

    grid = scene.new_grid()
    tally = new_tally()
    for g, t, _, bad in outs:
        if bad >= 0:
            raise DegenerateGradientError("degenerate interface normal during transport "
                                          f"(packet {bad} of a worker batch)")
        grid.merge(g)
        tally += t
    packets = None
    if keep_packets:
        cat = [np.concatenate([o[2][j] for o in outs]) for j in range(5)]
        packets = {
            "n_scatters": cat[0], "n_sdf_evals": cat[1],
            "fate": cat[2], "exit_face": cat[3], "weight": cat[4],
        }
    log.info("simulated %d packets on %d worker(s) in %.2f s", n, k, wall)
    return SimulationResult(scene=scene, grid=grid, tally=tally, n_photons=n, workers=k,
                            wall_time=wall, packets=packets, worker_tallies=[o[1] for o in outs])
