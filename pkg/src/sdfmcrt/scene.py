"""Scene model and its compiled (kernel-ready) form."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigError, SceneValidationError
from .optics import OpticalProps
from .recording import RecordGrid
from .sdf import Box, SdfNode, Translate
from .sdf.program import compile_roots
from .sources import BeamSource, PlaneSource, PointSource

Source = Union[PointSource, PlaneSource, BeamSource]

DEFAULT_DELTA = 1e-6


@dataclass(frozen=True)
class SceneObject:
    name: str
    sdf: SdfNode
    material: str


@dataclass(frozen=True)
class RunParams:
    n_photons: int = 100_000
    seed: int = 0
    workers: int = 1
    delta: float = DEFAULT_DELTA
    roulette: bool = True
    roulette_threshold: float = 1e-4
    roulette_chance: float = 0.1
    max_steps: int = 10_000
    max_interactions: int = 10_000_000
    lipschitz_safety: float = 0.9

    def __post_init__(self):
        if int(self.n_photons) < 1:
            raise ConfigError(f"n_photons must be >= 1, got {self.n_photons}")
        if int(self.workers) < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.delta > 0:
            raise ConfigError(f"delta must be > 0, got {self.delta}")
        if not 0 < self.roulette_chance <= 1:
            raise ConfigError("roulette_chance must lie in (0, 1]")
        if not self.roulette_threshold >= 0:
            raise ConfigError("roulette_threshold must be >= 0")
        if int(self.max_steps) < 1 or int(self.max_interactions) < 1:
            raise ConfigError("max_steps and max_interactions must be >= 1")
        if not 0 < self.lipschitz_safety <= 1:
            raise ConfigError("lipschitz_safety must lie in (0, 1]")


class CompiledScene(NamedTuple):
    code: np.ndarray
    fparams: np.ndarray
    starts: np.ndarray
    ends: np.ndarray
    lipschitz: np.ndarray
    root_material: np.ndarray   # int64 per root
    props: np.ndarray           # (n_materials, 4): mu_s, mu_a, g, n
    ambient: int
    lo: np.ndarray
    hi: np.ndarray
    delta: float
    normal_eps: float
    max_steps: int
    max_interactions: int
    roulette: bool
    roulette_threshold: float
    roulette_chance: float
    source_kind: int
    source_params: np.ndarray
    point_depth: int
    value_depth: int


@dataclass
class Scene:
    """Geometry, media, source, tally grid and run settings.

    ``objects`` are listed outermost first: where shapes overlap, the later
    object's material wins.
    """

    materials: dict[str, OpticalProps]
    ambient: str
    objects: list[SceneObject]
    bounds: tuple[tuple[float, float, float], tuple[float, float, float]]
    source: Source
    grid_dims: tuple[int, int, int] = (1, 1, 1)
    run: RunParams = field(default_factory=RunParams)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.ambient not in self.materials:
            raise SceneValidationError(f"ambient: unknown material {self.ambient!r}")
        for i, obj in enumerate(self.objects):
            if obj.material not in self.materials:
                raise SceneValidationError(
                    f"objects[{i}] ({obj.name}): unknown material {obj.material!r}")
            if not isinstance(obj.sdf, SdfNode):
                raise SceneValidationError(f"objects[{i}] ({obj.name}): sdf is not an SdfNode")
        lo, hi = (tuple(float(c) for c in b) for b in self.bounds)
        if len(lo) != 3 or len(hi) != 3 or not all(h > l for l, h in zip(lo, hi)):
            raise SceneValidationError("bounding_box: need lo < hi on every axis")
        self.bounds = (lo, hi)
        dims = tuple(int(n) for n in self.grid_dims)
        if len(dims) != 3 or min(dims) < 1:
            raise SceneValidationError(f"grid.dims: need three integers >= 1, got {self.grid_dims}")
        self.grid_dims = dims

    @property
    def material_names(self) -> list[str]:
        return list(self.materials)

    def material_index(self, name: str) -> int:
        return self.material_names.index(name)

    @property
    def diagonal(self) -> float:
        lo, hi = self.bounds
        return math.dist(lo, hi)

    def bounding_sdf(self) -> SdfNode:
        lo, hi = np.asarray(self.bounds[0]), np.asarray(self.bounds[1])
        return Translate(Box(tuple((hi - lo) / 2)), tuple((hi + lo) / 2))

    def new_grid(self) -> RecordGrid:
        return RecordGrid(self.grid_dims, self.bounds[0], self.bounds[1])

    def with_run(self, **changes) -> "Scene":
        """Copy with some run parameters replaced."""
        params = {f: getattr(self.run, f) for f in RunParams.__dataclass_fields__}
        params.update({k: v for k, v in changes.items() if v is not None})
        return Scene(self.materials, self.ambient, list(self.objects), self.bounds,
                     self.source, self.grid_dims, RunParams(**params))

    def compile(self) -> CompiledScene:
        prog = compile_roots([o.sdf for o in self.objects], self.run.lipschitz_safety)
        names = self.material_names
        props = np.array([self.materials[n].as_row() for n in names], dtype=np.float64).reshape(-1, 4)
        lo = np.asarray(self.bounds[0], dtype=np.float64)
        hi = np.asarray(self.bounds[1], dtype=np.float64)
        kind, sp = self.source.encode(lo, hi)
        return CompiledScene(
            code=prog.code, fparams=prog.fparams, starts=prog.starts, ends=prog.ends,
            lipschitz=prog.lipschitz,
            root_material=np.array([names.index(o.material) for o in self.objects], dtype=np.int64),
            props=props, ambient=names.index(self.ambient), lo=lo, hi=hi,
            delta=float(self.run.delta), normal_eps=1e-6 * self.diagonal,
            max_steps=int(self.run.max_steps), max_interactions=int(self.run.max_interactions),
            roulette=bool(self.run.roulette), roulette_threshold=float(self.run.roulette_threshold),
            roulette_chance=float(self.run.roulette_chance),
            source_kind=int(kind), source_params=sp,
            point_depth=prog.point_depth, value_depth=prog.value_depth,
        )
