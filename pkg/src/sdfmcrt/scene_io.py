"""Scene documents (YAML), binary grid files and CSV slices.

Scene document layout::

    materials:
      air: {mu_s: 0, mu_a: 0, g: 0, n: 1}
      medium: {mu_s: 20, mu_a: 0, g: 0, n: 1}
    ambient: air
    objects:
      - name: ball
        material: medium
        sdf: {sphere: {radius: 0.5}}
    bounding_box: {min: [-0.55, -0.55, -0.55], max: [0.55, 0.55, 0.55]}
    source: {point: {position: [0, 0, 0]}}
    grid: {dims: [1, 1, 1]}
    run: {n_photons: 100000, seed: 0, workers: 1}

An SDF node is a one-key mapping from its kind to its parameters.
Transforms take a ``child`` node; CSG operators take ``children`` (two or
more, folded left). Objects are listed outermost first: where shapes
overlap, the later object's material applies.
"""
from __future__ import annotations

import dataclasses
import math
import struct
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import yaml

from .errors import (
    ConfigError,
    GridFormatError,
    InvalidParameterError,
    SceneParseError,
    SceneValidationError,
)
from .optics import OpticalProps
from .recording import RecordGrid, normalize_fluence
from .scene import RunParams, Scene, SceneObject
from .sdf import CSG, PRIMITIVES, TRANSFORMS, SdfNode
from .sdf.nodes import _Binary, _Transform
from .sources import SOURCES, BeamSource, PlaneSource, PointSource

TOP_KEYS = ("materials", "ambient", "objects", "bounding_box", "source", "grid", "run")
MATERIAL_KEYS = ("mu_s", "mu_a", "g", "n")
RUN_FIELDS = tuple(f.name for f in dataclasses.fields(RunParams))


# --------------------------------------------------------------------------
# small typed readers; every failure names the key path
# --------------------------------------------------------------------------

def _fail(path: str, msg: str):
    raise SceneValidationError(f"{path}: {msg}")


def _mapping(v, path) -> dict:
    if not isinstance(v, dict):
        _fail(path, f"expected a mapping, got {type(v).__name__}")
    return v


def _check_keys(d: dict, path: str, allowed, required=()):
    for k in d:
        if k not in allowed:
            _fail(f"{path}.{k}", f"unknown key (allowed: {', '.join(allowed)})")
    for k in required:
        if k not in d:
            _fail(f"{path}.{k}", "required key missing")


def _number(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        _fail(path, f"expected a finite number, got {v}")
    return v


def _integer(v, path, minimum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        _fail(path, f"must be >= {minimum}, got {v}")
    return int(v)


def _vector(v, path, n=3) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != n:
        _fail(path, f"expected a list of {n} numbers, got {v!r}")
    return tuple(_number(c, f"{path}[{i}]") for i, c in enumerate(v))


def _string(v, path) -> str:
    if not isinstance(v, str) or not v:
        _fail(path, f"expected a non-empty string, got {v!r}")
    return v


def _single_kind(d, path, table) -> tuple[str, Any]:
    d = _mapping(d, path)
    if len(d) != 1:
        _fail(path, f"expected exactly one key naming the kind ({', '.join(table)}), got {list(d)}")
    (kind, body), = d.items()
    if kind not in table:
        _fail(f"{path}.{kind}", f"unknown kind (allowed: {', '.join(table)})")
    return kind, body


def _convert_param(value, path):
    if isinstance(value, (list, tuple)):
        return _vector(value, path, len(value))
    return _number(value, path)


# --------------------------------------------------------------------------
# SDF nodes
# --------------------------------------------------------------------------

_ALL_KINDS = {**PRIMITIVES, **CSG, **TRANSFORMS}


def _param_names(cls) -> list[str]:
    if issubclass(cls, _Binary):
        skip = ("a", "b")
    elif issubclass(cls, _Transform):
        skip = ("child",)
    else:
        skip = ()
    return [f.name for f in dataclasses.fields(cls) if f.name not in skip]


def node_from_doc(doc, path: str = "sdf") -> SdfNode:
    """Build an :class:`SdfNode` from its document form."""
    kind, body = _single_kind(doc, path, _ALL_KINDS)
    here = f"{path}.{kind}"
    body = _mapping({} if body is None else body, here)
    cls = _ALL_KINDS[kind]
    names = _param_names(cls)
    params = {}
    if kind in CSG:
        _check_keys(body, here, names + ["children"], ["children"])
        kids = body["children"]
        if not isinstance(kids, list) or len(kids) < 2:
            _fail(f"{here}.children", "expected a list of at least two nodes")
        nodes = [node_from_doc(c, f"{here}.children[{i}]") for i, c in enumerate(kids)]
    elif kind in TRANSFORMS:
        _check_keys(body, here, names + ["child"], ["child"])
        nodes = [node_from_doc(body["child"], f"{here}.child")]
    else:
        _check_keys(body, here, names, [f.name for f in dataclasses.fields(cls)
                                        if f.default is dataclasses.MISSING])
        nodes = []
    for name in names:
        if name in body:
            params[name] = _convert_param(body[name], f"{here}.{name}")
    try:
        if kind in CSG:
            out = nodes[0]
            for n in nodes[1:]:
                out = cls(out, n, **params)
            return out
        return cls(*nodes, **params)
    except InvalidParameterError as exc:
        raise SceneValidationError(f"{here}: {exc}") from exc


def _plain(v):
    # yaml.safe_dump only knows lists and builtin floats
    if isinstance(v, (list, tuple)):
        return [_plain(c) for c in v]
    return float(v)


def node_to_doc(node: SdfNode) -> dict:
    params = {k: _plain(v) for k, v in node.params().items()}
    if isinstance(node, _Binary):
        # flatten a left spine of the same operator with the same parameters
        kids = [node.b]
        cur = node.a
        while type(cur) is type(node) and cur.params() == node.params():
            kids.append(cur.b)
            cur = cur.a
        kids.append(cur)
        kids.reverse()
        params["children"] = [node_to_doc(c) for c in kids]
    elif isinstance(node, _Transform):
        params["child"] = node_to_doc(node.child)
    return {node.kind: params}


# --------------------------------------------------------------------------
# materials, sources, run
# --------------------------------------------------------------------------

def _material(doc, path) -> OpticalProps:
    doc = _mapping(doc, path)
    _check_keys(doc, path, MATERIAL_KEYS)
    vals = {k: _number(doc[k], f"{path}.{k}") for k in MATERIAL_KEYS if k in doc}
    try:
        return OpticalProps(**vals)
    except InvalidParameterError as exc:
        raise SceneValidationError(f"{path}: {exc}") from exc


def _source(doc, path):
    kind, body = _single_kind(doc, path, SOURCES)
    here = f"{path}.{kind}"
    body = _mapping({} if body is None else body, here)
    try:
        if kind == "point":
            _check_keys(body, here, ("position",))
            return PointSource(_vector(body.get("position", [0, 0, 0]), f"{here}.position"))
        if kind == "plane":
            _check_keys(body, here, ("z", "direction", "x_range", "y_range"), ("z",))
            kw = {"z": _number(body["z"], f"{here}.z")}
            if "direction" in body:
                kw["direction"] = _vector(body["direction"], f"{here}.direction")
            for r in ("x_range", "y_range"):
                if body.get(r) is not None:
                    kw[r] = _vector(body[r], f"{here}.{r}", 2)
            return PlaneSource(**kw)
        _check_keys(body, here, ("center", "radius", "direction"), ("center", "radius"))
        kw = {"center": _vector(body["center"], f"{here}.center"),
              "radius": _number(body["radius"], f"{here}.radius")}
        if "direction" in body:
            kw["direction"] = _vector(body["direction"], f"{here}.direction")
        return BeamSource(**kw)
    except InvalidParameterError as exc:
        raise SceneValidationError(f"{here}: {exc}") from exc


def _source_to_doc(src) -> dict:
    if isinstance(src, PointSource):
        return {"point": {"position": list(src.position)}}
    if isinstance(src, PlaneSource):
        body = {"z": src.z, "direction": list(src.direction)}
        if src.x_range is not None:
            body["x_range"] = list(src.x_range)
        if src.y_range is not None:
            body["y_range"] = list(src.y_range)
        return {"plane": body}
    return {"beam": {"center": list(src.center), "radius": src.radius,
                     "direction": list(src.direction)}}


def _run(doc, path) -> RunParams:
    doc = _mapping({} if doc is None else doc, path)
    _check_keys(doc, path, RUN_FIELDS)
    kw = {}
    for f in dataclasses.fields(RunParams):
        if f.name not in doc:
            continue
        v = doc[f.name]
        p = f"{path}.{f.name}"
        if f.type in ("int", int):
            kw[f.name] = _integer(v, p)
        elif f.type in ("bool", bool):
            if not isinstance(v, bool):
                _fail(p, f"expected true/false, got {v!r}")
            kw[f.name] = v
        else:
            kw[f.name] = _number(v, p)
    try:
        return RunParams(**kw)
    except ConfigError as exc:
        raise SceneValidationError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# whole documents
# --------------------------------------------------------------------------

def scene_from_doc(doc) -> Scene:
    doc = _mapping(doc, "<document>")
    _check_keys(doc, "<document>", TOP_KEYS, ("materials", "objects", "bounding_box", "source"))

    mats = _mapping(doc["materials"], "materials")
    if not mats:
        _fail("materials", "at least one material is required")
    materials = {_string(k, "materials"): _material(v, f"materials.{k}") for k, v in mats.items()}

    ambient = _string(doc.get("ambient", next(iter(materials))), "ambient")
    if ambient not in materials:
        _fail("ambient", f"unknown material {ambient!r}")

    objs = doc["objects"]
    if not isinstance(objs, list):
        _fail("objects", "expected a list")
    objects = []
    for i, o in enumerate(objs):
        p = f"objects[{i}]"
        o = _mapping(o, p)
        _check_keys(o, p, ("name", "material", "sdf"), ("material", "sdf"))
        mat = _string(o["material"], f"{p}.material")
        if mat not in materials:
            _fail(f"{p}.material", f"unknown material {mat!r}")
        name = _string(o.get("name", f"object{i}"), f"{p}.name")
        objects.append(SceneObject(name, node_from_doc(o["sdf"], f"{p}.sdf"), mat))

    bb = _mapping(doc["bounding_box"], "bounding_box")
    _check_keys(bb, "bounding_box", ("min", "max"), ("min", "max"))
    lo = _vector(bb["min"], "bounding_box.min")
    hi = _vector(bb["max"], "bounding_box.max")
    for a in range(3):
        if not hi[a] > lo[a]:
            _fail(f"bounding_box.max[{a}]", f"must exceed min ({hi[a]} <= {lo[a]})")

    source = _source(doc["source"], "source")

    grid = _mapping(doc.get("grid") or {"dims": [1, 1, 1]}, "grid")
    _check_keys(grid, "grid", ("dims",), ("dims",))
    dv = grid["dims"]
    if not isinstance(dv, list) or len(dv) != 3:
        _fail("grid.dims", f"expected three integers, got {dv!r}")
    dims = tuple(_integer(n, f"grid.dims[{i}]", minimum=1) for i, n in enumerate(dv))

    run = _run(doc.get("run"), "run")
    return Scene(materials=materials, ambient=ambient, objects=objects, bounds=(lo, hi),
                 source=source, grid_dims=dims, run=run)


def scene_to_doc(scene: Scene) -> dict:
    lo, hi = scene.bounds
    return {
        "materials": {k: {"mu_s": m.mu_s, "mu_a": m.mu_a, "g": m.g, "n": m.n}
                      for k, m in scene.materials.items()},
        "ambient": scene.ambient,
        "objects": [{"name": o.name, "material": o.material, "sdf": node_to_doc(o.sdf)}
                    for o in scene.objects],
        "bounding_box": {"min": list(lo), "max": list(hi)},
        "source": _source_to_doc(scene.source),
        "grid": {"dims": list(scene.grid_dims)},
        "run": dataclasses.asdict(scene.run),
    }


def parse_scene(text: str) -> Scene:
    """Parse a YAML scene document.

    Raises :class:`SceneParseError` for malformed YAML and
    :class:`SceneValidationError` (message starts with the key path) for
    well-formed documents that break a constraint.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SceneParseError(f"malformed scene document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneParseError("scene document must be a mapping at the top level")
    return scene_from_doc(doc)


def serialize_scene(scene: Scene) -> str:
    return yaml.safe_dump(scene_to_doc(scene), sort_keys=False, default_flow_style=None)


def load_scene(path) -> Scene:
    return parse_scene(Path(path).read_text())


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(serialize_scene(scene))


def fixture_names() -> list[str]:
    """Scene documents shipped with the package."""
    d = resources.files("sdfmcrt") / "scenes"
    return sorted(p.name[:-5] for p in d.iterdir() if p.name.endswith(".yaml"))


def fixture_text(name: str) -> str:
    return (resources.files("sdfmcrt") / "scenes" / f"{name}.yaml").read_text()


def load_fixture(name: str) -> Scene:
    return parse_scene(fixture_text(name))


# --------------------------------------------------------------------------
# grid files
# --------------------------------------------------------------------------

GRID_MAGIC = b"SDFMCRTG"
GRID_VERSION = 1
GRID_KINDS = ("path", "absorbed", "evals", "fluence")
_HEADER = struct.Struct("<8sII3Q6d")


@dataclasses.dataclass
class GridData:
    """One accumulator of a grid, as stored in a grid file."""

    kind: str
    values: np.ndarray   # (nx, ny, nz) float64
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if self.kind not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r} (allowed: {', '.join(GRID_KINDS)})")
        self.values = np.ascontiguousarray(self.values, dtype="<f8")
        if self.values.ndim != 3:
            raise ValueError("grid values must be 3-D")
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(self.values.shape)

    def __eq__(self, other):
        if not isinstance(other, GridData):
            return NotImplemented
        return (self.kind == other.kind and self.values.shape == other.values.shape
                and self.values.tobytes() == other.values.tobytes()
                and self.lo.tobytes() == other.lo.tobytes()
                and self.hi.tobytes() == other.hi.tobytes())


def grid_data(grid: RecordGrid, kind: str, n_photons: Optional[int] = None) -> GridData:
    if kind == "fluence":
        if n_photons is None:
            raise ValueError("fluence needs n_photons for normalization")
        values = normalize_fluence(grid, n_photons)
    elif kind in ("path", "absorbed", "evals"):
        values = getattr(grid, kind)
    else:
        raise ValueError(f"unknown grid kind {kind!r} (allowed: {', '.join(GRID_KINDS)})")
    return GridData(kind, values.astype(np.float64), grid.lo, grid.hi)


def write_grid(grid: Union[RecordGrid, GridData], kind: Optional[str], path,
               n_photons: Optional[int] = None) -> None:
    """Header (magic, version, kind, dims, extents) then row-major little-endian float64."""
    if isinstance(grid, RecordGrid):
        data = grid_data(grid, kind, n_photons)
    else:
        data = grid if kind is None or kind == grid.kind else GridData(kind, grid.values, grid.lo, grid.hi)
    header = _HEADER.pack(GRID_MAGIC, GRID_VERSION, GRID_KINDS.index(data.kind), *data.dims,
                          *data.lo, *data.hi)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.values.tobytes(order="C"))


def read_grid(path) -> GridData:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise GridFormatError(f"{path}: file too short for a grid header ({len(raw)} bytes)")
    magic, version, kind, nx, ny, nz, *ext = _HEADER.unpack_from(raw)
    if magic != GRID_MAGIC:
        raise GridFormatError(f"{path}: bad magic {magic!r}")
    if version != GRID_VERSION:
        raise GridFormatError(f"{path}: unsupported version {version}")
    if kind >= len(GRID_KINDS):
        raise GridFormatError(f"{path}: unknown accumulator kind code {kind}")
    if min(nx, ny, nz) < 1:
        raise GridFormatError(f"{path}: dims must be >= 1, got {(nx, ny, nz)}")
    expected = nx * ny * nz * 8
    payload = len(raw) - _HEADER.size
    if payload != expected:
        raise GridFormatError(f"{path}: payload is {payload} bytes, header dims {(nx, ny, nz)} "
                              f"need {expected}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(nx, ny, nz).copy()
    return GridData(GRID_KINDS[kind], values, ext[:3], ext[3:])


# --------------------------------------------------------------------------
# slices
# --------------------------------------------------------------------------

AXES = {"x": 0, "y": 1, "z": 2}


def extract_slice(grid, axis: Union[str, int], index: int) -> np.ndarray:
    """The plane ``index`` normal to ``axis`` as a 2-D array.

    Rows follow the first remaining axis, columns the second (for
    ``axis='z'`` row i is x-cell i, column j is y-cell j).
    """
    values = grid.values if isinstance(grid, GridData) else np.asarray(grid)
    a = AXES[axis] if isinstance(axis, str) else int(axis)
    if a not in (0, 1, 2):
        raise InvalidParameterError(f"axis must be x, y or z, got {axis!r}")
    n = values.shape[a]
    if not 0 <= int(index) < n:
        raise InvalidParameterError(f"slice index {index} out of range for axis of size {n}")
    return np.take(values, int(index), axis=a)


def write_slice_csv(table: np.ndarray, path) -> None:
    # 17 significant digits round-trip float64 exactly
    np.savetxt(path, np.atleast_2d(table), delimiter=",", fmt="%.17g")


def read_slice_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))
