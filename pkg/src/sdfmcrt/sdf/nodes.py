"""Signed distance function expression trees.

Nodes are frozen dataclasses. Every node evaluates on point arrays of shape
``(..., 3)`` with plain numpy (recursive, uncached) and knows how to emit
itself into the flat program run by the compiled kernels (see
:mod:`sdfmcrt.sdf.program`).

Distances are negative inside, positive outside. Formulas for the
primitives and operators are the usual closed forms (Hart; Quilez).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidParameterError
from . import opcodes as op

Vec3 = tuple[float, float, float]


def _vec3(v, name: str) -> Vec3:
    try:
        out = tuple(float(c) for c in v)
    except TypeError as exc:
        raise InvalidParameterError(f"{name}: expected 3 numbers, got {v!r}") from exc
    if len(out) != 3:
        raise InvalidParameterError(f"{name}: expected 3 numbers, got {len(out)}")
    if not all(math.isfinite(c) for c in out):
        raise InvalidParameterError(f"{name}: components must be finite")
    return out


def _positive(x, name: str) -> float:
    x = float(x)
    if not (x > 0.0) or not math.isfinite(x):
        raise InvalidParameterError(f"{name} must be > 0, got {x}")
    return x


def _finite(x, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InvalidParameterError(f"{name} must be finite, got {x}")
    return x


def _length(p):
    return np.sqrt(p[..., 0] * p[..., 0] + p[..., 1] * p[..., 1] + p[..., 2] * p[..., 2])


class SdfNode:
    """Base class; subclasses are frozen dataclasses."""

    kind: ClassVar[str] = ""
    #: False when the operator can overestimate the true distance.
    exact: ClassVar[bool] = True

    def evaluate(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != 3:
            raise ValueError(f"points must have trailing dimension 3, got {p.shape}")
        return self._eval(p)

    def _eval(self, p):  # pragma: no cover - abstract
        raise NotImplementedError

    def children(self) -> tuple["SdfNode", ...]:
        return ()

    def params(self) -> dict:
        """Constructor parameters other than children (for serialization)."""
        return {}

    def emit(self, code: list, fparams: list) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    def is_bounded(self) -> bool:
        """True when every operator in the tree is distance-preserving."""
        return self.exact and all(c.is_bounded() for c in self.children())

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    # set-algebra sugar
    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        return Intersection(self, other)

    def __sub__(self, other):
        return Subtraction(self, other)


def _emit_leaf(code, fparams, opcode, values):
    code.append((opcode, len(fparams)))
    fparams.extend(float(v) for v in values)


# --------------------------------------------------------------------------
# primitives
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere(SdfNode):
    radius: float
    kind: ClassVar[str] = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "radius", _positive(self.radius, "sphere radius"))

    def _eval(self, p):
        return _length(p) - self.radius

    def params(self):
        return {"radius": self.radius}

    def emit(self, code, fparams):
        _emit_leaf(code, fparams, op.SPHERE, [self.radius])


@dataclass(frozen=True)
class Box(SdfNode):
    """Axis-aligned box centred at the origin with the given half-extents."""

    half_extents: Vec3
    kind: ClassVar[str] = "box"

    def __post_init__(self):
        h = _vec3(self.half_extents, "box half_extents")
        for c in h:
            _positive(c, "box half_extents component")
        object.__setattr__(self, "half_extents", h)

    def _eval(self, p):
        qx = np.abs(p[..., 0]) - self.half_extents[0]
        qy = np.abs(p[..., 1]) - self.half_extents[1]
        qz = np.abs(p[..., 2]) - self.half_extents[2]
        mx, my, mz = np.maximum(qx, 0.0), np.maximum(qy, 0.0), np.maximum(qz, 0.0)
        outside = np.sqrt(mx * mx + my * my + mz * mz)
        inside = np.minimum(np.maximum(qx, np.maximum(qy, qz)), 0.0)
        return outside + inside

    def params(self):
        return {"half_extents": list(self.half_extents)}

    def emit(self, code, fparams):
        _emit_leaf(code, fparams, op.BOX, self.half_extents)


@dataclass(frozen=True)
class Capsule(SdfNode):
    a: Vec3
    b: Vec3
    radius: float
    kind: ClassVar[str] = "capsule"

    def __post_init__(self):
        object.__setattr__(self, "a", _vec3(self.a, "capsule a"))
        object.__setattr__(self, "b", _vec3(self.b, "capsule b"))
        object.__setattr__(self, "radius", _positive(self.radius, "capsule radius"))

    def _eval(self, p):
        a = np.asarray(self.a)
        ba = np.asarray(self.b) - a
        pa = p - a
        bb = float(ba @ ba)
        if bb == 0.0:
            h = np.zeros(p.shape[:-1])
        else:
            h = np.clip((pa[..., 0] * ba[0] + pa[..., 1] * ba[1] + pa[..., 2] * ba[2]) / bb, 0.0, 1.0)
        return _length(pa - ba * h[..., None]) - self.radius

    def params(self):
        return {"a": list(self.a), "b": list(self.b), "radius": self.radius}

    def emit(self, code, fparams):
        _emit_leaf(code, fparams, op.CAPSULE, [*self.a, *self.b, self.radius])


@dataclass(frozen=True)
class Cylinder(SdfNode):
    """Capped cylinder along z."""

    half_height: float
    radius: float
    kind: ClassVar[str] = "cylinder"

    def __post_init__(self):
        object.__setattr__(self, "half_height", _positive(self.half_height, "cylinder half_height"))
        object.__setattr__(self, "radius", _positive(self.radius, "cylinder radius"))

    def _eval(self, p):
        dx = np.sqrt(p[..., 0] * p[..., 0] + p[..., 1] * p[..., 1]) - self.radius
        dy = np.abs(p[..., 2]) - self.half_height
        mx, my = np.maximum(dx, 0.0), np.maximum(dy, 0.0)
        return np.minimum(np.maximum(dx, dy), 0.0) + np.sqrt(mx * mx + my * my)

    def params(self):
        return {"half_height": self.half_height, "radius": self.radius}

    def emit(self, code, fparams):
        _emit_leaf(code, fparams, op.CYLINDER, [self.half_height, self.radius])


@dataclass(frozen=True)
class Torus(SdfNode):
    """Torus in the xy-plane around the z axis."""

    major_radius: float
    minor_radius: float
    kind: ClassVar[str] = "torus"

    def __post_init__(self):
        object.__setattr__(self, "major_radius", _positive(self.major_radius, "torus major_radius"))
        object.__setattr__(self, "minor_radius", _positive(self.minor_radius, "torus minor_radius"))

    def _eval(self, p):
        qx = np.sqrt(p[..., 0] * p[..., 0] + p[..., 1] * p[..., 1]) - self.major_radius
        qz = p[..., 2]
        return np.sqrt(qx * qx + qz * qz) - self.minor_radius

    def params(self):
        return {"major_radius": self.major_radius, "minor_radius": self.minor_radius}

    def emit(self, code, fparams):
        _emit_leaf(code, fparams, op.TORUS, [self.major_radius, self.minor_radius])


# --------------------------------------------------------------------------
# CSG
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Binary(SdfNode):
    a: SdfNode
    b: SdfNode
    opcode: ClassVar[int] = -1

    def __post_init__(self):
        for name in ("a", "b"):
            if not isinstance(getattr(self, name), SdfNode):
                raise InvalidParameterError(f"{self.kind}: child {name} is not an SdfNode")

    def children(self):
        return (self.a, self.b)

    def emit(self, code, fparams):
        self.a.emit(code, fparams)
        self.b.emit(code, fparams)
        code.append((self.opcode, len(fparams)))


@dataclass(frozen=True)
class Union(_Binary):
    kind: ClassVar[str] = "union"
    opcode: ClassVar[int] = op.UNION

    def _eval(self, p):
        return np.minimum(self.a._eval(p), self.b._eval(p))


@dataclass(frozen=True)
class Intersection(_Binary):
    kind: ClassVar[str] = "intersection"
    opcode: ClassVar[int] = op.INTERSECTION

    def _eval(self, p):
        return np.maximum(self.a._eval(p), self.b._eval(p))


@dataclass(frozen=True)
class Subtraction(_Binary):
    """``a`` with ``b`` carved out."""

    kind: ClassVar[str] = "subtraction"
    opcode: ClassVar[int] = op.SUBTRACTION

    def _eval(self, p):
        return np.maximum(self.a._eval(p), -self.b._eval(p))


@dataclass(frozen=True)
class SmoothUnion(_Binary):
    """Polynomial smooth minimum with blend radius ``k``."""

    k: float = 0.1
    kind: ClassVar[str] = "smooth_union"
    opcode: ClassVar[int] = op.SMOOTH_UNION

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "k", _positive(self.k, "smooth_union k"))

    def _eval(self, p):
        d1 = self.a._eval(p)
        d2 = self.b._eval(p)
        h = np.clip(0.5 + 0.5 * (d2 - d1) / self.k, 0.0, 1.0)
        return d2 * (1.0 - h) + d1 * h - self.k * h * (1.0 - h)

    def params(self):
        return {"k": self.k}

    def emit(self, code, fparams):
        self.a.emit(code, fparams)
        self.b.emit(code, fparams)
        code.append((self.opcode, len(fparams)))
        fparams.append(self.k)


# --------------------------------------------------------------------------
# transforms (domain warps applied to the query point)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Transform(SdfNode):
    child: SdfNode
    push_opcode: ClassVar[int] = -1
    pop_opcode: ClassVar[int] = op.POP

    def __post_init__(self):
        if not isinstance(self.child, SdfNode):
            raise InvalidParameterError(f"{self.kind}: child is not an SdfNode")

    def children(self):
        return (self.child,)

    def _values(self) -> list[float]:
        return []

    def emit(self, code, fparams):
        off = len(fparams)
        code.append((self.push_opcode, off))
        fparams.extend(self._values())
        self.child.emit(code, fparams)
        code.append((self.pop_opcode, off))


@dataclass(frozen=True)
class Translate(_Transform):
    offset: Vec3 = (0.0, 0.0, 0.0)
    kind: ClassVar[str] = "translate"
    push_opcode: ClassVar[int] = op.TRANSLATE

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "offset", _vec3(self.offset, "translate offset"))

    def _eval(self, p):
        return self.child._eval(p - np.asarray(self.offset))

    def params(self):
        return {"offset": list(self.offset)}

    def _values(self):
        return list(self.offset)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Right-handed rotation by ``angle`` radians about ``axis``."""
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.sqrt(ax @ ax)
    x, y, z = ax
    c, s = math.cos(angle), math.sin(angle)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


@dataclass(frozen=True)
class Rotate(_Transform):
    """Rotate the child by ``angle`` radians about ``axis`` (through the origin)."""

    axis: Vec3 = (0.0, 0.0, 1.0)
    angle: float = 0.0
    kind: ClassVar[str] = "rotate"
    push_opcode: ClassVar[int] = op.ROTATE

    def __post_init__(self):
        super().__post_init__()
        axis = _vec3(self.axis, "rotate axis")
        if math.sqrt(sum(c * c for c in axis)) < 1e-12:
            raise InvalidParameterError("rotate axis must be non-zero")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", _finite(self.angle, "rotate angle"))

    def _inverse(self) -> np.ndarray:
        return rotation_matrix(self.axis, self.angle).T

    def _eval(self, p):
        m = self._inverse()
        q = np.empty_like(p)
        for i in range(3):
            q[..., i] = m[i, 0] * p[..., 0] + m[i, 1] * p[..., 1] + m[i, 2] * p[..., 2]
        return self.child._eval(q)

    def params(self):
        return {"axis": list(self.axis), "angle": self.angle}

    def _values(self):
        return list(self._inverse().ravel())


@dataclass(frozen=True)
class Elongate(_Transform):
    half_lengths: Vec3 = (0.0, 0.0, 0.0)
    kind: ClassVar[str] = "elongate"
    push_opcode: ClassVar[int] = op.ELONGATE

    def __post_init__(self):
        super().__post_init__()
        h = _vec3(self.half_lengths, "elongate half_lengths")
        if any(c < 0.0 for c in h):
            raise InvalidParameterError("elongate half_lengths must be >= 0")
        object.__setattr__(self, "half_lengths", h)

    def _eval(self, p):
        h = np.asarray(self.half_lengths)
        return self.child._eval(p - np.clip(p, -h, h))

    def params(self):
        return {"half_lengths": list(self.half_lengths)}

    def _values(self):
        return list(self.half_lengths)


@dataclass(frozen=True)
class Twist(_Transform):
    """Rotate xy by ``rate * z`` radians."""

    rate: float = 0.0
    kind: ClassVar[str] = "twist"
    exact: ClassVar[bool] = False
    push_opcode: ClassVar[int] = op.TWIST

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "rate", _finite(self.rate, "twist rate"))

    def _eval(self, p):
        ang = self.rate * p[..., 2]
        c, s = np.cos(ang), np.sin(ang)
        q = np.stack([c * p[..., 0] - s * p[..., 1], s * p[..., 0] + c * p[..., 1], p[..., 2]], axis=-1)
        return self.child._eval(q)

    def params(self):
        return {"rate": self.rate}

    def _values(self):
        return [self.rate]


@dataclass(frozen=True)
class Bend(_Transform):
    """Rotate xy by ``rate * x`` radians (cheap bend)."""

    rate: float = 0.0
    kind: ClassVar[str] = "bend"
    exact: ClassVar[bool] = False
    push_opcode: ClassVar[int] = op.BEND

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "rate", _finite(self.rate, "bend rate"))

    def _eval(self, p):
        ang = self.rate * p[..., 0]
        c, s = np.cos(ang), np.sin(ang)
        q = np.stack([c * p[..., 0] - s * p[..., 1], s * p[..., 0] + c * p[..., 1], p[..., 2]], axis=-1)
        return self.child._eval(q)

    def params(self):
        return {"rate": self.rate}

    def _values(self):
        return [self.rate]


@dataclass(frozen=True)
class Repeat(_Transform):
    """Infinite repetition with the given period along each axis."""

    period: Vec3 = (1.0, 1.0, 1.0)
    kind: ClassVar[str] = "repeat"
    exact: ClassVar[bool] = False
    push_opcode: ClassVar[int] = op.REPEAT

    def __post_init__(self):
        super().__post_init__()
        per = _vec3(self.period, "repeat period")
        for c in per:
            _positive(c, "repeat period component")
        object.__setattr__(self, "period", per)

    def _eval(self, p):
        c = np.asarray(self.period)
        return self.child._eval(p - c * np.floor(p / c + 0.5))

    def params(self):
        return {"period": list(self.period)}

    def _values(self):
        return list(self.period)


@dataclass(frozen=True)
class Displace(_Transform):
    """Add ``amplitude * sin(fx) sin(fy) sin(fz)`` to the child distance."""

    amplitude: float = 0.0
    frequency: float = 1.0
    kind: ClassVar[str] = "displace"
    exact: ClassVar[bool] = False
    push_opcode: ClassVar[int] = op.DISPLACE
    pop_opcode: ClassVar[int] = op.POP_DISPLACE

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "amplitude", _finite(self.amplitude, "displace amplitude"))
        object.__setattr__(self, "frequency", _finite(self.frequency, "displace frequency"))

    def _eval(self, p):
        f = self.frequency
        bump = np.sin(f * p[..., 0]) * np.sin(f * p[..., 1]) * np.sin(f * p[..., 2])
        return self.child._eval(p) + self.amplitude * bump

    def params(self):
        return {"amplitude": self.amplitude, "frequency": self.frequency}

    def _values(self):
        return [self.amplitude, self.frequency]


# --------------------------------------------------------------------------
# factories
# --------------------------------------------------------------------------

PRIMITIVES = {cls.kind: cls for cls in (Sphere, Box, Capsule, Cylinder, Torus)}
CSG = {cls.kind: cls for cls in (Union, Intersection, Subtraction, SmoothUnion)}
TRANSFORMS = {cls.kind: cls for cls in (Translate, Rotate, Elongate, Twist, Bend, Repeat, Displace)}


def make_primitive(kind: str, **params) -> SdfNode:
    try:
        cls = PRIMITIVES[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown primitive {kind!r}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise InvalidParameterError(f"{kind}: {exc}") from exc


def make_csg(kind: str, a: SdfNode, b: SdfNode, **params) -> SdfNode:
    try:
        cls = CSG[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown CSG operator {kind!r}") from None
    try:
        return cls(a, b, **params)
    except TypeError as exc:
        raise InvalidParameterError(f"{kind}: {exc}") from exc


def make_transform(kind: str, child: SdfNode, **params) -> SdfNode:
    try:
        cls = TRANSFORMS[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown transform {kind!r}") from None
    try:
        return cls(child, **params)
    except TypeError as exc:
        raise InvalidParameterError(f"{kind}: {exc}") from exc


def union_all(nodes) -> SdfNode:
    """Left-fold a non-empty sequence of nodes with :class:`Union`."""
    nodes = list(nodes)
    if not nodes:
        raise InvalidParameterError("union of zero shapes")
    out = nodes[0]
    for n in nodes[1:]:
        out = Union(out, n)
    return out
