"""Signed distance functions: primitives, CSG, transforms, normals, tracing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateGradientError
from . import kernels
from .nodes import (
    CSG,
    PRIMITIVES,
    TRANSFORMS,
    Bend,
    Box,
    Capsule,
    Cylinder,
    Displace,
    Elongate,
    Intersection,
    Repeat,
    Rotate,
    SdfNode,
    SmoothUnion,
    Sphere,
    Subtraction,
    Torus,
    Translate,
    Twist,
    Union,
    make_csg,
    make_primitive,
    make_transform,
    rotation_matrix,
    union_all,
)
from .program import SdfProgram, compile_node, compile_roots, scratch_for

DEFAULT_MAX_STEPS = 10_000

__all__ = [
    "SdfNode", "Sphere", "Box", "Capsule", "Cylinder", "Torus",
    "Union", "Intersection", "Subtraction", "SmoothUnion",
    "Translate", "Rotate", "Elongate", "Twist", "Bend", "Repeat", "Displace",
    "PRIMITIVES", "CSG", "TRANSFORMS",
    "make_primitive", "make_csg", "make_transform", "union_all", "rotation_matrix",
    "SdfProgram", "compile_node", "compile_roots",
    "evaluate", "evaluate_compiled", "normal", "sphere_trace", "TraceResult",
]


def evaluate(node: SdfNode, p):
    """Signed distance of ``node`` at ``p``; float for one point, array otherwise."""
    p = np.asarray(p, dtype=float)
    d = node.evaluate(p)
    return float(d) if p.ndim == 1 else d


def evaluate_compiled(node: SdfNode | SdfProgram, points) -> np.ndarray:
    """Evaluate through the flattened kernel (the path used by transport)."""
    prog = node if isinstance(node, SdfProgram) else compile_node(node)
    pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 3))
    ps, vs = scratch_for(prog)
    out = np.empty(pts.shape[0])
    kernels.eval_points(prog.code, prog.fparams, prog.starts[0], prog.ends[0], pts, ps, vs, out)
    return out.reshape(np.shape(points)[:-1])


def normal(node: SdfNode, p, eps: float = 1e-6) -> np.ndarray:
    """Unit outward normal by central differences of the field."""
    prog = compile_node(node)
    ps, vs = scratch_for(prog)
    g = np.zeros(3)
    x, y, z = (float(c) for c in p)
    norm = kernels.gradient_root(prog.code, prog.fparams, prog.starts[0], prog.ends[0],
                                 x, y, z, float(eps), ps, vs, g)
    if not norm >= 1e-12:
        raise DegenerateGradientError(f"SDF gradient vanishes at {tuple(p)} (|grad| = {norm:g})")
    return g / norm


@dataclass(frozen=True)
class TraceResult:
    hit: bool
    t: float
    steps: int
    step_limited: bool = False


def sphere_trace(node: SdfNode, origin, direction, delta: float = 1e-6,
                 max_steps: int = DEFAULT_MAX_STEPS, max_dist: float = np.inf,
                 lipschitz_safety: float = 0.9) -> TraceResult:
    """March from ``origin`` along unit ``direction`` until ``|d| <= delta``."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    d = np.asarray(direction, dtype=float)
    if abs(float(d @ d) - 1.0) > 1e-9:
        raise ValueError("direction must be unit length")
    prog = compile_node(node, lipschitz_safety)
    ps, vs = scratch_for(prog)
    o = np.asarray(origin, dtype=float)
    status, t, steps = kernels.trace_root(
        prog.code, prog.fparams, prog.starts[0], prog.ends[0], prog.lipschitz[0],
        o[0], o[1], o[2], d[0], d[1], d[2], float(delta), int(max_steps), float(max_dist), ps, vs)
    return TraceResult(hit=status == kernels.TRACE_HIT, t=float(t), steps=int(steps),
                       step_limited=status == kernels.TRACE_STEP_LIMIT)
