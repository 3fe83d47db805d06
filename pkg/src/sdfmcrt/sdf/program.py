"""Flatten SDF trees into arrays the kernels can interpret."""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from . import opcodes as op
from .nodes import SdfNode

_PUSH_POINT = {op.TRANSLATE, op.ROTATE, op.ELONGATE, op.TWIST, op.BEND, op.REPEAT, op.DISPLACE}
_POP_POINT = {op.POP, op.POP_DISPLACE}
_BINARY = {op.UNION, op.INTERSECTION, op.SUBTRACTION, op.SMOOTH_UNION}


class SdfProgram(NamedTuple):
    """Postfix code for one or more root SDFs.

    ``code[i] = (opcode, offset into fparams)``; root ``r`` occupies
    ``code[starts[r]:ends[r]]``. ``lipschitz[r]`` scales the safe step of a
    root (1 for exact distances).
    """

    code: np.ndarray        # int64 (n, 2)
    fparams: np.ndarray     # float64
    starts: np.ndarray      # int64 (n_roots,)
    ends: np.ndarray        # int64 (n_roots,)
    lipschitz: np.ndarray   # float64 (n_roots,)
    point_depth: int
    value_depth: int


def _depths(code) -> tuple[int, int]:
    pd = vd = 1
    p = v = 0
    for opcode, _ in code:
        if opcode in _PUSH_POINT:
            p += 1
        elif opcode in _POP_POINT:
            p -= 1
        elif opcode in _BINARY:
            v -= 1
        else:
            v += 1
        pd = max(pd, p + 1)
        vd = max(vd, v)
    return pd, vd


def compile_roots(roots: Sequence[SdfNode], lipschitz_safety: float = 0.9) -> SdfProgram:
    code: list[tuple[int, int]] = []
    fparams: list[float] = []
    starts, ends, lip = [], [], []
    pdepth = vdepth = 1
    for root in roots:
        starts.append(len(code))
        before = len(code)
        root.emit(code, fparams)
        pd, vd = _depths(code[before:])
        pdepth, vdepth = max(pdepth, pd), max(vdepth, vd)
        ends.append(len(code))
        lip.append(1.0 if root.is_bounded() else float(lipschitz_safety))
    if not fparams:
        fparams.append(0.0)
    return SdfProgram(
        code=np.asarray(code, dtype=np.int64).reshape(-1, 2),
        fparams=np.asarray(fparams, dtype=np.float64),
        starts=np.asarray(starts, dtype=np.int64),
        ends=np.asarray(ends, dtype=np.int64),
        lipschitz=np.asarray(lip, dtype=np.float64),
        point_depth=pdepth,
        value_depth=vdepth,
    )


def compile_node(node: SdfNode, lipschitz_safety: float = 0.9) -> SdfProgram:
    return compile_roots([node], lipschitz_safety)


def scratch_for(prog: SdfProgram) -> tuple[np.ndarray, np.ndarray]:
    """Point and value stacks sized for ``prog``."""
    return np.zeros((prog.point_depth, 3)), np.zeros(prog.value_depth)
