"""Scalar SDF kernels over a flattened :class:`~sdfmcrt.sdf.program.SdfProgram`."""
import math

from .._jit import njit
from . import opcodes as op

TRACE_HIT = 0
TRACE_MISS = 1
TRACE_STEP_LIMIT = 2


def _eval_root(code, fp, start, end, x, y, z, ps, vs):
    """Signed distance of one root at ``(x, y, z)``.

    ``ps`` (depth, 3) and ``vs`` (depth,) are caller-owned scratch stacks.
    """
    sp = 0
    ps[0, 0] = x
    ps[0, 1] = y
    ps[0, 2] = z
    vp = 0
    for i in range(start, end):
        opc = code[i, 0]
        o = code[i, 1]
        px = ps[sp, 0]
        py = ps[sp, 1]
        pz = ps[sp, 2]
        if opc == op.SPHERE:
            vs[vp] = math.sqrt(px * px + py * py + pz * pz) - fp[o]
            vp += 1
        elif opc == op.BOX:
            qx = abs(px) - fp[o]
            qy = abs(py) - fp[o + 1]
            qz = abs(pz) - fp[o + 2]
            mx = max(qx, 0.0)
            my = max(qy, 0.0)
            mz = max(qz, 0.0)
            vs[vp] = math.sqrt(mx * mx + my * my + mz * mz) + min(max(qx, max(qy, qz)), 0.0)
            vp += 1
        elif opc == op.CAPSULE:
            pax = px - fp[o]
            pay = py - fp[o + 1]
            paz = pz - fp[o + 2]
            bax = fp[o + 3] - fp[o]
            bay = fp[o + 4] - fp[o + 1]
            baz = fp[o + 5] - fp[o + 2]
            bb = bax * bax + bay * bay + baz * baz
            h = 0.0
            if bb > 0.0:
                h = min(max((pax * bax + pay * bay + paz * baz) / bb, 0.0), 1.0)
            dx = pax - bax * h
            dy = pay - bay * h
            dz = paz - baz * h
            vs[vp] = math.sqrt(dx * dx + dy * dy + dz * dz) - fp[o + 6]
            vp += 1
        elif opc == op.CYLINDER:
            dx = math.sqrt(px * px + py * py) - fp[o + 1]
            dy = abs(pz) - fp[o]
            mx = max(dx, 0.0)
            my = max(dy, 0.0)
            vs[vp] = min(max(dx, dy), 0.0) + math.sqrt(mx * mx + my * my)
            vp += 1
        elif opc == op.TORUS:
            qx = math.sqrt(px * px + py * py) - fp[o]
            vs[vp] = math.sqrt(qx * qx + pz * pz) - fp[o + 1]
            vp += 1
        elif opc == op.UNION:
            vp -= 1
            vs[vp - 1] = min(vs[vp - 1], vs[vp])
        elif opc == op.INTERSECTION:
            vp -= 1
            vs[vp - 1] = max(vs[vp - 1], vs[vp])
        elif opc == op.SUBTRACTION:
            vp -= 1
            vs[vp - 1] = max(vs[vp - 1], -vs[vp])
        elif opc == op.SMOOTH_UNION:
            vp -= 1
            d1 = vs[vp - 1]
            d2 = vs[vp]
            k = fp[o]
            h = min(max(0.5 + 0.5 * (d2 - d1) / k, 0.0), 1.0)
            vs[vp - 1] = d2 * (1.0 - h) + d1 * h - k * h * (1.0 - h)
        elif opc == op.TRANSLATE:
            sp += 1
            ps[sp, 0] = px - fp[o]
            ps[sp, 1] = py - fp[o + 1]
            ps[sp, 2] = pz - fp[o + 2]
        elif opc == op.ROTATE:
            sp += 1
            ps[sp, 0] = fp[o] * px + fp[o + 1] * py + fp[o + 2] * pz
            ps[sp, 1] = fp[o + 3] * px + fp[o + 4] * py + fp[o + 5] * pz
            ps[sp, 2] = fp[o + 6] * px + fp[o + 7] * py + fp[o + 8] * pz
        elif opc == op.ELONGATE:
            sp += 1
            ps[sp, 0] = px - min(max(px, -fp[o]), fp[o])
            ps[sp, 1] = py - min(max(py, -fp[o + 1]), fp[o + 1])
            ps[sp, 2] = pz - min(max(pz, -fp[o + 2]), fp[o + 2])
        elif opc == op.TWIST:
            ang = fp[o] * pz
            c = math.cos(ang)
            s = math.sin(ang)
            sp += 1
            ps[sp, 0] = c * px - s * py
            ps[sp, 1] = s * px + c * py
            ps[sp, 2] = pz
        elif opc == op.BEND:
            ang = fp[o] * px
            c = math.cos(ang)
            s = math.sin(ang)
            sp += 1
            ps[sp, 0] = c * px - s * py
            ps[sp, 1] = s * px + c * py
            ps[sp, 2] = pz
        elif opc == op.REPEAT:
            sp += 1
            ps[sp, 0] = px - fp[o] * math.floor(px / fp[o] + 0.5)
            ps[sp, 1] = py - fp[o + 1] * math.floor(py / fp[o + 1] + 0.5)
            ps[sp, 2] = pz - fp[o + 2] * math.floor(pz / fp[o + 2] + 0.5)
        elif opc == op.DISPLACE:
            sp += 1
            ps[sp, 0] = px
            ps[sp, 1] = py
            ps[sp, 2] = pz
        elif opc == op.POP:
            sp -= 1
        elif opc == op.POP_DISPLACE:
            f = fp[o + 1]
            vs[vp - 1] += fp[o] * math.sin(f * px) * math.sin(f * py) * math.sin(f * pz)
            sp -= 1
    return vs[0]


eval_root = njit(_eval_root)
# inlined copy for the transport hot loop: avoids per-call refcounting of the array arguments
eval_root_inline = njit(inline="always")(_eval_root)


@njit
def eval_points(code, fp, start, end, pts, ps, vs, out):
    for i in range(pts.shape[0]):
        out[i] = eval_root(code, fp, start, end, pts[i, 0], pts[i, 1], pts[i, 2], ps, vs)


@njit
def gradient_root(code, fp, start, end, x, y, z, eps, ps, vs, g):
    """Central-difference gradient (6 evaluations) into ``g``; returns its norm."""
    inv = 0.5 / eps
    g[0] = (eval_root(code, fp, start, end, x + eps, y, z, ps, vs)
            - eval_root(code, fp, start, end, x - eps, y, z, ps, vs)) * inv
    g[1] = (eval_root(code, fp, start, end, x, y + eps, z, ps, vs)
            - eval_root(code, fp, start, end, x, y - eps, z, ps, vs)) * inv
    g[2] = (eval_root(code, fp, start, end, x, y, z + eps, ps, vs)
            - eval_root(code, fp, start, end, x, y, z - eps, ps, vs)) * inv
    return math.sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])


REFINE_ITERS = 32
REFINE_MAX_STEP = 8.0   # in units of delta
REFINE_TOL = 1e-3       # in units of delta


@njit
def refine_hit(code, fp, start, end, ox, oy, oz, dx, dy, dz, t, d, delta, ps, vs):
    """Move a sphere-trace hit closer to the actual zero crossing along the ray.

    A march stops at ``|d| <= delta``, which can still leave ``delta / cos``
    of ray before the surface at grazing incidence. Secant steps (each capped
    at a few ``delta``) walk on towards the crossing; once one lands past it,
    bisection closes the bracket. The result keeps the sign of ``d`` and
    ``|d| <= delta``. Returns ``(t, d, evaluations)``.
    """
    n = 0
    if d == 0.0:
        return t, d, n
    side = 1.0 if d > 0.0 else -1.0
    cap = REFINE_MAX_STEP * delta
    tol = REFINE_TOL * delta
    step = abs(d)
    for _ in range(REFINE_ITERS):
        if abs(d) <= tol:
            break
        step = min(step, cap)
        tc = t + step
        dc = eval_root(code, fp, start, end, ox + tc * dx, oy + tc * dy, oz + tc * dz, ps, vs)
        n += 1
        if dc * side > 0.0:
            if abs(dc) >= abs(d):
                break  # moving away: grazing pass without a crossing
            step = abs(dc) * step / (abs(d) - abs(dc))
            t = tc
            d = dc
            continue
        lo = t
        hi = tc
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            dm = eval_root(code, fp, start, end, ox + mid * dx, oy + mid * dy, oz + mid * dz, ps, vs)
            n += 1
            if dm * side > 0.0:
                lo = mid
                d = dm
            else:
                hi = mid
        t = lo
        break
    return t, d, n


@njit
def trace_root(code, fp, start, end, lip, ox, oy, oz, dx, dy, dz,
               delta, max_steps, max_dist, ps, vs):
    """Sphere-trace one root along a unit ray.

    Returns ``(status, t, steps)``; status is one of TRACE_HIT / TRACE_MISS /
    TRACE_STEP_LIMIT. Steps are ``|d| * lip`` so the ray never crosses the
    zero level set of a bounded field; hits are tightened by :func:`refine_hit`
    and ``steps`` counts every evaluation.
    """
    t = 0.0
    steps = 0
    while steps < max_steps:
        d = eval_root(code, fp, start, end, ox + t * dx, oy + t * dy, oz + t * dz, ps, vs)
        steps += 1
        ad = abs(d)
        if ad <= delta:
            t, d, n = refine_hit(code, fp, start, end, ox, oy, oz, dx, dy, dz, t, d, delta, ps, vs)
            return TRACE_HIT, t, steps + n
        t += ad * lip
        if not (t <= max_dist and t < math.inf):  # an unbounded march can overflow
            return TRACE_MISS, t, steps
    return TRACE_STEP_LIMIT, t, steps


@njit
def trace_root_path(code, fp, start, end, lip, ox, oy, oz, dx, dy, dz,
                    delta, max_steps, max_dist, ps, vs, ts):
    """Like :func:`trace_root` but also stores every visited ``t`` in ``ts``."""
    t = 0.0
    steps = 0
    while steps < max_steps and steps < ts.shape[0]:
        ts[steps] = t
        d = eval_root(code, fp, start, end, ox + t * dx, oy + t * dy, oz + t * dz, ps, vs)
        steps += 1
        ad = abs(d)
        if ad <= delta:
            return TRACE_HIT, t, steps
        t += ad * lip
        if not (t <= max_dist and t < math.inf):
            return TRACE_MISS, t, steps
    return TRACE_STEP_LIMIT, t, steps
