"""Hypothesis strategies for SDF trees."""
from hypothesis import strategies as st

from sdfmcrt.sdf import (
    Bend,
    Box,
    Capsule,
    Cylinder,
    Displace,
    Elongate,
    Intersection,
    Repeat,
    Rotate,
    SmoothUnion,
    Sphere,
    Subtraction,
    Torus,
    Translate,
    Twist,
    Union,
)

pos = st.floats(0.1, 1.0)
coord = st.floats(-0.8, 0.8)
vec = st.tuples(coord, coord, coord)
axis = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda a: sum(c * c for c in a) > 0.01)

primitives = st.one_of(
    st.builds(Sphere, pos),
    st.builds(Box, st.tuples(pos, pos, pos)),
    st.builds(Capsule, vec, vec, st.floats(0.05, 0.5)),
    st.builds(Cylinder, pos, pos),
    st.builds(lambda R, r: Torus(R, min(r, 0.9 * R)), st.floats(0.2, 1.0), st.floats(0.05, 0.5)),
)


def _extend(children):
    return st.one_of(
        st.builds(Union, children, children),
        st.builds(Intersection, children, children),
        st.builds(Subtraction, children, children),
        st.builds(Translate, children, vec),
        st.builds(Rotate, children, axis, st.floats(-3.2, 3.2)),
    )


# exact trees: primitives under min/max CSG, translate and rotate
trees = st.recursive(primitives, _extend, max_leaves=6)
points = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))


def _extend_all(children):
    return st.one_of(
        _extend(children),
        st.builds(SmoothUnion, children, children, st.floats(0.01, 0.5)),
        st.builds(Elongate, children, st.tuples(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 0.5))),
        st.builds(Twist, children, st.floats(-3, 3)),
        st.builds(Bend, children, st.floats(-3, 3)),
        st.builds(Repeat, children, st.tuples(pos, pos, pos)),
        st.builds(Displace, children, st.floats(-0.1, 0.1), st.floats(0.5, 20)),
    )


# every node kind, including the non-exact ones
all_trees = st.recursive(primitives, _extend_all, max_leaves=5)
