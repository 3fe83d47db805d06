"""Instruction set of the flattened SDF program."""

# primitives: push one distance
SPHERE = 0       # r
BOX = 1          # hx hy hz
CAPSULE = 2      # ax ay az bx by bz r
CYLINDER = 3     # half_height r
TORUS = 4        # R r

# CSG: pop two distances, push one
UNION = 10
INTERSECTION = 11
SUBTRACTION = 12
SMOOTH_UNION = 13  # k

# transforms: push a warped copy of the current point
TRANSLATE = 20   # vx vy vz
ROTATE = 21      # 3x3 inverse rotation, row-major
ELONGATE = 22    # hx hy hz
TWIST = 23       # rate
BEND = 24        # rate
REPEAT = 25      # cx cy cz
DISPLACE = 26    # amplitude frequency (point unchanged)

# pop the point pushed by the matching transform
POP = 30
POP_DISPLACE = 31  # also adds the displacement term to the top distance
