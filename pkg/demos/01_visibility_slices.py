"""
Visibility polygons and slices
==============================

The controller's view of a room is the visibility polygon around the user,
cut into triangular slices about the user's position. Each slice carries a
bisector direction, an average edge length and an area. This demo builds the
polygon for a point in the Experiment 2 physical room and prints its slices.
"""

import math

import numpy as np

from rdwlab.env import builtin_pair
from rdwlab.geom import visibility_polygon

pair = builtin_pair(2)
snap = pair.phys.static_snapshot

# standing just above the central table, facing east
p, heading = (0.0, 3.0), 0.0
poly = visibility_polygon(snap, p, heading)
print(f"visible area {poly.area:.3f} m^2 from {len(poly.vertices)} polygon vertices")

# the slice table: bisector, offset from the heading, average length, area
print(f"{'slice':>5} {'bisector':>9} {'offset':>8} {'avg len':>8} {'area':>8}")
for i, s in enumerate(poly.slices):
    print(f"{i:>5} {math.degrees(s.bisector):>8.1f}d {math.degrees(s.angle_offset):>7.1f}d "
          f"{s.avg_length:>8.3f} {s.area:>8.3f}")

# slices tile the polygon exactly
print("sum of slice areas - polygon area =", float(np.sum(poly.areas) - poly.area))

# the same point seen from a different heading only changes the offsets
turned = visibility_polygon(snap, p, math.pi / 2)
print("areas unchanged after turning:", np.array_equal(turned.areas, poly.areas))
