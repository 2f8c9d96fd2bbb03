"""B-spline and NURBS kernel tour: knot vectors, evaluation, derivatives,
knot insertion, and an exact circular arc."""

import numpy as np

from sbiga import KnotVector, eval_basis, eval_deriv, make_open_knot_vector
from sbiga.geometry import circle_arc

kv = make_open_knot_vector(p=3, segments=4, r=1)
print("open knot vector, p=3, 4 segments, C^1 interior:")
print(" ", kv.values)
print("  basis count n =", kv.n, "(= segments*(p-r) + r + 1)")

t = 0.37
vals = [eval_basis(kv, i, t) for i in range(kv.n)]
print("\nbasis values at t=%.2f sum to %.15f" % (t, sum(vals)))
print("derivative sum:", sum(eval_deriv(kv, i, t, 1) for i in range(kv.n)))

hat = KnotVector([0, 0, 1, 1], 1)
print("\nhat function at 0.25:", eval_basis(hat, 0, 0.25))

arc = circle_arc((0, 0), 1.0, 0.0, -np.pi / 2, degree=3)
ts = np.linspace(0, 1, 9)
pts = arc.eval(ts)
print("\ncubic NURBS quarter arc radii:", np.round(np.hypot(pts[:, 0], pts[:, 1]), 14))

refined = arc.insert_knot(0.5, 2)
print("after knot insertion: control points %d -> %d, geometry drift %.2e"
      % (arc.n, refined.n, np.max(np.abs(arc.eval(ts) - refined.eval(ts)))))
