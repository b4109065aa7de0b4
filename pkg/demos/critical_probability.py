"""
Where the averaged layer difference changes sign
================================================

Average the E5 connection probability over all transversal sets. On a path
with k edges the difference between arriving in layer 0 and in layer 1 is a
polynomial in p, negative near 0 and positive near 1. Its root is found by
Sturm-sequence isolation and exact bisection.
"""

from fractions import Fraction

import numpy as np

from bunkbed import critical_probability, path_graph

tol = Fraction(1, 10 ** 9)
roots = []
for k in range(1, 7):
    rep = critical_probability(path_graph(k), 0, k, tol)
    [root] = rep.roots
    roots.append(float(root.midpoint()))
    print(f"path with {k} edge(s): root in ({float(root.lo):.10f}, {float(root.hi):.10f}),"
          f" sign {root.left_sign:+d}/{root.right_sign:+d}")

# The two-edge path has a closed form.
print("closed form for 2 edges:", np.sqrt(11 / 12) - 0.5)

# The roots climb towards 1/2.
steps = np.diff(roots)
print("increments:", np.array2string(steps, precision=5))
print("all below 1/2:", bool(np.all(np.array(roots) < 0.5)))
