"""
Exact connection probabilities in the bunkbed models
=====================================================

Every model enumerates its configurations as bitmasks and returns an exact
``Fraction``. We start on the two-edge path u - x - v and then move to the
four-vertex diamond where the colored and oriented models part ways.
"""

from fractions import Fraction

from bunkbed import ModelSpec, MultiGraph, Query, exact_prob, path_graph

# The path u=0, x=1, v=2 with the middle vertex in the transversal set.
path = path_graph(2)
t = {1}

# Colored model: each edge lives in layer 0 or layer 1 with probability 1/2.
# Arriving at v in either layer needs both edges red, or a switch at x.
for layer in (0, 1):
    print(f"E3  P(u0 -> v{layer}) =", exact_prob(path, ModelSpec.e3(t), Query(0, 2, layer)))

# Biased colors: the polynomial family E5 at red probability 2/3.
for layer in (0, 1):
    print(f"E5(2/3)  P(u0 -> v{layer}) =", exact_prob(path, ModelSpec.e5(Fraction(2, 3), t), Query(0, 2, layer)))

# Independent percolation on the whole bunkbed (E1) and with fixed rungs (E2).
print("E1(1/2)  P(u0 -> v1) =", exact_prob(path, ModelSpec.e1(Fraction(1, 2)), Query(0, 2, 1)))
print("E2       P(u0 -> v1) =", exact_prob(path, ModelSpec.e2((Fraction(1, 2), Fraction(1, 3)), t), Query(0, 2, 1)))

# The diamond: u and v are the two degree-2 vertices, both in T.
diamond = MultiGraph(4, ((0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
t = {0, 1}
for name, spec in [("E3", ModelSpec.e3(t)), ("D2", ModelSpec.d2(t)), ("D3", ModelSpec.d3(t))]:
    values = [exact_prob(diamond, spec, Query(0, 1, layer)) for layer in (0, 1)]
    print(f"{name} on the diamond: layer 0 {values[0]}, layer 1 {values[1]}")

# Random orientation (D1) matches fair percolation on the graph itself.
print("D1 vs E1 on G:", exact_prob(diamond, ModelSpec.d1(), Query(0, 1)),
      exact_prob(diamond, ModelSpec.e1(Fraction(1, 2), on_bunkbed=False), Query(0, 1)))
