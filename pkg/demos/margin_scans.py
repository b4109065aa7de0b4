"""
Exhaustive margin scans over small graphs
=========================================

For every connected graph up to a size bound, every transversal set and every
ordered pair (u, v), compute P(u0 -> v0) - P(u0 -> v1) exactly and keep the
minimum. A negative value would be a counterexample.
"""

from bunkbed import InstanceFilter, scan_conjecture
from bunkbed.search import anticorrelated_constraints

for model in ("E3", "E2", "D2", "D3"):
    rep = scan_conjecture(model, InstanceFilter(max_vertices=4))
    print(rep.to_text().splitlines()[0], "| min margin", rep.min_margin,
          f"| {rep.equality_count} ties, {rep.equality_cutset} explained by a separating T")

# Outerplanar graphs on up to five vertices.
rep = scan_conjecture("E3", InstanceFilter(max_vertices=5, outerplanar_only=True))
print("outerplanar, n <= 5:", rep.total, "cases, min margin", rep.min_margin)

# Sanity check in the other direction: forcing the two edges at each degree-2
# vertex to take different colors breaks the inequality at once.
rep = scan_conjecture("E3", InstanceFilter(max_vertices=3), constrain=anticorrelated_constraints)
print(rep.to_text())
