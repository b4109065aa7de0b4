"""
A graph where the colored and the non-reversing orientation models disagree
===========================================================================

Search every four-vertex, five-edge multigraph for a pair u, v with T = {u, v}
where the non-reversing orientation model (D3) gives 13/16 on both layers
while the colored model (E3) gives 7/8.
"""

from bunkbed import ModelSpec, bbc_margin, find_figure2
from bunkbed.reach import Endpoint, mode_reach, nonreversing_reach

found = find_figure2()
print(f"{len(found)} matching (graph, u, v) choice(s)")
for r in found:
    print("  edges", list(r["graph"].edges), "u", r["u"], "v", r["v"], "D3", r["d3"][0], "E3", r["e3"][0])

# Neither model violates the inequality here; the margins are both zero
# because u and v are themselves transversal.
r = found[0]
g, t, u, v = r["graph"], r["t"], r["u"], r["v"]
print("E3 margin", bbc_margin(g, ModelSpec.e3(t), u, v), "D3 margin", bbc_margin(g, ModelSpec.d3(t), u, v))

# Count orientations where forbidding reversals shrinks the reachable set.
shrunk = sum(mode_reach(g, t, o, Endpoint(u, 0)) != nonreversing_reach(g, t, o, Endpoint(u, 0))
             for o in range(1 << g.m))
print(f"orientations where D3 reaches less than D2: {shrunk} of {1 << g.m}")
