"""
Local complementation and the local minimum degree
==================================================

A short walk through the graph toolkit: toggling neighbourhoods, counting
orbits and reading off the bounds that follow from local sets.
"""

import numpy as np

from vmulab import graph6
from vmulab.bounds import bounds_report, local_min_degree
from vmulab.graph import bits, cycle_graph, local_complement, make_named
from vmulab.orbit import orbit_explore

# Local complementation at u toggles every edge inside N(u).
g = cycle_graph(5)
h = local_complement(g, 0)
print("C5 edges:      ", g.edges())
print("C5 * 0 edges:  ", h.edges())
print("graph6 before/after:", graph6.encode(g), graph6.encode(h))

# Doing it twice is the identity.
assert local_complement(h, 0) == g

###############################################################################
# Orbits under local complementation
# ----------------------------------
# Breadth-first search over labelled graphs. The orbit of C5 is small enough
# to hold in memory; minimum degree over the orbit is the local minimum degree.

for name in ("k3", "cycle:5", "cycle:6"):
    orb = orbit_explore(make_named(name))
    print(f"{name:8s} orbit size {len(orb):4d}  min degree over orbit {orb.min_degree()}")

###############################################################################
# The same number without the orbit
# ---------------------------------
# delta_loc is one less than the smallest local set D + Odd(D). A Gray-code
# scan over D finds it directly, which scales to Paley(29).

for name in ("cycle:6", "petersen", "paley:13", "paley:29"):
    rep = local_min_degree(make_named(name))
    print(f"{name:9s} delta_loc = {rep.delta_loc:2d}  witness D = {list(bits(rep.witness_d))}")

###############################################################################
# Upper bounds on what a graph can do
# -----------------------------------

rep = bounds_report(make_named("petersen"))
print("Petersen: pairable at most", rep.pairability_max, "| vmu at most", rep.vmu_max)

# degree sequences along a random LC walk stay within the orbit
rng = np.random.default_rng(1)
g = make_named("wheel10")
degs = []
for u in rng.integers(0, 10, size=200):
    g = local_complement(g, int(u))
    degs.append(g.min_degree())
print("wheel10 walk: smallest min degree seen", min(degs))
