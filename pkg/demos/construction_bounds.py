"""
Greedy edge toggling and the size of the random constructions
==============================================================

The existence arguments pick pool vertices that see exactly one target pair.
Here the exact failure probability of that greedy scan is compared with its
closed-form bound and with simulation, then the union bound is pushed to find
where the constructions start to work.
"""

import mpmath

from vmulab.construct import (
    closed_bound,
    construction_params,
    dp_exact,
    feasibility_report,
    greedy_failure_rate,
    smallest_feasible_k,
)

k, p = 5, 0.25
print(" m   r   exact    bound   simulated")
for m, r in [(40, 2), (80, 2), (80, 4), (160, 4)]:
    rate, se = greedy_failure_rate(m, r, k, p, trials=10_000, seed=m + r)
    print(f"{m:3d} {r:3d}  {dp_exact(m, r, 0, k, p):.4f}  {min(closed_bound(m, r, k, p), 1):.4f}  {rate:.4f} +- {se:.4f}")

###############################################################################
# Parameters at desk scale
# ------------------------

params = construction_params("vmu", 10, c=5.6)
rep = feasibility_report(params)
print(f"vmu k=10: m={params.m}, n={params.n}, log(d p0) = {float(rep.log_dp0):.2f}, feasible: {rep.feasible}")

###############################################################################
# Where the union bound first closes
# ----------------------------------

k0 = smallest_feasible_k("vmu", c=5.6)
print(f"vmu, c=5.6: first k with d p0 < 1 is about {mpmath.nstr(mpmath.mpf(k0), 6)}")
