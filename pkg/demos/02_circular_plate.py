"""
Simply supported circular plate
===============================

Uniformly loaded unit disk, D = 1 and nu = 0.3, on an exact single-patch
NURBS geometry. Polygonal approximations of this domain converge to the wrong
plate (the Babuska paradox); with the exact boundary the errors drop at the
optimal rates.
"""
import numpy as np

from mixedplate import get_benchmark, solve_plate
from mixedplate.verification import convergence_study

bench = get_benchmark("disk")
exact = bench.exact_solution()
print("w = c1 + c2 r^2 + c3 r^4 with", {k: round(v, 6) for k, v in exact.meta.items()})

sol = solve_plate(bench.problem(degree=3, level=4))

# the patch center (u, v) = (0.5, 0.5) is the disk center
w0, _ = sol.deflection([0.5], [0.5])
M0 = sol.eval_moment([0.5], [0.5])[0]
print(f"center deflection {w0[0]:.8f} (exact {exact.w(0.0, 0.0):.8f})")
print("center moment\n", M0, "\nexact\n", exact.moment(0.0, 0.0))

# the boundary has no corners: four arcs meet at angle pi
print([round(c.omega / np.pi, 12) for c in sol.disc.multipliers.corners])

print(convergence_study("disk", 3, range(3, 6)).to_table())
