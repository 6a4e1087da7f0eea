"""
Square plate with mixed boundary conditions
===========================================

A plate on (-1, 1)^2, simply supported on the north and south sides, clamped
on the west side and free on the east side, under the load
f = 4 pi^4 sin(pi x) sin(pi y). The deflection is computed through three
second-order problems and compared with the closed-form solution.
"""
import numpy as np

from mixedplate import get_benchmark, solve_plate
from mixedplate.verification import convergence_study, error_norms

bench = get_benchmark("square")
exact = bench.exact_solution()

# one solve at a moderate level
sol = solve_plate(bench.problem(degree=2, level=4))
print(sol.space)
print("multiplier space dimension:", sol.disc.multipliers.dim)
print("stage residuals:", {k: f"{v:.1e}" for k, v in sol.residuals().items()})

# deflection along y = 0.5 (parameter v = 0.75), where sin(pi y) = 1
u = np.linspace(0, 1, 5)
wh, _ = sol.deflection(u, np.full_like(u, 0.75))
x = 2 * u - 1
for xi, a, b in zip(x, wh, exact.w(x, 0.5 + 0 * x)):
    print(f"x={xi:+.2f}  w_h={a:+.6f}  w={b:+.6f}")

print(error_norms(sol, exact))

# the bilinear convergence table
print(convergence_study("square", 1, range(3, 7)).to_table())
