"""
A plate that is not one of the built-in benchmarks
==================================================

Simply supported square of side a = 2 under a uniform load q = 1 with nu = 0.3.
The classical double-sine series gives the center deflection
w(0) = (16 q / (pi^6 D)) sum_{m,n odd} (-1)^((m+n)/2 - 1) / (m n (m^2/a^2 + n^2/a^2)^2).
"""
import numpy as np

from mixedplate import BC, IsotropicMaterial, PlateProblem, solve_plate, unit_square_patch

a, q = 2.0, 1.0
mat = IsotropicMaterial(D=1.0, nu=0.3)

odd = np.arange(1, 400, 2)
m, n = np.meshgrid(odd, odd)
sign = (-1.0) ** ((m + n) // 2 - 1)
w_series = 16 * q / (np.pi ** 6 * mat.D) * np.sum(sign / (m * n * ((m / a) ** 2 + (n / a) ** 2) ** 2))

geo = unit_square_patch(a, (0, 0), bcs=(BC.SIMPLY_SUPPORTED,) * 4)
for L in range(2, 6):
    sol = solve_plate(PlateProblem(geo, mat, q, degree=2, level=L))
    w0, _ = sol.deflection([0.5], [0.5])
    print(f"L={L}  w_h(0) = {w0[0]:.10f}   series {w_series:.10f}   diff {abs(w0[0] - w_series):.1e}")
