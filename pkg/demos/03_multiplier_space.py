"""
The discrete multiplier space
=============================

The boundary coupling is enforced with multipliers (mu_t, mu_n) per edge,
standing for the tangential and normal derivatives of test deflections. They
are constrained by the boundary conditions, one compatibility row per
connected free boundary part, and two rows per corner.
"""
import numpy as np

from mixedplate.geometry import BC, unit_square_patch
from mixedplate.multipliers import MultiplierPrototype, MultiplierSpace
from mixedplate.spaces import SplineSpace

for bcs in [(BC.SIMPLY_SUPPORTED, BC.FREE, BC.SIMPLY_SUPPORTED, BC.CLAMPED),
            (BC.FREE,) * 4,
            (BC.CLAMPED,) * 4]:
    ms = MultiplierSpace(SplineSpace(unit_square_patch(bcs=bcs), 1, 2))
    kinds = {k: ms.constraints.kinds.count(k) for k in ("bc_zero", "compatibility", "corner")}
    print([b.value for b in bcs], "raw", ms.raw_size, "rows", kinds, "dim", ms.dim)

# traces of a function vanishing with its gradient on the boundary are admissible
ms = MultiplierSpace(SplineSpace(unit_square_patch(bcs=(BC.FREE,) * 4), 2, 3))


def grad(x, y):
    return np.stack([-4 * x * (1 - x * x) * (1 - y * y) ** 2, -4 * y * (1 - y * y) * (1 - x * x) ** 2], -1)


print(ms.is_admissible(ms.sample(grad)))

# a single nonzero normal value at a corner is not
x = np.zeros(ms.raw_size)
x[ms.layout.n_index(1, 0)] = 1.0
print(ms.is_admissible(MultiplierPrototype.unpack(ms.layout, x)))
