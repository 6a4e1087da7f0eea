"""Closed-form solutions of the square and circular plate benchmarks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import BC, GeometryPatch, unit_disk_patch, unit_square_patch
from .material import IsotropicMaterial

__all__ = [
    "ExactSolution",
    "square_plate_exact",
    "square_plate_constants",
    "disk_plate_exact",
    "disk_plate_constants",
    "square_benchmark_geometry",
    "disk_benchmark_geometry",
    "Benchmark",
    "BENCHMARKS",
    "get_benchmark",
]

PI = np.pi


@dataclass
class ExactSolution:
    """Deflection with derivatives up to fourth order, all as callables of ``(x, y)``.

    ``hessian`` returns ``(..., 2, 2)``; ``d4(x, y)`` returns the tuple
    ``(w_xxxx, w_xxxy, w_xxyy, w_xyyy, w_yyyy)``.
    """

    w: Callable
    grad: Callable
    hessian: Callable
    d3: Callable
    d4: Callable
    material: IsotropicMaterial
    load: Callable
    name: str = ""
    provenance: str = ""
    meta: dict = field(default_factory=dict)

    def moment(self, x, y) -> np.ndarray:
        return -self.material.apply(self.hessian(x, y))

    def div_div_moment(self, x, y) -> np.ndarray:
        """``div Div (C hess w)`` from the fourth derivatives."""
        wxxxx, _, wxxyy, _, wyyyy = self.d4(x, y)
        # both parts of the isotropic law reduce to the bilaplacian
        return self.material.D * (wxxxx + 2 * wxxyy + wyyyy)

    def pde_residual(self, x, y) -> np.ndarray:
        return self.div_div_moment(x, y) - self.load(x, y)

    def edge_conditions(self, x, y, n, t, bc: BC) -> list:
        """Residuals of the two boundary conditions of ``bc`` at points on a
        straight or curved edge with unit normal ``n`` and tangent ``t``.

        The effective shear uses ``d(M n.t)/dt`` evaluated for straight edges
        (zero curvature); it is only requested on the straight free edge.
        """
        bc = BC.parse(bc)
        w = self.w(x, y)
        g = self.grad(x, y)
        M = self.moment(x, y)
        Mnn = np.einsum("...i,...ij,...j->...", n, M, n)
        if bc is BC.CLAMPED:
            return [w, (g * n).sum(-1)]
        if bc is BC.SIMPLY_SUPPORTED:
            return [w, Mnn]
        D, nu = self.material.D, self.material.nu
        T = self.d3(x, y)  # (..., 2, 2, 2) third derivatives
        # Div M_i = sum_j d_j M_ij with M = -C hess w
        lap_grad = T[..., 0, 0, :] + T[..., 1, 1, :]
        divM = -D * ((1 - nu) * np.einsum("...ijj->...i", T) + nu * lap_grad)
        dM = -D * ((1 - nu) * T + nu * lap_grad[..., None, None, :] * np.eye(2)[..., None])
        dMnt_dt = np.einsum("...i,...ijk,...j,...k->...", n, dM, t, t)
        return [Mnn, dMnt_dt + (divM * n).sum(-1)]


def _square_basis(x, k: int):
    """k-th x-derivatives of (cosh, x cosh, sinh, x sinh, sin)(pi x)."""
    x = np.asarray(x, dtype=float)
    ep, em = np.exp(PI * x), np.exp(-PI * x)
    # d^k (x e^{l x}) = (l^k x + k l^{k-1}) e^{l x}
    def xe(lmb, e):
        return (lmb ** k * x + k * lmb ** (k - 1) * (k > 0)) * e
    ch = 0.5 * (PI ** k * ep + (-PI) ** k * em)
    sh = 0.5 * (PI ** k * ep - (-PI) ** k * em)
    xch = 0.5 * (xe(PI, ep) + xe(-PI, em))
    xsh = 0.5 * (xe(PI, ep) - xe(-PI, em))
    sn = PI ** k * np.sin(PI * x + 0.5 * k * PI)
    return np.stack([ch, xch, sh, xsh, sn], axis=-1)


def square_plate_constants(material: IsotropicMaterial = IsotropicMaterial(1.0, 0.0)) -> np.ndarray:
    """Constants ``(a, b, c, d)`` from the clamped west (x = -1) and free east
    (x = 1) edge conditions after dividing out ``sin(pi y)``."""
    nu = material.nu
    B = [(_square_basis(-1.0, k)) for k in range(4)]
    E = [(_square_basis(1.0, k)) for k in range(4)]
    # with Y = sin(pi y): Y'' = -pi^2 Y
    rows = [
        B[0],  # w = 0
        B[1],  # w_x = 0
        E[2] - nu * PI ** 2 * E[0],  # M_xx ~ w_xx + nu w_yy = 0
        E[3] - (2 - nu) * PI ** 2 * E[1],  # w_xxx + (2 - nu) w_xyy = 0
    ]
    A = np.array([r[:4] for r in rows])
    rhs = -np.array([r[4] for r in rows])
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError("square-plate constant system is singular")
    return np.linalg.solve(A, rhs)


def square_plate_exact(material: IsotropicMaterial = IsotropicMaterial(1.0, 0.0)) -> ExactSolution:
    """``w = ((a + b x) cosh(pi x) + (c + d x) sinh(pi x) + sin(pi x)) sin(pi y)``
    on (-1, 1)^2: simply supported north/south, clamped west, free east."""
    coef = np.append(square_plate_constants(material), 1.0)

    def X(x, k):
        return _square_basis(x, k) @ coef

    def Y(y, k):
        return PI ** k * np.sin(PI * np.asarray(y, float) + 0.5 * k * PI)

    def w(x, y):
        return X(x, 0) * Y(y, 0)

    def grad(x, y):
        return np.stack([X(x, 1) * Y(y, 0), X(x, 0) * Y(y, 1)], axis=-1)

    def hessian(x, y):
        xy = X(x, 1) * Y(y, 1)
        return np.stack([np.stack([X(x, 2) * Y(y, 0), xy], -1),
                         np.stack([xy, X(x, 0) * Y(y, 2)], -1)], -2)

    def d3(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        T = np.empty(x.shape + (2, 2, 2))
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    ny = i + j + k
                    T[..., i, j, k] = X(x, 3 - ny) * Y(y, ny)
        return T

    def d4(x, y):
        return tuple(X(x, 4 - j) * Y(y, j) for j in range(5))

    D = material.D

    def load(x, y):
        return 4 * PI ** 4 * D * np.sin(PI * np.asarray(x)) * np.sin(PI * np.asarray(y))

    return ExactSolution(w, grad, hessian, d3, d4, material, load, name="square",
                         provenance="Levy-type series term with clamped/free edges, constants solved numerically",
                         meta={"constants": coef[:4]})


def disk_plate_constants(material: IsotropicMaterial = IsotropicMaterial(1.0, 0.3), load: float = 1.0):
    """``(c1, c2, c3)`` of ``w = c1 + c2 r^2 + c3 r^4`` for the simply supported unit disk."""
    nu, D = material.nu, material.D
    c3 = load / (64.0 * D)
    # w(1) = 0 and M_rr(1) ~ w_rr + nu w_r / r = 0
    A = np.array([[1.0, 1.0], [0.0, 2.0 + 2.0 * nu]])
    rhs = -c3 * np.array([1.0, 12.0 + 4.0 * nu])
    c1, c2 = np.linalg.solve(A, rhs)
    return c1, c2, c3


def disk_plate_exact(material: IsotropicMaterial = IsotropicMaterial(1.0, 0.3), load: float = 1.0) -> ExactSolution:
    c1, c2, c3 = disk_plate_constants(material, load)

    def w(x, y):
        r2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
        return c1 + c2 * r2 + c3 * r2 ** 2

    def grad(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        f = 2 * c2 + 4 * c3 * (x ** 2 + y ** 2)
        return np.stack([f * x, f * y], axis=-1)

    def hessian(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        base = 2 * c2 + 4 * c3 * (x ** 2 + y ** 2)
        hxx = base + 8 * c3 * x ** 2
        hyy = base + 8 * c3 * y ** 2
        hxy = 8 * c3 * x * y
        return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)

    def d3(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        T = np.empty(x.shape + (2, 2, 2))
        xx = (x, y)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    # d_k of (base delta_ij + 8 c3 x_i x_j)
                    val = 8 * c3 * xx[k] * (i == j)
                    val = val + 8 * c3 * ((i == k) * xx[j] + (j == k) * xx[i])
                    T[..., i, j, k] = val
        return T

    def d4(x, y):
        x = np.asarray(x, float) * 0 + np.asarray(y, float) * 0
        return (24 * c3 + x, x, 8 * c3 + x, x, 24 * c3 + x)

    def f(x, y):
        return load + 0.0 * np.asarray(x) * np.asarray(y)

    return ExactSolution(w, grad, hessian, d3, d4, material, f, name="disk",
                         provenance="axisymmetric simply supported circular plate",
                         meta={"c1": c1, "c2": c2, "c3": c3})


def square_benchmark_geometry() -> GeometryPatch:
    # south, east, north, west
    return unit_square_patch(2.0, (0.0, 0.0),
                             (BC.SIMPLY_SUPPORTED, BC.FREE, BC.SIMPLY_SUPPORTED, BC.CLAMPED))


def disk_benchmark_geometry() -> GeometryPatch:
    return unit_disk_patch((BC.SIMPLY_SUPPORTED,) * 4)


@dataclass(frozen=True)
class Benchmark:
    name: str
    geometry: Callable
    material: IsotropicMaterial
    exact: Callable

    def exact_solution(self) -> ExactSolution:
        return self.exact(self.material)

    @property
    def load(self) -> Callable:
        return self.exact_solution().load

    def problem(self, degree: int, level: int, **kw):
        from .pipeline import PlateProblem
        return PlateProblem(self.geometry(), self.material, self.load, degree, level, **kw)


BENCHMARKS = {
    "square": Benchmark("square", square_benchmark_geometry, IsotropicMaterial(1.0, 0.0), square_plate_exact),
    "disk": Benchmark("disk", disk_benchmark_geometry, IsotropicMaterial(1.0, 0.3), disk_plate_exact),
}


def get_benchmark(name: str) -> Benchmark:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None


def self_check(exact: ExactSolution, geometry: GeometryPatch, n: int = 100, seed: int = 0) -> dict:
    """Largest boundary-condition and PDE residuals of ``exact`` at ``n``
    random boundary points and ``n`` random interior points."""
    rng = np.random.default_rng(seed)
    K = len(geometry.edges)
    bc = 0.0
    for k, e in enumerate(geometry.edges):
        m = n // K + (k < n % K)
        fr = e.frame(rng.uniform(0, 1, m))
        x, y = fr.point[:, 0], fr.point[:, 1]
        for r in exact.edge_conditions(x, y, fr.normal, fr.tangent, e.bc):
            bc = max(bc, float(np.abs(r).max()))
    uv = rng.uniform(0.02, 0.98, (2, n))
    pts = geometry(uv[0], uv[1])
    pde = float(np.abs(exact.pde_residual(pts[:, 0], pts[:, 1])).max())
    return {"bc": bc, "pde": pde}
