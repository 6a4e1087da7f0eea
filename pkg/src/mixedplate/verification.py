"""Error norms and convergence studies against the benchmark solutions."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import ExactSolution, get_benchmark
from .pipeline import PlateProblem, PlateSolution, solve_plate

__all__ = ["ErrorNorms", "error_norms", "LevelResult", "ConvergenceReport", "convergence_study", "orders",
           "poisson_manufactured"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorNorms:
    w_l2: float
    w_h1: float
    moment_l2: float

    def as_tuple(self):
        return (self.w_l2, self.w_h1, self.moment_l2)


def error_norms(solution: PlateSolution, exact: ExactSolution, extra_points: int = 1) -> ErrorNorms:
    """``||w - w_h||_0``, full ``||w - w_h||_1`` and ``||M - M_h||_0`` (Frobenius),
    integrated with ``degree + 1 + extra_points`` Gauss points per span."""
    space = solution.space
    cd = space.cell_quadrature(space.degree + 1 + int(extra_points))
    x, y = cd.points[..., 0], cd.points[..., 1]
    wv, wg = cd.field(solution.w)
    ew = exact.w(x, y) - wv
    eg = exact.grad(x, y) - wg
    eM = exact.moment(x, y) - solution.moment.at_quadrature(cd)
    l2 = np.sum(cd.weights * ew ** 2)
    semi = np.sum(cd.weights * (eg ** 2).sum(-1))
    m2 = np.sum(cd.weights * (eM ** 2).sum((-1, -2)))
    return ErrorNorms(math.sqrt(l2), math.sqrt(l2 + semi), math.sqrt(m2))


def orders(errors) -> list:
    """``log2(e_{L-1} / e_L)``; the first entry is ``nan``."""
    e = list(errors)
    return [math.nan] + [math.log2(a / b) for a, b in zip(e[:-1], e[1:])]


@dataclass
class LevelResult:
    level: int
    errors: ErrorNorms
    dofs: int
    seconds: float


@dataclass
class ConvergenceReport:
    benchmark: str
    degree: int
    rows: list = field(default_factory=list)

    @property
    def levels(self):
        return [r.level for r in self.rows]

    def column(self, i: int) -> list:
        return [r.errors.as_tuple()[i] for r in self.rows]

    def orders(self, i: int) -> list:
        return orders(self.column(i))

    HEADER = ("L", "e0", "order0", "e1", "order1", "eM", "orderM")

    def to_csv(self) -> str:
        lines = [",".join(self.HEADER)]
        ords = [self.orders(i) for i in range(3)]
        for k, r in enumerate(self.rows):
            cells = [str(r.level)]
            for i in range(3):
                cells.append(f"{r.errors.as_tuple()[i]:.6e}")
                cells.append("" if math.isnan(ords[i][k]) else f"{ords[i][k]:.4f}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        head = f"{'L':>2}  {'|w-w_h|_0':>10} {'order':>6}  {'|w-w_h|_1':>10} {'order':>6}  {'|M-M_h|_0':>10} {'order':>6}"
        out = [f"{self.benchmark} plate, p={self.degree}", head, "-" * len(head)]
        ords = [self.orders(i) for i in range(3)]
        for k, r in enumerate(self.rows):
            cells = [f"{r.level:>2}"]
            for i in range(3):
                o = ords[i][k]
                cells.append(f"{r.errors.as_tuple()[i]:>10.2e} {'' if math.isnan(o) else f'{o:.3f}':>6}")
            out.append("  ".join(cells))
        return "\n".join(out)


class StudyError(RuntimeError):
    def __init__(self, level, exc):
        super().__init__(f"level {level} failed: {exc}")
        self.level = level
        self.stage = getattr(exc, "stage", "setup")


def convergence_study(benchmark: str, degree: int, levels, dump_dir=None) -> ConvergenceReport:
    """Solve the benchmark on each level and tabulate errors and orders."""
    bench = get_benchmark(benchmark)
    exact = bench.exact_solution()
    geometry = bench.geometry()
    levels = list(levels)
    if levels != sorted(levels):
        raise ValueError("levels must be ascending")
    report = ConvergenceReport(benchmark, degree)
    for L in levels:
        t0 = time.perf_counter()
        try:
            sol = solve_plate(PlateProblem(geometry, bench.material, exact.load, degree, L))
            err = error_norms(sol, exact)
            if dump_dir is not None:
                from .io import dump_forms
                dump_forms(sol.disc, dump_dir, prefix=f"{benchmark}_p{degree}_L{L}_")
        except Exception as exc:
            raise StudyError(L, exc) from exc
        dt = time.perf_counter() - t0
        log.info("%s p=%d L=%d: %s (%.1fs)", benchmark, degree, L, err, dt)
        report.rows.append(LevelResult(L, err, sol.space.dim, dt))
    return report


def poisson_manufactured(degree: int, level: int):
    """Stage-1 machinery alone: ``-lap u = 2 pi^2 sin(pi x) sin(pi y)`` on the
    unit square with zero Dirichlet data. Returns ``(||u - u_h||_0, ||u - u_h||_1)``
    with the full H^1 norm."""
    from .assembly import assemble_load, assemble_poisson
    from .geometry import BC, unit_square_patch
    from .solvers import solve_spd
    from .spaces import ConstrainedSpace, SplineSpace

    geo = unit_square_patch(1.0, (0.5, 0.5), (BC.CLAMPED,) * 4)
    Q = ConstrainedSpace(SplineSpace(geo, degree, level))
    pi = np.pi
    f = lambda x, y: 2 * pi ** 2 * np.sin(pi * x) * np.sin(pi * y)  # noqa: E731
    uh = Q.extend(solve_spd(assemble_poisson(Q), assemble_load(Q, f)))
    cd = Q.space.cell_quadrature(degree + 2)
    x, y = cd.points[..., 0], cd.points[..., 1]
    v, g = cd.field(uh)
    e = np.sin(pi * x) * np.sin(pi * y) - v
    ex = pi * np.cos(pi * x) * np.sin(pi * y) - g[..., 0]
    ey = pi * np.sin(pi * x) * np.cos(pi * y) - g[..., 1]
    l2 = np.sum(cd.weights * e ** 2)
    return math.sqrt(l2), math.sqrt(l2 + np.sum(cd.weights * (ex ** 2 + ey ** 2)))
