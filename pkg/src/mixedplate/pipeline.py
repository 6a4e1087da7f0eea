"""Three consecutive second-order solves for the Kirchhoff plate.

1. ``p_h`` in the constrained space from a Poisson problem with the plate load;
2. ``(phi_h, lambda_h)`` from the saddle-point problem that enforces the
   boundary coupling through the discrete multiplier space, with ``phi_h``
   made unique by orthogonality to ``{a x + b}``;
3. ``w_h`` from a Poisson problem whose right-hand side is built from
   ``M_h = p_h I + symCurl phi_h`` and ``lambda_h``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from . import assembly
from .geometry import GeometryPatch
from .material import IsotropicMaterial, sym_curl
from .multipliers import MultiplierSpace
from .solvers import SaddleFactorization, SaddleSystem, SPDFactorization
from .spaces import ConstrainedSpace, SplineSpace

__all__ = [
    "PlateProblem",
    "Discretization",
    "PlateSolution",
    "MomentField",
    "solve_p",
    "solve_phi_lambda",
    "solve_w",
    "solve_plate",
    "eval_moment",
]

log = logging.getLogger(__name__)

Load = Union[Callable, float]


@dataclass(frozen=True)
class PlateProblem:
    geometry: GeometryPatch
    material: IsotropicMaterial
    load: Load
    degree: int
    level: int
    rational: bool = False


class Discretization:
    """Spaces, multiplier basis and assembled operators of one problem.

    ``generic=True`` assembles the C^{-1} terms through the pointwise material
    law instead of the isotropic closed forms.
    """

    def __init__(self, problem: PlateProblem, generic: bool = False):
        self.problem = problem
        self.generic = generic
        self.space = SplineSpace(problem.geometry, problem.degree, problem.level, problem.rational)
        self.cspace = ConstrainedSpace(self.space)
        self.multipliers = MultiplierSpace(self.space)

    @property
    def n(self) -> int:
        return self.space.dim

    @cached_property
    def forms(self) -> assembly.AssembledForms:
        pb = self.problem
        forms = assembly.assemble_all(self.space, self.cspace, self.multipliers, pb.material, pb.load)
        if self.generic:
            forms.A_phiphi = assembly.assemble_symcurl_form(self.space, pb.material, generic=True)
            forms.B_pphi = assembly.assemble_coupling(self.space, pb.material, generic=True)
        return forms

    @cached_property
    def poisson_factor(self) -> SPDFactorization:
        return SPDFactorization(self.forms.K_pp)

    def saddle_system(self, p) -> SaddleSystem:
        F = self.forms
        B = sp.vstack([F.L_phi, F.R], format="csr")
        f = -(F.B_pphi.T @ p)
        g = np.concatenate([-(F.L_p @ p), np.zeros(F.R.shape[0])])
        return SaddleSystem(F.A_phiphi, B, f, g)

    def stage3_rhs(self, p, phi, lam) -> np.ndarray:
        F = self.forms
        rhs = F.M_tr @ p + F.B_pphi @ phi + F.L_p.T @ lam
        return rhs[self.cspace.free]


def solve_p(disc: Discretization) -> np.ndarray:
    """Stage 1; returns full coefficients of ``p_h`` (zeros on constrained dofs)."""
    x = disc.poisson_factor.solve(disc.forms.f_vec)
    return disc.cspace.extend(x)


def solve_phi_lambda(disc: Discretization, p, diagnostics: bool | None = None):
    """Stage 2; returns ``(phi, lam, rt_multipliers)``."""
    system = disc.saddle_system(p)
    x, y = SaddleFactorization(system, diagnostics).solve()
    m = disc.multipliers.dim
    return x, y[:m], y[m:]


def solve_w(disc: Discretization, p, phi, lam) -> np.ndarray:
    """Stage 3; returns full coefficients of ``w_h``."""
    x = disc.poisson_factor.solve(disc.stage3_rhs(p, phi, lam))
    return disc.cspace.extend(x)


class MomentField:
    """``M_h = p_h I + symCurl phi_h`` evaluated with physical derivatives."""

    def __init__(self, space: SplineSpace, p, phi):
        self.space = space
        self.p = np.asarray(p)
        self.phi = np.asarray(phi)

    def _assemble(self, pv, g1, g2):
        G = np.stack([g1, g2], axis=-2)  # G[..., i, j] = d phi_i / d x_j
        return pv[..., None, None] * np.eye(2) + sym_curl(G)

    def __call__(self, u, v) -> np.ndarray:
        n = self.space.dim
        pv, _ = self.space.evaluate_field(self.p, u, v)
        _, g1 = self.space.evaluate_field(self.phi[:n], u, v)
        _, g2 = self.space.evaluate_field(self.phi[n:], u, v)
        return self._assemble(pv, g1, g2)

    def at_quadrature(self, cd) -> np.ndarray:
        n = self.space.dim
        pv, _ = cd.field(self.p)
        _, g1 = cd.field(self.phi[:n])
        _, g2 = cd.field(self.phi[n:])
        return self._assemble(pv, g1, g2)


@dataclass
class PlateSolution:
    disc: Discretization
    p: np.ndarray
    phi: np.ndarray
    lam: np.ndarray
    rt_multipliers: np.ndarray
    w: np.ndarray

    @property
    def space(self) -> SplineSpace:
        return self.disc.space

    @property
    def moment(self) -> MomentField:
        return MomentField(self.space, self.p, self.phi)

    def eval_moment(self, u, v) -> np.ndarray:
        return self.moment(u, v)

    def deflection(self, u, v):
        """Value and physical gradient of ``w_h`` at parameter points."""
        return self.space.evaluate_field(self.w, u, v)

    def residuals(self) -> dict:
        """Relative residuals of the three stages and the coupling/RT0 rows."""
        d, F = self.disc, self.disc.forms
        fr = d.cspace.free

        def rel(r, b):
            nb = np.linalg.norm(b)
            return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))

        s = d.saddle_system(self.p)
        y = np.concatenate([self.lam, self.rt_multipliers])
        b3 = d.stage3_rhs(self.p, self.phi, self.lam)
        return {
            "p": rel(F.K_pp @ self.p[fr] - F.f_vec, F.f_vec),
            "phi": rel(s.A @ self.phi + s.B.T @ y - s.f, s.f),
            "coupling": float(np.abs(F.L_phi @ self.phi + F.L_p @ self.p).max(initial=0.0)),
            "rt0": float(np.abs(F.R @ self.phi).max()),
            "w": rel(F.K_pp @ self.w[fr] - b3, b3),
        }


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it (setup, p, phi_lambda, w)."""

    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {type(exc).__name__}: {exc}")
        self.stage = stage


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:
        raise StageError(name, exc) from exc


def solve_plate(problem: PlateProblem, generic: bool = False, diagnostics: bool | None = None) -> PlateSolution:
    disc = _stage("setup", lambda: Discretization(problem, generic=generic))
    _stage("setup", lambda: disc.forms)
    log.info("%s: multiplier dim %d, vector dofs %d", disc.space, disc.multipliers.dim, 2 * disc.n)
    p = _stage("p", solve_p, disc)
    phi, lam, rt = _stage("phi_lambda", solve_phi_lambda, disc, p, diagnostics)
    w = _stage("w", solve_w, disc, p, phi, lam)
    return PlateSolution(disc, p, phi, lam, rt, w)


def eval_moment(solution: PlateSolution, point) -> np.ndarray:
    u, v = point
    return solution.eval_moment([u], [v])[0]
