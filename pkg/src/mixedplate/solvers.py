"""Sparse direct solvers for the SPD stages and the saddle-point stage."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "SolverError",
    "IndefiniteMatrixError",
    "RankDeficiencyError",
    "SPDFactorization",
    "SaddleSystem",
    "SaddleFactorization",
    "solve_spd",
    "solve_saddle",
    "inertia",
]

RESIDUAL_TOL = 1e-10


class SolverError(RuntimeError):
    pass


class IndefiniteMatrixError(SolverError):
    """Non-positive pivot in a factorization expected to be SPD."""


class RankDeficiencyError(SolverError):
    def __init__(self, msg, rows=()):
        super().__init__(msg)
        self.rows = list(rows)


def _rel_residual(A, x, b) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(A @ x - b)
    return r / nb if nb > 0 else r


class SPDFactorization:
    """Symmetric-mode sparse LU of an SPD matrix.

    With a symmetric fill-reducing ordering and diagonal pivoting, ``U``'s
    diagonal holds the pivots of ``LDL^T``; a non-positive pivot means the
    matrix is not positive definite. Immutable after construction.
    """

    def __init__(self, K):
        self.K = sp.csc_matrix(K)
        if self.K.shape[0] == 0:
            self._lu = None
            return
        try:
            self._lu = spla.splu(self.K, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                                 options={"SymmetricMode": True})
        except RuntimeError as exc:
            raise IndefiniteMatrixError(f"factorization failed: {exc}") from exc
        piv = self._lu.U.diagonal()
        if np.any(piv <= 0) or not np.all(np.isfinite(piv)):
            raise IndefiniteMatrixError(
                f"{int(np.sum(piv <= 0))} non-positive pivot(s): matrix is not positive definite")
        if self._lu.perm_r is not None and np.any(self._lu.perm_r != self._lu.perm_c):
            raise SolverError("row pivoting occurred in symmetric mode")

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if self._lu is None:
            return np.zeros_like(b)
        x = self._lu.solve(b)
        res = _rel_residual(self.K, x, b)
        if res > RESIDUAL_TOL:
            raise SolverError(f"relative residual {res:.2e} above {RESIDUAL_TOL:.0e}")
        return x


def solve_spd(K, b) -> np.ndarray:
    return SPDFactorization(K).solve(b)


@dataclass
class SaddleSystem:
    """``[A B^T; B 0] [x; y] = [f; g]`` with ``A`` positive semidefinite."""

    A: sp.spmatrix
    B: sp.spmatrix
    f: np.ndarray
    g: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    def matrix(self) -> sp.csc_matrix:
        return sp.bmat([[self.A, self.B.T], [self.B, None]], format="csc")

    def rhs(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.f, float), np.asarray(self.g, float)])


def inertia(K) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a small symmetric matrix
    via dense Bunch-Kaufman LDL^T."""
    K = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    _, D, _ = la.ldl(K)
    ev = np.linalg.eigvalsh(D)
    tol = 1e-12 * max(1.0, np.abs(ev).max())
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol))


def _check_rank(B, tol=1e-10):
    Bd = B.toarray()
    if Bd.shape[0] == 0:
        return
    s = la.svdvals(Bd)
    rank = int(np.sum(s > tol * max(s.max(), 1e-300)))
    if rank < Bd.shape[0]:
        _, _, piv = la.qr(Bd.T, pivoting=True, mode="economic")
        raise RankDeficiencyError(
            f"constraint block has rank {rank} < {Bd.shape[0]} rows", rows=sorted(piv[rank:]))


class SaddleFactorization:
    """Sparse LU with partial pivoting of the full symmetric indefinite matrix."""

    DENSE_DIAGNOSTICS = 3000

    def __init__(self, system: SaddleSystem, diagnostics: bool | None = None):
        self.system = system
        self.K = system.matrix()
        size = self.K.shape[0]
        if diagnostics is None:
            diagnostics = size <= self.DENSE_DIAGNOSTICS
        self.inertia = None
        if diagnostics:
            _check_rank(sp.csr_matrix(system.B))
            self.inertia = inertia(self.K)
            if self.inertia != (system.n, system.m, 0):
                raise SolverError(f"saddle matrix inertia {self.inertia} != ({system.n}, {system.m}, 0)")
        try:
            self._lu = spla.splu(self.K, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise RankDeficiencyError(f"singular saddle-point matrix: {exc}") from exc

    def solve(self, f=None, g=None):
        s = self.system
        rhs = s.rhs() if f is None else np.concatenate([f, g])
        z = self._lu.solve(rhs)
        res = _rel_residual(self.K, z, rhs)
        if not res <= RESIDUAL_TOL:
            raise SolverError(f"saddle solve relative residual {res:.2e} above {RESIDUAL_TOL:.0e}")
        return z[: s.n], z[s.n:]


def solve_saddle(system: SaddleSystem, diagnostics: bool | None = None):
    """Return ``(x, y)``; ``y`` are the constraint multipliers."""
    return SaddleFactorization(system, diagnostics).solve()
