"""Isotropic plate material law and the pointwise matrix operators built on it.

All functions accept stacks of 2x2 matrices (shape ``(..., 2, 2)``) so that the
assembly routines can apply them at every quadrature point in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["IsotropicMaterial", "apply_C", "apply_C_inverse", "sym_curl", "curl"]

_I = np.eye(2)


def _trace(A: np.ndarray) -> np.ndarray:
    return A[..., 0, 0] + A[..., 1, 1]


@dataclass(frozen=True)
class IsotropicMaterial:
    """Isotropic bending law ``C N = D((1 - nu) N + nu tr(N) I)``.

    Parameters
    ----------
    D : float
        Bending stiffness, must be positive.
    nu : float
        Poisson ratio, ``-1 < nu < 1`` so that the law is invertible.
    """

    D: float = 1.0
    nu: float = 0.0

    def __post_init__(self):
        if not self.D > 0:
            raise ValueError(f"bending stiffness must be positive, got D={self.D}")
        if not -1.0 < self.nu < 1.0:
            raise ValueError(f"Poisson ratio must lie in (-1, 1), got nu={self.nu}")

    def apply(self, N):
        N = np.asarray(N, dtype=float)
        tr = _trace(N)[..., None, None]
        return self.D * ((1.0 - self.nu) * N + self.nu * tr * _I)

    def apply_inverse(self, M):
        M = np.asarray(M, dtype=float)
        tr = _trace(M)[..., None, None]
        return (M - (self.nu / (1.0 + self.nu)) * tr * _I) / (self.D * (1.0 - self.nu))

    @property
    def identity_inverse_factor(self) -> float:
        """Scalar ``c`` with ``C^{-1}(q I) = c q I``."""
        return 1.0 / (self.D * (1.0 + self.nu))


def apply_C(mat: IsotropicMaterial, N) -> np.ndarray:
    return mat.apply(N)


def apply_C_inverse(mat: IsotropicMaterial, M) -> np.ndarray:
    return mat.apply_inverse(M)


def curl(grad_psi) -> np.ndarray:
    """Row-wise rotated gradient of a vector field.

    ``grad_psi[..., i, j]`` holds ``d psi_i / d x_j``; row ``i`` of the result is
    ``(d psi_i/d x_2, -d psi_i/d x_1)``.
    """
    g = np.asarray(grad_psi, dtype=float)
    out = np.empty_like(g)
    out[..., 0] = g[..., 1]
    out[..., 1] = -g[..., 0]
    return out


def sym_curl(grad_psi) -> np.ndarray:
    """Symmetric part of :func:`curl`. The off-diagonal entries are bitwise equal."""
    C = curl(grad_psi)
    out = C.copy()
    off = 0.5 * (C[..., 0, 1] + C[..., 1, 0])
    out[..., 0, 1] = off
    out[..., 1, 0] = off
    return out
