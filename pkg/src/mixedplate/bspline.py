"""Univariate B-spline kernels: knot vectors, span search, basis derivatives
and per-span Gauss rules."""
from __future__ import annotations

import numpy as np

__all__ = [
    "open_uniform_knots",
    "num_basis",
    "find_spans",
    "basis_funs_ders",
    "collocation_matrix",
    "greville",
    "breakpoints",
    "gauss_per_span",
]


def open_uniform_knots(degree: int, n_elements: int) -> np.ndarray:
    """Open knot vector on [0, 1] with ``n_elements`` uniform spans."""
    if degree < 0 or n_elements < 1:
        raise ValueError("need degree >= 0 and at least one element")
    inner = np.linspace(0.0, 1.0, n_elements + 1)
    return np.concatenate([np.zeros(degree), inner, np.ones(degree)])


def num_basis(knots: np.ndarray, degree: int) -> int:
    return len(knots) - degree - 1


def find_spans(knots: np.ndarray, degree: int, x) -> np.ndarray:
    """Index ``s`` with ``knots[s] <= x < knots[s+1]`` (right end clamped)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = num_basis(knots, degree)
    spans = np.searchsorted(knots, x, side="right") - 1
    return np.clip(spans, degree, n - 1)


def basis_funs_ders(knots, degree, x, nder=1, spans=None):
    """Nonzero basis functions and derivatives at the points ``x``.

    Vectorized form of the classical triangular-table algorithm.

    Returns
    -------
    spans : (m,) int array
        Knot span of every point; the nonzero functions have global indices
        ``spans - degree + r`` for ``r = 0..degree``.
    ders : (m, nder + 1, degree + 1) array
        ``ders[:, k, r]`` is the k-th derivative of function ``spans - degree + r``.
    """
    U = np.asarray(knots, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = degree
    if spans is None:
        spans = find_spans(U, p, x)
    m = x.shape[0]
    ndu = np.zeros((m, p + 1, p + 1))
    ndu[:, 0, 0] = 1.0
    left = np.zeros((m, p + 1))
    right = np.zeros((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = x - U[spans + 1 - j]
        right[:, j] = U[spans + j] - x
        saved = np.zeros(m)
        for r in range(j):
            ndu[:, j, r] = right[:, r + 1] + left[:, j - r]
            temp = ndu[:, r, j - 1] / ndu[:, j, r]
            ndu[:, r, j] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        ndu[:, j, j] = saved

    ders = np.zeros((m, nder + 1, p + 1))
    ders[:, 0, :] = ndu[:, :, p]
    a = np.zeros((m, 2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[:] = 0.0
        a[:, 0, 0] = 1.0
        for k in range(1, min(nder, p) + 1):
            d = np.zeros(m)
            rk, pk = r - k, p - k
            if r >= k:
                a[:, s2, 0] = a[:, s1, 0] / ndu[:, pk + 1, rk]
                d += a[:, s2, 0] * ndu[:, rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[:, s2, j] = (a[:, s1, j] - a[:, s1, j - 1]) / ndu[:, pk + 1, rk + j]
                d += a[:, s2, j] * ndu[:, rk + j, pk]
            if r <= pk:
                a[:, s2, k] = -a[:, s1, k - 1] / ndu[:, pk + 1, r]
                d += a[:, s2, k] * ndu[:, r, pk]
            ders[:, k, r] = d
            s1, s2 = s2, s1
    fac = float(p)
    for k in range(1, min(nder, p) + 1):
        ders[:, k, :] *= fac
        fac *= p - k
    return spans, ders


def collocation_matrix(knots, degree, x, nder=0) -> np.ndarray:
    """Dense matrix ``A[i, j] = B_j^{(nder)}(x_i)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    spans, ders = basis_funs_ders(knots, degree, x, nder)
    A = np.zeros((x.shape[0], num_basis(knots, degree)))
    rows = np.arange(x.shape[0])[:, None]
    cols = spans[:, None] - degree + np.arange(degree + 1)[None, :]
    A[rows, cols] = ders[:, nder, :]
    return A


def greville(knots, degree) -> np.ndarray:
    U = np.asarray(knots, dtype=float)
    n = num_basis(U, degree)
    if degree == 0:
        return 0.5 * (U[:-1] + U[1:])
    return np.array([U[i + 1 : i + degree + 1].mean() for i in range(n)])


def breakpoints(knots) -> np.ndarray:
    return np.unique(np.asarray(knots, dtype=float))


def gauss_per_span(knots, nq: int):
    """Gauss-Legendre points and weights on every nonempty knot span.

    Returns arrays of shape ``(n_spans, nq)``.
    """
    br = breakpoints(knots)
    x, w = np.polynomial.legendre.leggauss(nq)
    a, b = br[:-1, None], br[1:, None]
    pts = a + 0.5 * (b - a) * (x[None, :] + 1.0)
    wts = 0.5 * (b - a) * w[None, :]
    return pts, wts
