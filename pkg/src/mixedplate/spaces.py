"""Discrete spline spaces on a geometry patch.

A :class:`SplineSpace` is the tensor-product space of maximally smooth
B-splines of degree ``p`` on ``2**level`` uniform spans per direction, pushed
forward through the geometry map. On a rational geometry the space can
optionally carry the geometry weights (isoparametric NURBS). Global dof ``i + nu * j`` belongs to basis function ``i`` in the
first and ``j`` in the second parameter direction.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bspline import basis_funs_ders, collocation_matrix, gauss_per_span, greville, open_uniform_knots
from .geometry import BC, GeometryError, GeometryPatch

__all__ = [
    "SplineSpace",
    "ConstrainedSpace",
    "TraceSpace",
    "CellData",
    "EdgeData",
    "build_space",
    "eval_basis",
    "edge_trace_space",
    "edge_tangential_derivative",
]


@dataclass(frozen=True)
class CellData:
    """Basis data at the quadrature points of every cell.

    Shapes: ``dofs (ncell, nloc)``, ``values (ncell, nqp, nloc)``,
    ``grads (ncell, nqp, nloc, 2)``, ``points (ncell, nqp, 2)``,
    ``weights (ncell, nqp)`` (Gauss weight times ``|det J|``).
    """

    dofs: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    params: np.ndarray

    def field(self, coeffs):
        """Values and physical gradients of the spline with the given coefficients."""
        c = np.asarray(coeffs)[self.dofs]
        return (np.einsum("cql,cl->cq", self.values, c),
                np.einsum("cqld,cl->cqd", self.grads, c))


@dataclass(frozen=True)
class EdgeData:
    """Trace basis data at the Gauss points of one boundary edge.

    ``dofs`` are trace-space indices; ``values`` and ``dds`` hold the trace
    basis and its derivative with respect to arc length in the ccw direction.
    """

    dofs: np.ndarray  # (m, p+1)
    values: np.ndarray  # (m, p+1)
    dds: np.ndarray  # (m, p+1)
    points: np.ndarray  # (m, 2)
    normal: np.ndarray
    tangent: np.ndarray
    weights: np.ndarray  # Gauss weight * arc-length jacobian
    s: np.ndarray


def _rational(N, dN, w):
    """Rational basis from polynomial values ``N (..., n)`` and derivatives
    ``dN (..., n, d)`` with local weights ``w (..., n)``."""
    Nw = N * w
    W = Nw.sum(-1)
    dW = np.einsum("...n,...nd->...d", w, dN)
    R = Nw / W[..., None]
    dR = (dN * w[..., None] - R[..., None] * dW[..., None, :]) / W[..., None, None]
    return R, dR


class SplineSpace:
    """Scalar discretization space of degree ``degree`` at refinement ``level``.

    With ``rational=True`` the basis functions are ``N_i w_i / W`` where ``W``
    is the weight function of the geometry; this requires ``degree`` to be at
    least the geometry degree.
    """

    def __init__(self, geometry: GeometryPatch, degree: int, level: int, rational: bool = False):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        if level < 0:
            raise ValueError("level must be >= 0")
        self.geometry = geometry
        self.degree = int(degree)
        self.level = int(level)
        self.n_elements = 2 ** self.level
        self.knots = open_uniform_knots(self.degree, self.n_elements)
        self.n1 = self.n_elements + self.degree
        self.shape = (self.n1, self.n1)
        self.dim = self.n1 * self.n1
        self.weights = self._discrete_weights() if rational else None
        if rational and geometry.is_rational and self.weights is None:
            raise ValueError(f"geometry weights are not representable at degree {degree}")
        self._cells = {}
        self._edges = {}
        self._traces = {}

    def __repr__(self):
        kind = "NURBS" if self.is_rational else "B-spline"
        return f"SplineSpace({self.geometry.name}, p={self.degree}, L={self.level}, {kind}, dim={self.dim})"

    @property
    def is_rational(self) -> bool:
        return self.weights is not None

    def dof(self, i, j):
        return np.asarray(i) + self.n1 * np.asarray(j)

    def _discrete_weights(self):
        """Coefficients of the geometry weight function in this space, or
        ``None`` if the geometry is polynomial or its weight function is not
        representable at this degree."""
        g = self.geometry
        if not g.is_rational:
            return None
        if any(self.degree < pg for pg in g.degree):
            return None
        x = greville(self.knots, self.degree)
        Cinv = np.linalg.inv(collocation_matrix(self.knots, self.degree, x))
        Gu = collocation_matrix(g.knots[0], g.degree[0], x)
        Gv = collocation_matrix(g.knots[1], g.degree[1], x)
        w = Cinv @ Gu @ g.weights @ Gv.T @ Cinv.T
        # representability check away from the interpolation nodes
        t = np.linspace(0.0, 1.0, 17)
        A = collocation_matrix(self.knots, self.degree, t)
        exact = collocation_matrix(g.knots[0], g.degree[0], t) @ g.weights @ collocation_matrix(g.knots[1], g.degree[1], t).T
        if np.abs(A @ w @ A.T - exact).max() > 1e-12:
            return None
        return w

    # -- pointwise evaluation -------------------------------------------------
    def _param_basis(self, u, v):
        """Local dofs, values and parametric derivatives at arbitrary points."""
        p, n1 = self.degree, self.n1
        su, Bu = basis_funs_ders(self.knots, p, u, 1)
        sv, Bv = basis_funs_ders(self.knots, p, v, 1)
        r = np.arange(p + 1)
        iu = su[:, None] - p + r
        iv = sv[:, None] - p + r
        dofs = (iu[:, None, :] + n1 * iv[:, :, None]).reshape(len(u), -1)
        N = (Bv[:, 0, :, None] * Bu[:, 0, None, :]).reshape(len(u), -1)
        Nu = (Bv[:, 0, :, None] * Bu[:, 1, None, :]).reshape(len(u), -1)
        Nv = (Bv[:, 1, :, None] * Bu[:, 0, None, :]).reshape(len(u), -1)
        dN = np.stack([Nu, Nv], axis=-1)
        if self.is_rational:
            w = self.weights.T.ravel()[dofs]
            N, dN = _rational(N, dN, w)
        return dofs, N, dN

    def evaluate(self, u, v):
        """Nonzero basis functions at parameter points.

        Returns ``dofs (m, nloc)``, ``values (m, nloc)``, physical gradients
        ``grads (m, nloc, 2)`` and physical points ``x (m, 2)``.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
        v = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
        if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
            raise ValueError("parameter point outside the unit square")
        dofs, N, dN = self._param_basis(u, v)
        x, J = self.geometry.evaluate(u, v)
        det = np.linalg.det(J)
        if np.any(np.abs(det) < 1e-13):
            raise GeometryError("singular geometry Jacobian at evaluation point")
        invJ = np.linalg.inv(J)
        grads = np.einsum("mnd,mdk->mnk", dN, invJ)
        return dofs, N, grads, x

    def cell_quadrature(self, nq: int | None = None) -> CellData:
        """Tensor Gauss rule with ``nq`` points per span and direction
        (default ``degree + 1``)."""
        nq = self.degree + 1 if nq is None else int(nq)
        if nq not in self._cells:
            self._cells[nq] = self._build_cells(nq)
        return self._cells[nq]

    def _build_cells(self, nq: int) -> CellData:
        p, ne, n1 = self.degree, self.n_elements, self.n1
        pts, wts = gauss_per_span(self.knots, nq)  # (ne, nq)
        spans = np.repeat(np.arange(ne) + p, nq)
        _, B = basis_funs_ders(self.knots, p, pts.ravel(), 1, spans=spans)
        B = B.reshape(ne, nq, 2, p + 1)
        # index order: [ev, eu, qv, qu, b, a]
        N = np.einsum("uqa,vrb->vurqba", B[:, :, 0], B[:, :, 0])
        Nu = np.einsum("uqa,vrb->vurqba", B[:, :, 1], B[:, :, 0])
        Nv = np.einsum("uqa,vrb->vurqba", B[:, :, 0], B[:, :, 1])
        ncell, nqp, nloc = ne * ne, nq * nq, (p + 1) ** 2
        N = N.reshape(ncell, nqp, nloc)
        dN = np.stack([Nu.reshape(ncell, nqp, nloc), Nv.reshape(ncell, nqp, nloc)], axis=-1)
        r = np.arange(p + 1)
        e = np.arange(ne)
        iu = e[:, None] + r[None, :]  # (ne, p+1)
        dofs = (iu[None, :, None, :] + n1 * iu[:, None, :, None]).reshape(ncell, nloc)
        if self.is_rational:
            w = self.weights.T.ravel()[dofs][:, None, :]
            N, dN = _rational(N, dN, np.broadcast_to(w, N.shape))
        U = np.broadcast_to(pts[None, :, None, :], (ne, ne, nq, nq)).reshape(ncell, nqp)
        V = np.broadcast_to(pts[:, None, :, None], (ne, ne, nq, nq)).reshape(ncell, nqp)
        x, J = self.geometry.evaluate(U, V)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.any(det <= 0):
            raise GeometryError("non-positive geometry Jacobian at a quadrature point")
        invJ = np.empty_like(J)
        invJ[..., 0, 0] = J[..., 1, 1] / det
        invJ[..., 1, 1] = J[..., 0, 0] / det
        invJ[..., 0, 1] = -J[..., 0, 1] / det
        invJ[..., 1, 0] = -J[..., 1, 0] / det
        grads = np.einsum("cqnd,cqdk->cqnk", dN, invJ)
        W2 = (wts[None, :, None, :] * wts[:, None, :, None]).reshape(ncell, nqp)
        return CellData(dofs, N, grads, x, W2 * det, np.stack([U, V], axis=-1))

    # -- boundary ---------------------------------------------------------------
    def trace_space(self, edge) -> "TraceSpace":
        if edge.index not in self._traces:
            self._traces[edge.index] = TraceSpace(self, edge)
        return self._traces[edge.index]

    def edge_quadrature(self, edge, nq: int | None = None) -> EdgeData:
        nq = self.degree + 1 if nq is None else int(nq)
        key = (edge.index, nq)
        if key not in self._edges:
            self._edges[key] = self.trace_space(edge).quadrature(nq)
        return self._edges[key]

    def boundary_dofs(self, bcs) -> np.ndarray:
        """Global dofs whose trace is nonzero on an edge with a tag in ``bcs``."""
        bcs = {BC.parse(b) for b in bcs}
        out = [self.trace_space(e).global_dofs for e in self.geometry.edges if e.bc in bcs]
        return np.unique(np.concatenate(out)) if out else np.zeros(0, dtype=int)

    # -- interpolation ------------------------------------------------------------
    def interpolate(self, f) -> np.ndarray:
        """Coefficients of the spline interpolating ``f(x, y)`` at the mapped
        Greville points."""
        g = greville(self.knots, self.degree)
        U, V = np.meshgrid(g, g, indexing="ij")
        x = self.geometry(U, V)
        F = np.asarray(f(x[..., 0], x[..., 1]), dtype=float) * np.ones(U.shape)
        C = collocation_matrix(self.knots, self.degree, g)
        if self.is_rational:
            Wg = C @ self.weights @ C.T
            F = F * Wg
        c = np.linalg.solve(C, np.linalg.solve(C, F).T).T  # c[i, j]
        if self.is_rational:
            c = c / self.weights
        return c.T.ravel()

    def evaluate_field(self, coeffs, u, v):
        """Value and physical gradient of a spline field at parameter points."""
        dofs, N, G, _ = self.evaluate(u, v)
        c = np.asarray(coeffs)[dofs]
        return (N * c).sum(-1), np.einsum("mnk,mn->mk", G, c)


class TraceSpace:
    """Restriction of a :class:`SplineSpace` to one boundary edge.

    Trace dof ``a`` is ordered along the ccw edge parameter; it is the trace of
    global dof ``global_dofs[a]``. With open knot vectors the first and last
    trace dofs interpolate the start and end vertex.
    """

    def __init__(self, space: SplineSpace, edge):
        self.space = space
        self.edge = edge
        self.degree = space.degree
        self.knots = space.knots
        n1 = space.n1
        a = np.arange(n1)
        side_idx = a[::-1] if edge.reversed else a
        if edge.side == "south":
            i, j = side_idx, np.zeros(n1, int)
        elif edge.side == "north":
            i, j = side_idx, np.full(n1, n1 - 1)
        elif edge.side == "west":
            i, j = np.zeros(n1, int), side_idx
        else:
            i, j = np.full(n1, n1 - 1), side_idx
        self.global_dofs = space.dof(i, j)
        self.weights = None if space.weights is None else space.weights[i, j]
        self.dim = n1

    @property
    def endpoint_dofs(self) -> tuple[int, int]:
        return 0, self.dim - 1

    def evaluate(self, s):
        """Trace dofs, values and derivatives with respect to ``s``."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        p = self.degree
        spans, B = basis_funs_ders(self.knots, p, s, 1)
        dofs = spans[:, None] - p + np.arange(p + 1)
        N, dN = B[:, 0], B[:, 1]
        if self.weights is not None:
            R, dR = _rational(N, dN[..., None], self.weights[dofs])
            N, dN = R, dR[..., 0]
        return dofs, N, dN

    def quadrature(self, nq: int) -> EdgeData:
        pts, wts = gauss_per_span(self.knots, nq)
        s, w = pts.ravel(), wts.ravel()
        dofs, N, dN = self.evaluate(s)
        fr = self.edge.frame(s)
        return EdgeData(dofs, N, dN / fr.jac[:, None], fr.point, fr.normal, fr.tangent, w * fr.jac, s)

    def integrals(self, nq: int | None = None) -> np.ndarray:
        """``int_E rho_a ds`` for every trace basis function."""
        d = self.quadrature(self.degree + 1 if nq is None else nq)
        out = np.zeros(self.dim)
        np.add.at(out, d.dofs, d.values * d.weights[:, None])
        return out

    def interpolate(self, g) -> np.ndarray:
        """Coefficients interpolating ``g(s)`` at the Greville points."""
        x = greville(self.knots, self.degree)
        C = collocation_matrix(self.knots, self.degree, x)
        y = np.asarray(g(x), dtype=float) * np.ones_like(x)
        if self.weights is None:
            return np.linalg.solve(C, y)
        W = C @ self.weights
        return np.linalg.solve(C, y * W) / self.weights

    def eval_coeffs(self, coeffs, s):
        dofs, N, _ = self.evaluate(s)
        return (N * np.asarray(coeffs)[dofs]).sum(-1)


class ConstrainedSpace:
    """Subspace of functions vanishing on the clamped and simply supported edges."""

    def __init__(self, space: SplineSpace, bcs=(BC.CLAMPED, BC.SIMPLY_SUPPORTED)):
        self.space = space
        self.constrained = space.boundary_dofs(bcs)
        mask = np.ones(space.dim, dtype=bool)
        mask[self.constrained] = False
        self.free = np.flatnonzero(mask)
        self.dim = self.free.size
        self._index = np.full(space.dim, -1)
        self._index[self.free] = np.arange(self.dim)

    def extend(self, x_free) -> np.ndarray:
        """Global coefficient vector with zeros on the constrained dofs."""
        x = np.zeros(self.space.dim)
        x[self.free] = x_free
        return x

    def restrict(self, x) -> np.ndarray:
        return np.asarray(x)[self.free]

    def free_index(self, dofs):
        return self._index[dofs]


def build_space(geometry: GeometryPatch, p: int, L: int, rational: bool = False) -> SplineSpace:
    return SplineSpace(geometry, p, L, rational)


def eval_basis(space: SplineSpace, point):
    """List of ``(dof, value, physical gradient)`` at one parameter point."""
    u, v = point
    dofs, N, G, _ = space.evaluate([u], [v])
    return [(int(d), float(n), g.copy()) for d, n, g in zip(dofs[0], N[0], G[0])]


def edge_trace_space(space: SplineSpace, edge) -> TraceSpace:
    return space.trace_space(edge)


def edge_tangential_derivative(space: SplineSpace, edge, dof: int, s) -> np.ndarray:
    """Derivative per unit arc length (ccw) of the trace of global ``dof`` on ``edge``."""
    tr = space.trace_space(edge)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    hit = np.flatnonzero(tr.global_dofs == dof)
    if hit.size == 0:
        return np.zeros_like(s)
    a = hit[0]
    dofs, _, dN = tr.evaluate(s)
    jac = edge.frame(s).jac
    return np.where(dofs == a, dN, 0.0).sum(-1) / jac
