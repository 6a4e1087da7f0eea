"""Single-patch NURBS geometry, boundary edges and corner data."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .bspline import basis_funs_ders, num_basis

__all__ = [
    "BC",
    "GeometryError",
    "GeometryPatch",
    "BoundaryEdge",
    "StraightEdge",
    "EdgeFrame",
    "CornerData",
    "SIDES",
    "unit_square_patch",
    "unit_disk_patch",
    "polygon_edges",
    "corner_angles",
    "SMOOTH_ANGLE_TOL",
]

SMOOTH_ANGLE_TOL = 1e-8

# Patch sides in counterclockwise order for a positively oriented map.
SIDES = ("south", "east", "north", "west")

# side -> (fixed coordinate index, fixed value, reversed w.r.t. ccw traversal)
_SIDE_INFO = {
    "south": (1, 0.0, False),
    "east": (0, 1.0, False),
    "north": (1, 1.0, True),
    "west": (0, 0.0, True),
}


class GeometryError(ValueError):
    """Degenerate or invalid geometry."""


class BC(str, Enum):
    CLAMPED = "clamped"
    SIMPLY_SUPPORTED = "simply_supported"
    FREE = "free"

    @classmethod
    def parse(cls, value) -> "BC":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"c": "clamped", "s": "simply_supported", "ss": "simply_supported", "f": "free"}
        return cls(aliases.get(key, key))


class EdgeFrame(NamedTuple):
    point: np.ndarray  # (m, 2)
    normal: np.ndarray  # (m, 2) unit outer normal
    tangent: np.ndarray  # (m, 2) unit ccw tangent
    jac: np.ndarray  # (m,) arc length per unit edge parameter


@dataclass(eq=False)
class GeometryPatch:
    """Tensor-product NURBS map from the unit square onto the plate domain.

    ``control_points[i, j]`` belongs to basis function ``i`` in the first
    parameter direction and ``j`` in the second. ``bcs`` lists the boundary
    condition of the south, east, north and west patch sides.
    """

    degree: tuple[int, int]
    knots: tuple[np.ndarray, np.ndarray]
    control_points: np.ndarray
    weights: np.ndarray
    bcs: tuple[BC, BC, BC, BC] = (BC.CLAMPED,) * 4
    name: str = "patch"
    degenerate_points: tuple[tuple[float, float], ...] = ()
    edges: list["BoundaryEdge"] = field(init=False, repr=False)

    def __post_init__(self):
        self.degree = tuple(int(p) for p in self.degree)
        self.knots = tuple(np.asarray(k, dtype=float) for k in self.knots)
        self.control_points = np.asarray(self.control_points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.bcs = tuple(BC.parse(b) for b in self.bcs)
        shape = tuple(num_basis(k, p) for k, p in zip(self.knots, self.degree))
        if self.control_points.shape != shape + (2,):
            raise GeometryError(f"control net shape {self.control_points.shape} != {shape + (2,)}")
        if self.weights.shape != shape:
            raise GeometryError(f"weight array shape {self.weights.shape} != {shape}")
        if np.any(self.weights <= 0):
            raise GeometryError("NURBS weights must be positive")
        if len(self.bcs) != 4:
            raise GeometryError("need one boundary condition per patch side")
        self._validate_jacobian()
        self.edges = [BoundaryEdge(k + 1, side, bc, self) for k, (side, bc) in enumerate(zip(SIDES, self.bcs))]

    @property
    def is_rational(self) -> bool:
        return not np.allclose(self.weights, self.weights.flat[0], rtol=0, atol=1e-14)

    def with_bcs(self, bcs: Sequence) -> "GeometryPatch":
        return GeometryPatch(self.degree, self.knots, self.control_points, self.weights,
                             tuple(bcs), self.name, self.degenerate_points)

    def evaluate(self, u, v):
        """Physical points and Jacobians ``J[..., a, b] = d x_a / d xi_b``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        shape = u.shape
        uf, vf = u.ravel(), v.ravel()
        (pu, pv) = self.degree
        su, Bu = basis_funs_ders(self.knots[0], pu, uf, 1)
        sv, Bv = basis_funs_ders(self.knots[1], pv, vf, 1)
        iu = su[:, None] - pu + np.arange(pu + 1)
        iv = sv[:, None] - pv + np.arange(pv + 1)
        w = self.weights[iu[:, :, None], iv[:, None, :]]  # (m, pu+1, pv+1)
        P = self.control_points[iu[:, :, None], iv[:, None, :]]  # (m, pu+1, pv+1, 2)
        N = Bu[:, 0, :, None] * Bv[:, 0, None, :]
        Nu = Bu[:, 1, :, None] * Bv[:, 0, None, :]
        Nv = Bu[:, 0, :, None] * Bv[:, 1, None, :]
        W = np.einsum("mab,mab->m", N, w)
        Wu = np.einsum("mab,mab->m", Nu, w)
        Wv = np.einsum("mab,mab->m", Nv, w)
        A = np.einsum("mab,mab,mabc->mc", N, w, P)
        Au = np.einsum("mab,mab,mabc->mc", Nu, w, P)
        Av = np.einsum("mab,mab,mabc->mc", Nv, w, P)
        x = A / W[:, None]
        J = np.empty((uf.size, 2, 2))
        J[:, :, 0] = (Au - x * Wu[:, None]) / W[:, None]
        J[:, :, 1] = (Av - x * Wv[:, None]) / W[:, None]
        return x.reshape(shape + (2,)), J.reshape(shape + (2, 2))

    def __call__(self, u, v):
        return self.evaluate(u, v)[0]

    def _validate_jacobian(self, n: int = 23):
        g = (np.arange(n) + 0.5) / n
        U, V = np.meshgrid(g, g, indexing="ij")
        _, J = self.evaluate(U, V)
        det = np.linalg.det(J)
        if np.any(det <= 0):
            raise GeometryError(f"{self.name}: Jacobian determinant not positive inside the patch "
                                f"(min {det.min():.3e}); the map must be positively oriented")

    def edge(self, k: int) -> "BoundaryEdge":
        """Edge with 1-based index ``k``; index 0 is identified with K."""
        K = len(self.edges)
        return self.edges[(k - 1) % K]

    def edge_frame(self, edge: "BoundaryEdge", s) -> EdgeFrame:
        return edge.frame(s)


@dataclass(frozen=True, eq=False)
class BoundaryEdge:
    """Patch side traversed counterclockwise, with edge parameter ``s`` in [0, 1].

    ``s = 0`` is the start vertex, shared with the previous edge.
    """

    index: int
    side: str
    bc: BC
    patch: GeometryPatch = field(repr=False)

    @property
    def reversed(self) -> bool:
        return _SIDE_INFO[self.side][2]

    @property
    def direction(self) -> int:
        """Parameter direction running along the edge (0 for u, 1 for v)."""
        return 1 - _SIDE_INFO[self.side][0]

    def params(self, s):
        """Patch parameters ``(u, v)`` of edge parameter ``s``."""
        s = np.asarray(s, dtype=float)
        fixed_dir, fixed_val, rev = _SIDE_INFO[self.side]
        t = 1.0 - s if rev else s
        c = np.full_like(t, fixed_val)
        return (t, c) if fixed_dir == 1 else (c, t)

    def frame(self, s) -> EdgeFrame:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        u, v = self.params(s)
        x, J = self.patch.evaluate(u, v)
        dxds = J[:, :, self.direction] * (-1.0 if self.reversed else 1.0)
        jac = np.hypot(dxds[:, 0], dxds[:, 1])
        if np.any(jac <= 1e-14 * max(1.0, np.abs(x).max())):
            raise GeometryError(f"edge {self.index}: degenerate tangent")
        t = dxds / jac[:, None]
        n = np.stack([t[:, 1], -t[:, 0]], axis=1)
        return EdgeFrame(x, n, t, jac)


@dataclass(frozen=True)
class StraightEdge:
    """Straight segment edge for polygonal fixtures."""

    index: int
    start: tuple[float, float]
    end: tuple[float, float]
    bc: BC = BC.CLAMPED

    def frame(self, s) -> EdgeFrame:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        a, b = np.asarray(self.start, float), np.asarray(self.end, float)
        d = b - a
        L = np.hypot(*d)
        x = a[None, :] + s[:, None] * d[None, :]
        t = np.broadcast_to(d / L, x.shape).copy()
        n = np.stack([t[:, 1], -t[:, 0]], axis=1)
        return EdgeFrame(x, n, t, np.full(s.shape, L))


def polygon_edges(vertices, bcs=None) -> list[StraightEdge]:
    """Straight edges of a counterclockwise polygon; edge k runs from vertex k-1 to k."""
    V = [tuple(map(float, v)) for v in vertices]
    K = len(V)
    bcs = [BC.CLAMPED] * K if bcs is None else [BC.parse(b) for b in bcs]
    return [StraightEdge(k + 1, V[k], V[(k + 1) % K], bcs[k]) for k in range(K)]


@dataclass(frozen=True)
class CornerData:
    """Vertex where edge ``prev_edge`` ends and edge ``next_edge`` starts."""

    index: int
    vertex: np.ndarray
    omega: float
    prev_edge: int
    next_edge: int

    @property
    def smooth(self) -> bool:
        return abs(self.omega - np.pi) < SMOOTH_ANGLE_TOL


def corner_angles(edges) -> list[CornerData]:
    """Interior angles from one-sided unit tangents.

    Corner ``k`` sits at the start of edge ``k`` (the end of edge ``k - 1``,
    with edge 0 meaning edge K).
    """
    if isinstance(edges, GeometryPatch):
        edges = edges.edges
    K = len(edges)
    out = []
    for k in range(K):
        prev, nxt = edges[k - 1], edges[k]
        fin = prev.frame(1.0)
        fout = nxt.frame(0.0)
        t_in, t_out = fin.tangent[0], fout.tangent[0]
        if np.linalg.norm(fin.point[0] - fout.point[0]) > 1e-10:
            raise GeometryError(f"edges {prev.index} and {nxt.index} do not share a vertex")
        turn = np.arctan2(t_in[0] * t_out[1] - t_in[1] * t_out[0], t_in @ t_out)
        out.append(CornerData(nxt.index, fout.point[0].copy(), float(np.pi - turn), prev.index, nxt.index))
    return out


def unit_square_patch(side_length: float = 2.0, center=(0.0, 0.0), bcs=(BC.CLAMPED,) * 4) -> GeometryPatch:
    """Axis-aligned square as a bilinear patch."""
    if not side_length > 0:
        raise ValueError("side_length must be positive")
    h = 0.5 * side_length
    cx, cy = center
    P = np.array([[[cx - h, cy - h], [cx - h, cy + h]],
                  [[cx + h, cy - h], [cx + h, cy + h]]])
    k = np.array([0.0, 0.0, 1.0, 1.0])
    return GeometryPatch((1, 1), (k, k), P, np.ones((2, 2)), tuple(bcs), name="square")


def unit_disk_patch(bcs=(BC.SIMPLY_SUPPORTED,) * 4, center_weight: float = 0.5) -> GeometryPatch:
    """Exact biquadratic NURBS unit disk.

    Each patch side is a rational quadratic quarter circle. The default
    weights are the tensor product of ``(1, 1/sqrt(2), 1)`` with itself; the
    center weight only changes the interior parameterization. The map is
    singular (zero Jacobian) at the four parameter corners, which are listed
    in ``degenerate_points``.
    """
    r = np.sqrt(0.5)
    s2 = np.sqrt(2.0)
    P = np.array([
        [[-r, -r], [-s2, 0.0], [-r, r]],
        [[0.0, -s2], [0.0, 0.0], [0.0, s2]],
        [[r, -r], [s2, 0.0], [r, r]],
    ])
    w = np.array([[1.0, r, 1.0], [r, center_weight, r], [1.0, r, 1.0]])
    k = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    corners = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    return GeometryPatch((2, 2), (k, k), P, w, tuple(bcs), name="disk", degenerate_points=corners)
