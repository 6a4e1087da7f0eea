"""Discrete multiplier space for the boundary coupling condition.

A raw multiplier is a pair of trace splines ``(mu_t^k, mu_n^k)`` on every
boundary edge. The admissible subspace is cut out by three families of linear
constraints on the raw coefficients:

* ``bc_zero``: ``mu_t = 0`` on clamped and simply supported edges and
  ``mu_n = 0`` on clamped edges;
* ``compatibility``: the integral of ``mu_t`` over every connected component
  of the free boundary vanishes;
* ``corner``: the one-sided values at each vertex describe one gradient
  vector. For an interior angle ``omega != pi`` these are the two relations
  ``mu_t^{k-1} + cos(omega) mu_t^k - sin(omega) mu_n^k = 0`` and
  ``cos(omega) mu_t^{k-1} + sin(omega) mu_n^{k-1} + mu_t^k = 0``; at a smooth
  junction of two edges with the same tag both components are continuous.

The admissible space is represented by a basis of the constraint nullspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import BC, CornerData, corner_angles
from .spaces import SplineSpace

__all__ = [
    "UnsupportedCornerError",
    "MultiplierLayout",
    "MultiplierPrototype",
    "ConstraintMatrix",
    "MultiplierBasis",
    "Violation",
    "AdmissibilityReport",
    "MultiplierSpace",
    "bc_zero_constraints",
    "compatibility_constraints",
    "corner_constraints",
    "free_components",
    "build_constraints",
    "nullspace_basis",
    "is_admissible",
]


class UnsupportedCornerError(NotImplementedError):
    """Boundary-condition change at a smooth (angle pi) junction."""


class MultiplierLayout:
    """Bookkeeping of raw multiplier dofs: per edge ``[mu_t | mu_n]``."""

    def __init__(self, edges, trace_dims):
        self.edges = list(edges)
        self.dims = [int(n) for n in trace_dims]
        self.offsets = np.concatenate([[0], np.cumsum([2 * n for n in self.dims])])
        self.size = int(self.offsets[-1])

    @classmethod
    def from_space(cls, space: SplineSpace) -> "MultiplierLayout":
        edges = space.geometry.edges
        return cls(edges, [space.trace_space(e).dim for e in edges])

    @property
    def K(self) -> int:
        return len(self.edges)

    def _pos(self, k):
        return (k - 1) % self.K

    def t_slice(self, k: int) -> slice:
        i = self._pos(k)
        return slice(self.offsets[i], self.offsets[i] + self.dims[i])

    def n_slice(self, k: int) -> slice:
        i = self._pos(k)
        return slice(self.offsets[i] + self.dims[i], self.offsets[i + 1])

    def t_index(self, k: int, a: int) -> int:
        s = self.t_slice(k)
        return s.start + (a % (s.stop - s.start))

    def n_index(self, k: int, a: int) -> int:
        s = self.n_slice(k)
        return s.start + (a % (s.stop - s.start))

    def edge(self, k: int):
        return self.edges[self._pos(k)]

    def describe(self, j: int) -> str:
        i = int(np.searchsorted(self.offsets, j, side="right") - 1)
        r = j - self.offsets[i]
        comp, a = ("t", r) if r < self.dims[i] else ("n", r - self.dims[i])
        return f"mu_{comp}^{self.edges[i].index}[{a}]"


@dataclass
class MultiplierPrototype:
    """Per-edge coefficient vectors ``mu_t[k-1]``, ``mu_n[k-1]``."""

    mu_t: list
    mu_n: list

    def pack(self, layout: MultiplierLayout) -> np.ndarray:
        x = np.zeros(layout.size)
        for e, t, n in zip(layout.edges, self.mu_t, self.mu_n):
            x[layout.t_slice(e.index)] = t
            x[layout.n_slice(e.index)] = n
        return x

    @classmethod
    def unpack(cls, layout: MultiplierLayout, x) -> "MultiplierPrototype":
        x = np.asarray(x, dtype=float)
        return cls([x[layout.t_slice(e.index)].copy() for e in layout.edges],
                   [x[layout.n_slice(e.index)].copy() for e in layout.edges])


@dataclass
class ConstraintMatrix:
    """Sparse constraint rows over raw multiplier dofs, each tagged with its
    kind (``bc_zero``, ``compatibility``, ``corner``) and a location label."""

    matrix: sp.csr_matrix
    kinds: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True)
class MultiplierBasis:
    """Columns spanning the nullspace of the constraint matrix."""

    Z: sp.csc_matrix
    rank: int

    @property
    def dim(self) -> int:
        return self.Z.shape[1]


@dataclass(frozen=True)
class Violation:
    kind: str
    label: str
    residual: float

    def __str__(self):
        return f"{self.kind:<13} {self.label:<28} residual={self.residual:.3e}"


@dataclass
class AdmissibilityReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "admissible"
        return "inadmissible:\n" + "\n".join(f"  {v}" for v in self.violations)


_Row = tuple  # (dict col -> value, kind, label)


def bc_zero_constraints(layout: MultiplierLayout) -> list:
    rows = []
    for e in layout.edges:
        if e.bc in (BC.CLAMPED, BC.SIMPLY_SUPPORTED):
            for j in range(layout.t_slice(e.index).start, layout.t_slice(e.index).stop):
                rows.append(({j: 1.0}, "bc_zero", f"edge {e.index} mu_t"))
        if e.bc is BC.CLAMPED:
            for j in range(layout.n_slice(e.index).start, layout.n_slice(e.index).stop):
                rows.append(({j: 1.0}, "bc_zero", f"edge {e.index} mu_n"))
    return rows


def free_components(edges) -> list:
    """Connected components of the free boundary as lists of edge indices."""
    K = len(edges)
    free = [e.bc is BC.FREE for e in edges]
    if all(free):
        return [[e.index for e in edges]]
    start = free.index(False)
    comps, cur = [], []
    for step in range(1, K + 1):
        i = (start + step) % K
        if free[i]:
            cur.append(edges[i].index)
        elif cur:
            comps.append(cur)
            cur = []
    if cur:
        comps.append(cur)
    return comps


def compatibility_constraints(layout: MultiplierLayout, edge_integrals: dict) -> list:
    """One row per free component: sum of ``int mu_t ds`` over its edges.

    ``edge_integrals[k]`` holds the integrals of the trace basis of edge k.
    """
    rows = []
    for comp in free_components(layout.edges):
        row = {}
        for k in comp:
            sl = layout.t_slice(k)
            for a, val in enumerate(edge_integrals[k]):
                row[sl.start + a] = float(val)
        rows.append((row, "compatibility", "free edges " + ",".join(map(str, comp))))
    return rows


def corner_constraints(layout: MultiplierLayout, corners, zeroed=None) -> list:
    """Two rows per corner coupling the one-sided vertex values.

    Corners whose four vertex dofs are all already zeroed by ``zeroed`` are
    skipped, since their rows carry no information.
    """
    zeroed = set() if zeroed is None else set(zeroed)
    rows = []
    for c in corners:
        km, k = c.prev_edge, c.next_edge
        t_prev, n_prev = layout.t_index(km, -1), layout.n_index(km, -1)
        t_next, n_next = layout.t_index(k, 0), layout.n_index(k, 0)
        if {t_prev, n_prev, t_next, n_next} <= zeroed:
            continue
        label = f"corner {c.index}"
        if c.smooth:
            if layout.edge(km).bc is not layout.edge(k).bc:
                raise UnsupportedCornerError(
                    f"{label}: boundary condition changes at a smooth junction "
                    f"({layout.edge(km).bc.value} -> {layout.edge(k).bc.value})")
            rows.append(({t_prev: 1.0, t_next: -1.0}, "corner", label))
            rows.append(({n_prev: 1.0, n_next: -1.0}, "corner", label))
            continue
        cw, sw = np.cos(c.omega), np.sin(c.omega)
        r1 = {t_prev: 1.0}
        r1[t_next] = r1.get(t_next, 0.0) + cw
        r1[n_next] = r1.get(n_next, 0.0) - sw
        r2 = {t_prev: cw}
        r2[n_prev] = r2.get(n_prev, 0.0) + sw
        r2[t_next] = r2.get(t_next, 0.0) + 1.0
        rows.append((r1, "corner", label))
        rows.append((r2, "corner", label))
    return rows


def _to_matrix(rows, n_cols) -> ConstraintMatrix:
    data, ri, ci = [], [], []
    for i, (row, _, _) in enumerate(rows):
        for j, v in row.items():
            ri.append(i)
            ci.append(j)
            data.append(v)
    M = sp.csr_matrix((data, (ri, ci)), shape=(len(rows), n_cols))
    return ConstraintMatrix(M, [r[1] for r in rows], [r[2] for r in rows])


def build_constraints(space: SplineSpace, layout: MultiplierLayout | None = None,
                      corners=None) -> ConstraintMatrix:
    layout = MultiplierLayout.from_space(space) if layout is None else layout
    corners = corner_angles(space.geometry) if corners is None else corners
    bc_rows = bc_zero_constraints(layout)
    integrals = {e.index: space.trace_space(e).integrals() for e in layout.edges}
    rows = bc_rows + compatibility_constraints(layout, integrals)
    zeroed = {next(iter(r[0])) for r in bc_rows}
    rows += corner_constraints(layout, corners, zeroed)
    return _to_matrix(rows, layout.size)


def _rref(A: np.ndarray, tol: float):
    """Reduced row echelon form with partial pivoting; returns (R, pivot columns)."""
    R = np.array(A, dtype=float)
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        i = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[i, c]) <= tol:
            R[r:, c] = 0.0
            continue
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] /= R[r, c]
        f = R[:, c].copy()
        f[r] = 0.0
        nz = np.flatnonzero(f)
        if nz.size:
            R[nz] -= np.outer(f[nz], R[r])
        pivots.append(c)
        r += 1
    return R[:r], pivots


def nullspace_basis(constraints, tol: float = 1e-10) -> MultiplierBasis:
    """Sparse nullspace basis by elimination, one column per free raw dof in
    increasing dof order (the free dof carries coefficient 1)."""
    if isinstance(constraints, ConstraintMatrix):
        C = constraints.matrix
    else:
        C = sp.csr_matrix(np.atleast_2d(np.asarray(constraints, dtype=float)))
    C = sp.csr_matrix(C)
    m, n = C.shape
    if m == 0:
        return MultiplierBasis(sp.identity(n, format="csc"), 0)
    scale = max(abs(C).max(), 1.0)
    nnz = np.diff(C.indptr)
    unit = nnz == 1
    zero_cols = np.unique(C.indices[C.indptr[:-1][unit]])
    keep = np.ones(n, dtype=bool)
    keep[zero_cols] = False
    cols = np.flatnonzero(keep)
    rest = C[np.flatnonzero(~unit & (nnz > 0))][:, cols].toarray()
    if rest.shape[0]:
        R, piv = _rref(rest, tol * scale)
    else:
        R, piv = np.zeros((0, cols.size)), []
    rank = zero_cols.size + len(piv)
    free = np.setdiff1d(np.arange(cols.size), piv)
    rows_i, cols_i, vals = [], [], []
    for jcol, f in enumerate(free):
        rows_i.append(cols[f])
        cols_i.append(jcol)
        vals.append(1.0)
        for r, pc in enumerate(piv):
            v = -R[r, f]
            if v != 0.0:
                rows_i.append(cols[pc])
                cols_i.append(jcol)
                vals.append(v)
    Z = sp.csc_matrix((vals, (rows_i, cols_i)), shape=(n, free.size))
    return MultiplierBasis(Z, rank)


def is_admissible(prototype, constraints: ConstraintMatrix, layout: MultiplierLayout | None = None,
                  tol: float = 1e-10) -> AdmissibilityReport:
    """Check the three constraint families on a raw multiplier."""
    x = prototype.pack(layout) if isinstance(prototype, MultiplierPrototype) else np.asarray(prototype, float)
    res = constraints.matrix @ x
    bad = [Violation(constraints.kinds[i], constraints.labels[i], float(res[i]))
           for i in np.flatnonzero(np.abs(res) > tol)]
    return AdmissibilityReport(not bad, bad)


class MultiplierSpace:
    """Admissible discrete multipliers of a spline space."""

    def __init__(self, space: SplineSpace, tol: float = 1e-10):
        self.space = space
        self.layout = MultiplierLayout.from_space(space)
        self.corners = corner_angles(space.geometry)
        self.constraints = build_constraints(space, self.layout, self.corners)
        self.basis = nullspace_basis(self.constraints, tol)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def raw_size(self) -> int:
        return self.layout.size

    def to_raw(self, coeffs) -> np.ndarray:
        return self.basis.Z @ np.asarray(coeffs, dtype=float)

    def prototype(self, coeffs) -> MultiplierPrototype:
        return MultiplierPrototype.unpack(self.layout, self.to_raw(coeffs))

    def is_admissible(self, prototype, tol: float = 1e-10) -> AdmissibilityReport:
        return is_admissible(prototype, self.constraints, self.layout, tol)

    def sample(self, grad_v) -> MultiplierPrototype:
        """Interpolate the traces ``(dv/dt, dv/dn)`` of a function given by its
        physical gradient ``grad_v(x, y) -> (..., 2)``."""
        mu_t, mu_n = [], []
        for e in self.layout.edges:
            tr = self.space.trace_space(e)

            def comp(s, which, e=e):
                fr = e.frame(s)
                g = np.asarray(grad_v(fr.point[:, 0], fr.point[:, 1]))
                vec = fr.tangent if which == "t" else fr.normal
                return (g * vec).sum(-1)

            mu_t.append(tr.interpolate(lambda s: comp(s, "t")))
            mu_n.append(tr.interpolate(lambda s: comp(s, "n")))
        return MultiplierPrototype(mu_t, mu_n)
