"""Sparse assembly of the matrices and load vectors of the three stages.

Vector splines ``(S_h)^2`` use dof ``c * n + i`` for component ``c`` of
scalar basis function ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import BC
from .material import IsotropicMaterial, sym_curl
from .multipliers import MultiplierSpace
from .spaces import CellData, ConstrainedSpace, SplineSpace

__all__ = [
    "AssembledForms",
    "assemble_poisson",
    "assemble_mass",
    "assemble_derivative_pairs",
    "assemble_symcurl_form",
    "assemble_coupling",
    "assemble_boundary_forms",
    "assemble_raw_boundary_forms",
    "assemble_rt0_rows",
    "assemble_load",
    "assemble_all",
    "symcurl_basis",
]


def _scatter(cd: CellData, local: np.ndarray, n_rows: int, n_cols: int | None = None,
             row_dofs=None, col_dofs=None) -> sp.csr_matrix:
    rd = cd.dofs if row_dofs is None else row_dofs
    cdofs = cd.dofs if col_dofs is None else col_dofs
    rows = np.broadcast_to(rd[:, :, None], local.shape)
    cols = np.broadcast_to(cdofs[:, None, :], local.shape)
    n_cols = n_rows if n_cols is None else n_cols
    A = sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(n_rows, n_cols))
    A = A.tocsr()
    A.sum_duplicates()
    return A


def _scalar_form(space: SplineSpace, a, b, coef=None, nq=None) -> sp.csr_matrix:
    """``int coef * A_i B_j`` where ``a``/``b`` pick values (None) or a gradient component."""
    cd = space.cell_quadrature(nq)
    fa = cd.values if a is None else cd.grads[..., a]
    fb = cd.values if b is None else cd.grads[..., b]
    w = cd.weights if coef is None else cd.weights * coef(cd.points[..., 0], cd.points[..., 1])
    local = np.einsum("cq,cqi,cqj->cij", w, fa, fb, optimize=True)
    return _scatter(cd, local, space.dim)


def assemble_derivative_pairs(space: SplineSpace, nq=None) -> dict:
    """``K[(a, b)][i, j] = int d_a N_i d_b N_j dx`` for a, b in {0, 1}."""
    cd = space.cell_quadrature(nq)
    out = {}
    for a in (0, 1):
        for b in (0, 1):
            if (b, a) in out:
                out[(a, b)] = out[(b, a)].T.tocsr()
                continue
            local = np.einsum("cq,cqi,cqj->cij", cd.weights, cd.grads[..., a], cd.grads[..., b], optimize=True)
            out[(a, b)] = _scatter(cd, local, space.dim)
    return out


def assemble_poisson(space, nq=None):
    """Stiffness ``int grad N_i . grad N_j``; restricted to the free dofs when
    ``space`` is a :class:`ConstrainedSpace`."""
    if isinstance(space, ConstrainedSpace):
        K = assemble_poisson(space.space, nq)
        return K[space.free][:, space.free].tocsr()
    cd = space.cell_quadrature(nq)
    local = np.einsum("cq,cqid,cqjd->cij", cd.weights, cd.grads, cd.grads, optimize=True)
    return _scatter(cd, local, space.dim)


def assemble_mass(space: SplineSpace, coef=None, nq=None) -> sp.csr_matrix:
    return _scalar_form(space, None, None, coef, nq)


def symcurl_basis(cd: CellData) -> np.ndarray:
    """symCurl of every local vector basis function: ``(ncell, nqp, 2*nloc, 2, 2)``.

    Local vector index ``c * nloc + l`` is component ``c`` of scalar function ``l``.
    """
    ncell, nqp, nloc, _ = cd.grads.shape
    G = np.zeros((ncell, nqp, 2 * nloc, 2, 2))
    G[:, :, :nloc, 0, :] = cd.grads
    G[:, :, nloc:, 1, :] = cd.grads
    return sym_curl(G)


def _vector_dofs(cd: CellData, n: int) -> np.ndarray:
    return np.concatenate([cd.dofs, cd.dofs + n], axis=1)


def assemble_symcurl_form(space: SplineSpace, material: IsotropicMaterial, generic: bool = False,
                          nq=None, pairs=None) -> sp.csr_matrix:
    """``A[I, J] = int C^{-1} symCurl Phi_I : symCurl Phi_J`` on ``(S_h)^2``.

    The default path combines the four derivative-pair matrices through the
    closed form of the isotropic inverse law. ``generic=True`` evaluates
    ``C^{-1}`` pointwise on the symCurl of every basis function instead (memory
    heavy; meant for cross-checks on coarse levels).
    """
    n = space.dim
    if generic:
        cd = space.cell_quadrature(nq)
        S = symcurl_basis(cd)
        CS = material.apply_inverse(S)
        local = np.einsum("cq,cqiab,cqjab->cij", cd.weights, CS, S, optimize=True)
        vd = _vector_dofs(cd, n)
        return _scatter(cd, local, 2 * n, row_dofs=vd, col_dofs=vd)
    K = assemble_derivative_pairs(space, nq) if pairs is None else pairs
    c = 1.0 / (material.D * (1.0 - material.nu))
    kappa = material.nu / (1.0 + material.nu)
    A11 = c * (0.5 * K[0, 0] + (1.0 - kappa) * K[1, 1])
    A22 = c * (0.5 * K[1, 1] + (1.0 - kappa) * K[0, 0])
    A12 = c * (-0.5 * K[0, 1] + kappa * K[1, 0])
    return sp.bmat([[A11, A12], [A12.T, A22]], format="csr")


def assemble_coupling(scalar_space: SplineSpace, material: IsotropicMaterial, generic: bool = False,
                      nq=None) -> sp.csr_matrix:
    """``B[i, J] = int C^{-1}(N_i I) : symCurl Phi_J`` (scalar rows, vector columns).

    Uses ``C^{-1}(q I) = q I / (D (1 + nu))`` unless ``generic`` is set.
    """
    cd = scalar_space.cell_quadrature(nq)
    n = scalar_space.dim
    vd = _vector_dofs(cd, n)
    if generic:
        ncell, nqp, nloc = cd.values.shape
        Q = cd.values[..., None, None] * np.eye(2)
        CQ = material.apply_inverse(Q)
        S = symcurl_basis(cd)
        local = np.einsum("cq,cqiab,cqjab->cij", cd.weights, CQ, S, optimize=True)
    else:
        # tr symCurl (N, 0) = d_2 N and tr symCurl (0, N) = -d_1 N
        f = material.identity_inverse_factor
        tr = np.concatenate([cd.grads[..., 1], -cd.grads[..., 0]], axis=2)
        local = f * np.einsum("cq,cqi,cqj->cij", cd.weights, cd.values, tr, optimize=True)
    return _scatter(cd, local, n, 2 * n, row_dofs=cd.dofs, col_dofs=vd)


def assemble_raw_boundary_forms(space: SplineSpace, layout, nq=None):
    """Boundary pairings against raw multiplier dofs.

    Returns ``(G, H)`` with ``G[r, J] = l_phi(Phi_J, e_r)`` of shape
    ``(raw, 2n)`` and ``H[r, i] = l_p(N_i, e_r)`` of shape ``(raw, n)``. Only the
    normal components on simply supported and free edges and the tangential
    components on free edges take part.
    """
    n = space.dim
    gi, gj, gv = [], [], []
    hi, hj, hv = [], [], []
    for e in layout.edges:
        if e.bc is BC.CLAMPED:
            continue
        tr = space.trace_space(e)
        d = space.edge_quadrature(e, nq)
        glob = tr.global_dofs[d.dofs]  # (m, p+1)
        comps = [("n", d.normal, layout.n_slice(e.index))]
        if e.bc is BC.FREE:
            comps.append(("t", d.tangent, layout.t_slice(e.index)))
        for _, vec, sl in comps:
            for c in (0, 1):
                # int (dN_j/dt) vec_c rho_a ds
                loc = np.einsum("m,ma,mj->maj", d.weights * vec[:, c], d.values, d.dds)
                r = np.broadcast_to(sl.start + d.dofs[:, :, None], loc.shape)
                col = np.broadcast_to(c * n + glob[:, None, :], loc.shape)
                gi.append(r.ravel()), gj.append(col.ravel()), gv.append(loc.ravel())
        if e.bc is BC.FREE:
            sl = layout.n_slice(e.index)
            loc = np.einsum("m,ma,mj->maj", d.weights, d.values, d.values)
            r = np.broadcast_to(sl.start + d.dofs[:, :, None], loc.shape)
            col = np.broadcast_to(glob[:, None, :], loc.shape)
            hi.append(r.ravel()), hj.append(col.ravel()), hv.append(loc.ravel())

    def build(i, j, v, shape):
        if not i:
            return sp.csr_matrix(shape)
        return sp.csr_matrix((np.concatenate(v), (np.concatenate(i), np.concatenate(j))), shape=shape)

    return build(gi, gj, gv, (layout.size, 2 * n)), build(hi, hj, hv, (layout.size, n))


def assemble_boundary_forms(space: SplineSpace, multipliers: MultiplierSpace, nq=None):
    """``(L_phi, L_p)`` with one row per multiplier basis column."""
    G, H = assemble_raw_boundary_forms(space, multipliers.layout, nq)
    ZT = multipliers.basis.Z.T.tocsr()
    return (ZT @ G).tocsr(), (ZT @ H).tocsr()


def assemble_rt0_rows(space: SplineSpace, nq=None) -> sp.csr_matrix:
    """Rows of ``int phi . r dx`` for r in {(1, 0), (0, 1), (x_1, x_2)}."""
    cd = space.cell_quadrature(nq)
    n = space.dim
    R = np.zeros((3, 2 * n))
    wv = cd.weights[..., None] * cd.values
    np.add.at(R[0], cd.dofs, wv.sum(1))
    np.add.at(R[1], cd.dofs + n, wv.sum(1))
    np.add.at(R[2], cd.dofs, np.einsum("cql,cq->cl", wv, cd.points[..., 0]))
    np.add.at(R[2], cd.dofs + n, np.einsum("cql,cq->cl", wv, cd.points[..., 1]))
    return sp.csr_matrix(R)


def assemble_load(space, f, nq=None) -> np.ndarray:
    """``int f N_i dx``; restricted to the free dofs for a :class:`ConstrainedSpace`.

    ``f`` is a callable ``f(x, y)`` or a constant.
    """
    if isinstance(space, ConstrainedSpace):
        return assemble_load(space.space, f, nq)[space.free]
    cd = space.cell_quadrature(nq)
    fx = f(cd.points[..., 0], cd.points[..., 1]) if callable(f) else float(f)
    fx = np.broadcast_to(fx, cd.weights.shape)
    b = np.zeros(space.dim)
    np.add.at(b, cd.dofs, np.einsum("cq,cql->cl", cd.weights * fx, cd.values))
    return b


@dataclass
class AssembledForms:
    """All operators of one discretization (full, unconstrained index sets
    unless noted)."""

    K_pp: sp.csr_matrix  # Poisson stiffness on free dofs of Q_h
    A_phiphi: sp.csr_matrix  # symCurl form on (S_h)^2
    B_pphi: sp.csr_matrix  # scalar x vector coupling
    M_tr: sp.csr_matrix  # int 2 N_i N_j / (D (1 + nu)), the (p I, q I) term
    L_phi: sp.csr_matrix
    L_p: sp.csr_matrix
    R: sp.csr_matrix
    f_vec: np.ndarray  # load on free dofs


def assemble_all(space: SplineSpace, cspace: ConstrainedSpace, multipliers: MultiplierSpace,
                 material: IsotropicMaterial, load) -> AssembledForms:
    pairs = assemble_derivative_pairs(space)
    K = (pairs[0, 0] + pairs[1, 1]).tocsr()
    K_pp = K[cspace.free][:, cspace.free].tocsr()
    A = assemble_symcurl_form(space, material, pairs=pairs)
    B = assemble_coupling(space, material)
    M = 2.0 * material.identity_inverse_factor * assemble_mass(space)
    L_phi, L_p = assemble_boundary_forms(space, multipliers)
    R = assemble_rt0_rows(space)
    f = assemble_load(cspace, load)
    return AssembledForms(K_pp, A, B, M, L_phi, L_p, R, f)
