import numpy as np
import pytest
import scipy.linalg as la
from scipy.integrate import quad

from mixedplate.assembly import (assemble_all, assemble_boundary_forms, assemble_coupling, assemble_load,
                                 assemble_mass, assemble_poisson, assemble_raw_boundary_forms,
                                 assemble_rt0_rows, assemble_symcurl_form, symcurl_basis)
from mixedplate.geometry import BC, unit_disk_patch, unit_square_patch
from mixedplate.material import IsotropicMaterial
from mixedplate.multipliers import MultiplierSpace
from mixedplate.spaces import ConstrainedSpace, SplineSpace

MAT = IsotropicMaterial(1.3, 0.3)
UNIT = unit_square_patch(1.0, (0.5, 0.5))


def vec_interp(V, f1, f2):
    return np.concatenate([V.interpolate(f1), V.interpolate(f2)])


def test_poisson_bilinear_diagonal():
    Q = ConstrainedSpace(SplineSpace(UNIT, 1, 1))
    K = assemble_poisson(Q).toarray()
    assert K.shape == (1, 1)
    assert K[0, 0] == pytest.approx(8 / 3, abs=1e-14)


def test_poisson_five_point_structure():
    V = SplineSpace(UNIT, 1, 3)
    K = assemble_poisson(V).toarray()
    i = V.dof(4, 4)
    row = K[i]
    assert row[i] == pytest.approx(8 / 3)
    assert row[V.dof(5, 4)] == pytest.approx(-1 / 3)
    assert row[V.dof(5, 5)] == pytest.approx(-1 / 3)
    assert abs(row.sum()) < 1e-14


@pytest.mark.parametrize("geo", [unit_square_patch(), unit_disk_patch()], ids=["square", "disk"])
def test_poisson_kills_constants(geo):
    V = SplineSpace(geo, 2, 3)
    K = assemble_poisson(V)
    assert np.abs(K @ np.ones(V.dim)).max() < 1e-12
    assert abs(K - K.T).max() < 1e-12


@pytest.mark.parametrize("L", [1, 2, 3])
def test_poisson_positive_definite(square_geo, L):
    K = assemble_poisson(ConstrainedSpace(SplineSpace(square_geo, 2, L))).toarray()
    assert np.linalg.eigvalsh(K).min() > 0


@pytest.mark.parametrize("geo", [unit_square_patch(2.0, (0.2, 0.1)), unit_disk_patch()], ids=["square", "disk"])
@pytest.mark.parametrize("p", [2, 3])
def test_symcurl_rt0_kernel(geo, p):
    # the disk needs its NURBS weights in the basis to contain x exactly
    V = SplineSpace(geo, p, 3, rational=geo.name == "disk")
    A = assemble_symcurl_form(V, MAT)
    for phi in [vec_interp(V, lambda x, y: 1 + 0 * x, lambda x, y: 0 * x),
                vec_interp(V, lambda x, y: 0 * x, lambda x, y: 1 + 0 * x),
                vec_interp(V, lambda x, y: 2 * x + 1, lambda x, y: 2 * y - 3)]:
        assert np.linalg.norm(A @ phi) < 1e-11


@pytest.mark.parametrize("L", [0, 1, 2, 3])
@pytest.mark.parametrize("p", [1, 2])
def test_symcurl_kernel_dimension(L, p):
    V = SplineSpace(unit_square_patch(), p, L)
    A = assemble_symcurl_form(V, MAT).toarray()
    ev = np.linalg.eigvalsh(A)
    assert abs(A - A.T).max() < 1e-12
    assert ev.min() > -1e-10
    assert np.sum(ev < 1e-10 * ev.max()) == 3


def test_symcurl_gram_at_unit_material(rng):
    V = SplineSpace(unit_square_patch(), 2, 2)
    A = assemble_symcurl_form(V, IsotropicMaterial(1, 0)).toarray()
    cd = V.cell_quadrature()
    S = symcurl_basis(cd)
    local = np.einsum("cq,cqiab,cqjab->cij", cd.weights, S, S)
    G = np.zeros_like(A)
    vd = np.concatenate([cd.dofs, cd.dofs + V.dim], axis=1)
    for c in range(len(vd)):
        G[np.ix_(vd[c], vd[c])] += local[c]
    assert np.abs(A - G).max() < 1e-13


def test_symcurl_single_cell_hand_value():
    V = SplineSpace(UNIT, 1, 0)
    phi = vec_interp(V, lambda x, y: y, lambda x, y: 0 * x)
    A = assemble_symcurl_form(V, MAT)
    # symCurl (x2, 0) = [[1, 0], [0, 0]], |cell| = 1
    S = np.array([[1.0, 0], [0, 0]])
    expected = (MAT.apply_inverse(S) * S).sum()
    assert phi @ A @ phi == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.3, -0.4])
def test_generic_paths_agree(nu):
    mat = IsotropicMaterial(1.7, nu)
    V = SplineSpace(unit_disk_patch(), 2, 2)
    A1, A2 = assemble_symcurl_form(V, mat), assemble_symcurl_form(V, mat, generic=True)
    B1, B2 = assemble_coupling(V, mat), assemble_coupling(V, mat, generic=True)
    assert abs(A1 - A2).max() < 1e-12 * abs(A1).max()
    assert abs(B1 - B2).max() < 1e-12 * abs(B1).max()


def test_coupling_constant_pressure():
    V = SplineSpace(unit_square_patch(), 3, 3)
    B = assemble_coupling(V, MAT)
    r = np.ones(V.dim) @ B
    interior = np.setdiff1d(np.arange(V.dim), V.boundary_dofs(list(BC)))
    cols = np.concatenate([interior, interior + V.dim])
    # tr symCurl psi = d2 psi1 - d1 psi2 integrates to zero for interior bumps
    assert np.abs(r[cols]).max() < 1e-12


def test_coupling_trace_formula():
    mat = IsotropicMaterial(2.0, 0.0)
    V = SplineSpace(unit_square_patch(), 2, 2)
    B = assemble_coupling(V, mat)
    cd = V.cell_quadrature()
    tr = np.concatenate([cd.grads[..., 1], -cd.grads[..., 0]], axis=2)
    local = np.einsum("cq,cqi,cqj->cij", cd.weights / mat.D, cd.values, tr)
    ref = np.zeros(B.shape)
    vd = np.concatenate([cd.dofs, cd.dofs + V.dim], axis=1)
    for c in range(len(vd)):
        ref[np.ix_(cd.dofs[c], vd[c])] += local[c]
    assert np.abs(B.toarray() - ref).max() < 1e-13


def test_boundary_forms_structure(square_geo, rng):
    V = SplineSpace(square_geo, 2, 3)
    ms = MultiplierSpace(V)
    G, H = assemble_raw_boundary_forms(V, ms.layout)
    lay = ms.layout
    west = np.r_[lay.t_slice(4), lay.n_slice(4)]
    assert abs(G[west]).max() == 0 and abs(H[west]).max() == 0
    # l_p only sees mu_n on the free east edge
    nz_rows = np.unique(H.nonzero()[0])
    assert set(nz_rows) <= set(range(lay.n_slice(2).start, lay.n_slice(2).stop))
    L_phi, L_p = assemble_boundary_forms(V, ms)
    const = np.concatenate([np.full(V.dim, 0.7), np.full(V.dim, -2.0)])
    assert np.abs(L_phi @ const).max() < 1e-12
    Z = ms.basis.Z.tocsc()
    east_n = np.arange(lay.n_slice(2).start, lay.n_slice(2).stop)
    no_east = [m for m in range(ms.dim) if not np.any(Z[:, m].toarray().ravel()[east_n])]
    assert no_east and abs(L_p[no_east]).max() == 0


def test_boundary_form_pairing_values():
    # l_phi for phi = (y, 0) against mu_n == 1 on the simply supported south edge
    geo = unit_square_patch().with_bcs((BC.SIMPLY_SUPPORTED, BC.CLAMPED, BC.CLAMPED, BC.CLAMPED))
    V = SplineSpace(geo, 2, 2)
    ms = MultiplierSpace(V)
    G, _ = assemble_raw_boundary_forms(V, ms.layout)
    mu = np.zeros(ms.raw_size)
    mu[ms.layout.n_slice(1)] = 1.0
    phi = vec_interp(V, lambda x, y: x * x, lambda x, y: 3 * x)
    # south: t = (1, 0), n = (0, -1), d phi/dt . n = -3, length 2
    assert mu @ G @ phi == pytest.approx(-6.0, abs=1e-12)


def test_rt0_rows_examples():
    V = SplineSpace(unit_square_patch(), 2, 2)
    R = assemble_rt0_rows(V)
    one = vec_interp(V, lambda x, y: 1 + 0 * x, lambda x, y: 0 * x)
    assert (R @ one)[0] == pytest.approx(4.0)
    gens = [one, vec_interp(V, lambda x, y: 0 * x, lambda x, y: 1 + 0 * x),
            vec_interp(V, lambda x, y: x, lambda x, y: y)]
    Gram = np.column_stack([R @ g for g in gens])
    assert abs(np.linalg.det(Gram)) > 1e-3
    rot = vec_interp(V, lambda x, y: -y, lambda x, y: x)
    assert np.abs(R @ rot).max() < 1e-13


def test_load_examples():
    V = SplineSpace(UNIT, 1, 3)
    assert np.array_equal(assemble_load(V, lambda x, y: 0 * x), np.zeros(V.dim))
    assert assemble_load(V, 1.0).sum() == pytest.approx(1.0, abs=1e-14)


def test_load_square_benchmark():
    V = SplineSpace(unit_square_patch(), 3, 4)
    f = lambda x, y: 4 * np.pi ** 4 * np.sin(np.pi * x) * np.sin(np.pi * y)  # noqa: E731
    b = assemble_load(V, f)
    assert abs(b.sum()) < 1e-10
    xy = V.interpolate(lambda x, y: x * y)
    sx = quad(lambda x: x * np.sin(np.pi * x), -1, 1)[0]
    assert b @ xy == pytest.approx(4 * np.pi ** 4 * sx ** 2, rel=1e-7)


def test_load_polynomial_matches_mass():
    V = SplineSpace(unit_square_patch(), 2, 2)
    f = lambda x, y: 1 + x - 2 * y * y  # noqa: E731
    assert np.allclose(assemble_load(V, f), assemble_mass(V) @ V.interpolate(f), atol=1e-13)


def test_load_restricted(square_geo):
    Q = ConstrainedSpace(SplineSpace(square_geo, 2, 2))
    assert assemble_load(Q, 1.0).shape == (Q.dim,)


@pytest.mark.parametrize("geo", ["square", "disk"])
def test_assembled_forms_consistent(geo, square_geo, disk_geo, rng):
    g = square_geo if geo == "square" else disk_geo
    V = SplineSpace(g, 2, 2)
    Q = ConstrainedSpace(V)
    ms = MultiplierSpace(V)
    F = assemble_all(V, Q, ms, MAT, 1.0)
    n = V.dim
    assert F.K_pp.shape == (Q.dim, Q.dim)
    assert F.A_phiphi.shape == (2 * n, 2 * n)
    assert F.B_pphi.shape == (n, 2 * n)
    assert F.L_phi.shape == (ms.dim, 2 * n) and F.L_p.shape == (ms.dim, n)
    assert F.R.shape == (3, 2 * n) and F.f_vec.shape == (Q.dim,)
    for S in (F.K_pp, F.A_phiphi, F.M_tr):
        assert abs(S - S.T).max() < 1e-12
    X = rng.standard_normal((2 * n, 20))
    assert np.all(np.einsum("ij,ij->j", X, F.A_phiphi @ X) >= -1e-10)
