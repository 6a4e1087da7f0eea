import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedplate.geometry import BC, GeometryError, unit_disk_patch, unit_square_patch
from mixedplate.spaces import (ConstrainedSpace, SplineSpace, build_space, edge_tangential_derivative,
                               edge_trace_space, eval_basis)

SQUARE = unit_square_patch()
DISK = unit_disk_patch()


@pytest.mark.parametrize("p,L,dim", [(1, 2, 25), (3, 4, 361), (2, 0, 9)])
def test_dimension(p, L, dim):
    assert build_space(SQUARE, p, L).dim == dim


def test_bad_degree():
    with pytest.raises(ValueError):
        build_space(SQUARE, 0, 2)


@pytest.mark.parametrize("geo", [SQUARE, DISK], ids=["square", "disk"])
@pytest.mark.parametrize("rational", [False, True])
def test_partition_of_unity(geo, rational, rng):
    V = build_space(geo, 3, 3, rational=rational and geo is DISK)
    u, v = rng.uniform(0.01, 0.99, (2, 100))
    dofs, N, G, _ = V.evaluate(u, v)
    assert dofs.shape[1] == 16
    assert np.abs(N.sum(1) - 1).max() < 1e-13
    assert np.abs(G.sum(1)).max() < 1e-11


def test_eval_basis_hat_functions():
    V = build_space(unit_square_patch(1.0, (0.5, 0.5)), 1, 2)
    out = eval_basis(V, (0.25, 0.5))
    nz = {d: (val, g) for d, val, g in out if abs(val) > 1e-14}
    assert list(nz) == [V.dof(1, 2)]
    val, g = nz[V.dof(1, 2)]
    assert val == pytest.approx(1.0)
    # at the node the one-sided gradient of the hat is that of the right cell
    assert len(out) == 4


def test_eval_basis_bilinear_gradients():
    V = build_space(unit_square_patch(1.0, (0.5, 0.5)), 1, 0)
    out = eval_basis(V, (0.3, 0.6))
    for d, val, g in out:
        i, j = d % 2, d // 2
        fx = (0.3 if i else 0.7)
        fy = (0.6 if j else 0.4)
        assert val == pytest.approx(fx * fy)
        assert np.allclose(g, [(1 if i else -1) * fy, (1 if j else -1) * fx])


@pytest.mark.parametrize("p", [1, 2, 3])
def test_linear_reproduction_affine(p, rng):
    V = build_space(unit_square_patch(2.0, (0.3, -0.1)), p, 2)
    c = V.interpolate(lambda x, y: x)
    u, v = rng.uniform(0, 1, (2, 50))
    val, grad = V.evaluate_field(c, u, v)
    _, _, _, x = V.evaluate(u, v)
    assert np.allclose(val, x[:, 0], atol=1e-12)
    assert np.allclose(grad, [1, 0], atol=1e-12)


def test_rational_disk_reproduces_linear(rng):
    V = build_space(DISK, 2, 2, rational=True)
    c = V.interpolate(lambda x, y: 2 * x - y)
    u, v = rng.uniform(0.01, 0.99, (2, 50))
    _, grad = V.evaluate_field(c, u, v)
    assert np.allclose(grad, [2, -1], atol=1e-11)


def test_singular_jacobian_rejected():
    V = build_space(DISK, 2, 2)
    with pytest.raises(GeometryError):
        V.evaluate([0.0], [0.0])


@pytest.mark.parametrize("p", [1, 2, 3])
def test_refinement_nesting(p, rng):
    coarse, fine = build_space(SQUARE, p, 2), build_space(SQUARE, p, 3)
    c = rng.standard_normal(coarse.dim)
    u, v = rng.uniform(0, 1, (2, 200))
    # interpolation at the fine Greville points is exact on the nested space
    cf = fine.interpolate(lambda x, y: coarse.evaluate_field(c, (x + 1) / 2, (y + 1) / 2)[0].reshape(x.shape))
    assert np.abs(coarse.evaluate_field(c, u, v)[0] - fine.evaluate_field(cf, u, v)[0]).max() < 1e-12


@pytest.mark.parametrize("p", [1, 2, 3])
def test_quadrature_exactness(p):
    V = build_space(unit_square_patch(1.0, (0.5, 0.5)), p, 2)
    cd = V.cell_quadrature()
    for a in range(2 * p + 2):
        for b in range(0, 2 * p + 2 - a, max(1, p)):
            got = (cd.weights * cd.points[..., 0] ** a * cd.points[..., 1] ** b).sum()
            assert got == pytest.approx(1 / ((a + 1) * (b + 1)), abs=1e-13)


def test_trace_space_basics():
    V = build_space(SQUARE, 1, 2)
    for e in SQUARE.edges:
        tr = edge_trace_space(V, e)
        assert tr.dim == 5
        a0, a1 = tr.endpoint_dofs
        dofs, N, _ = tr.evaluate([0.0, 1.0])
        assert N[0][dofs[0] == a0][0] == pytest.approx(1.0)
        assert N[1][dofs[1] == a1][0] == pytest.approx(1.0)
    interior = V.dof(2, 2)
    s = np.linspace(0, 1, 11)
    for e in SQUARE.edges:
        assert np.all(edge_tangential_derivative(V, e, interior, s) == 0)


@pytest.mark.parametrize("geo", [SQUARE, DISK], ids=["square", "disk"])
def test_trace_compatibility(geo, rng):
    V = build_space(geo, 2, 2)
    c = rng.standard_normal(V.dim)
    s = np.linspace(0.02, 0.98, 13)
    for e in geo.edges:
        tr = V.trace_space(e)
        u, v = e.params(s)
        direct = V.evaluate_field(c, u, v)[0]
        assert np.abs(direct - tr.eval_coeffs(c[tr.global_dofs], s)).max() < 1e-13


def test_tangential_derivative_examples():
    V = build_space(SQUARE, 2, 2)
    north = SQUARE.edges[2]
    c = V.interpolate(lambda x, y: x)
    s = np.linspace(0, 1, 9)
    d = sum(c[j] * edge_tangential_derivative(V, north, j, s) for j in V.trace_space(north).global_dofs)
    assert np.allclose(d, -1, atol=1e-12)
    ones = np.ones(V.dim)
    d = sum(ones[j] * edge_tangential_derivative(V, north, j, s) for j in V.trace_space(north).global_dofs)
    assert np.allclose(d, 0, atol=1e-12)


def test_tangential_derivative_disk():
    V = build_space(DISK, 2, 3, rational=True)
    c = V.interpolate(lambda x, y: y)
    s = np.linspace(0, 1, 9)
    for e in DISK.edges:
        tr = V.trace_space(e)
        d = sum(c[j] * edge_tangential_derivative(V, e, j, s) for j in tr.global_dofs)
        x = e.frame(s).point
        # d/ds sin(theta) = cos(theta) = x on the unit circle
        assert np.allclose(d, x[:, 0], atol=1e-10)


def test_constrained_space_vanishes(square_geo, rng):
    V = build_space(square_geo, 3, 3)
    Q = ConstrainedSpace(V)
    x = Q.extend(rng.standard_normal(Q.dim))
    s = np.linspace(0, 1, 50)
    for e in square_geo.edges:
        tr = V.trace_space(e)
        val = tr.eval_coeffs(x[tr.global_dofs], s)
        if e.bc in (BC.CLAMPED, BC.SIMPLY_SUPPORTED):
            assert np.abs(val).max() < 1e-12
        else:
            assert np.abs(val).max() > 1e-3
    assert np.array_equal(Q.restrict(x), x[Q.free])


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3))
def test_trace_restriction_surjective(p, L):
    V = SplineSpace(SQUARE, p, L)
    for e in SQUARE.edges:
        tr = V.trace_space(e)
        assert len(set(tr.global_dofs)) == tr.dim == 2 ** L + p
