import itertools
from math import factorial

import numpy as np
import pytest

from mechforge.errors import PatternMiss, UnsupportedDegree
from mechforge.fem import (SparseMatrix, apply_dirichlet, build_mixed, build_space,
                           element, quadrature, scatter_add, scatter_vector, tabulate)
from mechforge.mesh import unit_cube, unit_square


ELEMENTS = list(itertools.product(("P1", "P2"), (2, 3)))


def monomial_integral(powers):
    """Exact integral of prod x_i^{p_i} over the reference simplex."""
    return np.prod([factorial(p) for p in powers]) / factorial(sum(powers) + len(powers))


# -- elements -------------------------------------------------------------------------


def test_p1_tet_barycenter():
    N, _ = tabulate(element("P1", 3), np.full((1, 3), 0.25))
    assert np.allclose(N, 0.25, atol=1e-15)


@pytest.mark.parametrize("family, dim", ELEMENTS)
def test_nodal_basis_kronecker(family, dim):
    el = element(family, dim)
    N, _ = el.tabulate(el.nodes())
    assert np.allclose(N, np.eye(el.num_nodes), atol=1e-14)


@pytest.mark.parametrize("family, dim", ELEMENTS)
def test_partition_of_unity(family, dim, rng):
    pts = rng.dirichlet(np.ones(dim + 1), size=5)[:, 1:]
    N, dN = element(family, dim).tabulate(pts)
    assert np.allclose(N.sum(axis=1), 1.0, atol=1e-14)
    assert np.allclose(dN.sum(axis=1), 0.0, atol=1e-13)


@pytest.mark.parametrize("family, dim", ELEMENTS)
def test_gradients_match_finite_differences(family, dim, rng):
    el = element(family, dim)
    x = rng.dirichlet(np.ones(dim + 1), size=1)[:, 1:] * 0.9
    _, dN = el.tabulate(x)
    h = 1e-6
    for r in range(dim):
        e = np.zeros((1, dim))
        e[0, r] = h
        fd = (el.tabulate(x + e)[0] - el.tabulate(x - e)[0]) / (2 * h)
        assert np.allclose(dN[0, :, r], fd[0], atol=1e-8)


def test_node_counts():
    assert element("P1", 3).num_nodes == 4
    assert element("P2", 3).num_nodes == 10
    assert element("P2", 2).num_nodes == 6


# -- quadrature ------------------------------------------------------------------------


def test_tet_degree_one():
    r = quadrature(3, 1)
    assert len(r) == 1 and r.weights[0] == pytest.approx(1 / 6, rel=1e-15)


def test_triangle_x2y():
    r = quadrature(2, 3)
    val = np.sum(r.weights * r.points[:, 0] ** 2 * r.points[:, 1])
    assert val == pytest.approx(1 / 60, rel=1e-13)


def test_degree_seven_unsupported():
    with pytest.raises(UnsupportedDegree):
        quadrature(3, 7)


@pytest.mark.parametrize("dim, degree", [(d, k) for d in (1, 2, 3) for k in range(0, 7)])
def test_monomials_exact(dim, degree):
    r = quadrature(dim, degree)
    assert abs(r.weights.sum() - 1.0 / factorial(dim)) < 1e-15
    for powers in itertools.product(range(degree + 1), repeat=dim):
        if sum(powers) > degree:
            continue
        val = np.sum(r.weights * np.prod(r.points ** np.array(powers), axis=1))
        exact = monomial_integral(powers)
        assert abs(val - exact) <= 1e-13 * exact, (powers, val, exact)


def test_tet_degree_six_rule_is_interior_and_positive():
    r = quadrature(3, 6)
    assert len(r) == 24
    assert np.all(r.weights > 0)
    assert np.all(r.points > 0) and np.all(r.points.sum(axis=1) < 1)


# -- spaces ------------------------------------------------------------------------------


def test_p1_scalar_cube_dofs():
    assert build_space(unit_cube(1), "P1", "scalar").dim == 8


def test_p2_vector_cube_dofs():
    m = unit_cube(1)
    edges = {tuple(sorted(p)) for c in m.cells for p in itertools.combinations(c, 2)}
    assert len(edges) == 19
    assert build_space(m, "P2", "vector").dim == 3 * (8 + 19) == 81


def test_mixed_layout():
    m = unit_cube(2)
    s = build_mixed(m)
    assert s.dim == s.primary.dim + s.pressure.dim == 3 * s.primary.num_nodes + m.num_vertices
    assert s.cell_dofs.shape == (m.num_cells, 30 + 4)
    u, p = s.split(np.arange(s.dim))
    assert len(u) == s.primary.dim and p[0] == s.primary.dim


def test_dofs_dense_and_shared():
    s = build_space(unit_cube(2), "P2", "vector")
    used = np.unique(s.dof_map)
    assert np.array_equal(used, np.arange(s.dim))


def _evaluate(space, coeffs, cell, xi):
    N, _ = space.element.tabulate(np.atleast_2d(xi))
    return N[0] @ coeffs[space.cell_nodes[cell]]


def _reference_coords(mesh, cell, x):
    v = mesh.vertices[mesh.cells[cell]]
    return np.linalg.solve((v[1:] - v[0]).T, x - v[0])


@pytest.mark.parametrize("family, func", [
    ("P1", lambda x: 1 + 2 * x[:, 0] - 3 * x[:, 1] + 0.5 * x[:, 2]),
    ("P2", lambda x: 1 + x[:, 0] ** 2 - 2 * x[:, 1] * x[:, 2] + x[:, 2] - 0.3 * x[:, 0] * x[:, 1]),
])
def test_interpolation_exactness(family, func, rng):
    m = unit_cube(2)
    s = build_space(m, family, "scalar")
    coeffs = s.interpolate(func)
    for cell in rng.integers(0, m.num_cells, 20):
        lam = rng.dirichlet(np.ones(4))
        x = lam @ m.vertices[m.cells[cell]]
        val = _evaluate(s, coeffs, cell, _reference_coords(m, cell, x))
        assert abs(val - func(x[None])[0]) < 1e-12


def test_shared_facet_continuity(rng):
    m = unit_cube(2)
    s = build_space(m, "P2", "scalar")
    coeffs = rng.standard_normal(s.dim)
    owners = {}
    for c, cell in enumerate(m.cells):
        for k in range(4):
            owners.setdefault(tuple(sorted(np.delete(cell, k))), []).append(c)
    shared = [(f, cs) for f, cs in owners.items() if len(cs) == 2]
    assert shared
    for f, (c0, c1) in shared[:25]:
        x = rng.dirichlet(np.ones(3)) @ m.vertices[list(f)]
        a = _evaluate(s, coeffs, c0, _reference_coords(m, c0, x))
        b = _evaluate(s, coeffs, c1, _reference_coords(m, c1, x))
        assert abs(a - b) < 1e-12


def test_facet_nodes_include_edges():
    m = unit_square(1)
    s = build_space(m, "P2", "vector")
    facets = m.facets[m.facet_markers == 1]  # x = 0 edge
    nodes = s.facet_nodes(facets)
    assert len(nodes) == 3
    assert np.allclose(s.node_coords[nodes, 0], 0.0)


# -- sparse ------------------------------------------------------------------------------


def small_matrix():
    return SparseMatrix(4, np.array([[0, 1, 2], [1, 2, 3]]))


def test_scatter_accumulates():
    A = small_matrix()
    scatter_add(A, [1], [2], [[1.0]])
    scatter_add(A, [1], [2], [[1.0]])
    assert A.get(1, 2) == 2.0


def test_scatter_pattern_miss():
    with pytest.raises(PatternMiss):
        scatter_add(small_matrix(), [0], [3], [[1.0]])


def test_pattern_symmetric_and_cell_blocks(rng):
    m = unit_cube(1)
    s = build_mixed(m)
    A = SparseMatrix(s.dim, s.cell_dofs)
    k = s.cell_dofs.shape[1]
    blocks = rng.standard_normal((m.num_cells, k, k))
    A.add_cell_blocks(blocks)
    dense = np.zeros((s.dim, s.dim))
    for c in range(m.num_cells):
        dense[np.ix_(s.cell_dofs[c], s.cell_dofs[c])] += blocks[c]
    assert np.allclose(A.tocsr().toarray(), dense, atol=1e-14)
    P = A.tocsr().copy()
    P.data[:] = 1
    assert (P != P.T).nnz == 0


def test_assembly_order_independent(rng):
    cell_dofs = np.array([[0, 1, 2], [1, 2, 3], [2, 3, 4]])
    blocks = rng.standard_normal((3, 3, 3))
    A, B = SparseMatrix(5, cell_dofs), SparseMatrix(5, cell_dofs)
    for c in (0, 1, 2):
        A.scatter_add(cell_dofs[c], cell_dofs[c], blocks[c])
    for c in (2, 0, 1):
        B.scatter_add(cell_dofs[c], cell_dofs[c], blocks[c])
    assert np.allclose(A.data, B.data, atol=1e-15)


def test_scatter_vector():
    v = scatter_vector(4, np.array([[0, 1], [1, 3]]), np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.array_equal(v, [1, 5, 0, 4])


def test_apply_dirichlet():
    A = small_matrix()
    A.add_cell_blocks(np.ones((2, 3, 3)))
    rhs = np.array([1.0, 2.0, 3.0, 4.0])
    apply_dirichlet(A, rhs, [1, 3], [0.5, 2.0], current=np.array([0, 0.5, 0, 1.0]))
    dense = A.tocsr().toarray()
    assert np.array_equal(dense[1], [0, 1, 0, 0]) and np.array_equal(dense[3], [0, 0, 0, 1])
    # already satisfied -> zero increment; otherwise value - current
    assert rhs[1] == 0.0 and rhs[3] == 1.0
    assert rhs[0] == 1.0
