import logging

import numpy as np
import pytest

from mechforge.errors import (CountMismatch, FormatError, GeometryError, IoError, MeshError,
                              ZeroVector)
from mechforge.fem import build_mixed
from mechforge.mesh import (BASE_MARKER, ENDO_MARKER, EPI_MARKER, EllipsoidSpec, FiberField,
                            Mesh, attach_fibers, box_mesh, generate_ellipsoid, helix_fibers,
                            material_frame, read_fiber_file, read_gmsh, read_gmsh_markers,
                            unit_cube, unit_square, write_fiber_file, write_gmsh)


@pytest.fixture(scope="module")
def lv():
    spec = EllipsoidSpec(h=2000.0)
    return spec, generate_ellipsoid(spec)


def assert_facets_belong_to_one_cell(mesh):
    cell_sets = {}
    for c, cell in enumerate(mesh.cells):
        for k in range(len(cell)):
            key = tuple(sorted(np.delete(cell, k)))
            cell_sets.setdefault(key, []).append(c)
    for f in mesh.facets:
        assert len(cell_sets[tuple(sorted(f))]) == 1


@pytest.mark.parametrize("n, nv, nc", [(1, 8, 6), (3, 64, 162)])
def test_unit_cube_counts(n, nv, nc):
    m = unit_cube(n)
    assert (m.num_vertices, m.num_cells, m.dim) == (nv, nc, 3)
    assert m.markers == {1, 2, 3, 4, 5, 6}


def test_unit_square_counts():
    m = unit_square(2)
    assert (m.num_vertices, m.num_cells, m.dim) == (9, 8, 2)
    assert m.markers == {1, 2, 3, 4}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cube_volume_and_orientation(n):
    m = unit_cube(n)
    assert np.all(m.cell_volumes() > 0)
    assert abs(m.cell_volumes().sum() - 1.0) < 1e-12


@pytest.mark.parametrize("make", [lambda: unit_cube(2), lambda: unit_square(3),
                                  lambda: box_mesh((4, 2), (4.0, 1.0))])
def test_facet_of_exactly_one_cell(make):
    assert_facets_belong_to_one_cell(make())


def test_face_markers_by_coordinate():
    m = unit_cube(2)
    centroids = m.vertices[m.facets].mean(axis=1)
    for marker in range(1, 7):
        ax, side = divmod(marker - 1, 2)
        sel = m.facet_markers == marker
        assert np.allclose(centroids[sel, ax], float(side))
        assert abs(m.facet_areas(np.flatnonzero(sel)).sum() - 1.0) < 1e-12


def test_negative_orientation_is_fixed():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1.0]])
    m = Mesh(v, np.array([[1, 0, 2, 3]]))
    assert m.cell_volumes()[0] > 0


def test_bad_vertex_index():
    v = np.zeros((3, 2))
    with pytest.raises(MeshError, match="out of range"):
        Mesh(v, np.array([[0, 1, 5]]))


def test_gmsh_round_trip(tmp_path):
    m = unit_cube(2)
    path = tmp_path / "cube.msh"
    write_gmsh(m, str(path))
    r = read_gmsh(str(path))
    assert r.markers == {1, 2, 3, 4, 5, 6}
    assert np.array_equal(r.vertices, m.vertices)
    assert np.array_equal(r.cells, m.cells)
    assert len(r.facets) == len(m.facets)
    assert_facets_belong_to_one_cell(r)


def test_gmsh_2d_round_trip(tmp_path):
    m = unit_square(3)
    path = tmp_path / "sq.msh"
    write_gmsh(m, str(path))
    r = read_gmsh(str(path))
    assert r.dim == 2 and r.markers == {1, 2, 3, 4} and r.num_cells == 18


MSH_HEADER = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
NODES = "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"


def test_gmsh_quadrilateral_rejected(tmp_path):
    p = tmp_path / "quad.msh"
    p.write_text(MSH_HEADER + NODES + "$Elements\n1\n1 3 2 1 1 1 2 3 4\n$EndElements\n")
    with pytest.raises(FormatError, match="quadrangle"):
        read_gmsh(str(p))


def test_gmsh_no_cells(tmp_path):
    p = tmp_path / "empty.msh"
    p.write_text(MSH_HEADER + NODES + "$Elements\n0\n$EndElements\n")
    with pytest.raises(FormatError, match="no cells"):
        read_gmsh(str(p))


def test_gmsh_wrong_version(tmp_path):
    p = tmp_path / "v4.msh"
    p.write_text("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n" + NODES)
    with pytest.raises(FormatError, match="version"):
        read_gmsh(str(p))


def test_gmsh_missing_file(tmp_path):
    with pytest.raises(IoError, match="nope.msh"):
        read_gmsh(str(tmp_path / "nope.msh"))


def test_gmsh_separate_markers(tmp_path):
    m = unit_cube(1)
    write_gmsh(m, str(tmp_path / "a.msh"))
    bare = Mesh(m.vertices, m.cells)
    tagged = read_gmsh_markers(str(tmp_path / "a.msh"), bare)
    assert tagged.markers == {1, 2, 3, 4, 5, 6}


# -- fibers --------------------------------------------------------------------------


def test_constant_fiber_field(tmp_path):
    m = unit_cube(1)
    write_fiber_file(str(tmp_path / "f.txt"), np.tile([1.0, 0, 0], (6, 1)))
    (f,) = attach_fibers(m, [str(tmp_path / "f.txt")], ["f"], True)
    assert f.name == "f" and f.per_element
    assert np.array_equal(f.vectors, np.tile([1.0, 0, 0], (6, 1)))


def test_fiber_normalized_with_warning(tmp_path, caplog):
    m = unit_cube(1)
    write_fiber_file(str(tmp_path / "f.txt"), np.tile([2.0, 0, 0], (6, 1)))
    with caplog.at_level(logging.WARNING):
        (f,) = attach_fibers(m, [str(tmp_path / "f.txt")], ["f"], True)
    assert np.allclose(f.vectors, [1, 0, 0])
    assert "normalized" in caplog.text


def test_fiber_count_mismatch(tmp_path):
    write_fiber_file(str(tmp_path / "f.txt"), np.tile([1.0, 0, 0], (5, 1)))
    with pytest.raises(CountMismatch):
        attach_fibers(unit_cube(1), [str(tmp_path / "f.txt")], ["f"], True)


def test_fiber_zero_vector(tmp_path):
    v = np.tile([1.0, 0, 0], (6, 1))
    v[3] = 0
    write_fiber_file(str(tmp_path / "f.txt"), v)
    with pytest.raises(ZeroVector):
        attach_fibers(unit_cube(1), [str(tmp_path / "f.txt")], ["f"], True)


def test_fiber_file_round_trip(tmp_path, rng):
    v = rng.standard_normal((7, 3))
    write_fiber_file(str(tmp_path / "f.txt"), v)
    assert np.array_equal(read_fiber_file(str(tmp_path / "f.txt")), v)


def test_vertex_fibers_averaged_per_cell():
    m = unit_cube(1)
    f = FiberField("f", False, np.tile([0, 0, 1.0], (8, 1)))
    assert np.allclose(f.per_cell(m), [0, 0, 1])


def test_material_frame_orthonormal(rng):
    m = unit_cube(1)
    f = rng.standard_normal((6, 3))
    f /= np.linalg.norm(f, axis=1)[:, None]
    s = rng.standard_normal((6, 3))
    s /= np.linalg.norm(s, axis=1)[:, None]
    R = material_frame([FiberField("f", True, f), FiberField("s", True, s)], m)
    assert np.allclose(np.swapaxes(R, 1, 2) @ R, np.eye(3), atol=1e-12)
    assert np.allclose(np.linalg.det(R), 1.0)
    assert np.allclose(R[:, :, 0], f)


# -- ellipsoid ------------------------------------------------------------------------


def test_ellipsoid_markers_and_validity(lv):
    _, m = lv
    assert m.markers == {BASE_MARKER, ENDO_MARKER, EPI_MARKER} == {10, 20, 30}
    assert np.all(m.cell_volumes() > 0)
    assert_facets_belong_to_one_cell(m)


def test_ellipsoid_dof_counts(lv):
    _, m = lv
    s = build_mixed(m)
    nu, npr = s.primary.dim, s.pressure.dim
    assert abs(nu - 6264) <= 0.1 * 6264
    assert abs(npr - 362) <= 0.1 * 362


def test_ellipsoid_apex(lv):
    spec, m = lv
    h_mm = spec.h / 1000
    v = m.vertices[m.nearest_vertex(np.array([0, 0, -17.0]))]
    assert np.linalg.norm(v - [0, 0, -17]) <= h_mm / 2
    v = m.vertices[m.nearest_vertex(np.array([0, 0, -20.0]))]
    assert np.linalg.norm(v - [0, 0, -20]) <= h_mm / 2


def test_ellipsoid_surface_tagging(lv):
    spec, m = lv
    tol = spec.h / 1000 / 10
    for marker, (rs, rl) in ((ENDO_MARKER, (spec.endo_short, spec.endo_long)),
                             (EPI_MARKER, (spec.epi_short, spec.epi_long))):
        x = m.vertices[np.unique(m.facets[m.facet_markers == marker])]
        r = np.hypot(x[:, 0], x[:, 1])
        # distance-like residual of the implicit equation, scaled to mm
        val = np.sqrt(r ** 2 / rs ** 2 + x[:, 2] ** 2 / rl ** 2) - 1.0
        assert np.max(np.abs(val)) * rs < tol
    base = m.vertices[np.unique(m.facets[m.facet_markers == BASE_MARKER])]
    assert np.allclose(base[:, 2], spec.base_z)


def test_ellipsoid_refinement_scales():
    coarse = generate_ellipsoid(EllipsoidSpec(h=4000.0))
    fine = generate_ellipsoid(EllipsoidSpec(h=2000.0))
    assert fine.num_cells > 4 * coarse.num_cells


@pytest.mark.parametrize("kw", [dict(endo_short=11.0), dict(endo_long=21.0),
                                dict(base_z=30.0), dict(h=-5.0), dict(h=0.0)])
def test_ellipsoid_degenerate(kw):
    with pytest.raises(GeometryError):
        generate_ellipsoid(EllipsoidSpec(**kw))


def test_helix_fibers_unit_and_tangent(lv):
    spec, m = lv
    f, s = helix_fibers(m, spec)
    assert f.vectors.shape == (m.num_cells, 3) == s.vectors.shape
    assert np.allclose(np.linalg.norm(f.vectors, axis=1), 1.0)
    assert np.allclose(np.einsum("ij,ij->i", f.vectors, s.vectors), 0.0, atol=1e-12)
