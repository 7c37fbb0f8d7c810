"""IndexedMesh measures, topology validation and OBJ/PLY I/O."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isotet import GridDims, extract, generate_field
from isotet.mesh import (
    IndexedMesh,
    OpenMeshError,
    enclosed_volume_divergence,
    enclosed_volume_tetra,
    export_obj,
    export_ply,
    import_obj,
    import_ply,
    mesh_area,
    triangle_areas,
    validate_topology,
)
from isotet.volume import FieldSpec


def unit_cube_mesh() -> IndexedMesh:
    v = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)], float)
    # outward winding
    quads = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (2, 3, 7, 6), (1, 2, 6, 5), (0, 4, 7, 3)]
    tris = [t for a, b, c, d in quads for t in ((a, b, c), (a, c, d))]
    return IndexedMesh.from_arrays(v, tris, normals=v - 0.5)


def tetra_mesh() -> IndexedMesh:
    v = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], float)
    return IndexedMesh.from_arrays(v, [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])


class TestIndexedMesh:
    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            IndexedMesh.from_arrays(np.zeros((3, 3)), [(0, 1, 3)])

    def test_rejects_normal_count_mismatch(self):
        with pytest.raises(ValueError):
            IndexedMesh(np.zeros((3, 3)), np.zeros((2, 3)), [(0, 1, 2)])

    def test_translated(self):
        m = unit_cube_mesh().translated((1, 2, 3))
        npt.assert_array_equal(m.vertices.min(axis=0), [1, 2, 3])


class TestMeasures:
    def test_cube_area_and_volume(self):
        m = unit_cube_mesh()
        npt.assert_allclose(triangle_areas(m), 0.5)
        assert mesh_area(m) == 6.0
        npt.assert_allclose(enclosed_volume_divergence(m), 1.0, rtol=1e-15)

    def test_tetra_volume(self):
        npt.assert_allclose(enclosed_volume_divergence(tetra_mesh()), 1 / 6, rtol=1e-15)

    @given(st.tuples(*[st.floats(-1e3, 1e3)] * 3), st.floats(0.1, 100))
    def test_volume_invariant_under_translation_and_scales_cubically(self, offset, scale):
        m = unit_cube_mesh()
        moved = IndexedMesh.from_arrays(m.vertices * scale + np.array(offset), m.triangles)
        npt.assert_allclose(enclosed_volume_divergence(moved), scale ** 3, rtol=1e-9)
        npt.assert_allclose(mesh_area(moved), 6 * scale ** 2, rtol=1e-12)

    def test_reversed_winding_keeps_volume_positive(self):
        m = unit_cube_mesh()
        flipped = IndexedMesh.from_arrays(m.vertices, m.triangles[:, ::-1])
        npt.assert_allclose(enclosed_volume_divergence(flipped), 1.0)

    def test_open_mesh_volume_raises(self):
        m = unit_cube_mesh()
        open_m = IndexedMesh.from_arrays(m.vertices, m.triangles[:-2])
        with pytest.raises(OpenMeshError) as err:
            enclosed_volume_divergence(open_m)
        assert err.value.boundary_edges == 4

    def test_tetra_volume_requires_tetra_method(self):
        g = generate_field(FieldSpec.sphere(4, (7.5,) * 3), GridDims.cube(16))
        with pytest.raises(ValueError, match="mc"):
            enclosed_volume_tetra(extract(g, 0.0, "mc"))
        assert enclosed_volume_tetra(extract(g, 0.0, "mt6")) > 0

    def test_sphere_divergence_volume_converges(self):
        r = 12.0
        g = generate_field(FieldSpec.sphere(r, (15.5,) * 3), GridDims.cube(32))
        v = enclosed_volume_divergence(extract(g, 0.0, "mc"))
        npt.assert_allclose(v, 4 / 3 * math.pi * r ** 3, rtol=5e-3)


class TestTopology:
    def test_closed_meshes(self):
        for m in (unit_cube_mesh(), tetra_mesh()):
            s = validate_topology(m)
            assert s.watertight and s.euler_characteristic == 2
            assert s.inconsistent_edge_count == 0

    def test_open_square(self):
        m = IndexedMesh.from_arrays([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)], [(0, 1, 2), (0, 2, 3)])
        s = validate_topology(m)
        assert s.boundary_edge_count == 4
        assert not s.watertight
        assert s.euler_characteristic == 1

    def test_non_manifold_fin(self):
        m = IndexedMesh.from_arrays([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1)],
                                    [(0, 1, 2), (1, 0, 3), (0, 1, 4)])
        assert validate_topology(m).non_manifold_edge_count == 1

    def test_inconsistent_orientation(self):
        m = tetra_mesh()
        t = m.triangles.copy()
        t[0] = t[0, ::-1]
        s = validate_topology(IndexedMesh.from_arrays(m.vertices, t))
        assert s.watertight
        assert s.inconsistent_edge_count == 3

    def test_degenerate_counts(self):
        m = IndexedMesh([(0, 0, 0), (1, 0, 0), (2, 0, 0)], [(0, 0, 0), (1, 0, 0), (0, 0, 0)], [(0, 1, 2)])
        s = validate_topology(m)
        assert s.degenerate_triangle_count == 1
        assert s.degenerate_normal_count == 2

    def test_empty(self):
        s = validate_topology(IndexedMesh.from_arrays(np.empty((0, 3)), np.empty((0, 3), int)))
        assert s.triangle_count == 0 and s.watertight

    def test_stats_dict(self):
        d = validate_topology(tetra_mesh()).as_dict()
        assert d["watertight"] is True and d["euler_characteristic"] == 2


class TestObj:
    def _sphere(self):
        g = generate_field(FieldSpec.sphere(5.3, (8.2, 7.9, 8.1)), GridDims.cube(17))
        return extract(g, 0.0, "mt6")

    def test_round_trip_exact(self, tmp_path):
        m = self._sphere()
        back = import_obj(export_obj(m, tmp_path / "m.obj"))
        npt.assert_array_equal(back.vertices, m.vertices)
        npt.assert_array_equal(back.normals, m.normals)
        npt.assert_array_equal(back.triangles, m.triangles)

    def test_byte_stable(self, tmp_path):
        m = self._sphere()
        a = export_obj(m, tmp_path / "a.obj").read_bytes()
        b = export_obj(self._sphere(), tmp_path / "b.obj").read_bytes()
        assert a == b

    def test_layout(self, tmp_path):
        text = export_obj(tetra_mesh(), tmp_path / "t.obj").read_text().splitlines()
        assert text[0].startswith("#")
        assert text[1] == "v 0.0 0.0 0.0"
        assert text[-1] == "f 2//2 3//3 4//4"
        assert sum(line.startswith("vn ") for line in text) == 4

    def test_import_polygon_fan(self, tmp_path):
        p = tmp_path / "q.obj"
        p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3 4/4/4\n")
        m = import_obj(p)
        npt.assert_array_equal(m.triangles, [(0, 1, 2), (0, 2, 3)])
        assert mesh_area(m) == 1.0

    def test_empty_mesh(self, tmp_path):
        m = IndexedMesh.from_arrays(np.empty((0, 3)), np.empty((0, 3), int))
        back = import_obj(export_obj(m, tmp_path / "e.obj"))
        assert back.is_empty() and back.n_vertices == 0


class TestPly:
    def test_round_trip_exact(self, tmp_path):
        m = TestObj()._sphere()
        back = import_ply(export_ply(m, tmp_path / "m.ply"))
        npt.assert_array_equal(back.vertices, m.vertices)
        npt.assert_array_equal(back.normals, m.normals)
        npt.assert_array_equal(back.triangles, m.triangles)

    def test_header_and_size(self, tmp_path):
        raw = export_ply(tetra_mesh(), tmp_path / "t.ply").read_bytes()
        header, body = raw.split(b"end_header\n", 1)
        assert b"format binary_little_endian 1.0" in header
        assert b"element vertex 4" in header and b"element face 4" in header
        assert len(body) == 4 * 6 * 8 + 4 * (1 + 3 * 4)

    def test_rejects_ascii(self, tmp_path):
        p = tmp_path / "a.ply"
        p.write_bytes(b"ply\nformat ascii 1.0\nelement vertex 0\nend_header\n")
        with pytest.raises(ValueError):
            import_ply(p)
