"""Grids, analytic fields, noise and raw volume I/O."""

import json
import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isotet.volume import (
    FieldFitError,
    FieldKind,
    FieldSpec,
    GridDims,
    NoiseSpec,
    ScalarGrid,
    SizeMismatchError,
    UndefinedDistanceError,
    UnknownDtypeError,
    VolumeFormatError,
    add_noise,
    analytic_area,
    analytic_volume,
    generate_field,
    grid_points,
    load_raw,
    object_distance,
    save_raw,
)

CENTER = (31.5, 31.5, 31.5)
coord = st.floats(-40, 40, allow_nan=False)
point = st.tuples(coord, coord, coord).map(lambda p: np.array(p) + CENTER)


def _inside_fraction(spec, lo, hi, n, chunk=32):
    """Midpoint-rule volume of ``{field < 0}`` over the box ``[lo, hi]^3``."""
    h = (hi - lo) / n
    axis = lo + h * (np.arange(n) + 0.5)
    yy, zz = np.meshgrid(axis, axis, indexing="ij")
    count = 0
    for i0 in range(0, n, chunk):
        xs = axis[i0:i0 + chunk]
        pts = np.stack(np.broadcast_arrays(xs[:, None, None], yy[None], zz[None]), axis=-1)
        count += int(np.count_nonzero(object_distance(spec, pts) < 0))
    return count * h ** 3


class TestGridDims:
    def test_cube_and_shape(self):
        d = GridDims.cube(64)
        assert d.shape == (64, 64, 64)
        assert d.cells == (63, 63, 63)
        assert d.size == 64 ** 3
        assert d.center == CENTER

    @pytest.mark.parametrize("dims", [(1, 4, 4), (4, 0, 4), (4, 4, -2)])
    def test_rejects_degenerate(self, dims):
        with pytest.raises(ValueError):
            GridDims(*dims)


class TestScalarGrid:
    def test_flat_order_is_x_fastest(self):
        dims = GridDims(3, 4, 5)
        flat = np.arange(dims.size, dtype=float)
        g = ScalarGrid.from_flat(flat, dims)
        assert g.data[1, 0, 0] == 1
        assert g.data[0, 1, 0] == 3
        assert g.data[0, 0, 1] == 12
        npt.assert_array_equal(g.samples, flat)

    def test_read_only(self):
        g = ScalarGrid(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            g.data[0, 0, 0] = 1.0

    def test_grid_points(self):
        p = grid_points(GridDims(2, 3, 4))
        npt.assert_array_equal(p[1, 2, 3], [1, 2, 3])


class TestFieldSpec:
    def test_missing_and_unknown_params(self):
        with pytest.raises(ValueError, match="missing"):
            FieldSpec(FieldKind.CUBE, CENTER, {"a": 1.0})
        with pytest.raises(ValueError, match="unknown"):
            FieldSpec(FieldKind.SPHERE, CENTER, {"r": 1.0, "q": 2.0})

    def test_nonpositive_params(self):
        with pytest.raises(ValueError):
            FieldSpec.sphere(0.0, CENTER)

    def test_csph_sphere_defaults_to_cube_corner(self):
        s = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, CENTER, {"a": 42, "b": 40, "c": 38, "r": 25})
        assert (s.params["sx"], s.params["sy"], s.params["sz"]) == (-21.0, -20.0, -19.0)

    def test_dict_round_trip(self):
        s = FieldSpec.torus(20, 5, CENTER)
        assert FieldSpec.from_dict(json.loads(json.dumps(s.to_dict()))) == s

    def test_fit(self):
        FieldSpec.cube(42, CENTER).check_fit(GridDims.cube(64))
        with pytest.raises(FieldFitError):
            FieldSpec.cube(200, CENTER).check_fit(GridDims.cube(64))
        # margin is two cells on each side
        FieldSpec.sphere(29.5, CENTER).check_fit(GridDims.cube(64))
        with pytest.raises(FieldFitError):
            FieldSpec.sphere(29.6, CENTER).check_fit(GridDims.cube(64))

    def test_sombrero_only_needs_centre_inside(self):
        spec = FieldSpec(FieldKind.SOMBRERO, CENTER, {"a": 12, "b": 0.25, "c": 3})
        spec.check_fit(GridDims.cube(64))
        with pytest.raises(FieldFitError):
            FieldSpec(FieldKind.SOMBRERO, (70, 0, 0), {"a": 12, "b": 0.25, "c": 3}).check_fit(GridDims.cube(64))


class TestDistances:
    def test_sphere_known_points(self):
        s = FieldSpec.sphere(25, CENTER)
        npt.assert_allclose(object_distance(s, CENTER), -25)
        npt.assert_allclose(object_distance(s, (56.5, 31.5, 31.5)), 0, atol=1e-12)
        npt.assert_allclose(object_distance(s, (31.5, 31.5, 61.5)), 5)

    def test_cube_known_points(self):
        s = FieldSpec.cube(42, CENTER)
        npt.assert_allclose(object_distance(s, CENTER), -21)
        npt.assert_allclose(object_distance(s, (31.5 + 24, 31.5, 31.5)), 3)
        # outside a corner: Euclidean distance to the corner
        npt.assert_allclose(object_distance(s, np.add(CENTER, (24, 25, 21))), 5)

    def test_torus_known_points(self):
        s = FieldSpec.torus(20, 5, CENTER)
        npt.assert_allclose(object_distance(s, np.add(CENTER, (20, 0, 0))), -5)
        npt.assert_allclose(object_distance(s, np.add(CENTER, (0, 20, 7))), 2)
        npt.assert_allclose(object_distance(s, CENTER), 15)

    def test_csph_carves_corner(self):
        s = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, CENTER, {"a": 42, "b": 42, "c": 42, "r": 25})
        corner = np.subtract(CENTER, 21)
        assert object_distance(s, corner + 1) > 0
        npt.assert_allclose(object_distance(s, corner + 30 / math.sqrt(3)), -5, rtol=1e-12)
        # from the cube centre the carved sphere is nearer than any face
        npt.assert_allclose(object_distance(s, CENTER), 25 - 21 * math.sqrt(3))

    def test_sombrero_first_order(self):
        s = FieldSpec(FieldKind.SOMBRERO, CENTER, {"a": 12, "b": 0.25, "c": 3})
        # on the surface at rho = 0 the height is a / c
        npt.assert_allclose(object_distance(s, np.add(CENTER, (0, 4, 0))), 0, atol=1e-12)
        npt.assert_allclose(object_distance(s, np.add(CENTER, (0, 5, 0))), 1)

    def test_sombrero_vanishing_gradient_raises(self):
        # the gradient is never zero for this family since dF/dy = 1
        s = FieldSpec(FieldKind.SOMBRERO, CENTER, {"a": 12, "b": 0.25, "c": 3})
        assert np.isfinite(object_distance(s, CENTER))
        assert issubclass(UndefinedDistanceError, ArithmeticError)

    @given(point)
    def test_sphere_matches_definition(self, p):
        s = FieldSpec.sphere(17, CENTER)
        npt.assert_allclose(object_distance(s, p), np.linalg.norm(p - CENTER) - 17, atol=1e-12)

    @settings(max_examples=200)
    @given(point, point)
    @pytest.mark.parametrize("spec", [
        FieldSpec.sphere(20, CENTER),
        FieldSpec.cube(30, CENTER, 20, 10),
        FieldSpec.torus(15, 4, CENTER),
    ])
    def test_exact_distances_are_1_lipschitz(self, spec, p, q):
        assert abs(object_distance(spec, p) - object_distance(spec, q)) <= np.linalg.norm(p - q) + 1e-9

    @given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
    def test_torus_surface_points(self, u, v):
        s = FieldSpec.torus(20, 5, CENTER)
        p = np.add(CENTER, ((20 + 5 * math.cos(v)) * math.cos(u), (20 + 5 * math.cos(v)) * math.sin(u),
                            5 * math.sin(v)))
        npt.assert_allclose(object_distance(s, p), 0, atol=1e-12)


class TestGenerateField:
    def test_matches_object_distance_at_samples(self):
        dims = GridDims.cube(24)
        for spec in (FieldSpec.sphere(8, dims.center), FieldSpec.cube(12, dims.center),
                     FieldSpec.torus(6, 2, dims.center)):
            g = generate_field(spec, dims)
            npt.assert_allclose(g.data, object_distance(spec, grid_points(dims)), rtol=0, atol=0)

    def test_default_sphere_grid(self):
        g = generate_field(FieldSpec.sphere(25, CENTER), GridDims.cube(64))
        assert g.data.shape == (64, 64, 64)
        assert g.data.dtype == np.float64
        npt.assert_allclose(g.data[0, 0, 0], math.sqrt(3) * 31.5 - 25)

    def test_fit_error(self):
        with pytest.raises(FieldFitError):
            generate_field(FieldSpec.cube(200, CENTER), GridDims.cube(64))


class TestNoise:
    def test_deterministic_and_bounded(self):
        g = generate_field(FieldSpec.sphere(10, (15.5,) * 3), GridDims.cube(32))
        a = add_noise(g, NoiseSpec(10, seed=3), 10)
        b = add_noise(g, NoiseSpec(10, seed=3), 10)
        c = add_noise(g, NoiseSpec(10, seed=4), 10)
        npt.assert_array_equal(a.data, b.data)
        assert not np.array_equal(a.data, c.data)
        delta = a.data - g.data
        assert np.abs(delta).max() <= 1.0
        assert np.abs(delta).max() > 0.9

    def test_zero_amplitude_is_identity(self):
        g = generate_field(FieldSpec.sphere(10, (15.5,) * 3), GridDims.cube(32))
        npt.assert_array_equal(add_noise(g, NoiseSpec(0, 1), 10).data, g.data)

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(-1)


class TestRawIO:
    @pytest.mark.parametrize("dtype,endian", [("f32", "le"), ("f32", "be"), ("f64", "le"), ("u8", "le"),
                                              ("u16", "be")])
    def test_round_trip(self, tmp_path, dtype, endian, rng):
        dims = GridDims(5, 6, 7)
        data = rng.integers(0, 200, size=dims.shape).astype(float)
        if dtype.startswith("f"):
            data += 0.25
        g = ScalarGrid(data)
        desc = save_raw(g, tmp_path / "vol", dtype=dtype, endian=endian)
        back = load_raw(desc)
        npt.assert_array_equal(back.data, g.data)

    def test_x_fastest_payload(self, tmp_path):
        dims = GridDims(2, 3, 4)
        desc = tmp_path / "v.json"
        desc.write_text(json.dumps({"nx": 2, "ny": 3, "nz": 4, "dtype": "u8", "endian": "le"}))
        (tmp_path / "v.raw").write_bytes(bytes(range(dims.size)))
        g = load_raw(desc)
        assert g.data[1, 0, 0] == 1 and g.data[0, 1, 0] == 2 and g.data[0, 0, 1] == 6

    def test_size_mismatch(self, tmp_path):
        desc = tmp_path / "v.json"
        desc.write_text(json.dumps({"nx": 4, "ny": 4, "nz": 4, "dtype": "u16", "endian": "le"}))
        (tmp_path / "v.raw").write_bytes(b"\0" * 100)
        with pytest.raises(SizeMismatchError):
            load_raw(desc)

    def test_unknown_dtype(self, tmp_path):
        desc = tmp_path / "v.json"
        desc.write_text(json.dumps({"nx": 2, "ny": 2, "nz": 2, "dtype": "i7"}))
        with pytest.raises(UnknownDtypeError):
            load_raw(desc)

    def test_missing_files(self, tmp_path):
        with pytest.raises(VolumeFormatError):
            load_raw(tmp_path / "nope.json")
        desc = tmp_path / "v.json"
        desc.write_text(json.dumps({"nx": 2, "ny": 2, "nz": 2, "dtype": "u8"}))
        with pytest.raises(VolumeFormatError):
            load_raw(desc)

    def test_bad_descriptor(self, tmp_path):
        desc = tmp_path / "v.json"
        desc.write_text("{not json")
        with pytest.raises(VolumeFormatError):
            load_raw(desc)
        desc.write_text(json.dumps({"nx": 2, "dtype": "u8"}))
        with pytest.raises(VolumeFormatError):
            load_raw(desc)

    def test_unrepresentable_integer_samples(self, tmp_path):
        with pytest.raises(VolumeFormatError):
            save_raw(ScalarGrid(np.full((2, 2, 2), -1.0)), tmp_path / "v", dtype="u8")


class TestAnalyticMeasures:
    def test_closed_forms(self):
        npt.assert_allclose(analytic_area(FieldSpec.sphere(25, CENTER)), 4 * math.pi * 625)
        npt.assert_allclose(analytic_volume(FieldSpec.sphere(25, CENTER)), 4 / 3 * math.pi * 25 ** 3)
        npt.assert_allclose(analytic_area(FieldSpec.cube(42, CENTER)), 6 * 42 ** 2)
        npt.assert_allclose(analytic_volume(FieldSpec.torus(20, 5, CENTER)), 2 * math.pi ** 2 * 20 * 25)
        assert analytic_area(FieldSpec.torus(20, 42, CENTER)) is None
        assert analytic_volume(FieldSpec(FieldKind.SOMBRERO, CENTER, {"a": 12, "b": 0.25, "c": 3})) is None

    def test_csph_volume_voxel_oracle(self):
        spec = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, CENTER, {"a": 42, "b": 42, "c": 42, "r": 25})
        measured = _inside_fraction(spec, 31.5 - 21, 31.5 + 21, 320)
        npt.assert_allclose(analytic_volume(spec), measured, rtol=1e-3)

    def test_torus_volume_voxel_oracle(self):
        spec = FieldSpec.torus(20, 5, CENTER)
        measured = _inside_fraction(spec, 31.5 - 26, 31.5 + 26, 320)
        npt.assert_allclose(analytic_volume(spec), measured, rtol=2e-3)

    def test_csph_area_fine_mesh_oracle(self):
        measure = pytest.importorskip("skimage.measure")
        scale = 4
        n = 42 * scale + 8
        c = (n - 1) / 2
        spec = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, (c, c, c),
                         {"a": 42 * scale, "b": 42 * scale, "c": 42 * scale, "r": 25 * scale})
        field = generate_field(spec, GridDims.cube(n)).data
        verts, faces, _, _ = measure.marching_cubes(field, 0.0)
        area = measure.mesh_surface_area(verts, faces) / scale ** 2
        spec1 = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, CENTER, {"a": 42, "b": 42, "c": 42, "r": 25})
        npt.assert_allclose(analytic_area(spec1), area, rtol=5e-3)

    def test_csph_off_corner_has_no_closed_form(self):
        spec = FieldSpec(FieldKind.CUBE_MINUS_SPHERE, CENTER,
                         {"a": 42, "b": 42, "c": 42, "r": 10, "sx": 0, "sy": 0, "sz": 0})
        assert analytic_area(spec) is None and analytic_volume(spec) is None
