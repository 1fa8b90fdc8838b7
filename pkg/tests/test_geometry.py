import numpy as np
import pytest

from oracles import brute_inside
from scene_nav.errors import EmptyGeometryError
from scene_nav.fixtures import box_mesh, icosphere
from scene_nav.geometry import (
    CropVolume,
    PointCloud,
    TriMesh,
    crop_volume_for_object,
    parity_inside,
    require_nonempty,
    volumetric_sample,
    voxel_centers,
)


class TestTypes:
    def test_pointcloud_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            PointCloud([[0.0, np.nan, 0.0]])

    def test_pointcloud_may_be_empty(self):
        assert len(PointCloud(np.zeros((0, 3)))) == 0

    def test_trimesh_drops_degenerate_faces(self):
        verts = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
        mesh = TriMesh(verts, [[0, 1, 2], [0, 1, 1], [2, 2, 2]])
        assert mesh.faces.shape == (1, 3)

    def test_trimesh_index_range(self):
        with pytest.raises(ValueError):
            TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 3]])

    def test_crop_volume_requires_positive_extent(self):
        with pytest.raises(ValueError):
            CropVolume([0, 0, 0], [1, 0, 1])

    def test_watertight(self):
        assert box_mesh((0, 0, 0), (1, 1, 1)).is_watertight()
        open_mesh = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        assert not open_mesh.is_watertight()


class TestCropVolume:
    def test_paper_box_bounds(self):
        v = crop_volume_for_object((1.0, 2.0, 0.5))
        assert np.allclose(v.vmin, [0.2, 1.2, 0.2])
        assert np.allclose(v.vmax, [1.8, 2.8, 1.8])

    def test_symmetric_about_origin(self):
        v = crop_volume_for_object((0, 0, 0))
        assert np.allclose(v.vmin[:2], [-0.8, -0.8])
        assert np.allclose(v.vmax[:2], [0.8, 0.8])

    def test_translation_additivity(self):
        v = crop_volume_for_object((-0.8, 0, 0))
        assert np.isclose(v.vmin[0], -1.6)
        assert np.isclose(v.vmax[0], 0.0)

    def test_z_band_independent_of_object_height(self):
        for z in (-5.0, 0.0, 10.0):
            v = crop_volume_for_object((0, 0, z))
            assert v.vmin[2] == 0.2 and v.vmax[2] == 1.8

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            crop_volume_for_object((np.inf, 0, 0))


class TestParityInside:
    def test_box(self):
        mesh = box_mesh((0, 0, 0), (2, 2, 2))
        pts = np.array([[0, 0, 0], [0.9, 0.9, 0.9], [1.1, 0, 0], [5, 5, 5]])
        inside = parity_inside(pts, mesh.triangles)
        assert list(inside) == [True, True, False, False]

    def test_matches_reference_on_sphere(self, unit_icosphere, rng):
        tris = unit_icosphere.triangles
        pts = rng.uniform(-1.5, 1.5, size=(60, 3))
        got = parity_inside(pts, tris)
        want = [brute_inside(p, tris) for p in pts]
        assert list(got) == want


class TestVolumetricSample:
    def test_empty_intersection(self):
        mesh = box_mesh((10, 10, 10), (1, 1, 1))
        vol = CropVolume([0, 0, 0], [1, 1, 1])
        res = volumetric_sample(mesh, vol, 0.25)
        assert len(res.cloud) == 0

    def test_cube_center_included(self):
        mesh = box_mesh((0.5, 0.5, 0.5), (1, 1, 1))
        vol = CropVolume([0, 0, 0], [1, 1, 1])
        res = volumetric_sample(mesh, vol, 0.5)
        assert not res.interior_skipped
        d = np.linalg.norm(res.cloud.points - [0.5, 0.5, 0.5], axis=1)
        assert d.min() < 1e-9

    def test_interior_count_matches_brute_force(self):
        mesh = box_mesh((0.5, 0.5, 0.5), (1, 1, 1))
        vol = CropVolume([0, 0, 0], [1, 1, 1])
        edge = 0.25
        res = volumetric_sample(mesh, vol, edge)
        centers = voxel_centers(vol, edge)
        tris = mesh.triangles
        expected = sum(1 for c in centers if brute_inside(c, tris))
        assert expected == 27  # 3 strictly interior lattice planes per axis
        # interior points are exactly the voxel centers inside the cube
        pts = res.cloud.points
        on_center = np.zeros(len(pts), dtype=bool)
        for c in centers:
            on_center |= np.all(np.abs(pts - c) < 1e-12, axis=1)
        assert on_center.sum() == expected

    def test_open_mesh_skips_interior(self):
        open_mesh = TriMesh(
            [[0, 0, 0.5], [1, 0, 0.5], [0, 1, 0.5]], [[0, 1, 2]]
        )
        vol = CropVolume([0, 0, 0], [1, 1, 1])
        res = volumetric_sample(open_mesh, vol, 0.25)
        assert res.interior_skipped

    def test_output_subset_of_volume(self, rng):
        mesh = icosphere(2, radius=0.6).transformed(translation=[0.5, 0.5, 0.5])
        vol = CropVolume([0.2, 0.2, 0.2], [0.9, 0.9, 0.9])
        res = volumetric_sample(mesh, vol, 0.1, seed=7)
        assert np.all(vol.contains(res.cloud.points))

    def test_deterministic(self):
        mesh = box_mesh((0.5, 0.5, 0.5), (1, 1, 1))
        vol = CropVolume([0, 0, 0], [1, 1, 1])
        a = volumetric_sample(mesh, vol, 0.2, seed=3).cloud.points
        b = volumetric_sample(mesh, vol, 0.2, seed=3).cloud.points
        assert np.array_equal(a, b)


def test_require_nonempty():
    with pytest.raises(EmptyGeometryError):
        require_nonempty(PointCloud(np.zeros((0, 3))))
