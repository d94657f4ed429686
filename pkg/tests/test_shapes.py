import numpy as np
import pytest

from v2gen.mesh import bounding_box
from v2gen.shapes import (
    SHAPE_CLASSES,
    ShapeSpec,
    box,
    cone,
    cylinder,
    icosphere,
    make_shape,
    make_toy_dataset,
    torus,
)


class TestPrimitives:
    def test_box_triangle_count(self):
        assert box().num_triangles == 12

    def test_icosphere_counts(self):
        # 20 * 4^s faces
        assert icosphere(0).num_triangles == 20
        assert icosphere(3).num_triangles == 20 * 64

    def test_icosphere_vertices_on_sphere(self):
        mesh = icosphere(3, radius=0.2)
        radii = np.linalg.norm(mesh.vertices, axis=1)
        np.testing.assert_allclose(radii, 0.2, atol=1e-12)

    def test_icosphere_bbox_touches_axes(self):
        # subdivision creates vertices on all six axis directions
        box_ = bounding_box(icosphere(1, radius=0.2))
        np.testing.assert_allclose(box_.min, [-0.2] * 3, atol=1e-12)
        np.testing.assert_allclose(box_.max, [0.2] * 3, atol=1e-12)

    def test_cylinder_counts(self):
        assert cylinder(64).num_triangles == 4 * 64

    def test_cone_counts(self):
        assert cone(64).num_triangles == 2 * 64

    def test_torus_counts(self):
        assert torus(32, 16).num_triangles == 2 * 32 * 16


class TestMakeShape:
    def test_output_is_normalized(self):
        mesh = make_shape(ShapeSpec("cone", (1.2, 0.8, 1.0), 0.1, seed=0))
        box_ = bounding_box(mesh)
        assert box_.extent.max() == pytest.approx(0.4, abs=1e-9)
        np.testing.assert_allclose(box_.center, 0.0, atol=1e-9)

    def test_unknown_class(self):
        with pytest.raises(ValueError):
            make_shape(ShapeSpec("teapot", (1, 1, 1), 0.0, seed=0))


class TestMakeToyDataset:
    def test_counts_and_labels(self):
        dataset = make_toy_dataset(SHAPE_CLASSES, per_class=3, seed=7)
        assert len(dataset) == 15
        labels = [lab for _, lab in dataset]
        assert all(labels.count(c) == 3 for c in SHAPE_CLASSES)

    def test_deterministic(self):
        a = make_toy_dataset(["box", "torus"], 2, seed=123)
        b = make_toy_dataset(["box", "torus"], 2, seed=123)
        for (ma, la), (mb, lb) in zip(a, b):
            assert la == lb
            np.testing.assert_array_equal(ma.vertices, mb.vertices)

    def test_seed_changes_jitter(self):
        a = make_toy_dataset(["box"], 2, seed=1)
        b = make_toy_dataset(["box"], 2, seed=2)
        assert not np.array_equal(a[0][0].vertices, b[0][0].vertices)

    def test_per_class_minimum(self):
        with pytest.raises(ValueError):
            make_toy_dataset(["box"], per_class=1, seed=0)

    def test_empty_classes(self):
        with pytest.raises(ValueError):
            make_toy_dataset([], per_class=2, seed=0)

    def test_all_normalized(self):
        for mesh, _ in make_toy_dataset(SHAPE_CLASSES, 2, seed=5):
            assert bounding_box(mesh).extent.max() == pytest.approx(0.4, abs=1e-9)
