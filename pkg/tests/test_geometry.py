"""Analytic signed-distance providers and the shared geometry contract."""

import numpy as np
import pytest

from inrfem.geometry import Sphere, Annulus2D, Box, Gyroid
from inrfem.geometry.base import DomainTransform, ImplicitGeometry
from inrfem.errors import DegenerateGradient

RNG = np.random.default_rng(42)


class TestSphere:
    def test_signed_distance_values(self):
        s = Sphere(center=(0.0, 0.0, 0.0), radius=0.5)
        assert s.signed_distance([0.0, 0.0, 0.0]) == -0.5
        assert s.signed_distance([0.5, 0.0, 0.0]) == 0.0
        assert s.signed_distance([1.0, 0.0, 0.0]) == pytest.approx(0.5)

    def test_batch_matches_scalar(self):
        s = Sphere(center=(0.1, -0.2, 0.3), radius=0.4)
        pts = RNG.uniform(-1, 1, (50, 3))
        batch = s.signed_distance_batch(pts)
        scalar = np.array([s.signed_distance(p) for p in pts])
        np.testing.assert_allclose(batch, scalar, rtol=0, atol=1e-15)

    def test_gradient_is_unit_radial(self):
        s = Sphere(radius=0.5)
        g = s.gradient([0.3, 0.0, 0.0])
        np.testing.assert_allclose(g, [1.0, 0.0, 0.0])
        with pytest.raises(DegenerateGradient):
            s.gradient([0.0, 0.0, 0.0])

    def test_distance_vector_lands_on_surface(self):
        s = Sphere(radius=0.5)
        pts = RNG.uniform(-0.9, 0.9, (200, 3))
        pts = pts[np.linalg.norm(pts, axis=1) > 1e-3]
        for p in pts[:50]:
            d = s.distance_vector(p)
            assert abs(s.signed_distance(p + d)) < 1e-12

    def test_2d_disk(self):
        s = Sphere(center=(0.0, 0.0), radius=1.0)
        assert s.dim == 2
        assert s.signed_distance([0.0, 0.0]) == -1.0

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            Sphere(radius=0.0)

    def test_on_surface_counts_as_outside(self):
        s = Sphere(radius=0.5)
        assert not s.inside([0.5, 0.0, 0.0])
        assert s.inside([0.0, 0.0, 0.0])


class TestAnnulus:
    def test_sdf_branches(self):
        a = Annulus2D(center=(1.0, 1.0), r_inner=0.25, r_outer=1.0)
        # in the hole: distance to the inner circle
        assert a.signed_distance([1.0, 1.0]) == pytest.approx(0.25)
        # inside the material
        assert a.signed_distance([1.5, 1.0]) == pytest.approx(-0.25)
        # outside the outer circle
        assert a.signed_distance([2.5, 1.0]) == pytest.approx(0.5)

    def test_gradient_branches(self):
        a = Annulus2D(center=(0.0, 0.0), r_inner=0.25, r_outer=1.0)
        np.testing.assert_allclose(a.gradient([0.3, 0.0]), [-1.0, 0.0])
        np.testing.assert_allclose(a.gradient([0.9, 0.0]), [1.0, 0.0])

    def test_batch_matches_scalar(self):
        a = Annulus2D(center=(1.0, 1.0), r_inner=0.25, r_outer=1.0)
        pts = RNG.uniform(0, 2, (100, 2))
        batch = a.signed_distance_batch(pts)
        scalar = np.array([a.signed_distance(p) for p in pts])
        np.testing.assert_allclose(batch, scalar, atol=1e-15)

    def test_rejects_inverted_radii(self):
        with pytest.raises(ValueError):
            Annulus2D(r_inner=1.0, r_outer=0.5)


class TestBox:
    def test_inside_outside_values(self):
        b = Box([-1, -1, -1], [1, 1, 1])
        assert b.signed_distance([0, 0, 0]) == pytest.approx(-1.0)
        assert b.signed_distance([2, 0, 0]) == pytest.approx(1.0)
        # corner region: Euclidean distance to the corner
        assert b.signed_distance([2, 2, 2]) == pytest.approx(np.sqrt(3))

    def test_gradient_points_outward(self):
        b = Box([-1, -1, -1], [1, 1, 1])
        np.testing.assert_allclose(b.gradient([0.9, 0.0, 0.0]), [1, 0, 0])
        np.testing.assert_allclose(b.gradient([2.0, 0.0, 0.0]), [1, 0, 0])


class TestGyroid:
    def test_clipped_to_box(self):
        g = Gyroid(period=0.35)
        # far corner is outside the clip box no matter the level set
        assert g.signed_distance([0.95, 0.95, 0.95]) > 0

    def test_not_exact(self):
        assert Gyroid().exact is False

    def test_distance_like_near_surface(self):
        # the origin lies on the level set; stepping off it returns a value
        # close to the step length (first-order rescaling by the gradient)
        g = Gyroid(period=0.35)
        assert g.signed_distance([0.0, 0.0, 0.0]) == pytest.approx(0.0)
        step = 1e-3
        d = np.ones(3) / np.sqrt(3.0)
        f = g.signed_distance(step * d)
        assert f > 0
        assert f == pytest.approx(step, rel=0.05)


class TestBaseContract:
    def test_default_batch_loops_scalar(self):
        class Line(ImplicitGeometry):
            dim = 2

            def signed_distance(self, x):
                return float(x[0])

        geo = Line()
        pts = RNG.uniform(-1, 1, (10, 2))
        np.testing.assert_allclose(geo.signed_distance_batch(pts), pts[:, 0])
        np.testing.assert_array_equal(geo.inside_batch(pts), pts[:, 0] < 0)

    def test_default_clipped_is_exact(self):
        s = Sphere(radius=0.5)
        pts = RNG.uniform(-1, 1, (20, 3))
        np.testing.assert_array_equal(
            s.signed_distance_batch_clipped(pts, 0.01),
            s.signed_distance_batch(pts))

    def test_fd_gradient_close_to_analytic(self):
        class NoGrad(Sphere):
            def gradient(self, x):
                return self._fd_gradient(x)

        s = NoGrad(radius=0.5)
        p = np.array([0.3, 0.2, -0.1])
        g_fd = s.gradient(p)
        g_true = p / np.linalg.norm(p)
        np.testing.assert_allclose(g_fd, g_true, atol=1e-6)


class TestDomainTransform:
    def test_round_trip(self):
        tf = DomainTransform([1.0, 2.0, 3.0], 0.25)
        x = RNG.uniform(-5, 5, (20, 3))
        np.testing.assert_allclose(tf.to_raw(tf.to_canonical(x)), x,
                                   atol=1e-12)

    def test_identity(self):
        tf = DomainTransform.identity(3)
        assert tf.is_identity()
        x = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(tf.to_canonical(x), x)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError):
            DomainTransform([0, 0, 0], 0.0)
