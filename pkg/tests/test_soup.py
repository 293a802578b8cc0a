"""Triangle-soup queries checked against their brute-force oracles."""

import numpy as np
import pytest

from inrfem.geometry.soup import (TriangleSoup, closest_point_on_triangles,
                                  cube_soup, icosphere, rescale_soup)
from inrfem.geometry.io import load_soup, save_obj
from inrfem.errors import DegenerateBounds, EmptySoup, FormatError

RNG = np.random.default_rng(7)


@pytest.fixture(scope="module")
def sphere_soup():
    return icosphere(subdivisions=3, radius=0.5)


class TestClosestPointOnTriangles:
    def test_interior_projection(self):
        a = np.array([0.0, 0.0, 0.0])
        b = np.array([1.0, 0.0, 0.0])
        c = np.array([0.0, 1.0, 0.0])
        p = np.array([0.25, 0.25, 1.0])
        cp = closest_point_on_triangles(p, a, b, c)
        np.testing.assert_allclose(cp, [0.25, 0.25, 0.0], atol=1e-15)

    def test_vertex_and_edge_regions(self):
        a = np.array([0.0, 0.0, 0.0])
        b = np.array([1.0, 0.0, 0.0])
        c = np.array([0.0, 1.0, 0.0])
        np.testing.assert_allclose(
            closest_point_on_triangles(np.array([-1.0, -1.0, 0.0]), a, b, c), a)
        np.testing.assert_allclose(
            closest_point_on_triangles(np.array([0.5, -1.0, 0.0]), a, b, c),
            [0.5, 0.0, 0.0])

    def test_matches_dense_sampling_oracle(self):
        # oracle: minimum over a dense barycentric sampling of the triangle
        tri = RNG.uniform(-1, 1, (3, 3))
        u = np.linspace(0, 1, 201)
        uu, vv = np.meshgrid(u, u)
        keep = uu + vv <= 1.0
        bary = np.stack([1 - uu[keep] - vv[keep], uu[keep], vv[keep]], axis=1)
        samples = bary @ tri
        for p in RNG.uniform(-2, 2, (20, 3)):
            cp = closest_point_on_triangles(p, tri[0], tri[1], tri[2])
            d_cp = np.linalg.norm(cp - p)
            d_dense = np.linalg.norm(samples - p, axis=1).min()
            assert d_cp <= d_dense + 1e-9


class TestConstruction:
    def test_rejects_empty(self):
        with pytest.raises(EmptySoup):
            TriangleSoup(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(IndexError):
            TriangleSoup(np.zeros((2, 3)), [[0, 1, 2]])

    def test_rejects_all_degenerate(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
        with pytest.raises(EmptySoup):
            TriangleSoup(v, [[0, 1, 2]])

    def test_rejects_nonfinite_vertices(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [0, np.nan, 0]])
        with pytest.raises(ValueError):
            TriangleSoup(v, [[0, 1, 2]])

    def test_degenerate_triangles_excluded_from_queries(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0],
                      [2, 2, 2], [3, 3, 3], [4, 4, 4]], dtype=float)
        soup = TriangleSoup(v, [[0, 1, 2], [3, 4, 5]])
        d, cp, tri = soup.closest_point([2.0, 2.0, 2.0])
        assert tri == 0  # the degenerate one never wins


class TestClosestPointPaths:
    """BVH, KD-prefilter and brute paths must agree exactly."""

    def test_bvh_matches_brute_scalar(self, sphere_soup):
        for p in RNG.uniform(-1, 1, (50, 3)):
            d_fast, cp_fast, _ = sphere_soup.closest_point(p)
            d_brute, cp_brute, _ = sphere_soup.closest_point_brute(p)
            assert d_fast == pytest.approx(d_brute, abs=1e-14)
            np.testing.assert_allclose(cp_fast, cp_brute, atol=1e-12)

    def test_batch_matches_brute_batch(self, sphere_soup):
        pts = RNG.uniform(-1, 1, (500, 3))
        d_fast, cp_fast, _ = sphere_soup.closest_point_batch(pts)
        d_brute, cp_brute, _ = sphere_soup.closest_point_batch_brute(pts)
        np.testing.assert_allclose(d_fast, d_brute, atol=1e-14)
        np.testing.assert_allclose(cp_fast, cp_brute, atol=1e-12)

    def test_distance_matches_sphere_radius(self, sphere_soup):
        # icosphere vertices lie exactly on the sphere of radius 0.5
        pts = RNG.uniform(-0.2, 0.2, (100, 3))
        d, _, _ = sphere_soup.closest_point_batch(pts)
        r = np.linalg.norm(pts, axis=1)
        # faceting makes the soup slightly inside the sphere
        assert np.all(np.abs(d - (0.5 - r)) < 0.003)

    def test_triangle_visit_counter_increases(self, sphere_soup):
        before = sphere_soup.triangle_visits
        sphere_soup.closest_point_batch(RNG.uniform(-1, 1, (10, 3)))
        assert sphere_soup.triangle_visits > before


class TestSign:
    def test_parity_matches_radius_oracle(self, sphere_soup):
        pts = RNG.uniform(-1, 1, (2000, 3))
        r = np.linalg.norm(pts, axis=1)
        # stay away from the faceted shell where the two surfaces differ
        clear = np.abs(r - 0.5) > 0.01
        inside = sphere_soup.inside_batch(pts[clear])
        np.testing.assert_array_equal(inside, r[clear] < 0.5)

    def test_signed_distance_sign_and_magnitude(self, sphere_soup):
        pts = RNG.uniform(-1, 1, (500, 3))
        s = sphere_soup.signed_distance_batch(pts)
        d, _, _ = sphere_soup.closest_point_batch(pts)
        np.testing.assert_allclose(np.abs(s), d, atol=1e-14)

    def test_on_surface_vertex_is_outside(self, sphere_soup):
        # octree corners do land exactly on icosphere vertices
        v = sphere_soup.vertices[0]
        assert sphere_soup.signed_distance(v) >= 0.0

    def test_cube_interior(self):
        soup = cube_soup(-0.5, 0.5)
        assert soup.signed_distance([0.0, 0.0, 0.0]) == pytest.approx(-0.5)
        assert soup.signed_distance([1.0, 0.0, 0.0]) == pytest.approx(0.5)

    def test_with_point_batch_consistent(self, sphere_soup):
        pts = RNG.uniform(-1, 1, (200, 3))
        s, cp = sphere_soup.signed_distance_with_point_batch(pts)
        np.testing.assert_allclose(np.abs(s),
                                   np.linalg.norm(cp - pts, axis=1),
                                   atol=1e-12)


class TestClippedDistance:
    def test_exact_inside_clip_band(self, sphere_soup):
        pts = RNG.uniform(-1, 1, (1000, 3))
        s_exact = sphere_soup.signed_distance_batch(pts)
        for clip in (0.05, 0.3):
            s_clip = sphere_soup.signed_distance_batch_clipped(pts, clip)
            near = np.abs(s_exact) <= clip
            np.testing.assert_array_equal(s_clip[near], s_exact[near])
            far = ~near
            # far values: same sign, magnitude between clip and the truth
            assert np.all(np.sign(s_clip[far]) == np.sign(s_exact[far]))
            assert np.all(np.abs(s_clip[far]) >= clip - 1e-12)
            assert np.all(np.abs(s_clip[far]) <= np.abs(s_exact[far]) + 1e-12)

    def test_empty_input(self, sphere_soup):
        assert sphere_soup.signed_distance_batch_clipped(
            np.zeros((0, 3)), 0.1).shape == (0,)


class TestDistanceVector:
    def test_lands_on_surface(self, sphere_soup):
        pts = RNG.uniform(-0.8, 0.8, (300, 3))
        dv = sphere_soup.distance_vector_batch(pts)
        d, cp, _ = sphere_soup.closest_point_batch(pts)
        np.testing.assert_allclose(pts + dv, cp, atol=1e-14)
        np.testing.assert_allclose(np.linalg.norm(dv, axis=1), d, atol=1e-14)

    def test_scalar_matches_batch(self, sphere_soup):
        p = np.array([0.3, 0.1, -0.2])
        np.testing.assert_allclose(sphere_soup.distance_vector(p),
                                   sphere_soup.distance_vector_batch(p[None])[0],
                                   atol=1e-14)


class TestRescale:
    def test_fits_canonical_cube(self):
        soup = icosphere(subdivisions=1, radius=3.0, center=(10.0, -5.0, 2.0))
        scaled, tf = rescale_soup(soup, margin=0.15)
        lo, hi = scaled.bounds()
        assert np.all(lo >= -0.85 - 1e-12)
        assert np.all(hi <= 0.85 + 1e-12)
        # transform round trip recovers raw coordinates
        np.testing.assert_allclose(tf.to_raw(scaled.vertices), soup.vertices,
                                   atol=1e-9)

    def test_rejects_flat_soup(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        flat = TriangleSoup(v, [[0, 1, 2]])
        with pytest.raises(DegenerateBounds):
            rescale_soup(flat)

    def test_rejects_bad_margin(self):
        soup = icosphere(subdivisions=1)
        with pytest.raises(ValueError):
            rescale_soup(soup, margin=0.7)


class TestIcosphere:
    def test_counts(self):
        assert len(icosphere(subdivisions=0).triangles) == 20
        assert len(icosphere(subdivisions=3).triangles) == 1280
        assert len(icosphere(subdivisions=4).triangles) == 5120

    def test_vertices_on_sphere(self):
        soup = icosphere(subdivisions=2, radius=0.5, center=(0.1, 0.2, 0.3))
        r = np.linalg.norm(soup.vertices - [0.1, 0.2, 0.3], axis=1)
        np.testing.assert_allclose(r, 0.5, atol=1e-12)


class TestMeshIo:
    def test_obj_round_trip(self, tmp_path):
        soup = icosphere(subdivisions=1, radius=0.5)
        path = tmp_path / "mesh.obj"
        save_obj(soup, path)
        back = load_soup(path)
        np.testing.assert_allclose(back.vertices, soup.vertices, atol=1e-15)
        np.testing.assert_array_equal(back.triangles, soup.triangles)

    def test_obj_polygon_fan_and_negative_indices(self, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
            "f 1 2 3 4\n"
            "f -4 -3 -2\n")
        soup = load_soup(path)
        assert len(soup.triangles) == 3
        np.testing.assert_array_equal(soup.triangles[0], [0, 1, 2])
        np.testing.assert_array_equal(soup.triangles[2], [0, 1, 2])

    def test_obj_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.obj"
        path.write_text("v 0 0\n")
        with pytest.raises(FormatError):
            load_soup(path)

    def test_ascii_stl(self, tmp_path):
        path = tmp_path / "tri.stl"
        path.write_text(
            "solid t\n facet normal 0 0 1\n  outer loop\n"
            "   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n"
            "  endloop\n endfacet\nendsolid t\n")
        soup = load_soup(path)
        assert len(soup.triangles) == 1
        assert len(soup.vertices) == 3

    def test_binary_stl_round_trip(self, tmp_path):
        import struct
        soup = icosphere(subdivisions=0, radius=1.0)
        tris = soup.vertices[soup.triangles].astype("<f4")
        path = tmp_path / "bin.stl"
        with open(path, "wb") as fh:
            fh.write(b"\0" * 80)
            fh.write(struct.pack("<I", len(tris)))
            for t in tris:
                fh.write(np.zeros(3, dtype="<f4").tobytes())
                fh.write(t.tobytes())
                fh.write(b"\0\0")
        back = load_soup(path)
        assert len(back.triangles) == 20
        # vertices dedup to the icosahedron's 12, at float32 precision
        assert len(back.vertices) == 12

    def test_unknown_extension(self, tmp_path):
        with pytest.raises(FormatError):
            load_soup(tmp_path / "mesh.ply")
