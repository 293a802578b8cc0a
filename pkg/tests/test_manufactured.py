"""Manufactured displacement fields, body forces and stresses."""

import numpy as np
import pytest

from inrfem.errors import UnknownCase, InvalidMaterial
from inrfem.fem import Material, get_case, displacement, \
    body_force_from_manufactured
from inrfem.fem.manufactured import (PATCH_A_3D, PATCH_B_3D, case_names,
                                     make_linear_case,
                                     displacement_gradient_exprs,
                                     stress_from_manufactured)
from inrfem.fem.material import lame_from_material

RNG = np.random.default_rng(3)


class TestMaterial:
    def test_lame_values(self):
        lam, mu = lame_from_material(1.0, 0.25)
        assert lam == pytest.approx(0.4)
        assert mu == pytest.approx(0.4)

    def test_from_lame_round_trip(self):
        m = Material.from_lame(1.0, 0.5)
        lam, mu = m.lame
        assert lam == pytest.approx(1.0)
        assert mu == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(InvalidMaterial):
            lame_from_material(-1.0, 0.3)
        with pytest.raises(InvalidMaterial):
            lame_from_material(1.0, 0.5)
        with pytest.raises(InvalidMaterial):
            lame_from_material(1.0, 0.3, mode="plane_stress")


class TestRegistry:
    def test_known_cases(self):
        assert {"linear-patch", "linear-patch-2d", "ring2d", "icosphere",
                "bunny", "eiffel", "gyroid"} <= set(case_names())

    def test_unknown_raises(self):
        with pytest.raises(UnknownCase):
            get_case("torus")

    def test_case_dims(self):
        assert get_case("ring2d").dim == 2
        assert get_case("icosphere").dim == 3


class TestDisplacement:
    def test_linear_patch_values(self):
        x = RNG.uniform(-1, 1, (20, 3))
        got = displacement("linear-patch", x)
        np.testing.assert_allclose(got, x @ PATCH_A_3D.T + PATCH_B_3D,
                                   atol=1e-12)

    def test_ring_radial_profile(self):
        # u = -r log r / (2 log 2) r_hat around (1, 1); at r = 0.5 the
        # magnitude is -0.5 log 0.5 / (2 log 2) = 0.25
        x = np.array([[1.5, 1.0]])
        u = displacement("ring2d", x)[0]
        np.testing.assert_allclose(u, [0.25, 0.0], atol=1e-12)
        # zero at the outer radius r = 1
        u1 = displacement("ring2d", np.array([[2.0, 1.0]]))[0]
        np.testing.assert_allclose(u1, 0.0, atol=1e-12)

    def test_icosphere_amplitude(self):
        x = np.array([[0.5, 0.5, 0.5]])
        u = displacement("icosphere", x)[0]
        s, c = np.sin(np.pi / 2), np.cos(np.pi / 2)
        np.testing.assert_allclose(
            u, [s * s * s / 10, c * c * s / 10, c * s * c / 10], atol=1e-12)

    def test_single_point_shape(self):
        u = displacement("linear-patch", np.array([0.1, 0.2, 0.3]))
        assert u.shape == (1, 3)

    def test_gradient_exprs_shape(self):
        g = displacement_gradient_exprs("ring2d")
        assert len(g) == 2 and len(g[0]) == 2


class TestBodyForce:
    def test_callable_when_x_omitted(self):
        fn = body_force_from_manufactured("icosphere")
        x = RNG.uniform(-0.4, 0.4, (5, 3))
        np.testing.assert_allclose(
            fn(x), body_force_from_manufactured("icosphere", x=x))

    def test_icosphere_closed_form(self):
        # u_x = sin(pi x) sin(pi y) sin(pi z)/10 and friends admit a short
        # closed form for -div(sigma); spot-check one component at a point
        case = get_case("icosphere")
        lam, mu = case.material.lame
        x = np.array([[0.2, -0.1, 0.3]])
        f = body_force_from_manufactured(case, x=x)[0]
        # independent evaluation via high-order numerical differentiation
        from oracles import fd_divergence_of_stress
        want = fd_divergence_of_stress(lambda p: displacement(case, p),
                                       lam, mu, x, h=1e-5)[0]
        np.testing.assert_allclose(f, want, atol=2e-5)


class TestStressOracle:
    def test_linear_patch_constant_stress(self):
        case = get_case("linear-patch")
        lam, mu = case.material.lame
        sig_fn = stress_from_manufactured(case)
        x = RNG.uniform(-1, 1, (6, 3))
        sig = sig_fn(x)
        eps = 0.5 * (PATCH_A_3D + PATCH_A_3D.T)
        want = lam * np.trace(eps) * np.eye(3) + 2 * mu * eps
        for k in range(len(x)):
            np.testing.assert_allclose(sig[k], want, atol=1e-12)


class TestCustomCase:
    def test_make_linear_case(self):
        A = np.array([[0.1, 0.0], [0.2, -0.3]])
        b = np.array([1.0, -2.0])
        case = make_linear_case(A, b)
        x = RNG.uniform(-1, 1, (8, 2))
        np.testing.assert_allclose(displacement(case, x), x @ A.T + b,
                                   atol=1e-12)
        np.testing.assert_allclose(
            body_force_from_manufactured(case, x=x), 0.0, atol=1e-12)
