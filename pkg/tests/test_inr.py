"""Neural implicit model: file round trip, forward pass, gradient cache."""

import base64
import json

import numpy as np
import pytest

from inrfem.geometry.base import DomainTransform
from inrfem.inr.cache import GradientCache
from inrfem.inr.model import InrModel, MlpLayer, load_inrw, save_inrw
from inrfem.errors import DimensionMismatch, FormatError

RNG = np.random.default_rng(11)


def tiny_model(sign="negative_inside", transform=None, skip=False):
    """2-layer model small enough to evaluate by hand."""
    if skip:
        layers = [
            MlpLayer(RNG.normal(size=(4, 3)), RNG.normal(size=4)),
            MlpLayer(RNG.normal(size=(4, 7)), RNG.normal(size=4),
                     skip_input=True),
            MlpLayer(RNG.normal(size=(1, 4)), RNG.normal(size=1)),
        ]
    else:
        layers = [
            MlpLayer(RNG.normal(size=(4, 3)), RNG.normal(size=4)),
            MlpLayer(RNG.normal(size=(1, 4)), RNG.normal(size=1)),
        ]
    return InrModel(layers, in_dim=3, activation="softplus", beta=100.0,
                    sign_convention=sign, transform=transform)


def eikonal_scaled(model, x):
    """Rescale the output layer so the gradient norm at x is 1.

    Random weights rarely satisfy the eikonal-range sanity check that
    gradient queries enforce; a trained SDF would.
    """
    h = model.fd_step
    vals = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        vals.append((model.forward(x + e) - model.forward(x - e)) / (2 * h))
    scale = 1.0 / np.linalg.norm(vals)
    last = model.layers[-1]
    layers = model.layers[:-1] + [
        MlpLayer(last.weight * scale, last.bias * scale)]
    return InrModel(layers, in_dim=3, activation=model.activation,
                    beta=model.beta)


def softplus(z, beta=100.0):
    return np.where(beta * z > 30, z, np.log1p(np.exp(np.minimum(beta * z, 30))) / beta)


class TestForward:
    def test_hand_computed_forward(self):
        model = tiny_model()
        x = np.array([0.1, -0.2, 0.3])
        w0, b0 = model.layers[0].weight, model.layers[0].bias
        w1, b1 = model.layers[1].weight, model.layers[1].bias
        expected = (w1 @ softplus(w0 @ x + b0) + b1).item()
        assert model.forward(x) == pytest.approx(expected, rel=1e-14)

    def test_skip_layer_concatenates_input(self):
        model = tiny_model(skip=True)
        x = np.array([0.1, -0.2, 0.3])
        h = softplus(model.layers[0].weight @ x + model.layers[0].bias)
        h = softplus(model.layers[1].weight @ np.concatenate([h, x])
                     + model.layers[1].bias)
        expected = (model.layers[2].weight @ h + model.layers[2].bias).item()
        assert model.forward(x) == pytest.approx(expected, rel=1e-14)

    def test_scalar_matches_batch(self):
        # BLAS kernels differ by batch shape, so agreement is to round-off,
        # not bitwise
        model = tiny_model(skip=True)
        pts = RNG.uniform(-1, 1, (20, 3))
        batch = model.forward_batch(pts)
        for k in range(20):
            assert model.forward(pts[k]) == pytest.approx(batch[k], rel=1e-13)

    def test_positive_inside_flips_sign(self):
        neg = tiny_model()
        pos = InrModel(neg.layers, in_dim=3, activation="softplus",
                       beta=100.0, sign_convention="positive_inside")
        pts = RNG.uniform(-1, 1, (10, 3))
        np.testing.assert_array_equal(pos.forward_batch(pts),
                                      -neg.forward_batch(pts))

    def test_transform_applied_before_network(self):
        tf = DomainTransform([1.0, 2.0, 3.0], 0.5)
        plain = tiny_model()
        moved = InrModel(plain.layers, in_dim=3, transform=tf)
        x = np.array([1.2, 2.4, 2.0])
        assert moved.forward(x) == plain.forward(tf.to_canonical(x))

    def test_eval_counter(self):
        model = tiny_model()
        model.eval_count = 0
        model.forward_batch(RNG.uniform(-1, 1, (17, 3)))
        model.forward([0.0, 0.0, 0.0])
        assert model.eval_count == 18

    def test_rejects_wrong_query_dim(self):
        with pytest.raises(DimensionMismatch):
            tiny_model().forward_batch(np.zeros((5, 2)))

    def test_relu_activation(self):
        layers = [MlpLayer(np.array([[1.0, 0, 0], [-1.0, 0, 0]]),
                           np.zeros(2)),
                  MlpLayer(np.array([[1.0, 1.0]]), np.array([-0.25]))]
        model = InrModel(layers, in_dim=3, activation="relu")
        # relu(x) + relu(-x) - 0.25 = |x| - 0.25
        assert model.forward([0.5, 0, 0]) == pytest.approx(0.25)
        assert model.forward([-0.1, 0, 0]) == pytest.approx(-0.15)


class TestValidation:
    def test_rejects_no_layers(self):
        with pytest.raises(DimensionMismatch):
            InrModel([], in_dim=3)

    def test_rejects_mismatched_chain(self):
        layers = [MlpLayer(np.zeros((4, 3)), np.zeros(4)),
                  MlpLayer(np.zeros((1, 5)), np.zeros(1))]
        with pytest.raises(DimensionMismatch):
            InrModel(layers, in_dim=3)

    def test_rejects_vector_output(self):
        layers = [MlpLayer(np.zeros((2, 3)), np.zeros(2))]
        with pytest.raises(DimensionMismatch):
            InrModel(layers, in_dim=3)

    def test_rejects_unknown_activation(self):
        layers = [MlpLayer(np.zeros((1, 3)), np.zeros(1))]
        with pytest.raises(FormatError):
            InrModel(layers, in_dim=3, activation="tanh")

    def test_rejects_unknown_sign_convention(self):
        layers = [MlpLayer(np.zeros((1, 3)), np.zeros(1))]
        with pytest.raises(FormatError):
            InrModel(layers, in_dim=3, sign_convention="upside_down")


class TestSerialization:
    def test_round_trip_exact_at_float32(self, tmp_path):
        model = tiny_model(skip=True,
                           transform=DomainTransform([0.1, 0.2, 0.3], 2.0))
        path = tmp_path / "model.inrw"
        save_inrw(model, path)
        back = load_inrw(path)
        assert back.activation == model.activation
        assert back.beta == model.beta
        assert back.sign_convention == model.sign_convention
        assert back.transform.scale == model.transform.scale
        for la, lb in zip(model.layers, back.layers):
            np.testing.assert_array_equal(lb.weight,
                                          la.weight.astype("<f4").astype(float))
            assert lb.skip_input == la.skip_input
        # reloaded model reproduces the float32-rounded forward pass
        pts = RNG.uniform(-1, 1, (10, 3))
        f32 = load_inrw(path).forward_batch(pts)
        np.testing.assert_array_equal(back.forward_batch(pts), f32)

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.inrw"
        path.write_text(json.dumps({"magic": "NOPE", "version": 1}))
        with pytest.raises(FormatError):
            load_inrw(path)

    def test_rejects_non_json(self, tmp_path):
        path = tmp_path / "bad.inrw"
        path.write_bytes(b"\x00\x01binary")
        with pytest.raises(FormatError):
            load_inrw(path)

    def test_rejects_wrong_payload_length(self, tmp_path):
        model = tiny_model()
        doc = model.to_manifest()
        doc["layers"][0]["weights_b64"] = base64.b64encode(
            np.zeros(5, dtype="<f4").tobytes()).decode()
        path = tmp_path / "bad.inrw"
        path.write_text(json.dumps(doc))
        with pytest.raises((FormatError, DimensionMismatch)):
            load_inrw(path)

    def test_rejects_truncated_base64(self, tmp_path):
        model = tiny_model()
        doc = model.to_manifest()
        doc["layers"][0]["weights_b64"] = "!!!notbase64"
        path = tmp_path / "bad.inrw"
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError):
            load_inrw(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_inrw(tmp_path / "absent.inrw")


class TestGradient:
    def test_fd_gradient_matches_dense_stencil(self):
        x = np.array([0.2, -0.1, 0.4])
        model = eikonal_scaled(tiny_model(), x)
        g = model.gradient_fd(x)
        h = model.fd_step
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            expect = (model.forward(x + e) - model.forward(x - e)) / (2 * h)
            assert g[k] == pytest.approx(expect, rel=1e-12)

    def test_cache_hit_skips_evaluations(self):
        x = np.array([0.3, 0.3, 0.3])
        model = eikonal_scaled(tiny_model(), x)
        cache = GradientCache()
        model.gradient_fd(x, cache)
        count = model.eval_count
        g2 = model.gradient_fd(x, cache)
        assert model.eval_count == count      # zero new evaluations
        np.testing.assert_array_equal(g2, model.gradient_fd(x, cache))
        assert cache.hits >= 2

    def test_distance_vector_uses_cached_value(self):
        x = np.array([0.1, 0.0, -0.3])
        model = eikonal_scaled(tiny_model(), x)
        cache = GradientCache()
        d1 = model.distance_vector(x, cache)
        f = model.forward(x)
        g = model.gradient_fd(x, cache)
        np.testing.assert_allclose(d1, -f * g / np.linalg.norm(g), atol=1e-14)


class TestGradientCache:
    def test_distinct_keys(self):
        cache = GradientCache()
        cache.put([0.0, 0.0, 0.0], [1.0, 0, 0], 0.5)
        assert cache.get([0.0, 0.0, 1e-9]) is None
        assert cache.get([0.0, 0.0, 0.0]) is not None

    def test_len_and_clear(self):
        cache = GradientCache()
        cache.put([1, 2, 3], [1, 0, 0], 0.1)
        assert len(cache) == 1
        cache.clear()
        assert len(cache) == 0
        assert cache.hits == cache.misses == 0


class TestCommittedFixtures:
    """The frozen INRW fixtures used by the acceptance suite."""

    @pytest.mark.parametrize("name", ["icosphere_sub3", "icosphere_sub4"])
    def test_fixture_loads_and_looks_like_a_sphere(self, name, fixtures_dir):
        path = fixtures_dir / f"{name}.inrw"
        if not path.exists():
            pytest.skip("fixture not generated yet")
        model = load_inrw(path)
        assert model.in_dim == 3
        # sign structure of the fixture sphere (pose frozen in
        # scripts/make_fixtures.py: radius 0.44593, slightly off-center)
        center = np.array([-0.01866098, -0.01464429, -0.07275597])
        radius = 0.44593
        assert model.forward(center) < 0
        assert model.forward([0.9, 0.9, 0.9]) > 0
        assert abs(model.forward(center + [radius, 0.0, 0.0])) < 0.02
