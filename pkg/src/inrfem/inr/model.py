"""Portable neural-implicit weight files (INRW) and their forward pass.

The file is a single JSON document; the manifest is authoritative for all
layer dimensions, so skip connections need no architectural conventions:
a layer flagged ``skip_input`` receives [previous output, canonical input].
Weights are float32 on disk and promoted to float64 for FEM-grade queries.
"""

import base64
import json

import numpy as np

from ..geometry.base import ImplicitGeometry, DomainTransform, _checked_gradient
from ..errors import FormatError, DimensionMismatch

_MAGIC = "INRW"


def _softplus(z, beta):
    # stable: for large beta*z the softplus is z itself to double precision
    bz = beta * z
    out = np.where(bz > 30.0, z, np.log1p(np.exp(np.minimum(bz, 30.0))) / beta)
    return out


class MlpLayer:
    __slots__ = ("weight", "bias", "skip_input")

    def __init__(self, weight, bias, skip_input=False):
        self.weight = np.asarray(weight, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.skip_input = bool(skip_input)
        if self.weight.shape[0] != self.bias.shape[0]:
            raise DimensionMismatch("weight rows != bias length")


class InrModel(ImplicitGeometry):
    """Loaded INR exposed through the implicit-geometry query contract.

    Queries take raw-space points, apply the recorded domain transform, and
    always answer in the negative-inside convention regardless of the sign
    convention the file declares.
    """

    exact = False

    def __init__(self, layers, in_dim, activation="softplus", beta=100.0,
                 sign_convention="negative_inside", transform=None):
        self.layers = layers
        self.in_dim = int(in_dim)
        self.dim = self.in_dim
        if activation not in ("softplus", "relu"):
            raise FormatError(f"unknown activation {activation!r}")
        self.activation = activation
        self.beta = float(beta)
        if sign_convention not in ("negative_inside", "positive_inside"):
            raise FormatError(f"unknown sign convention {sign_convention!r}")
        self.sign_convention = sign_convention
        self.transform = transform or DomainTransform.identity(self.in_dim)
        self._check_dims()
        #: forward evaluations performed (points, not batches)
        self.eval_count = 0

    def _check_dims(self):
        if not self.layers:
            raise DimensionMismatch("model has no layers")
        prev_out = None
        for k, layer in enumerate(self.layers):
            out_d, in_d = layer.weight.shape
            expected = self.in_dim if k == 0 else (
                prev_out + self.in_dim if layer.skip_input else prev_out)
            if in_d != expected:
                raise DimensionMismatch(
                    f"layer {k}: in_dim {in_d}, manifest implies {expected}")
            prev_out = out_d
        if prev_out != 1:
            raise DimensionMismatch(f"output dim {prev_out}, expected 1")

    def _act(self, z):
        if self.activation == "relu":
            return np.maximum(z, 0.0)
        return _softplus(z, self.beta)

    def forward_batch(self, pts):
        """Forward pass for an (n, d) batch of raw-space points."""
        pts = np.asarray(pts, dtype=np.float64)
        if pts.size == 0:
            return np.zeros(0)
        pts = pts.reshape(-1, pts.shape[-1])
        if pts.shape[1] != self.in_dim:
            raise DimensionMismatch(
                f"query dim {pts.shape[1]} != model dim {self.in_dim}")
        xc = self.transform.to_canonical(pts)
        h = xc
        last = len(self.layers) - 1
        for k, layer in enumerate(self.layers):
            if k > 0 and layer.skip_input:
                h = np.concatenate([h, xc], axis=1)
            z = h @ layer.weight.T + layer.bias
            h = z if k == last else self._act(z)
        out = h[:, 0]
        self.eval_count += len(pts)
        if self.sign_convention == "positive_inside":
            out = -out
        return out

    def forward(self, x):
        return float(self.forward_batch(np.asarray(x, dtype=float)[None])[0])

    # ---------------- geometry contract ----------------

    def signed_distance(self, x):
        return self.forward(x)

    def signed_distance_batch(self, pts):
        return self.forward_batch(pts)

    def gradient(self, x, cache=None):
        return self.gradient_fd(x, cache)

    def gradient_fd(self, x, cache=None):
        """Central-difference gradient with optional exact-match caching.

        A cache hit performs zero network evaluations and returns the
        stored (bit-identical) result.
        """
        x = np.asarray(x, dtype=float)
        if cache is not None:
            hit = cache.get(x)
            if hit is not None:
                return hit[0]
        h = self.fd_step
        stencil = np.tile(x, (2 * self.in_dim, 1))
        for k in range(self.in_dim):
            stencil[2 * k, k] += h
            stencil[2 * k + 1, k] -= h
        vals = self.forward_batch(stencil)
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
        g = _checked_gradient(g)
        if cache is not None:
            cache.put(x, g, self.forward(x))
        return g

    def distance_vector(self, x, cache=None):
        g = self.gradient_fd(x, cache)
        if cache is not None:
            f = cache.get(x)[1]
        else:
            f = self.forward(x)
        return -f * g / np.linalg.norm(g)

    # ---------------- serialization ----------------

    def to_manifest(self):
        layers = []
        for layer in self.layers:
            w32 = layer.weight.astype("<f4")
            b32 = layer.bias.astype("<f4")
            layers.append({
                "in": int(layer.weight.shape[1]),
                "out": int(layer.weight.shape[0]),
                "skip_input": layer.skip_input,
                "weights_b64": base64.b64encode(w32.tobytes()).decode("ascii"),
                "bias_b64": base64.b64encode(b32.tobytes()).decode("ascii"),
            })
        return {
            "magic": _MAGIC,
            "version": 1,
            "in_dim": self.in_dim,
            "activation": self.activation,
            "beta": self.beta,
            "sign_convention": self.sign_convention,
            "transform": {
                "center": self.transform.center.tolist(),
                "scale": self.transform.scale,
            },
            "layers": layers,
        }


def save_inrw(model, path):
    with open(path, "w") as fh:
        json.dump(model.to_manifest(), fh)


def load_inrw(path):
    """Load an INRW file, verifying the manifest against the arrays."""
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from exc
    if doc.get("magic") != _MAGIC or doc.get("version") != 1:
        raise FormatError(f"{path}: bad magic/version")
    try:
        in_dim = int(doc["in_dim"])
        layers = []
        for spec in doc["layers"]:
            w = _decode_f32(spec["weights_b64"])
            b = _decode_f32(spec["bias_b64"])
            n_in, n_out = int(spec["in"]), int(spec["out"])
            if w.size != n_in * n_out:
                raise DimensionMismatch(
                    f"weights length {w.size} != {n_out}x{n_in}")
            if b.size != n_out:
                raise DimensionMismatch(f"bias length {b.size} != {n_out}")
            layers.append(MlpLayer(w.reshape(n_out, n_in), b,
                                   bool(spec.get("skip_input", False))))
        tf = DomainTransform(doc["transform"]["center"], doc["transform"]["scale"])
        return InrModel(layers, in_dim, doc["activation"],
                        float(doc.get("beta", 100.0)),
                        doc["sign_convention"], tf)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed manifest: {exc}") from exc


def _decode_f32(s):
    try:
        raw = base64.b64decode(s, validate=True)
    except Exception as exc:
        raise FormatError(f"bad base64 payload: {exc}") from exc
    if len(raw) % 4:
        raise FormatError("float32 payload length not a multiple of 4")
    return np.frombuffer(raw, dtype="<f4").astype(np.float64)
