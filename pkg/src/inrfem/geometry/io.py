"""Triangle soup readers: Wavefront OBJ and STL (ASCII + binary)."""

import struct

import numpy as np

from .soup import TriangleSoup
from ..errors import FormatError


def load_obj(path):
    """Read v/f records; polygons are fan-triangulated, indices 1-based."""
    verts = []
    tris = []
    with open(path, "r", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise FormatError(f"{path}:{lineno}: short vertex record")
                verts.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    s = tok.split("/")[0]
                    i = int(s)
                    if i < 0:
                        i = len(verts) + 1 + i
                    idx.append(i - 1)
                if len(idx) < 3:
                    raise FormatError(f"{path}:{lineno}: face with <3 vertices")
                for k in range(1, len(idx) - 1):
                    tris.append([idx[0], idx[k], idx[k + 1]])
    if not tris:
        raise FormatError(f"{path}: no faces found")
    return TriangleSoup(np.array(verts), np.array(tris, dtype=np.int64))


def load_stl(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) >= 84:
        ntri = struct.unpack_from("<I", data, 80)[0]
        if len(data) == 84 + 50 * ntri and not data[:5].lower().startswith(b"solid"):
            return _parse_binary_stl(data, ntri)
        # some binary files do start with "solid"; trust the byte count
        if len(data) == 84 + 50 * ntri and ntri > 0:
            return _parse_binary_stl(data, ntri)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: neither valid binary nor ASCII STL") from exc
    return _parse_ascii_stl(text, path)


def _parse_binary_stl(data, ntri):
    raw = np.frombuffer(data, dtype=np.uint8, count=50 * ntri, offset=84)
    rec = raw.reshape(ntri, 50)
    floats = rec[:, :48].copy().view("<f4").reshape(ntri, 12).astype(float)
    verts = floats[:, 3:12].reshape(ntri * 3, 3)
    tris = np.arange(ntri * 3, dtype=np.int64).reshape(ntri, 3)
    return _dedup(verts, tris)


def _parse_ascii_stl(text, path):
    verts = []
    for line in text.splitlines():
        parts = line.split()
        if parts[:1] == ["vertex"]:
            if len(parts) != 4:
                raise FormatError(f"{path}: malformed vertex line")
            verts.append([float(p) for p in parts[1:4]])
    if not verts or len(verts) % 3 != 0:
        raise FormatError(f"{path}: vertex count not a multiple of 3")
    verts = np.array(verts)
    tris = np.arange(len(verts), dtype=np.int64).reshape(-1, 3)
    return _dedup(verts, tris)


def _dedup(verts, tris):
    uniq, inv = np.unique(verts, axis=0, return_inverse=True)
    return TriangleSoup(uniq, inv[tris])


def load_soup(path):
    p = str(path).lower()
    if p.endswith(".obj"):
        return load_obj(path)
    if p.endswith(".stl"):
        return load_stl(path)
    raise FormatError(f"unknown mesh extension: {path}")


def save_obj(soup, path):
    with open(path, "w") as fh:
        for v in soup.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in soup.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
