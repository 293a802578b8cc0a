"""Manufactured displacement fields and their analytic body forces.

Each registered case carries a closed-form displacement u*(x), a default
material, and the body force f = -div(sigma(u*)) obtained symbolically, so
the manufactured field is an exact solution of the discretized PDE up to
discretization error.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .material import Material
from ..errors import UnknownCase

_X, _Y, _Z = sp.symbols("x y z", real=True)
_SYMS = (_X, _Y, _Z)

# default linear patch field: u = A x + b with a deliberately non-symmetric A
PATCH_A_3D = np.array([[0.30, -0.12, 0.07],
                       [0.05, 0.22, -0.18],
                       [-0.09, 0.14, 0.26]])
PATCH_B_3D = np.array([0.11, -0.04, 0.08])
PATCH_A_2D = PATCH_A_3D[:2, :2].copy()
PATCH_B_2D = PATCH_B_3D[:2].copy()


def _linear_exprs(A, b):
    d = len(b)
    return [sum(sp.Float(A[i, j]) * _SYMS[j] for j in range(d)) + sp.Float(b[i])
            for i in range(d)]


def _ring_exprs():
    r = sp.sqrt((_X - 1) ** 2 + (_Y - 1) ** 2)
    amp = -sp.log(r) / (2 * sp.log(2))     # u(r)/r, radial displacement u(r) r_hat
    return [amp * (_X - 1), amp * (_Y - 1)]


def _icosphere_exprs():
    return [sp.sin(sp.pi * _X) * sp.sin(sp.pi * _Y) * sp.sin(sp.pi * _Z) / 10,
            sp.cos(sp.pi * _X) * sp.cos(sp.pi * _Y) * sp.sin(sp.pi * _Z) / 10,
            sp.cos(sp.pi * _X) * sp.sin(sp.pi * _Y) * sp.cos(sp.pi * _Z) / 10]


def _bunny_exprs():
    return [sp.sin(sp.pi * _X) * sp.cos(sp.pi * _Y) / 50,
            sp.cos(sp.pi * _X) * sp.sin(sp.pi * _Z) / 50,
            sp.exp(-_Y ** 2) * sp.sin(sp.pi * _Z) / 100]


def _eiffel_exprs():
    return [sp.Rational(1, 10) * sp.sin(sp.pi * _X) * sp.cos(sp.pi * _Y),
            sp.Rational(1, 20) * sp.sin(sp.pi * _Y) * sp.sin(sp.pi * _Z),
            sp.Integer(0)]


def _gyroid_exprs():
    # radially increasing in-plane field, regularized at the axis
    R = sp.sqrt(_X ** 2 + _Y ** 2)
    return [sp.Float(0.01) * R * _X / (R + sp.Float(1e-6)),
            sp.Float(0.01) * R * _Y / (R + sp.Float(1e-6)),
            sp.Integer(0)]


@dataclass(frozen=True)
class CaseSpec:
    name: str
    dim: int
    material: Material
    exprs: tuple = field(repr=False)


_REGISTRY = {
    "linear-patch": lambda: CaseSpec(
        "linear-patch", 3, Material.from_lame(1.0, 0.5),
        tuple(_linear_exprs(PATCH_A_3D, PATCH_B_3D))),
    "linear-patch-2d": lambda: CaseSpec(
        "linear-patch-2d", 2, Material.from_lame(1.0, 0.5),
        tuple(_linear_exprs(PATCH_A_2D, PATCH_B_2D))),
    "ring2d": lambda: CaseSpec(
        "ring2d", 2, Material(1.0, 0.0, "plane_strain"),
        tuple(_ring_exprs())),
    "icosphere": lambda: CaseSpec(
        "icosphere", 3, Material.from_lame(1.0, 0.5),
        tuple(_icosphere_exprs())),
    "bunny": lambda: CaseSpec(
        "bunny", 3, Material(7e10, 0.33), tuple(_bunny_exprs())),
    "eiffel": lambda: CaseSpec(
        "eiffel", 3, Material(1e11, 0.33), tuple(_eiffel_exprs())),
    "gyroid": lambda: CaseSpec(
        "gyroid", 3, Material(7e10, 0.3), tuple(_gyroid_exprs())),
}


def case_names():
    return sorted(_REGISTRY)


@lru_cache(maxsize=None)
def get_case(name):
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise UnknownCase(f"unknown case {name!r}; known: {case_names()}") from None


def make_linear_case(A, b, material=None):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    mat = material or Material.from_lame(1.0, 0.5)
    return CaseSpec("linear-custom", len(b), mat, tuple(_linear_exprs(A, b)))


def _lambdify(exprs, dim):
    syms = _SYMS[:dim]
    fns = [sp.lambdify(syms, e, "numpy") for e in exprs]

    def evaluate(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        cols = [np.broadcast_to(np.asarray(f(*x.T), dtype=float), x.shape[0])
                for f in fns]
        return np.stack(cols, axis=-1)

    return evaluate


@lru_cache(maxsize=None)
def _displacement_fn(case_key):
    case = case_key if isinstance(case_key, CaseSpec) else get_case(case_key)
    return _lambdify(list(case.exprs), case.dim)


def displacement(case, x):
    """Evaluate the manufactured field u*(x); x is (n, d) or (d,)."""
    if isinstance(case, str):
        case = get_case(case)
    return _displacement_fn(case)(x)


def displacement_gradient_exprs(case):
    """Symbolic grad u* as a dim x dim nested list, du_i/dx_j."""
    if isinstance(case, str):
        case = get_case(case)
    syms = _SYMS[:case.dim]
    return [[sp.diff(u, s) for s in syms] for u in case.exprs]


def _stress_exprs(case, lam, mu):
    d = case.dim
    syms = _SYMS[:d]
    grad = [[sp.diff(case.exprs[i], syms[j]) for j in range(d)] for i in range(d)]
    div_u = sum(grad[k][k] for k in range(d))
    return [[lam * div_u * (1 if i == j else 0) + mu * (grad[i][j] + grad[j][i])
             for j in range(d)] for i in range(d)]


@lru_cache(maxsize=None)
def _body_force_fn(case_key, lam, mu):
    case = case_key if isinstance(case_key, CaseSpec) else get_case(case_key)
    sigma = _stress_exprs(case, sp.Float(lam), sp.Float(mu))
    syms = _SYMS[:case.dim]
    f = [sp.simplify(-sum(sp.diff(sigma[i][j], syms[j])
                          for j in range(case.dim)))
         for i in range(case.dim)]
    return _lambdify(f, case.dim)


def body_force_from_manufactured(case, material=None, x=None):
    """f = -div(sigma(u*)) for the case; returns values at x, or the
    callable itself when x is None."""
    if isinstance(case, str):
        case = get_case(case)
    mat = material or case.material
    lam, mu = mat.lame
    fn = _body_force_fn(case, float(lam), float(mu))
    return fn if x is None else fn(x)


def stress_from_manufactured(case, material=None):
    """Callable x -> sigma(u*)(x) with shape (n, d, d); test oracle."""
    if isinstance(case, str):
        case = get_case(case)
    mat = material or case.material
    lam, mu = mat.lame
    sigma = _stress_exprs(case, sp.Float(float(lam)), sp.Float(float(mu)))
    d = case.dim
    fns = [[_lambdify([sigma[i][j]], d) for j in range(d)] for i in range(d)]

    def evaluate(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty((x.shape[0], d, d))
        for i in range(d):
            for j in range(d):
                out[:, i, j] = fns[i][j](x)[:, 0]
        return out

    return evaluate
