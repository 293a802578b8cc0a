"""Mesh-free finite elements for linear elasticity on implicit geometries.

Geometry comes in as an analytic signed distance field, a triangle soup,
or a neural implicit model; the domain is discretized with an incomplete
2:1-balanced octree and Dirichlet data is enforced weakly on the grid-
aligned surrogate boundary through shifted Nitsche face terms.
"""

from . import geometry, inr, octree, fem, solver, metrics, vtk, pipeline
from .errors import InrFemError

__version__ = "0.1.0"

__all__ = ["geometry", "inr", "octree", "fem", "solver", "metrics", "vtk",
           "pipeline", "InrFemError", "__version__"]
