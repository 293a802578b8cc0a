from .base import ImplicitGeometry, DomainTransform, DEFAULT_FD_STEP
from .analytic import Sphere, Annulus2D, Box, Gyroid
from .soup import TriangleSoup, rescale_soup, icosphere, cube_soup
from .io import load_obj, load_stl, load_soup, save_obj

__all__ = [
    "ImplicitGeometry", "DomainTransform", "DEFAULT_FD_STEP",
    "Sphere", "Annulus2D", "Box", "Gyroid",
    "TriangleSoup", "rescale_soup", "icosphere", "cube_soup",
    "load_obj", "load_stl", "load_soup", "save_obj",
]
