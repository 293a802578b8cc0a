from .material import Material, lame_from_material
from .basis import shape_values, shape_gradients, gauss_rule
from .assembly import (GlobalSystem, assemble_volume, assemble_sbm_faces,
                       shift_displacement, apply_strong_dirichlet,
                       reduce_hanging, default_gamma, element_stiffness_unit)
from .manufactured import (get_case, case_names, displacement,
                           body_force_from_manufactured,
                           stress_from_manufactured, make_linear_case,
                           CaseSpec)

__all__ = [
    "Material", "lame_from_material", "shape_values", "shape_gradients",
    "gauss_rule", "GlobalSystem", "assemble_volume", "assemble_sbm_faces",
    "shift_displacement", "apply_strong_dirichlet", "reduce_hanging",
    "default_gamma", "element_stiffness_unit", "get_case", "case_names",
    "displacement", "body_force_from_manufactured",
    "stress_from_manufactured", "make_linear_case", "CaseSpec",
]
