"""Legacy ASCII VTK export of the leaf mesh with displacement, marker and
von Mises fields."""

import numpy as np

from .metrics import element_stresses, von_mises

# VTK corner orders from our x-fastest binary corner layout
_QUAD_ORDER = (0, 1, 3, 2)
_HEX_ORDER = (0, 1, 3, 2, 4, 5, 7, 6)
_CELL_TYPE = {2: 9, 3: 12}


def _fmt(x):
    return f"{x:.12g}"


def export_vtk(octree, markers, solution, material, path):
    """Write the octree as an unstructured grid.

    solution may be None (zero displacement written).  Node and cell
    ordering follow the octree's deterministic ordering, so files are
    byte-stable for identical inputs.
    """
    dim = octree.dim
    n_nodes = len(octree.nodes)
    n_cells = len(octree)
    if solution is None:
        solution = np.zeros(n_nodes * dim)
    disp = np.asarray(solution, dtype=float).reshape(n_nodes, dim)
    order = _QUAD_ORDER if dim == 2 else _HEX_ORDER
    cell_type = _CELL_TYPE[dim]

    stress = element_stresses(solution, octree, material)
    vm = von_mises(stress)

    lines = [
        "# vtk DataFile Version 3.0",
        "implicit-geometry octree solution",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {n_nodes} double",
    ]
    coords = octree.node_coords
    for p in coords:
        row = [_fmt(c) for c in p] + ["0"] * (3 - dim)
        lines.append(" ".join(row))

    npc = 1 << dim
    lines.append(f"CELLS {n_cells} {n_cells * (npc + 1)}")
    for conn in octree.conn:
        lines.append(" ".join([str(npc)] + [str(int(conn[k])) for k in order]))
    lines.append(f"CELL_TYPES {n_cells}")
    lines.extend([str(cell_type)] * n_cells)

    lines.append(f"POINT_DATA {n_nodes}")
    lines.append("VECTORS displacement double")
    for u in disp:
        row = [_fmt(c) for c in u] + ["0"] * (3 - dim)
        lines.append(" ".join(row))

    lines.append(f"CELL_DATA {n_cells}")
    lines.append("SCALARS marker int 1")
    lines.append("LOOKUP_TABLE default")
    if markers is None:
        markers = np.zeros(n_cells, dtype=int)
    lines.extend(str(int(m)) for m in markers)
    lines.append("SCALARS von_mises double 1")
    lines.append("LOOKUP_TABLE default")
    lines.extend(_fmt(v) for v in vm)

    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
