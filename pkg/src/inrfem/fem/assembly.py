"""Global system assembly: volume elasticity + Nitsche-type shifted faces.

The shift operator acts on the trial function only, exactly as the face
terms are written, so the assembled matrix is generally non-symmetric.
A symmetrized variant (shift on the test side too) is available behind a
flag for experiments.
"""

import numpy as np
from scipy import sparse

from .basis import shape_values, shape_gradients, gauss_rule
from ..octree.tree import corner_offsets
from ..octree.classify import Marker, in_surrogate
from ..errors import MissingDistanceVector


def default_gamma(material):
    """Penalty scale: a fixed multiple of the P-wave modulus so one
    dimensionless constant works across very different stiffnesses."""
    lam, mu = material.lame
    return 40.0 * (lam + 2.0 * mu)


class GlobalSystem:
    """Sparse stiffness + load vector over d DOFs per node (interleaved)."""

    def __init__(self, matrix, rhs, dim):
        self.matrix = matrix.tocsr()
        self.matrix.sum_duplicates()
        self.rhs = rhs
        self.dim = dim

    @property
    def ndof(self):
        return self.rhs.shape[0]

    def add(self, other):
        return GlobalSystem(self.matrix + other.matrix, self.rhs + other.rhs,
                            self.dim)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.ndof:
            from ..errors import DimensionMismatch
            raise DimensionMismatch(
                f"vector length {x.shape[0]} != system size {self.ndof}")
        return self.matrix @ x


def element_stiffness_unit(dim, lam, mu, order=2):
    """Stiffness of a unit cube element; scales as h^(dim-2) for size h."""
    n_nodes = 1 << dim
    ndof = n_nodes * dim
    pts, wts = gauss_rule(order, dim, size=1.0)
    ke = np.zeros((ndof, ndof))
    for p, w in zip(pts, wts):
        g = shape_gradients(p)            # (dim, n_nodes), unit cube = physical
        # strain-displacement in Voigt-free tensor form via direct loops
        for a in range(n_nodes):
            for b in range(n_nodes):
                for i in range(dim):
                    for j in range(dim):
                        val = (lam * g[i, a] * g[j, b]
                               + mu * g[j, a] * g[i, b])
                        if i == j:
                            val += mu * float(g[:, a] @ g[:, b])
                        ke[a * dim + i, b * dim + j] += w * val
    return ke


def _dof_conn(conn, dim):
    """Interleaved DOF connectivity: (n_el, 2^d * d)."""
    n_el, n_nodes = conn.shape
    dof = np.empty((n_el, n_nodes * dim), dtype=np.int64)
    for a in range(n_nodes):
        for i in range(dim):
            dof[:, a * dim + i] = conn[:, a] * dim + i
    return dof


def assemble_volume(octree, material, body_force=None, markers=None,
                    quad_order=2):
    """Volume stiffness and load over the surrogate-domain leaves.

    body_force: callable (n, d) points -> (n, d) values, or None for zero.
    """
    dim = octree.dim
    lam, mu = material.lame
    ke_unit = element_stiffness_unit(dim, lam, mu)
    n_dof_total = len(octree.nodes) * dim
    active = np.arange(len(octree)) if markers is None else np.where(
        in_surrogate(markers))[0]

    rows, cols, vals = [], [], []
    rhs = np.zeros(n_dof_total)
    n_nodes = 1 << dim
    ndof = n_nodes * dim
    pts_ref, wts_ref = gauss_rule(quad_order, dim, size=1.0)
    n_shape = shape_values(pts_ref)              # (n_gp, n_nodes)

    for lvl in np.unique(octree.levels[active]):
        sel = active[octree.levels[active] == lvl]
        h = float(octree.leaf_size(sel[0]))
        ke = (h ** (dim - 2)) * ke_unit
        dof = _dof_conn(octree.conn[sel], dim)
        rows.append(np.repeat(dof, ndof, axis=1).ravel())
        cols.append(np.tile(dof, (1, ndof)).ravel())
        vals.append(np.tile(ke.ravel(), len(sel)))
        if body_force is not None:
            origins = octree.leaf_origin(sel)
            gpts = origins[:, None, :] + pts_ref[None] * h
            f = np.asarray(body_force(gpts.reshape(-1, dim))).reshape(
                len(sel), -1, dim)
            w = wts_ref * h ** dim               # (n_gp,)
            fe = np.einsum("g,ga,egi->eai", w, n_shape, f).reshape(len(sel), ndof)
            np.add.at(rhs, dof.ravel(), fe.ravel())

    if rows:
        mat = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_dof_total, n_dof_total))
    else:
        mat = sparse.coo_matrix((n_dof_total, n_dof_total))
    return GlobalSystem(mat, rhs, dim)


def shift_displacement(u_value, grad_u, d):
    """First-order boundary transport: (S u)_i = u_i + (du_i/dx_j) d_j."""
    return np.asarray(u_value, dtype=float) + np.asarray(grad_u, dtype=float) @ np.asarray(d, dtype=float)


def assemble_sbm_faces(faces, dirichlet, material, gamma=None,
                       symmetrize=False, face_mask=None):
    """Nitsche-type weak Dirichlet terms on the surrogate faces.

    Per face Gauss point, with S the trial-side shift along the attached
    distance vector and g evaluated at the mapped true-boundary point:
      consistency       -<w, sigma(u) n>
      adjoint           +<sigma(w) n, S u - g>
      penalty           +<w, (gamma/h)(S u - g)>
    (signs as they land on the LHS/RHS of the final linear system).
    """
    if faces.dvec is None:
        raise MissingDistanceVector("attach_distance_vectors must run first")
    oc = faces.octree
    dim = oc.dim
    lam, mu = material.lame
    if gamma is None:
        gamma = default_gamma(material)

    idx = np.arange(len(faces)) if face_mask is None else np.where(face_mask)[0]
    n_dof_total = len(oc.nodes) * dim
    rhs = np.zeros(n_dof_total)
    if len(idx) == 0:
        return GlobalSystem(sparse.coo_matrix((n_dof_total, n_dof_total)),
                            rhs, dim)

    owner = faces.owner[idx]
    gauss = faces.gauss[idx]                     # (F, G, d)
    wts = faces.weights[idx]                     # (F, G)
    dvec = faces.dvec[idx]
    normals = faces.normals[idx]                 # (F, d)
    h_owner = oc.leaf_size(owner)                # (F,)

    origins = oc.leaf_origin(owner)
    xi = (gauss - origins[:, None, :]) / h_owner[:, None, None]
    N = shape_values(xi)                         # (F, G, n_nodes)
    G_ref = shape_gradients(xi)                  # (F, G, d, n_nodes)
    G_phys = G_ref / h_owner[:, None, None, None]

    n_nodes = 1 << dim
    ndof = n_nodes * dim
    F, Gq = N.shape[0], N.shape[1]

    # interpolation matrix: u_i = N_mat[i, dof] u_dof
    N_mat = np.zeros((F, Gq, dim, ndof))
    for a in range(n_nodes):
        for i in range(dim):
            N_mat[:, :, i, a * dim + i] = N[:, :, a]

    # trial shift: (S u)_i = u_i + d_j du_i/dx_j
    ddotg = np.einsum("fgj,fgja->fga", dvec, G_phys)   # (F, G, n_nodes)
    S_mat = N_mat.copy()
    for a in range(n_nodes):
        for i in range(dim):
            S_mat[:, :, i, a * dim + i] += ddotg[:, :, a]

    # traction operator: t_i(dof=(a,c)) = lam n_i dN_a/dx_c
    #   + mu (dN_a/dx_i n_c + delta_ic dN_a/dx_j n_j)
    Tn = np.zeros((F, Gq, dim, ndof))
    gdotn = np.einsum("fgja,fj->fga", G_phys, normals)
    for a in range(n_nodes):
        for i in range(dim):
            for c in range(dim):
                Tn[:, :, i, a * dim + c] += (
                    lam * normals[:, None, i] * G_phys[:, :, c, a]
                    + mu * G_phys[:, :, i, a] * normals[:, None, c])
            Tn[:, :, i, a * dim + i] += mu * gdotn[:, :, a]

    W_mat = S_mat if symmetrize else N_mat       # test side of adjoint/penalty

    pen = gamma / h_owner                        # (F,)
    k_cons = -np.einsum("fg,fgik,fgil->fkl", wts, N_mat, Tn)
    k_adj = np.einsum("fg,fgik,fgil->fkl", wts, Tn, S_mat)
    k_pen = np.einsum("fg,f,fgik,fgil->fkl", wts, pen, W_mat, S_mat)
    k_face = k_cons + k_adj + k_pen

    # boundary data at the mapped true-boundary points
    mapped = (gauss + dvec).reshape(-1, dim)
    g_val = np.asarray(dirichlet(mapped), dtype=float).reshape(F, Gq, dim)
    r_adj = np.einsum("fg,fgik,fgi->fk", wts, Tn, g_val)
    r_pen = np.einsum("fg,f,fgik,fgi->fk", wts, pen, W_mat, g_val)
    r_face = r_adj + r_pen

    dof = _dof_conn(oc.conn[owner], dim)
    rows = np.repeat(dof, ndof, axis=1).ravel()
    cols = np.tile(dof, (1, ndof)).ravel()
    mat = sparse.coo_matrix((k_face.ravel(), (rows, cols)),
                            shape=(n_dof_total, n_dof_total))
    np.add.at(rhs, dof.ravel(), r_face.ravel())
    return GlobalSystem(mat, rhs, dim)


def reduce_hanging(system, octree):
    """Fold hanging-node constraints into the system.

    Returns (reduced system, free node indices, dof prolongation matrix).
    """
    T, free = octree.prolongation()
    Tdof = sparse.kron(T, sparse.identity(system.dim, format="csr"),
                       format="csr")
    K = (Tdof.T @ system.matrix @ Tdof).tocsr()
    rhs = Tdof.T @ system.rhs
    return GlobalSystem(K, rhs, system.dim), free, Tdof


def apply_strong_dirichlet(system, dofs, values):
    """Row/column elimination for prescribed DOFs.

    Constrained contributions move to the RHS; constrained rows become
    identity with the prescribed value on the right.
    """
    dofs = np.asarray(dofs, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if len(dofs) == 0:
        return system
    n = system.ndof
    fix = np.zeros(n)
    fix[dofs] = values
    rhs = system.rhs - system.matrix @ fix
    mask = np.ones(n)
    mask[dofs] = 0.0
    D_free = sparse.diags(mask)
    d_fixed = np.zeros(n)
    d_fixed[dofs] = 1.0
    K = D_free @ system.matrix @ D_free + sparse.diags(d_fixed)
    rhs = rhs * mask
    rhs[dofs] = values
    out = GlobalSystem(K.tocsr(), rhs, system.dim)
    out.matrix.eliminate_zeros()
    return out
