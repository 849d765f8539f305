"""
Quadratic (P2) Lagrange assembly of the Lamé and scalar Laplace pencils.

Local node order on a triangle is `[v0, v1, v2, m12, m20, m01]`, where `mij` is the midpoint
of edge (vi, vj). Vector degrees of freedom are numbered `2 * node + component`. Element
integrals use a six-point rule exact for polynomials of degree four, which covers every
product of P2 functions and their gradients.
"""

import logging
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse as sp

from ..errors import MeshError
from ..params import ElasticityParams
from .mesh import Mesh


logger = logging.getLogger(__name__)

_W_A, _W_B = 0.223381589678011, 0.109951743655322
_P_A, _P_B = 0.445948490915965, 0.091576213509771
QUAD_WEIGHTS = np.array([_W_A, _W_A, _W_A, _W_B, _W_B, _W_B])
# Barycentric coordinates of the quadrature points.
QUAD_POINTS = np.array(
    [
        [1 - 2 * _P_A, _P_A, _P_A],
        [_P_A, 1 - 2 * _P_A, _P_A],
        [_P_A, _P_A, 1 - 2 * _P_A],
        [1 - 2 * _P_B, _P_B, _P_B],
        [_P_B, 1 - 2 * _P_B, _P_B],
        [_P_B, _P_B, 1 - 2 * _P_B],
    ]
)
_MIDPOINT_PAIRS = ((1, 2), (2, 0), (0, 1))


def p2_values(bary: np.ndarray) -> np.ndarray:
    """Values of the six P2 shape functions at barycentric points, shape (n_points, 6)."""
    l0, l1, l2 = bary[:, 0], bary[:, 1], bary[:, 2]
    lam = (l0, l1, l2)
    vertex = [li * (2 * li - 1) for li in lam]
    edge = [4 * lam[i] * lam[j] for i, j in _MIDPOINT_PAIRS]
    return np.column_stack(vertex + edge)


def _barycentric_gradients(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    p = mesh.vertices[mesh.triangles]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    if np.any(det <= 0):
        raise MeshError('Cannot assemble on inverted or zero-area triangles!')
    grad1 = np.column_stack((d2[:, 1], -d2[:, 0])) / det[:, None]
    grad2 = np.column_stack((-d1[:, 1], d1[:, 0])) / det[:, None]
    grads = np.stack((-grad1 - grad2, grad1, grad2), axis=1)
    return grads, 0.5 * det


def p2_gradients(bary: np.ndarray, grad_lam: np.ndarray) -> np.ndarray:
    """
    Physical gradients of the P2 shape functions.

    Args:
        bary (np.ndarray): One barycentric point, shape (3,).
        grad_lam (np.ndarray): Barycentric gradients per triangle, shape (n_tri, 3, 2).

    Returns:
        (np.ndarray): Gradients, shape (n_tri, 6, 2).
    """

    vertex = [(4 * bary[i] - 1) * grad_lam[:, i] for i in range(3)]
    edge = [4 * (bary[i] * grad_lam[:, j] + bary[j] * grad_lam[:, i]) for i, j in _MIDPOINT_PAIRS]
    return np.stack(vertex + edge, axis=1)


class EnergyForms(BaseModel):
    """Full (boundary not eliminated) vector matrices of `int grad:grad`, `int div div`, `int e:e` and `int u.v`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grad: sp.csr_matrix
    div: sp.csr_matrix
    sym: sp.csr_matrix
    mass: sp.csr_matrix
    boundary_dofs: np.ndarray

    def energy(self, form: str, u: np.ndarray) -> float:
        matrix = getattr(self, form)
        return float(u @ (matrix @ u))


def _scatter(local: np.ndarray, dofs: np.ndarray, size: int) -> sp.csr_matrix:
    n_local = dofs.shape[1]
    rows = np.broadcast_to(dofs[:, :, None], (len(dofs), n_local, n_local))
    cols = np.broadcast_to(dofs[:, None, :], (len(dofs), n_local, n_local))
    # Duplicates are summed in a fixed order when converting to CSR.
    matrix = sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(size, size)).tocsr()
    matrix.sum_duplicates()
    return matrix


def _scalar_locals(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grad_lam, area = _barycentric_gradients(mesh)
    values = p2_values(QUAD_POINTS)
    stiffness = np.zeros((mesh.n_triangles, 6, 6))
    mass = np.zeros((mesh.n_triangles, 6, 6))
    grads = []
    for q, (w, bary) in enumerate(zip(QUAD_WEIGHTS, QUAD_POINTS)):
        g = p2_gradients(bary, grad_lam)
        grads.append(g)
        stiffness += w * area[:, None, None] * np.einsum('tai,tbi->tab', g, g)
        mass += w * area[:, None, None] * np.outer(values[q], values[q])[None]
    return stiffness, mass, np.stack(grads)


def _vector_dofs(mesh: Mesh) -> np.ndarray:
    nodes = mesh.local_nodes()
    return np.stack((2 * nodes, 2 * nodes + 1), axis=2).reshape(mesh.n_triangles, 12)


def _vector_block(scalar_local: np.ndarray) -> np.ndarray:
    # delta_cd * K_ab laid out as local dof 2 a + c
    eye = np.eye(2)
    return np.einsum('tab,cd->tacbd', scalar_local, eye).reshape(len(scalar_local), 12, 12)


def assemble_energy_forms(mesh: Mesh) -> EnergyForms:
    """
    Assemble the vector gradient, divergence, symmetric-gradient and mass forms without
    eliminating boundary degrees of freedom.

    Args:
        mesh (Mesh): The mesh.

    Returns:
        (EnergyForms): The four matrices and the boundary degrees of freedom.
    """

    stiffness, mass, grads = _scalar_locals(mesh)
    _, area = _barycentric_gradients(mesh)

    # div: int d_c phi_a d_d phi_b; transposed grad: int d_d phi_a d_c phi_b
    div = np.zeros((mesh.n_triangles, 6, 2, 6, 2))
    for w, g in zip(QUAD_WEIGHTS, grads):
        div += w * area[:, None, None, None, None] * np.einsum('tac,tbd->tacbd', g, g)
    div_local = div.reshape(mesh.n_triangles, 12, 12)
    # transposed[(a,c),(b,d)] = int d_d phi_a d_c phi_b
    transposed = np.einsum('tacbd->tadbc', div).reshape(mesh.n_triangles, 12, 12)

    grad_local = _vector_block(stiffness)
    sym_local = 0.5 * (grad_local + transposed)

    size = 2 * mesh.n_nodes
    dofs = _vector_dofs(mesh)
    boundary_nodes = np.flatnonzero(mesh.node_boundary_flags())
    return EnergyForms(
        grad=_scatter(grad_local, dofs, size),
        div=_scatter(div_local, dofs, size),
        sym=_scatter(sym_local, dofs, size),
        mass=_scatter(_vector_block(mass), dofs, size),
        boundary_dofs=np.sort(np.concatenate((2 * boundary_nodes, 2 * boundary_nodes + 1))),
    )


class SymmetricSparsePencil(BaseModel):
    """
    Stiffness and mass matrices restricted to the free (interior) degrees of freedom.
    `dof_map[i] = (node, component)` for free dof i; the component is 0 for scalar pencils.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    free_dofs: np.ndarray
    n_full: int
    dof_map: np.ndarray

    @property
    def dof_count(self) -> int:
        return len(self.free_dofs)

    def expand(self, vector: np.ndarray) -> np.ndarray:
        """Embed a free-dof vector (or block of column vectors) into the full space, zero on the boundary."""
        vector = np.asarray(vector)
        full = np.zeros((self.n_full,) + vector.shape[1:], dtype=vector.dtype)
        full[self.free_dofs] = vector
        return full

    def symmetry_error(self) -> float:
        """Largest entrywise relative asymmetry of the two matrices."""
        errors = []
        for matrix in (self.stiffness, self.mass):
            diff = abs(matrix - matrix.T).max()
            errors.append(diff / abs(matrix).max())
        return float(max(errors))

    def rayleigh_quotient(self, vector: np.ndarray) -> float:
        return float(vector @ (self.stiffness @ vector)) / float(vector @ (self.mass @ vector))


def _restrict(
    stiffness: sp.csr_matrix, mass: sp.csr_matrix, boundary: np.ndarray, dof_map: np.ndarray
) -> SymmetricSparsePencil:
    n_full = stiffness.shape[0]
    free = np.setdiff1d(np.arange(n_full), boundary)
    if not len(free):
        raise MeshError('Mesh has no interior degrees of freedom!')
    return SymmetricSparsePencil(
        stiffness=stiffness[free][:, free].tocsr(),
        mass=mass[free][:, free].tocsr(),
        free_dofs=free,
        n_full=n_full,
        dof_map=dof_map[free],
    )


def assemble_lame(mesh: Mesh, params: ElasticityParams) -> SymmetricSparsePencil:
    """
    Pencil of `mu int |grad u|^2 + (lambda + mu) int (div u)^2` against `int |u|^2`
    with homogeneous Dirichlet conditions on every boundary node.

    Args:
        mesh (Mesh): The mesh.
        params (ElasticityParams): Material parameters.

    Returns:
        (SymmetricSparsePencil): The reduced pencil.
    """

    forms = assemble_energy_forms(mesh)
    stiffness = (params.mu * forms.grad + (params.lam + params.mu) * forms.div).tocsr()
    nodes = np.repeat(np.arange(mesh.n_nodes), 2)
    components = np.tile([0, 1], mesh.n_nodes)
    pencil = _restrict(stiffness, forms.mass, forms.boundary_dofs, np.column_stack((nodes, components)))
    logger.debug('Lamé pencil: %d free dofs, %d nonzeros', pencil.dof_count, pencil.stiffness.nnz)
    return pencil


def assemble_scalar_laplace(mesh: Mesh) -> SymmetricSparsePencil:
    """
    Pencil of the scalar P2 Dirichlet Laplacian.

    Args:
        mesh (Mesh): The mesh.

    Returns:
        (SymmetricSparsePencil): The reduced pencil.
    """

    stiffness, mass, _ = _scalar_locals(mesh)
    dofs = mesh.local_nodes()
    boundary = np.flatnonzero(mesh.node_boundary_flags())
    dof_map = np.column_stack((np.arange(mesh.n_nodes), np.zeros(mesh.n_nodes, dtype=int)))
    return _restrict(
        _scatter(stiffness, dofs, mesh.n_nodes), _scatter(mass, dofs, mesh.n_nodes), boundary, dof_map
    )
