from .assembly import EnergyForms, SymmetricSparsePencil, assemble_energy_forms, assemble_lame, assemble_scalar_laplace
from .domains import (
    BaseDomain,
    Disk,
    Ellipse,
    FemSolution,
    PerturbedDisk,
    Rectangle,
    RhombusDomain,
    Square,
    dirichlet_eigenvalue_fem,
    lame_eigenvalue_fem,
    parse_domain,
    refinement_study,
)
from .eigensolver import EigenResult, solve_smallest
from .mesh import Mesh, mesh_affine_map, mesh_ellipse, mesh_rectangle, read_mesh, write_mesh
