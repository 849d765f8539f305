import math

import numpy as np
import pytest
from scipy import linalg as la

from lamespec.errors import MeshError
from lamespec.fem import Mesh, mesh_ellipse, mesh_rectangle
from lamespec.fem.assembly import (
    QUAD_POINTS,
    QUAD_WEIGHTS,
    assemble_energy_forms,
    assemble_lame,
    assemble_scalar_laplace,
    p2_values,
)
from lamespec.params import ElasticityParams


def _interpolate(mesh: Mesh, u1, u2) -> np.ndarray:
    x, y = mesh.nodes().T
    full = np.empty(2 * mesh.n_nodes)
    full[0::2], full[1::2] = u1(x, y), u2(x, y)
    return full


class TestQuadrature:
    def test_weights_sum_to_one(self):
        assert QUAD_WEIGHTS.sum() == pytest.approx(1.0, abs=1e-14)

    def test_exact_for_degree_four(self):
        # Prepare data
        l0, l1 = QUAD_POINTS[:, 0], QUAD_POINTS[:, 1]

        # Execution
        integral = 0.5 * np.sum(QUAD_WEIGHTS * l0**2 * l1**2)

        # Testing
        assert integral == pytest.approx(math.factorial(2) ** 2 / math.factorial(6), rel=1e-12)

    def test_shape_functions_partition_unity(self):
        np.testing.assert_allclose(p2_values(QUAD_POINTS).sum(axis=1), 1.0, atol=1e-14)


class TestEnergyForms:
    def test_linear_patch(self, unit_square_mesh: Mesh):
        # Prepare data
        forms = assemble_energy_forms(unit_square_mesh)
        u = _interpolate(unit_square_mesh, lambda x, y: x, lambda x, y: -y)

        # Testing
        assert forms.energy('grad', u) == pytest.approx(2.0, rel=1e-12)
        assert forms.energy('div', u) == pytest.approx(0.0, abs=1e-12)
        assert forms.energy('sym', u) == pytest.approx(2.0, rel=1e-12)
        assert forms.energy('mass', u) == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_dilation(self, unit_square_mesh: Mesh):
        # Prepare data
        forms = assemble_energy_forms(unit_square_mesh)
        u = _interpolate(unit_square_mesh, lambda x, y: x, lambda x, y: y)

        # Testing
        assert forms.energy('div', u) == pytest.approx(4.0, rel=1e-12)

    def test_quadratic_field_is_exact(self, unit_square_mesh: Mesh):
        # Prepare data
        forms = assemble_energy_forms(unit_square_mesh)
        u = _interpolate(unit_square_mesh, lambda x, y: x * y, lambda x, y: np.zeros_like(x))

        # Testing
        assert forms.energy('grad', u) == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert forms.energy('mass', u) == pytest.approx(1.0 / 9.0, rel=1e-12)

    @pytest.mark.parametrize('mesh_name', ['unit_square_mesh', 'coarse_disk_mesh', 'coarse_ellipse_mesh'])
    def test_korn_identity(self, mesh_name: str, request):
        # Prepare data
        mesh = request.getfixturevalue(mesh_name)
        forms = assemble_energy_forms(mesh)
        rng = np.random.default_rng(3)
        fields = rng.standard_normal((20, 2 * mesh.n_nodes))
        fields[:, forms.boundary_dofs] = 0.0

        # Execution
        results = [(2 * forms.energy('sym', u), forms.energy('grad', u) + forms.energy('div', u)) for u in fields]

        # Testing
        for twice_sym, grad_plus_div in results:
            assert twice_sym == pytest.approx(grad_plus_div, rel=1e-10)

    def test_identity_needs_boundary_conditions(self, unit_square_mesh: Mesh):
        # Prepare data
        forms = assemble_energy_forms(unit_square_mesh)
        u = _interpolate(unit_square_mesh, lambda x, y: x, lambda x, y: -y)

        # Testing
        assert 2 * forms.energy('sym', u) != pytest.approx(forms.energy('grad', u) + forms.energy('div', u))

    def test_boundary_dofs(self, unit_square_mesh: Mesh):
        forms = assemble_energy_forms(unit_square_mesh)
        assert len(forms.boundary_dofs) == 2 * int(unit_square_mesh.node_boundary_flags().sum())


class TestAssembleLame:
    def test_pencil_is_symmetric(self, coarse_ellipse_mesh: Mesh, simple_params: ElasticityParams):
        assert assemble_lame(coarse_ellipse_mesh, simple_params).symmetry_error() < 1e-13

    def test_dof_count(self, unit_square_mesh: Mesh, simple_params: ElasticityParams):
        # Execution
        pencil = assemble_lame(unit_square_mesh, simple_params)

        # Testing
        interior = int((~unit_square_mesh.node_boundary_flags()).sum())
        assert pencil.dof_count == 2 * interior
        assert pencil.n_full == 2 * unit_square_mesh.n_nodes
        assert set(np.unique(pencil.dof_map[:, 1])) == {0, 1}

    def test_expand(self, unit_square_mesh: Mesh, simple_params: ElasticityParams):
        # Prepare data
        pencil = assemble_lame(unit_square_mesh, simple_params)

        # Execution
        full = pencil.expand(np.ones(pencil.dof_count))

        # Testing
        assert full.shape == (pencil.n_full,)
        assert full.sum() == pencil.dof_count

    def test_positive_definite(self, coarse_disk_mesh: Mesh, double_params: ElasticityParams):
        # Prepare data
        pencil = assemble_lame(coarse_disk_mesh, double_params)

        # Execution
        values = la.eigh(pencil.stiffness.toarray(), pencil.mass.toarray(), eigvals_only=True)

        # Testing
        assert values[0] > 0

    def test_no_interior_dofs(self, simple_params: ElasticityParams):
        # Prepare data
        mesh = Mesh(vertices=[[0, 0], [1, 0], [0, 1]], triangles=[[0, 1, 2]])

        # Execution and testing
        with pytest.raises(MeshError):
            assemble_lame(mesh, simple_params)


class TestScalarLaplace:
    def test_square(self):
        # Prepare data
        pencil = assemble_scalar_laplace(mesh_rectangle(1.0, 1.0, 8, 8))

        # Execution
        values = la.eigh(pencil.stiffness.toarray(), pencil.mass.toarray(), eigvals_only=True)

        # Testing
        assert values[0] == pytest.approx(2 * math.pi**2, rel=2e-3)
        assert values[0] > 2 * math.pi**2

    def test_disk(self):
        # Prepare data
        pencil = assemble_scalar_laplace(mesh_ellipse(1.0, 6, 36))

        # Execution
        values = la.eigh(pencil.stiffness.toarray(), pencil.mass.toarray(), eigvals_only=True)

        # Testing
        assert values[0] == pytest.approx(2.404825557695773**2, rel=2e-2)
