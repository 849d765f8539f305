import logging
import math

import pytest

from lamespec.analytic import rhombus_eigenvalue
from lamespec.disk import FourierPerturbation, first_eigenvalue
from lamespec.errors import DomainError, NumericalFailure
from lamespec.fem import (
    Disk,
    Ellipse,
    FemSolution,
    PerturbedDisk,
    Rectangle,
    RhombusDomain,
    Square,
    dirichlet_eigenvalue_fem,
    domains,
    lame_eigenvalue_fem,
    parse_domain,
    refinement_study,
)
from lamespec.params import ElasticityParams


class TestParseDomain:
    @pytest.mark.parametrize(
        'spec, cls, label',
        [
            ('disk', Disk, 'disk'),
            ('square', Square, 'square'),
            ('square:2', Square, 'square:2'),
            ('rectangle:1', Rectangle, 'rectangle:1'),
            ('Ellipse:1.5', Ellipse, 'ellipse:1.5'),
            ('rectangle:0.4', Rectangle, 'rectangle:0.4'),
        ],
    )
    def test_known(self, spec: str, cls: type, label: str):
        # Execution
        domain = parse_domain(spec)

        # Testing
        assert isinstance(domain, cls)
        assert domain.label == label

    def test_rhombus(self, double_params: ElasticityParams):
        # Execution
        domain = parse_domain(f'rhombus:{math.pi!r}', double_params)

        # Testing
        assert isinstance(domain, RhombusDomain)
        expected = rhombus_eigenvalue(double_params, math.pi)
        assert domain.reference_value(double_params) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        'spec', ['triangle', 'disk:2', 'ellipse', 'ellipse:wide', 'rectangle:3', 'ellipse:-1', 'square:0']
    )
    def test_invalid(self, spec: str):
        with pytest.raises(DomainError):
            parse_domain(spec)

    def test_rhombus_needs_material(self):
        with pytest.raises(DomainError, match='material'):
            parse_domain('rhombus:3')


class TestBaseDomain:
    def test_one_instance_per_geometry(self):
        assert Ellipse(1.5) is Ellipse(1.5)
        assert Ellipse(1.5) is not Ellipse(2.0)

    def test_keyword_and_default_arguments_share_instance(self):
        assert Ellipse(1.5) is Ellipse(a=1.5)
        assert Square() is Square(1.0) is parse_domain('square')

    def test_mesh_is_cached(self):
        assert Disk().mesh(0) is Disk().mesh(0)

    def test_refinement_range(self):
        with pytest.raises(DomainError):
            Disk().mesh(6)

    def test_refinement_ladder(self):
        # Execution
        counts = [Disk().mesh(r).n_triangles for r in range(3)]

        # Testing
        assert counts[1] == 4 * counts[0]
        assert counts[2] == 4 * counts[1]

    def test_rectangle_mesh(self):
        # Execution
        mesh = Rectangle(0.4).mesh(0)

        # Testing
        assert mesh.area() == pytest.approx(math.pi, rel=1e-12)
        assert mesh.vertices[:, 1].max() == pytest.approx(math.sqrt(0.4 * math.pi))

    def test_rhombus_mesh(self, double_params: ElasticityParams):
        assert RhombusDomain(math.pi, double_params).mesh(0).area() == pytest.approx(math.pi, rel=1e-12)

    def test_perturbed_disk(self):
        # Prepare data
        base = Disk().mesh(1)

        # Execution
        mesh = PerturbedDisk(FourierPerturbation(alpha0=1.0), 0.1).mesh(1)

        # Testing
        assert mesh.area() == pytest.approx(1.21 * base.area(), rel=1e-12)

    def test_references(self, simple_params: ElasticityParams):
        assert Disk().reference_value(simple_params) == first_eigenvalue(simple_params).value
        assert Ellipse(1.0).reference_value(simple_params) == first_eigenvalue(simple_params).value
        assert Ellipse(1.2).reference_value(simple_params) is None
        assert Rectangle(0.5).reference_value(simple_params) is None

    def test_dirichlet_references(self):
        assert Square().dirichlet_reference_value() == pytest.approx(2 * math.pi**2, rel=1e-15)
        assert Square(2.0).dirichlet_reference_value() == pytest.approx(math.pi**2 / 2, rel=1e-15)
        assert Rectangle(1.0).dirichlet_reference_value() == pytest.approx(2 * math.pi, rel=1e-14)
        assert Disk().dirichlet_reference_value() == pytest.approx(2.404825557695773**2, rel=1e-12)
        assert Ellipse(1.2).dirichlet_reference_value() is None

    def test_unit_square_mesh(self):
        # Execution
        mesh = Square().mesh(0)

        # Testing
        assert mesh.area() == pytest.approx(1.0, rel=1e-14)
        assert mesh.vertices.max() == pytest.approx(1.0)


class TestFemSolution:
    def test_cluster(self):
        # Execution
        solution = FemSolution(
            domain='disk', refinement=0, values=(10.0, 10.001, 12.0), residuals=(0.0,) * 3, dof_count=10
        )

        # Testing
        assert solution.value == 10.0
        assert solution.gap == pytest.approx(1e-4)
        assert solution.multiplicity == 2

    @pytest.mark.parametrize(
        'reference, expected',
        [(None, None), (9.0, False), (10.0, False), (10.0 * (1 + 1e-6), True)],
    )
    def test_below_reference(self, reference: float | None, expected: bool | None):
        # Execution
        solution = FemSolution(
            domain='disk', refinement=0, values=(10.0,), residuals=(0.0,), dof_count=10, reference=reference
        )

        # Testing
        assert solution.below_reference is expected


def _stub_solution(value: float, refinement: int) -> FemSolution:
    return FemSolution(domain='disk', refinement=refinement, values=(value,), residuals=(0.0,), dof_count=1)


class TestLameEigenvalueFem:
    def test_coarse_disk_over_approximates(self, simple_params: ElasticityParams, j11: float):
        # Execution
        solution = lame_eigenvalue_fem(Disk(), simple_params, 1, n_modes=2)

        # Testing
        assert solution.value > j11**2
        assert solution.value == pytest.approx(j11**2, rel=0.05)
        assert solution.residual <= 1e-8
        assert solution.reference == pytest.approx(j11**2, rel=1e-14)
        assert solution.below_reference is False

    def test_value_below_closed_form_is_reported(self, mocker, caplog, double_params: ElasticityParams):
        # Prepare data
        domain = RhombusDomain(math.pi, double_params)
        mocker.patch.object(RhombusDomain, 'reference_value', return_value=1e6)

        # Execution
        with caplog.at_level(logging.WARNING, logger='lamespec.fem.domains'):
            solution = lame_eigenvalue_fem(domain, double_params, 0, n_modes=2)

        # Testing
        assert solution.below_reference is True
        assert 'lower mode' in caplog.text

    def test_no_reference_no_flag(self, simple_params: ElasticityParams):
        assert lame_eigenvalue_fem(Ellipse(1.5), simple_params, 0, n_modes=2).below_reference is None

    def test_dirichlet_square(self):
        assert dirichlet_eigenvalue_fem(parse_domain('square'), 1) == pytest.approx(2 * math.pi**2, rel=1e-3)

    def test_dirichlet_disk(self):
        assert dirichlet_eigenvalue_fem(Disk(), 2) == pytest.approx(Disk().dirichlet_reference_value(), rel=3e-3)

    def test_dirichlet_rectangle(self):
        # Prepare data
        rectangle = Rectangle(0.4)

        # Testing
        assert dirichlet_eigenvalue_fem(rectangle, 1) == pytest.approx(rectangle.dirichlet_reference_value(), rel=3e-3)

    def test_strictly_increasing_in_divergence_weight(self):
        # Execution
        values = [
            lame_eigenvalue_fem(Disk(), ElasticityParams.from_ratio(a, 1.0), 1, n_modes=2).value
            for a in (1.0, 2.0, 4.0, 8.0)
        ]

        # Testing
        assert all(lower < upper for lower, upper in zip(values, values[1:]))

    @pytest.mark.slow
    def test_disk_simple_branch(self, simple_params: ElasticityParams, j11: float):
        # Execution
        solution = lame_eigenvalue_fem(Disk(), simple_params, 3)

        # Testing
        assert solution.value == pytest.approx(j11**2, rel=1e-2)

    @pytest.mark.slow
    @pytest.mark.parametrize('nu', [0.0, 0.2, 0.3, 0.34])
    def test_disk_double_branch(self, nu: float):
        # Prepare data
        params = ElasticityParams.from_poisson(nu, 1.0)
        exact = first_eigenvalue(params).value

        # Execution
        solution = lame_eigenvalue_fem(Disk(), params, 4)

        # Testing
        assert solution.gap < 1e-3
        assert solution.value == pytest.approx(exact, rel=1e-2)
        assert solution.below_reference is False

    @pytest.mark.slow
    @pytest.mark.parametrize('nu, mu', [(0.1, 1.0), (0.3, 1.0), (0.3, 2.0)])
    def test_below_stokes_value(self, nu: float, mu: float, j11: float):
        # Execution
        solution = lame_eigenvalue_fem(Disk(), ElasticityParams.from_poisson(nu, mu), 2, n_modes=2)

        # Testing
        assert solution.value <= mu * j11**2

    @pytest.mark.slow
    def test_rhombus_closed_form(self):
        # Prepare data
        params = ElasticityParams.from_poisson(0.35, 1.0)
        exact = 2 * math.pi * math.sqrt(13 / 3)

        # Execution
        solution = lame_eigenvalue_fem(RhombusDomain(math.pi, params), params, 4, n_modes=4)

        # Testing
        assert min(abs(value - exact) / exact for value in solution.values) <= 1e-2
        assert solution.value <= exact * 1.01
        assert solution.reference == pytest.approx(exact, rel=1e-12)
        assert solution.below_reference is (solution.value < exact * (1 - 1e-9))


class TestRefinementStudy:
    def test_disk_decreases(self, simple_params: ElasticityParams, j11: float):
        # Execution
        solutions = refinement_study(Disk(), simple_params, [0, 1, 2], n_modes=2)

        # Testing
        values = [solution.value for solution in solutions]
        assert [solution.refinement for solution in solutions] == [0, 1, 2]
        assert values == sorted(values, reverse=True)
        assert values[-1] > j11**2

    def test_growth_is_failure(self, mocker, simple_params: ElasticityParams):
        # Prepare data
        mocker.patch.object(
            domains, 'lame_eigenvalue_fem', side_effect=[_stub_solution(15.0, 0), _stub_solution(15.1, 1)]
        )

        # Execution and testing
        with pytest.raises(NumericalFailure, match='grew'):
            refinement_study(Disk(), simple_params, [0, 1])

    def test_slack(self, mocker, simple_params: ElasticityParams):
        # Prepare data
        mocker.patch.object(
            domains,
            'lame_eigenvalue_fem',
            side_effect=[_stub_solution(15.0, 0), _stub_solution(15.0 * (1 + 1e-9), 1)],
        )

        # Execution
        solutions = refinement_study(Disk(), simple_params, [0, 1])

        # Testing
        assert len(solutions) == 2

    @pytest.mark.parametrize('levels', [[], [1, 1], [2, 1], [0, 6]])
    def test_invalid_levels(self, levels, simple_params: ElasticityParams):
        with pytest.raises(DomainError):
            refinement_study(Disk(), simple_params, levels)
