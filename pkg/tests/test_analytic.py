import math

import numpy as np
import pytest
from pydantic import ValidationError

from lamespec.analytic import (
    RECTANGLE_T_GRID,
    RectangleSpec,
    Rhombus,
    build_rhombus,
    cuboid_dirichlet_eigenvalue,
    cuboid_upper_bound,
    dirichlet_bounds,
    disk_is_beaten,
    korn_constant,
    rectangle_beats_disk,
    rectangle_div_cross_term,
    rectangle_q1,
    rectangle_q1_root,
    rectangle_qform,
    rectangle_upper_bound,
    rhombus_disk_threshold,
    rhombus_eigenfunction,
    rhombus_eigenvalue,
    rhombus_field,
)
from lamespec.errors import DomainError
from lamespec.fields import pde_residual
from lamespec.params import ElasticityParams


class TestRhombus:
    def test_threshold(self):
        assert rhombus_disk_threshold() == pytest.approx(0.3879, abs=1e-4)

    def test_closed_form(self):
        # Prepare data
        params = ElasticityParams.from_poisson(0.35, 1.0)

        # Execution
        value = rhombus_eigenvalue(params, math.pi)

        # Testing
        assert value == pytest.approx(2 * math.pi * math.sqrt(13 / 3), rel=1e-14)

    def test_rejects_nonpositive_area(self, simple_params: ElasticityParams):
        with pytest.raises(DomainError):
            rhombus_eigenvalue(simple_params, 0.0)

    def test_build_has_requested_area(self, double_params: ElasticityParams):
        # Execution
        rh = build_rhombus(double_params, math.pi)

        # Testing
        assert isinstance(rh, Rhombus)
        assert rh.area == pytest.approx(math.pi, rel=1e-12)
        assert rh.Lambda == rhombus_eigenvalue(double_params, math.pi)

    def test_field_solves_system(self, double_params: ElasticityParams):
        # Prepare data
        rh = build_rhombus(double_params, math.pi)
        field = rhombus_field(double_params, rh)

        # Execution
        r1, r2 = pde_residual(field, double_params, rh.Lambda, rh.centroid)

        # Testing
        assert abs(r1) < 1e-5 * rh.Lambda
        assert abs(r2) < 1e-5 * rh.Lambda

    def test_field_vanishes_on_sides(self, double_params: ElasticityParams):
        # Prepare data
        rh = build_rhombus(double_params, math.pi)
        points = rh.boundary_points(10)

        # Execution
        values = [rhombus_eigenfunction(double_params, rh, tuple(p))[0] for p in points]

        # Testing
        assert np.max(np.abs(values)) < 1e-9

    def test_field_nontrivial_inside(self, double_params: ElasticityParams):
        rh = build_rhombus(double_params, math.pi)
        assert abs(rhombus_eigenfunction(double_params, rh, rh.centroid)[0]) > 0.1

    def test_outside_point(self, double_params: ElasticityParams):
        with pytest.raises(DomainError):
            rhombus_eigenfunction(double_params, build_rhombus(double_params, math.pi), (100.0, 100.0))

    def test_frame_maps_unit_square(self, double_params: ElasticityParams):
        # Prepare data
        rh = build_rhombus(double_params, math.pi)
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])

        # Execution
        J, shift = rh.frame()

        # Testing
        np.testing.assert_allclose(square @ J.T + shift, np.asarray(rh.vertices), atol=1e-12)
        assert np.linalg.det(J) == pytest.approx(math.pi, rel=1e-12)


class TestRectangle:
    def test_spec_sides(self):
        # Execution
        spec = RectangleSpec(t=0.4)

        # Testing
        assert spec.L == pytest.approx(math.sqrt(math.pi / 0.4))
        assert spec.L * spec.ell == pytest.approx(math.pi)

    @pytest.mark.parametrize('t', [0.0, -0.1, 1.5])
    def test_spec_rejects_t(self, t: float):
        with pytest.raises(ValidationError):
            RectangleSpec(t=t)

    def test_grid_contains_two_fifths(self):
        assert 0.4 in RECTANGLE_T_GRID
        assert RECTANGLE_T_GRID == tuple(sorted(RECTANGLE_T_GRID))

    def test_cross_term(self):
        assert rectangle_div_cross_term() == pytest.approx(-128 / (9 * math.pi))

    @pytest.mark.parametrize('a', [round(4.0 + 0.1 * i, 1) for i in range(11)])
    def test_q1_negative_at_disk_value(self, a: float, j11: float):
        assert rectangle_q1(a, 0.4, j11**2) < 0

    def test_q1_root_is_smallest_eigenvalue(self):
        # Prepare data
        matrix = rectangle_qform(5.0, RectangleSpec(t=0.4))

        # Execution
        smallest = np.linalg.eigvalsh(matrix)[0]

        # Testing
        assert rectangle_q1_root(5.0, 0.4) == pytest.approx(smallest, rel=1e-12)
        assert rectangle_q1(5.0, 0.4, smallest) == pytest.approx(0.0, abs=1e-8)

    def test_qform_block_structure(self):
        # Execution
        matrix = rectangle_qform(4.5, RectangleSpec(t=0.4))

        # Testing
        np.testing.assert_array_equal(matrix, matrix.T)
        assert matrix[0, 1] == matrix[0, 2] == matrix[1, 3] == matrix[2, 3] == 0

    def test_qform_rejects_ratio(self):
        with pytest.raises(DomainError):
            rectangle_qform(0.0, RectangleSpec(t=0.4))

    def test_bound_beats_disk_by_small_margin(self, j11: float):
        # Prepare data
        params = ElasticityParams.from_poisson(0.4, 1.0)

        # Execution
        bound = rectangle_upper_bound(params, RectangleSpec(t=0.4))

        # Testing
        assert 0 < j11**2 - bound < 0.01

    def test_verdict(self):
        # Execution
        verdict = rectangle_beats_disk(ElasticityParams.from_poisson(0.4, 1.0))

        # Testing
        assert verdict.beats_disk
        assert verdict.witness_t is not None
        assert verdict.bound < verdict.disk_value

    def test_verdict_for_nearly_incompressible(self):
        # Execution
        verdict = rectangle_beats_disk(ElasticityParams.from_poisson(0.45, 1.0))

        # Testing
        assert not verdict.beats_disk
        assert verdict.witness_t is None


class TestCuboid:
    def test_dirichlet_eigenvalue_of_square(self):
        assert cuboid_dirichlet_eigenvalue(1.0, 2) == pytest.approx(2 * math.pi**2)

    @pytest.mark.parametrize('N', [2, 3])
    def test_ratio_tends_to_mu(self, N: int, simple_params: ElasticityParams):
        # Prepare data
        L = 100.0

        # Execution
        ratio = cuboid_upper_bound(simple_params, L, N) / (simple_params.mu * cuboid_dirichlet_eigenvalue(L, N))

        # Testing
        assert 1.0 <= ratio < 1.02

    @pytest.mark.parametrize('L, N', [(0.5, 2), (2.0, 1)])
    def test_rejects_arguments(self, L: float, N: int, simple_params: ElasticityParams):
        with pytest.raises(DomainError):
            cuboid_upper_bound(simple_params, L, N)


class TestBounds:
    def test_dirichlet_bounds(self):
        # Prepare data
        params = ElasticityParams.from_lame(2.0, 1.0)

        # Execution
        lower, upper = dirichlet_bounds(params, 10.0)

        # Testing
        assert lower == 10.0
        assert upper == pytest.approx(25.0)

    def test_korn_constant(self):
        assert korn_constant(4.0) == 0.5

    def test_korn_constant_rejects(self):
        with pytest.raises(DomainError):
            korn_constant(0.0)

    @pytest.mark.parametrize(
        'nu, expected',
        [
            (0.3, {'double_regime': True, 'rhombus': True, 'rectangle': True}),
            (0.37, {'double_regime': False, 'rhombus': True, 'rectangle': True}),
            (0.45, {'double_regime': False, 'rhombus': False, 'rectangle': False}),
        ],
    )
    def test_disk_is_beaten(self, nu: float, expected: dict):
        assert disk_is_beaten(ElasticityParams.from_poisson(nu, 1.0)) == expected
