import logging

import pytest

from lamespec import experiments
from lamespec.disk import FourierPerturbation
from lamespec.errors import DomainError, NumericalFailure
from lamespec.fem import FemSolution
from lamespec.params import ElasticityParams
from lamespec.row_set import RowSet
from lamespec.rows import BoundsRow, SweepRow, ThresholdRow


def _solution(value: float) -> FemSolution:
    return FemSolution(domain='stub', refinement=0, values=(value, value * 1.1), residuals=(1e-9, 1e-9), dof_count=1)


@pytest.fixture
def fake_fem(mocker):
    """Replace the FEM solve by values handed out in call order."""

    def install(values):
        calls = iter(values)
        return mocker.patch.object(
            experiments, 'lame_eigenvalue_fem', side_effect=lambda *args, **kwargs: _solution(next(calls))
        )

    return install


class TestSweepTimestamp:
    def test_unset(self):
        assert experiments.sweep_timestamp(None) == ''

    def test_epoch(self):
        assert experiments.sweep_timestamp(0) == '1970-01-01T00:00:00+00:00'


class TestEllipseSweep:
    def test_rows_in_grid_order(self, fake_fem):
        # Prepare data
        fake_fem([14.9, 14.7, 14.8])

        # Execution
        rows = experiments.ellipse_sweep(0.4, a_values=[1.0, 1.2, 1.4], timestamp='t0')

        # Testing
        assert rows.row_class is SweepRow
        assert rows.values('parameter_value') == [1.0, 1.2, 1.4]
        assert rows.values('Lambda_fem') == [14.9, 14.7, 14.8]
        assert rows.first().experiment_id == 'ellipse_sweep'
        assert rows.first().timestamp == 't0'
        assert rows.first().Lambda_reference == pytest.approx(14.681970642123895, rel=1e-12)

    def test_minimum(self, fake_fem):
        # Prepare data
        fake_fem([14.9, 14.7, 14.7])

        # Execution
        best = experiments.ellipse_minimum(experiments.ellipse_sweep(0.4, a_values=[1.0, 1.2, 1.4]))

        # Testing
        assert best.parameter_value == 1.2

    @pytest.mark.parametrize('a_values', [[], [0.5], [1.0, 3.0]])
    def test_range(self, a_values):
        with pytest.raises(DomainError):
            experiments.ellipse_sweep(0.4, a_values=a_values)

    def test_empty_minimum(self):
        with pytest.raises(DomainError):
            experiments.ellipse_minimum(RowSet(SweepRow))


class TestLocateCrossing:
    def test_crossing(self):
        # Execution
        crossing = experiments.locate_crossing([0.39, 0.40, 0.41, 0.42], [1.3, 1.2, 1.0, 1.0])

        # Testing
        assert crossing.estimate == pytest.approx(0.405)
        assert crossing.resolution == pytest.approx(0.005)
        assert crossing.to_row() == ThresholdRow(quantity='nu_bar_observed', value=crossing.estimate, holds=True)

    def test_no_crossing(self):
        # Execution
        crossing = experiments.locate_crossing([0.39, 0.40], [1.3, 1.2])

        # Testing
        assert crossing.estimate is None
        assert crossing.to_row().holds is False

    def test_ellipse_crossing_runs_sweeps_in_order(self, mocker):
        # Prepare data
        minima = iter([1.2, 1.0])
        mocker.patch.object(
            experiments,
            'ellipse_minimum',
            side_effect=lambda rows: SweepRow(
                experiment='ellipse_sweep',
                nu=0.4,
                mu=1.0,
                parameter='a',
                value=next(minima),
                Lambda_fem=1.0,
                refine=0,
                residual=0.0,
            ),
        )
        sweep = mocker.patch.object(experiments, 'ellipse_sweep')

        # Execution
        crossing = experiments.ellipse_crossing([0.42, 0.40], a_values=[1.0, 1.2])

        # Testing
        assert [call.args[0] for call in sweep.call_args_list] == [0.40, 0.42]
        assert crossing.estimate == pytest.approx(0.41)


class TestGammaSweep:
    def test_rows(self, fake_fem):
        # Prepare data
        fake_fem([2.0, 4.0, 6.0])

        # Execution
        rows = experiments.gamma_sweep(mu=2.0, a_ratios=[1.0, 10.0, 100.0])

        # Testing
        assert rows.values('Lambda_fem') == [1.0, 2.0, 3.0]
        assert rows.values('parameter') == ['a_ratio'] * 3
        assert rows.first().Lambda_reference == pytest.approx(14.681970642123895, rel=1e-12)

    def test_decrease_is_failure(self, fake_fem):
        fake_fem([2.0, 1.0])
        with pytest.raises(NumericalFailure):
            experiments.gamma_sweep(a_ratios=[1.0, 10.0])

    def test_ill_conditioned_warning(self, fake_fem, caplog):
        # Prepare data
        fake_fem([2.0, 2.0])

        # Execution
        with caplog.at_level(logging.WARNING, logger='lamespec.experiments'):
            experiments.gamma_sweep(domain='square', a_ratios=[1.0, 1e5])

        # Testing
        assert 'ill-conditioned' in caplog.text

    @pytest.mark.parametrize('ratios', [[], [0.0, 1.0], [3.0, 1.0]])
    def test_invalid_ratios(self, ratios):
        with pytest.raises(DomainError):
            experiments.gamma_sweep(a_ratios=ratios)


class TestThresholdReport:
    def test_rows(self):
        # Execution
        report = experiments.threshold_report()

        # Testing
        assert report.get(quantity='nu_star').value == pytest.approx(0.349895, abs=1e-6)
        assert report.get(quantity='rhombus_threshold').value == pytest.approx(0.3879, abs=1e-4)
        assert report.filter(quantity='rectangle_beats_disk').values('holds') == [True, True, True]
        assert report.get(quantity='disk_not_optimal_up_to').holds is True

    def test_rectangle_fails_for_stiff_material(self):
        report = experiments.threshold_report([0.45])
        assert report.get(quantity='rectangle_beats_disk').holds is False


class TestBoundsReport:
    def test_square(self):
        # Execution
        row = experiments.bounds_report('square', ElasticityParams.from_poisson(0.4, 1.0), refinement=1)

        # Testing
        assert isinstance(row, BoundsRow)
        assert row.lower_holds and row.upper_holds
        assert row.korn_constant == pytest.approx(2 / row.lambda_d)

    @pytest.mark.slow
    @pytest.mark.parametrize('domain', ['disk', 'square', 'rectangle:0.4'])
    @pytest.mark.parametrize('nu', [0.2, 0.4])
    def test_bounds_hold(self, domain: str, nu: float):
        row = experiments.bounds_report(domain, ElasticityParams.from_poisson(nu, 1.0), refinement=3)
        assert row.lower_holds and row.upper_holds


class TestRunJobs:
    def test_inline_order(self, fake_fem):
        # Prepare data
        fake_fem([3.0, 1.0])
        params = ElasticityParams.from_poisson(0.3, 1.0)

        # Execution
        solutions = experiments.run_jobs([('disk', params, 0, 2, 1e-8, 0), ('square', params, 0, 2, 1e-8, 0)])

        # Testing
        assert [solution.value for solution in solutions] == [3.0, 1.0]

    @pytest.mark.slow
    def test_pool_matches_inline(self):
        # Prepare data
        params = ElasticityParams.from_poisson(0.3, 1.0)
        jobs = [(spec, params, 0, 2, 1e-8, 0) for spec in ('disk', 'square', 'ellipse:1.5')]

        # Execution
        pooled = experiments.run_jobs(jobs, workers=2)

        # Testing
        assert pooled == experiments.run_jobs(jobs, workers=1)


@pytest.mark.slow
class TestFiniteElementExperiments:
    def test_ellipse_beats_disk_below_crossing(self):
        # Execution
        rows = experiments.ellipse_sweep(0.39)

        # Testing
        best = experiments.ellipse_minimum(rows)
        disk = rows.get(parameter_value=1.0).Lambda_fem
        assert best.parameter_value > 1.0
        assert (disk - best.Lambda_fem) / disk > 2e-3

    def test_disk_is_best_ellipse_above_crossing(self):
        assert experiments.ellipse_minimum(experiments.ellipse_sweep(0.45)).parameter_value == 1.0

    def test_crossing_location(self):
        # Execution
        crossing = experiments.ellipse_crossing(jobs=2)

        # Testing
        assert crossing.nu_values == experiments.CROSSING_NU
        assert crossing.estimate is not None
        assert 0.40 <= crossing.estimate <= 0.42

    def test_gamma_sweep_reaches_stokes_limit(self):
        # Execution
        rows = experiments.gamma_sweep()

        # Testing
        values = rows.values('Lambda_fem')
        assert values == sorted(values)
        assert values[-1] == pytest.approx(rows.last().Lambda_reference, rel=2e-2)

    def test_shape_hessian(self):
        # Execution
        check = experiments.shape_hessian_check(
            ElasticityParams.from_poisson(0.42, 1.0), FourierPerturbation.single(2, 1.0), eps=1e-2
        )

        # Testing
        assert check.eps == 1e-2
        assert check.finite_difference > 0
        assert check.relative_error < 0.2
