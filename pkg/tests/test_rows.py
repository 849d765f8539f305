import warnings

import numpy as np
import pytest
from pydantic import ValidationError

from lamespec.disk import Regime
from lamespec.rows import CoefficientRow, DiskSpectrumRow, FemRow, SweepRow, ThresholdRow, render_value


class TestRenderValue:
    @pytest.mark.parametrize(
        'value, expected',
        [
            (None, ''),
            (True, 'true'),
            (False, 'false'),
            (0.1, '0.1'),
            (1 / 3, '0.333333333333'),
            (3, '3'),
            ('disk', 'disk'),
            (Regime.TRANSCENDENTAL_DOUBLE, 'double'),
        ],
    )
    def test_cells(self, value, expected: str):
        assert render_value(value) == expected


class TestBaseRow:
    def test_experiment_id(self):
        assert DiskSpectrumRow.experiment() == 'disk_spectrum'
        assert FemRow.experiment() == 'fem'

    def test_header_uses_aliases(self):
        assert DiskSpectrumRow.header() == ['nu', 'mu', 'lambda', 'regime', 'k', 'Lambda']
        assert SweepRow.header()[:5] == ['experiment', 'nu', 'mu', 'parameter', 'value']

    def test_render(self):
        # Prepare data
        row = DiskSpectrumRow(nu=0.4, mu=1.0, lam=4.0, regime='simple', Lambda=14.681970642123895)

        # Execution
        cells = row.render()

        # Testing
        assert cells == ['0.4', '1', '4', 'simple', '', '14.6819706421']

    def test_render_without_deprecation_warnings(self):
        # Prepare data
        row = FemRow(domain='disk', nu=0.4, refine=0, mode=1, value=15.0, residual=1e-9, below_reference=False)

        # Execution
        with warnings.catch_warnings():
            warnings.simplefilter('error', DeprecationWarning)
            cells = row.render()

        # Testing
        assert cells == ['disk', '0.4', '0', '1', '15', '1e-09', '', 'false']

    def test_populate_by_alias(self):
        row = DiskSpectrumRow(**{'nu': 0.3, 'mu': 1.0, 'lambda': 1.5, 'regime': 'double', 'k': 1, 'Lambda': 10.0})
        assert row.lam == 1.5

    def test_numpy_scalars_are_coerced(self):
        # Execution
        row = CoefficientRow(k=np.int64(3), c_k=np.float64(0.5), C_k=np.float64(1.5))

        # Testing
        assert type(row.k) is int
        assert type(row.C_k) is float
        assert row == CoefficientRow(k=3, c_k=0.5, C_k=1.5)

    def test_frozen(self):
        row = ThresholdRow(quantity='nu_star', value=0.35)
        with pytest.raises(ValidationError):
            row.value = 0.4

    def test_optional_cells(self):
        assert ThresholdRow(quantity='nu_star', value=0.35).render() == ['nu_star', '', '0.35', '']
