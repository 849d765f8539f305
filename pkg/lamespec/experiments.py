"""
Experiment drivers: ellipse sweep, Gamma-convergence sweep, Dirichlet bounds report,
threshold report and the finite-difference check of the second shape derivative.

Sweep points are independent FEM solves. With `jobs > 1` they run in a process pool;
results are collected in parameter order, so the output does not depend on completion order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .analytic import (
    dirichlet_bounds,
    disk_is_beaten,
    korn_constant,
    rectangle_beats_disk,
    rhombus_disk_threshold,
)
from .disk import FourierPerturbation, first_eigenvalue, nu_star, second_derivative_F
from .errors import DomainError, NumericalFailure
from .fem import FemSolution, PerturbedDisk, dirichlet_eigenvalue_fem, lame_eigenvalue_fem, parse_domain
from .fem.domains import MONOTONE_SLACK
from .params import ElasticityParams
from .row_set import RowSet
from .rows import BoundsRow, SweepRow, ThresholdRow
from .special_fn import bessel_zero


logger = logging.getLogger(__name__)

ELLIPSE_GRID = tuple(round(1.0 + 0.05 * i, 2) for i in range(21))
ELLIPSE_RANGE = (1.0, 2.5)
CROSSING_NU = (0.39, 0.40, 0.405, 0.41, 0.42, 0.45)
GAMMA_RATIOS = (1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0)
ILL_CONDITIONED_RATIO = 1e4
UPPER_BOUND_SLACK = 5e-3
THRESHOLD_NU = (3 / 8, 0.39, 2 / 5)


def sweep_timestamp(source_date_epoch: int | None) -> str:
    """ISO timestamp of `SOURCE_DATE_EPOCH`, or an empty string so that repeated runs agree byte for byte."""
    if source_date_epoch is None:
        return ''
    return datetime.fromtimestamp(source_date_epoch, tz=timezone.utc).isoformat()


def _solve_point(job: Tuple[str, ElasticityParams, int, int, float, int]) -> FemSolution:
    spec, params, refinement, n_modes, tol, seed = job
    return lame_eigenvalue_fem(parse_domain(spec, params), params, refinement, n_modes=n_modes, tol=tol, seed=seed)


def run_jobs(jobs: Sequence[Tuple[str, ElasticityParams, int, int, float, int]], workers: int = 1) -> List[FemSolution]:
    """
    Solve FEM jobs `(domain spec, params, refinement, modes, tol, seed)`, in order.

    Args:
        jobs (Sequence[Tuple]): The jobs.
        workers (int): Process count; 1 runs in this process.

    Returns:
        (List[FemSolution]): Solutions in job order.
    """

    if workers <= 1 or len(jobs) <= 1:
        return [_solve_point(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_point, jobs))


def ellipse_sweep(
    nu: float,
    mu: float = 1.0,
    a_values: Iterable[float] = ELLIPSE_GRID,
    refinement: int = 3,
    jobs: int = 1,
    seed: int = 0,
    tol: float = 1e-8,
    timestamp: str = '',
) -> RowSet:
    """
    FEM first eigenvalue of the ellipses with semi-axes `a`, `1/a` (area pi) against the disk value.

    Only `a >= 1` is computed: `a` and `1/a` give congruent ellipses.

    Args:
        nu (float): Poisson ratio.
        mu (float): Shear modulus.
        a_values (Iterable[float]): Semi-axes in [1, 2.5].
        refinement (int): Mesh level.
        jobs (int): Worker processes.
        seed (int): Eigensolver seed.
        tol (float): Eigensolver tolerance.
        timestamp (str): Value of the timestamp column.

    Returns:
        (RowSet): `SweepRow`s in the order of `a_values`.
    """

    params = ElasticityParams.from_poisson(nu, mu)
    a_values = [float(a) for a in a_values]
    lo, hi = ELLIPSE_RANGE
    if not a_values or any(not lo <= a <= hi for a in a_values):
        raise DomainError(f'Ellipse semi-axes must lie in [{lo}, {hi}], got {a_values}!')

    reference = first_eigenvalue(params).value
    solutions = run_jobs([(f'ellipse:{a!r}', params, refinement, 2, tol, seed) for a in a_values], jobs)
    rows = []
    for a, solution in zip(a_values, solutions):
        rows.append(
            SweepRow(
                experiment='ellipse_sweep',
                nu=nu,
                mu=mu,
                parameter='a',
                value=a,
                Lambda_fem=solution.value,
                Lambda_reference=reference,
                refine=refinement,
                residual=solution.residual,
                timestamp=timestamp,
            )
        )
        logger.info('ellipse sweep nu=%g a=%g: Lambda_h=%.12g', nu, a, solution.value)
    return RowSet(SweepRow, rows)


def ellipse_minimum(rows: RowSet) -> SweepRow:
    """Sweep row with the smallest FEM value; ties go to the smallest `a`."""
    best = rows.min_by('Lambda_fem')
    if best is None:
        raise DomainError('Cannot take the minimum of an empty sweep!')
    return best


class EllipseCrossing(BaseModel):
    """
    Observed Poisson ratio above which the best ellipse of the sweep is the disk.
    `estimate` is the midpoint of the bracketing pair of `nu` values, None when no crossing was seen.
    """

    model_config = ConfigDict(frozen=True)

    nu_values: Tuple[float, ...]
    minimizers: Tuple[float, ...]
    estimate: float | None
    resolution: float | None

    def to_row(self) -> ThresholdRow:
        return ThresholdRow(quantity='nu_bar_observed', value=self.estimate, holds=self.estimate is not None)


def ellipse_crossing(
    nu_values: Iterable[float] = CROSSING_NU,
    mu: float = 1.0,
    a_values: Iterable[float] = ELLIPSE_GRID,
    refinement: int = 3,
    jobs: int = 1,
    seed: int = 0,
) -> EllipseCrossing:
    """
    Run the ellipse sweep over increasing `nu` and locate where the minimizing `a` reaches 1.

    Returns:
        (EllipseCrossing): Minimizers per `nu` and the observed crossing.
    """

    nu_values = sorted(float(nu) for nu in nu_values)
    a_values = list(a_values)
    minimizers = [
        ellipse_minimum(ellipse_sweep(nu, mu, a_values, refinement=refinement, jobs=jobs, seed=seed)).parameter_value
        for nu in nu_values
    ]
    return locate_crossing(nu_values, minimizers)


def locate_crossing(nu_values: Sequence[float], minimizers: Sequence[float]) -> EllipseCrossing:
    """
    Crossing from the minimizing semi-axis of each sweep; `nu_values` must be increasing.

    Args:
        nu_values (Sequence[float]): Poisson ratios.
        minimizers (Sequence[float]): Minimizing `a` per ratio.

    Returns:
        (EllipseCrossing): The observed crossing.
    """

    estimate = resolution = None
    for (nu_lo, a_lo), (nu_hi, a_hi) in zip(zip(nu_values, minimizers), zip(nu_values[1:], minimizers[1:])):
        if a_lo > 1.0 and a_hi == 1.0:
            estimate, resolution = 0.5 * (nu_lo + nu_hi), 0.5 * (nu_hi - nu_lo)
            break
    logger.info('Observed ellipse crossing: %s (minimizers %s)', estimate, minimizers)
    return EllipseCrossing(
        nu_values=tuple(nu_values), minimizers=tuple(minimizers), estimate=estimate, resolution=resolution
    )


def gamma_sweep(
    domain: str = 'disk',
    mu: float = 1.0,
    a_ratios: Iterable[float] = GAMMA_RATIOS,
    refinement: int = 4,
    jobs: int = 1,
    seed: int = 0,
    tol: float = 1e-8,
    timestamp: str = '',
) -> RowSet:
    """
    `Lambda^a_h / mu` on a fixed mesh for increasing `a = (lambda + mu) / mu`.

    Args:
        domain (str): Domain spec.
        mu (float): Shear modulus.
        a_ratios (Iterable[float]): Positive increasing ratios.
        refinement (int): Mesh level.
        jobs (int): Worker processes.
        seed (int): Eigensolver seed.
        tol (float): Eigensolver tolerance.
        timestamp (str): Value of the timestamp column.

    Returns:
        (RowSet): `SweepRow`s in the order of `a_ratios`.

    Raises:
        (NumericalFailure): If the sequence decreases beyond round-off.
    """

    a_ratios = [float(a) for a in a_ratios]
    if not a_ratios or a_ratios[0] <= 0 or any(b <= a for a, b in zip(a_ratios, a_ratios[1:])):
        raise DomainError(f'Ratios must be positive and increasing, got {a_ratios}!')
    for a in a_ratios:
        if a > ILL_CONDITIONED_RATIO:
            logger.warning(
                'a=%g exceeds %g: the pencil is ill-conditioned and locking may dominate', a, ILL_CONDITIONED_RATIO
            )

    params_list = [ElasticityParams.from_ratio(a, mu) for a in a_ratios]
    # The Stokes limit of the disk is j_{1,1}^2: the simple-branch eigenfunction is divergence-free.
    reference = bessel_zero(1, 1).value ** 2 if domain.strip().lower() == 'disk' else None
    solutions = run_jobs([(domain, params, refinement, 2, tol, seed) for params in params_list], jobs)

    rows = []
    for a, params, solution in zip(a_ratios, params_list, solutions):
        rows.append(
            SweepRow(
                experiment='gamma_sweep',
                nu=params.nu,
                mu=mu,
                parameter='a_ratio',
                value=a,
                Lambda_fem=solution.value / mu,
                Lambda_reference=reference,
                refine=refinement,
                residual=solution.residual,
                timestamp=timestamp,
            )
        )

    values = [row.Lambda_fem for row in rows]
    for (a, lower), upper in zip(zip(a_ratios, values), values[1:]):
        if upper < lower * (1 - MONOTONE_SLACK):
            raise NumericalFailure(f'Gamma sweep decreased after a={a}: {lower!r} -> {upper!r}!')
    return RowSet(SweepRow, rows)


def bounds_report(
    domain: str, params: ElasticityParams, refinement: int = 3, seed: int = 0, tol: float = 1e-8
) -> BoundsRow:
    """
    Compare the FEM Lamé eigenvalue with the bounds given by the scalar Dirichlet eigenvalue
    (dimension 2), and report the Korn constant `2 / lambda_D`.

    Args:
        domain (str): Domain spec.
        params (ElasticityParams): Material parameters.
        refinement (int): Mesh level.
        seed (int): Eigensolver seed.
        tol (float): Eigensolver tolerance.

    Returns:
        (BoundsRow): The report row; the upper bound is checked with 0.5% slack.
    """

    shape = parse_domain(domain, params)
    lambda_d = dirichlet_eigenvalue_fem(shape, refinement, tol=tol, seed=seed)
    Lambda = lame_eigenvalue_fem(shape, params, refinement, n_modes=1, tol=tol, seed=seed).value
    lower, upper = dirichlet_bounds(params, lambda_d, N=2)
    return BoundsRow(
        domain=shape.label,
        nu=params.nu,
        mu=params.mu,
        refine=refinement,
        lambda_d=lambda_d,
        Lambda=Lambda,
        lower=lower,
        upper=upper,
        lower_holds=lower < Lambda,
        upper_holds=Lambda <= upper * (1 + UPPER_BOUND_SLACK),
        korn_constant=korn_constant(lambda_d),
    )


def threshold_report(nu_values: Iterable[float] = THRESHOLD_NU) -> RowSet:
    """
    Thresholds of the disk question: `nu_star`, the rhombus threshold, the rectangle verdicts,
    and whether some explicit competitor beats the disk on a `nu` grid up to 0.4.

    Returns:
        (RowSet): `ThresholdRow`s.
    """

    rows = [
        ThresholdRow(quantity='nu_star', value=nu_star()),
        ThresholdRow(quantity='rhombus_threshold', value=rhombus_disk_threshold()),
    ]
    for nu in nu_values:
        verdict = rectangle_beats_disk(ElasticityParams.from_poisson(nu, 1.0))
        rows.append(ThresholdRow(quantity='rectangle_beats_disk', nu=nu, value=verdict.bound, holds=verdict.beats_disk))

    grid = np.round(np.linspace(0.0, 0.4, 41), 12)
    beaten = all(any(disk_is_beaten(ElasticityParams.from_poisson(float(nu), 1.0)).values()) for nu in grid)
    rows.append(ThresholdRow(quantity='disk_not_optimal_up_to', nu=0.4, holds=beaten))
    return RowSet(ThresholdRow, rows)


class ShapeHessianCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    refinement: int
    finite_difference: float
    analytic: float

    @property
    def relative_error(self) -> float:
        return abs(self.finite_difference - self.analytic) / abs(self.analytic)


def shape_hessian_check(
    params: ElasticityParams, phi: FourierPerturbation, eps: float = 1e-2, refinement: int = 3, seed: int = 0
) -> ShapeHessianCheck:
    """
    Compare `F(eps) + F(-eps) - 2 F(0)` for `F = |Omega| Lambda(Omega)` on radially perturbed disks
    with `eps^2` times the second shape derivative.

    Returns:
        (ShapeHessianCheck): Both values.
    """

    def objective(e: float) -> float:
        shape = PerturbedDisk(phi, e)
        mesh = shape.mesh(refinement)
        return mesh.area() * lame_eigenvalue_fem(shape, params, refinement, n_modes=1, seed=seed).value

    difference = objective(eps) + objective(-eps) - 2.0 * objective(0.0)
    analytic = eps * eps * second_derivative_F(params, phi)
    return ShapeHessianCheck(eps=eps, refinement=refinement, finite_difference=difference, analytic=analytic)

