"""
Command-line interface. Every subcommand writes CSV rows to `--out` (standard output by default).

Exit codes: 0 on success, 2 for invalid arguments or inadmissible input, 3 for numerical failures.
"""

import argparse
import logging
import math
import sys
from typing import Callable, Dict, List, Sequence

from pydantic import ValidationError

from . import experiments
from .analytic import RECTANGLE_T_GRID, RectangleSpec, rectangle_upper_bound, rhombus_eigenvalue
from .config import Settings
from .disk import K_MAX, big_c_coefficient, c_coefficient, first_eigenvalue, non_optimality_certificate
from .errors import DomainError, LameSpecError
from .fem import FemSolution, lame_eigenvalue_fem, parse_domain, refinement_study, write_mesh
from .params import ElasticityParams
from .rows import (
    BaseRow,
    CertificateRow,
    CoefficientRow,
    DiskSpectrumRow,
    FemRow,
    RectangleRow,
    RhombusRow,
)
from .special_fn import bessel_zero
from .writers import CsvWriter


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _float_list(value: str) -> List[float]:
    try:
        return [float(item) for item in value.split(',') if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'Expected comma-separated numbers, got {value!r}') from exc


def _add_material(parser: argparse.ArgumentParser, many_nu: bool = False) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    if many_nu:
        group.add_argument('--nu', type=float, nargs='+', help='Poisson ratio(s)')
    else:
        group.add_argument('--nu', type=float, help='Poisson ratio')
    group.add_argument('--lambda', dest='lam', type=float, help='First Lamé coefficient')
    parser.add_argument('--mu', type=float, default=1.0, help='Shear modulus (default 1)')


def _params(args: argparse.Namespace) -> ElasticityParams:
    if args.lam is not None:
        return ElasticityParams.from_lame(args.lam, args.mu)
    return ElasticityParams.from_poisson(args.nu, args.mu)


def _disk_spectrum(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    eig = first_eigenvalue(params, k_max=args.k_max)
    return [
        DiskSpectrumRow(
            nu=params.nu, mu=params.mu, lam=params.lam, regime=eig.regime.value, k=eig.mode_k, Lambda=eig.value
        )
    ]


def _perturbation(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    return [
        CoefficientRow(k=k, c_k=c_coefficient(k, params), C_k=big_c_coefficient(k, params))
        for k in range(1, args.k_max + 1)
    ]


def _certificate(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    cert = non_optimality_certificate(params)
    return [
        CertificateRow(
            nu=params.nu,
            mu=params.mu,
            k=cert.k,
            omega=cert.omega,
            Lambda=cert.Lambda,
            bracket=cert.bracket,
            amplitude=cert.amplitude,
            m11=cert.m11,
            decreases=cert.decreases,
        )
    ]


def _rhombus(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    Lambda = rhombus_eigenvalue(params, args.area)
    # The disk of the same area, by the scaling law Lambda(t Omega) = Lambda(Omega) / t^2.
    disk_value = first_eigenvalue(params).value * math.pi / args.area
    return [
        RhombusRow(
            nu=params.nu,
            mu=params.mu,
            area=args.area,
            Lambda=Lambda,
            disk_value=disk_value,
            beats_disk=Lambda < disk_value,
        )
    ]


def _rectangle_bound(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    disk_value = params.mu * bessel_zero(1, 1).value ** 2
    t_values = RECTANGLE_T_GRID if args.scan else [args.t]
    rows = []
    for t in t_values:
        spec = RectangleSpec(t=t)
        bound = rectangle_upper_bound(params, spec)
        rows.append(
            RectangleRow(
                nu=params.nu,
                mu=params.mu,
                t=t,
                L=spec.L,
                ell=spec.ell,
                bound=bound,
                disk_value=disk_value,
                beats_disk=bound < disk_value,
            )
        )
    return rows


def _thresholds(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    return list(experiments.threshold_report())


def _fem_rows(domain_label: str, params: ElasticityParams, solution: FemSolution) -> List[BaseRow]:
    values = solution.values
    rows = []
    for mode, (value, residual) in enumerate(zip(values, solution.residuals), start=1):
        gap = (values[mode] - value) / value if mode < len(values) else None
        rows.append(
            FemRow(
                domain=domain_label,
                nu=params.nu,
                refine=solution.refinement,
                mode=mode,
                value=value,
                residual=residual,
                gap=gap,
                below_reference=solution.below_reference if mode == 1 else None,
            )
        )
    return rows


def _fem_solve(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    domain = parse_domain(args.domain, params)
    if args.save_mesh:
        write_mesh(domain.mesh(args.refine), args.save_mesh)
    options = dict(n_modes=args.modes, tol=settings.tol, seed=settings.seed)
    if args.ladder:
        solutions = refinement_study(domain, params, range(args.refine + 1), **options)
    else:
        solutions = [lame_eigenvalue_fem(domain, params, args.refine, **options)]
    return [row for solution in solutions for row in _fem_rows(domain.label, params, solution)]


def _ellipse_sweep(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    nu_values = sorted(args.nu) if args.nu else [ElasticityParams.from_lame(args.lam, args.mu).nu]
    timestamp = experiments.sweep_timestamp(settings.source_date_epoch)
    sweeps = [
        experiments.ellipse_sweep(
            nu,
            args.mu,
            args.a_values,
            refinement=args.refine,
            jobs=settings.jobs,
            seed=settings.seed,
            tol=settings.tol,
            timestamp=timestamp,
        )
        for nu in nu_values
    ]
    if args.crossing:
        minimizers = [experiments.ellipse_minimum(rows).parameter_value for rows in sweeps]
        return [experiments.locate_crossing(nu_values, minimizers).to_row()]
    return [row for rows in sweeps for row in rows]


def _gamma_sweep(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    return list(
        experiments.gamma_sweep(
            args.domain,
            args.mu,
            args.ratios,
            refinement=args.refine,
            jobs=settings.jobs,
            seed=settings.seed,
            tol=settings.tol,
            timestamp=experiments.sweep_timestamp(settings.source_date_epoch),
        )
    )


def _bounds_report(args: argparse.Namespace, settings: Settings) -> List[BaseRow]:
    params = _params(args)
    return [
        experiments.bounds_report(domain, params, refinement=args.refine, seed=settings.seed, tol=settings.tol)
        for domain in args.domain
    ]


Handler = Callable[[argparse.Namespace, Settings], List[BaseRow]]

HANDLERS: Dict[str, Handler] = {
    'disk-spectrum': _disk_spectrum,
    'perturbation': _perturbation,
    'certificate': _certificate,
    'rhombus': _rhombus,
    'rectangle-bound': _rectangle_bound,
    'thresholds': _thresholds,
    'fem-solve': _fem_solve,
    'ellipse-sweep': _ellipse_sweep,
    'gamma-sweep': _gamma_sweep,
    'bounds-report': _bounds_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='lamespec', description='Dirichlet Lamé eigenvalue experiments.')
    parser.add_argument('--out', default=None, help='CSV destination (default: standard output)')
    parser.add_argument('--seed', type=int, default=None, help='Eigensolver start-block seed')
    parser.add_argument('--jobs', type=int, default=None, help='Worker processes for sweeps')
    parser.add_argument('--tol', type=float, default=None, help='Eigensolver residual tolerance')
    parser.add_argument('--log-level', default=None, help='Logging level (default from LAMESPEC_LOG_LEVEL)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('disk-spectrum', help='First eigenvalue of the unit disk')
    _add_material(p)
    p.add_argument('--k-max', type=int, default=20)

    p = sub.add_parser('perturbation', help='Second shape derivative coefficients at the disk')
    _add_material(p)
    p.add_argument('--k-max', type=int, default=K_MAX)

    p = sub.add_parser('certificate', help='Area-preserving perturbation decreasing a double disk eigenvalue')
    _add_material(p)

    p = sub.add_parser('rhombus', help='Closed-form rhombus eigenvalue against the disk of equal area')
    _add_material(p)
    p.add_argument('--area', type=float, default=math.pi)

    p = sub.add_parser('rectangle-bound', help='Upper bound on rectangles of area pi')
    _add_material(p)
    shape = p.add_mutually_exclusive_group()
    shape.add_argument('--t', type=float, default=0.4)
    shape.add_argument('--scan', action='store_true')

    sub.add_parser('thresholds', help='Poisson-ratio thresholds of disk optimality')

    p = sub.add_parser('fem-solve', help='Finite-element eigenvalues of a domain')
    _add_material(p)
    p.add_argument('--domain', default='disk', help='disk, square, square:side, ellipse:a, rectangle:t or rhombus:area')
    p.add_argument('--refine', type=int, default=3)
    p.add_argument('--modes', type=int, default=3)
    p.add_argument('--save-mesh', default=None, help='Write the mesh in text format to this path')
    p.add_argument(
        '--ladder', action='store_true', help='Solve every level up to --refine and check that Lambda_h decreases'
    )

    p = sub.add_parser('ellipse-sweep', help='Ellipses of area pi against the disk')
    _add_material(p, many_nu=True)
    p.add_argument('--a-values', type=_float_list, default=list(experiments.ELLIPSE_GRID))
    p.add_argument('--refine', type=int, default=3)
    p.add_argument('--crossing', action='store_true', help='Emit the observed crossing instead of the sweep rows')

    p = sub.add_parser('gamma-sweep', help='Eigenvalue for growing divergence weight')
    p.add_argument('--domain', default='disk')
    p.add_argument('--mu', type=float, default=1.0)
    p.add_argument('--ratios', type=_float_list, default=list(experiments.GAMMA_RATIOS))
    p.add_argument('--refine', type=int, default=4)

    p = sub.add_parser('bounds-report', help='Dirichlet comparison bounds on FEM values')
    _add_material(p)
    p.add_argument('--domain', nargs='+', default=['disk'])
    p.add_argument('--refine', type=int, default=3)
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {
        key: getattr(args, key) for key in ('seed', 'jobs', 'tol', 'log_level') if getattr(args, key) is not None
    }
    return Settings(**{**Settings.from_env().model_dump(), **overrides})


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = _settings(args)
    except ValidationError as exc:
        parser.print_usage(sys.stderr)
        print(f'lamespec: error: {exc}', file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(
        level=settings.log_level, format='%(asctime)s %(name)s %(levelname)s %(message)s', stream=sys.stderr
    )

    try:
        rows = HANDLERS[args.command](args, settings)
        CsvWriter(args.out).write(rows)
    except (DomainError, ValidationError) as exc:
        logger.error('%s: %s', args.command, exc)
        return EXIT_INVALID
    except LameSpecError as exc:
        logger.error('%s failed: %s', args.command, exc)
        return EXIT_NUMERICAL
    return EXIT_OK
