"""
Target domains of the finite-element experiments and the one-call eigenvalue solve.

Every domain is a mapped structured mesh. Refinement level R runs from 0 to 5:

- disk and ellipses: `n_r = 3 * 2^R` rings with `6 i` vertices on ring i (exact sixfold symmetry);
- rectangles: `ny = 4 * 2^R` cells across the short side, square-ish cells along the long side;
- squares: the `n x n` checkerboard mesh, `n = 4 * 2^R`;
- rhombi: the `n x n` unit-square mesh, `n = 4 * 2^R`, pushed by the rhombus frame.
"""

import logging
import math
import threading
from abc import ABC, abstractmethod
from typing import Dict, Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..analytic import RectangleSpec, build_rhombus, rhombus_eigenvalue
from ..disk import FourierPerturbation, first_eigenvalue
from ..errors import DomainError, NumericalFailure
from ..meta import SingletoneMeta
from ..params import ElasticityParams
from ..special_fn import bessel_zero
from .assembly import assemble_lame, assemble_scalar_laplace
from .eigensolver import MULTIPLICITY_GAP, solve_smallest
from .mesh import Mesh, mesh_affine_map, mesh_ellipse, mesh_rectangle


logger = logging.getLogger(__name__)

MAX_REFINEMENT = 5
MONOTONE_SLACK = 1e-8
REFERENCE_SLACK = 1e-9


def _check_refinement(refinement: int) -> int:
    if not 0 <= refinement <= MAX_REFINEMENT:
        raise DomainError(f'Refinement must be in 0..{MAX_REFINEMENT}, got {refinement}!')
    return refinement


class BaseDomain(ABC, metaclass=SingletoneMeta):
    """Base class for meshed domains. Meshes are built once per refinement level and cached."""

    def __init__(self) -> None:
        self._meshes: Dict[int, Mesh] = {}
        self._lock = threading.Lock()

    @property
    @abstractmethod
    def label(self) -> str:
        """Domain spec string accepted by `parse_domain`."""
        raise NotImplementedError

    @abstractmethod
    def _build_mesh(self, refinement: int) -> Mesh:
        raise NotImplementedError

    def mesh(self, refinement: int) -> Mesh:
        """
        Mesh of the domain at a refinement level.

        Args:
            refinement (int): Level in 0..5.

        Returns:
            (Mesh): The cached mesh.
        """

        _check_refinement(refinement)
        with self._lock:
            if refinement not in self._meshes:
                self._meshes[refinement] = self._build_mesh(refinement)
                logger.debug('Meshed %s at refinement %d', self.label, refinement)
            return self._meshes[refinement]

    def reference_value(self, params: ElasticityParams) -> float | None:
        """Exact first eigenvalue when a closed form is known."""
        return None

    def dirichlet_reference_value(self) -> float | None:
        """Exact first scalar Dirichlet eigenvalue when a closed form is known."""
        return None

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__} {self.label}>'


class Disk(BaseDomain):
    @property
    def label(self) -> str:
        return 'disk'

    def _build_mesh(self, refinement: int) -> Mesh:
        n_r = 3 * 2**refinement
        return mesh_ellipse(1.0, n_r, 6 * n_r)

    def reference_value(self, params: ElasticityParams) -> float | None:
        return first_eigenvalue(params).value

    def dirichlet_reference_value(self) -> float | None:
        return bessel_zero(0, 1).value ** 2


class Ellipse(BaseDomain):
    """Ellipse with semi-axes `a` and `1/a` (area pi)."""

    def __init__(self, a: float) -> None:
        if a <= 0:
            raise DomainError(f'Semi-axis must be positive, got {a}!')
        super().__init__()
        self.a = float(a)

    @property
    def label(self) -> str:
        return f'ellipse:{self.a:g}'

    def _build_mesh(self, refinement: int) -> Mesh:
        n_r = 3 * 2**refinement
        return mesh_ellipse(self.a, n_r, 6 * n_r)

    def reference_value(self, params: ElasticityParams) -> float | None:
        return first_eigenvalue(params).value if self.a == 1.0 else None


class Rectangle(BaseDomain):
    """Rectangle `(0, L) x (0, ell)` of area pi with aspect parameter `t = ell / L`."""

    def __init__(self, t: float) -> None:
        super().__init__()
        try:
            self.spec = RectangleSpec(t=t)
        except ValueError as exc:
            raise DomainError(f'Invalid rectangle parameter t={t}: {exc}') from exc

    @property
    def label(self) -> str:
        return f'rectangle:{self.spec.t:g}'

    def _build_mesh(self, refinement: int) -> Mesh:
        ny = 4 * 2**refinement
        nx = math.ceil(ny * self.spec.L / self.spec.ell)
        return mesh_rectangle(self.spec.L, self.spec.ell, nx, ny)

    def dirichlet_reference_value(self) -> float | None:
        return math.pi**2 * (1 / self.spec.L**2 + 1 / self.spec.ell**2)


class Square(BaseDomain):
    """Square `(0, side)^2`; `square` alone is the unit square."""

    def __init__(self, side: float = 1.0) -> None:
        if not side > 0:
            raise DomainError(f'Square side must be positive, got {side}!')
        super().__init__()
        self.side = float(side)

    @property
    def label(self) -> str:
        return 'square' if self.side == 1.0 else f'square:{self.side:g}'

    def _build_mesh(self, refinement: int) -> Mesh:
        n = 4 * 2**refinement
        return mesh_rectangle(self.side, self.side, n, n)

    def dirichlet_reference_value(self) -> float | None:
        """`2 pi^2 / side^2`."""
        return 2.0 * math.pi**2 / self.side**2


class RhombusDomain(BaseDomain):
    """The rhombus carrying a plane-wave eigenfunction for the given material."""

    def __init__(self, area: float, params: ElasticityParams) -> None:
        super().__init__()
        self.rhombus = build_rhombus(params, area)
        self.params = params

    @property
    def label(self) -> str:
        return f'rhombus:{self.rhombus.area:g}'

    def _build_mesh(self, refinement: int) -> Mesh:
        n = 4 * 2**refinement
        J, shift = self.rhombus.frame()
        return mesh_affine_map(mesh_rectangle(1.0, 1.0, n, n), J, shift)

    def reference_value(self, params: ElasticityParams) -> float | None:
        # Plane-wave mode; whether it is the first one is checked against the FEM values.
        return rhombus_eigenvalue(params, self.rhombus.area) if params == self.params else None


class PerturbedDisk(BaseDomain):
    """Image of the disk mesh under `X -> X (1 + eps phi(theta))`; the boundary is `r = 1 + eps phi`."""

    def __init__(self, phi: FourierPerturbation, eps: float) -> None:
        super().__init__()
        self.phi = phi
        self.eps = float(eps)

    @property
    def label(self) -> str:
        return f'perturbed-disk:{self.eps:g}'

    def _build_mesh(self, refinement: int) -> Mesh:
        def radial(vertices: np.ndarray) -> np.ndarray:
            theta = np.arctan2(vertices[:, 1], vertices[:, 0])
            return vertices * (1.0 + self.eps * self.phi.evaluate(theta))[:, None]

        return Disk().mesh(refinement).map(radial)


def parse_domain(spec: str, params: ElasticityParams | None = None) -> BaseDomain:
    """
    Domain from a domain string: `disk`, `square` (the unit square), `square:<side>`, `ellipse:<a>`,
    `rectangle:<t>` or `rhombus:<area>`.

    Args:
        spec (str): The domain string.
        params (ElasticityParams | None): Material, needed by `rhombus`.

    Returns:
        (BaseDomain): The domain.

    Raises:
        (DomainError): If the domain string cannot be parsed.
    """

    kind, _, argument = spec.strip().lower().partition(':')
    try:
        value = float(argument) if argument else None
    except ValueError as exc:
        raise DomainError(f'Invalid domain argument in {spec!r}!') from exc

    if kind == 'disk' and value is None:
        return Disk()
    if kind == 'square':
        return Square(1.0 if value is None else value)
    if kind == 'ellipse' and value is not None:
        return Ellipse(value)
    if kind == 'rectangle' and value is not None:
        return Rectangle(value)
    if kind == 'rhombus' and value is not None:
        if params is None:
            raise DomainError('A rhombus domain needs the material parameters!')
        return RhombusDomain(value, params)
    raise DomainError(
        f'Unknown domain {spec!r}; expected disk, square, square:side, ellipse:a, rectangle:t or rhombus:area!'
    )


class FemSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    domain: str
    refinement: int
    values: Tuple[float, ...]
    residuals: Tuple[float, ...]
    dof_count: int
    reference: float | None = None

    @property
    def value(self) -> float:
        return self.values[0]

    @property
    def residual(self) -> float:
        return self.residuals[0]

    @property
    def gap(self) -> float:
        """Relative gap between the first two values."""
        if len(self.values) < 2:
            return float('inf')
        return (self.values[1] - self.values[0]) / self.values[0]

    @property
    def multiplicity(self) -> int:
        count = 1
        for lower, upper in zip(self.values, self.values[1:]):
            if (upper - lower) / lower >= MULTIPLICITY_GAP:
                break
            count += 1
        return count

    @property
    def below_reference(self) -> bool | None:
        """
        True when the first value lies below the closed-form reference: a conforming discretization
        of the exact domain cannot do that, so the closed form is not the first eigenvalue.
        None without a reference.
        """

        if self.reference is None:
            return None
        return self.value < self.reference * (1 - REFERENCE_SLACK)


def lame_eigenvalue_fem(
    domain: BaseDomain,
    params: ElasticityParams,
    refinement: int,
    n_modes: int = 3,
    tol: float = 1e-8,
    seed: int = 0,
) -> FemSolution:
    """
    Smallest Lamé eigenvalues of a domain by P2 finite elements.

    A first value below the domain's closed-form reference is logged as a warning and flagged
    by `FemSolution.below_reference`.

    Args:
        domain (BaseDomain): The domain.
        params (ElasticityParams): Material parameters.
        refinement (int): Mesh level in 0..5.
        n_modes (int): Number of modes computed; the gap needs at least 2.
        tol (float): Eigensolver residual tolerance.
        seed (int): Eigensolver start-block seed.

    Returns:
        (FemSolution): Values, residuals, gap and the reference value.
    """

    mesh = domain.mesh(refinement)
    pencil = assemble_lame(mesh, params)
    result = solve_smallest(pencil, n_modes, tol=tol, seed=seed)
    solution = FemSolution(
        domain=domain.label,
        refinement=refinement,
        values=tuple(float(v) for v in result.values),
        residuals=tuple(float(r) for r in result.residuals),
        dof_count=pencil.dof_count,
        reference=domain.reference_value(params),
    )
    logger.info(
        '%s nu=%.6g R=%d: Lambda_h=%.12g gap=%.3e (%d dofs)',
        domain.label,
        params.nu,
        refinement,
        solution.value,
        solution.gap,
        solution.dof_count,
    )
    if solution.below_reference:
        logger.warning(
            '%s nu=%.6g R=%d: Lambda_h=%.12g lies below the closed form %.12g; a lower mode exists',
            domain.label,
            params.nu,
            refinement,
            solution.value,
            solution.reference,
        )
    return solution


def refinement_study(
    domain: BaseDomain,
    params: ElasticityParams,
    levels: Iterable[int],
    n_modes: int = 3,
    tol: float = 1e-8,
    seed: int = 0,
) -> List[FemSolution]:
    """
    Solve on increasing refinement levels and check that the first value does not increase.

    Args:
        domain (BaseDomain): The domain.
        params (ElasticityParams): Material parameters.
        levels (Iterable[int]): Strictly increasing levels in 0..5.
        n_modes (int): Number of modes per level.
        tol (float): Eigensolver residual tolerance.
        seed (int): Eigensolver start-block seed.

    Returns:
        (List[FemSolution]): One solution per level.

    Raises:
        (DomainError): If the levels are empty or not increasing.
        (NumericalFailure): If the first value grows by more than `MONOTONE_SLACK` relative.
    """

    levels = [_check_refinement(level) for level in levels]
    if not levels or any(finer <= coarser for coarser, finer in zip(levels, levels[1:])):
        raise DomainError(f'Refinement levels must be increasing, got {levels}!')

    solutions = [lame_eigenvalue_fem(domain, params, level, n_modes=n_modes, tol=tol, seed=seed) for level in levels]
    for coarse, fine in zip(solutions, solutions[1:]):
        if fine.value > coarse.value * (1 + MONOTONE_SLACK):
            raise NumericalFailure(
                f'{domain.label}: Lambda_h grew from {coarse.value!r} (R={coarse.refinement}) '
                f'to {fine.value!r} (R={fine.refinement})!'
            )
    return solutions


def dirichlet_eigenvalue_fem(domain: BaseDomain, refinement: int, tol: float = 1e-8, seed: int = 0) -> float:
    """First scalar Dirichlet Laplacian eigenvalue of a domain by P2 finite elements."""
    pencil = assemble_scalar_laplace(domain.mesh(refinement))
    return float(solve_smallest(pencil, 1, tol=tol, seed=seed).values[0])
