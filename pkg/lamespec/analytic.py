"""
Closed-form eigenvalues and Rayleigh-quotient upper bounds on rhombi, rectangles and cuboids.
"""

import logging
import math
from typing import Any, Dict, Iterable, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from .disk.spectrum import nu_star
from .errors import DegenerateGeometry, DomainError
from .fields import VectorField2D
from .params import ElasticityParams
from .special_fn import bessel_zero


logger = logging.getLogger(__name__)

Point = Tuple[float, float]

# Cross term of the divergence energy between the trial modes; the matrix entry is half of it.
DIV_CROSS_TERM = -128.0 / (9.0 * math.pi)
RECTANGLE_T_GRID: Tuple[float, ...] = tuple(sorted({round(0.30 + 0.01 * i, 2) for i in range(71)} | {2.0 / 5.0}))
_ALPHA_FLOOR = 1e-14
_SIDE_RTOL = 1e-10


def _shoelace(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def rhombus_eigenvalue(params: ElasticityParams, area: float) -> float:
    """
    Eigenvalue `2 pi^2 sqrt(mu (lambda + 2 mu)) / |Omega|` of the rhombus of the given area
    whose eigenvector has equal components.

    Args:
        params (ElasticityParams): Material parameters.
        area (float): Area of the rhombus.

    Returns:
        (float): The eigenvalue.
    """

    if area <= 0:
        raise DomainError(f'Area must be positive, got {area}!')
    return 2.0 * math.pi**2 * math.sqrt(params.mu * (params.lam + 2 * params.mu)) / area


class Rhombus(BaseModel):
    """
    Rhombus bounded by the lines `e1.X in {xi_1, hat xi_1}` and `e2.X in {xi_2, hat xi_2}`,
    with `e1 = (alpha, beta)`, `e2 = (beta, alpha)`, `alpha = a1 - a2`, `beta = a1 + a2`.
    """

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Point, Point, Point, Point]
    e1: Point
    e2: Point
    xi: Tuple[float, float, float, float]
    theta: Tuple[float, float] = (0.0, 0.0)
    area: float
    Lambda: float
    omega1: float
    omega2: float

    @model_validator(mode='after')
    def _check_rhombus(self) -> Self:
        xi1, hat_xi1, xi2, hat_xi2 = self.xi
        if not math.isclose(hat_xi1 - xi1, hat_xi2 - xi2, rel_tol=1e-12):
            raise ValueError('Strip widths of a rhombus must agree!')
        corners = np.asarray(self.vertices)
        sides = np.linalg.norm(np.roll(corners, -1, axis=0) - corners, axis=1)
        if np.ptp(sides) > _SIDE_RTOL * sides.max():
            raise ValueError(f'Sides {sides} are not equal!')
        if _shoelace(corners) <= 0:
            raise ValueError('Vertices must be counterclockwise!')
        return self

    def frame(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Affine map `X = J Y + shift` sending the unit square corners (0,0), (1,0), (1,1), (0,1)
        onto the vertices.

        Returns:
            (Tuple[np.ndarray, np.ndarray]): `(J, shift)`.
        """

        v = np.asarray(self.vertices)
        return np.column_stack((v[1] - v[0], v[3] - v[0])), v[0].copy()

    def strip_coordinates(self, x: ArrayLike, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return self.e1[0] * x + self.e1[1] * y, self.e2[0] * x + self.e2[1] * y

    def contains(self, x: ArrayLike, y: ArrayLike, tol: float = 1e-12) -> np.ndarray:
        s1, s2 = self.strip_coordinates(x, y)
        xi1, hat_xi1, xi2, hat_xi2 = self.xi
        pad = tol * (hat_xi1 - xi1)
        return (s1 >= xi1 - pad) & (s1 <= hat_xi1 + pad) & (s2 >= xi2 - pad) & (s2 <= hat_xi2 + pad)

    def boundary_points(self, per_side: int) -> np.ndarray:
        """`per_side` equally spaced points on every side, corners excluded."""
        v = np.asarray(self.vertices)
        s = np.arange(1, per_side + 1) / (per_side + 1)
        sides = [v[i] + s[:, None] * (v[(i + 1) % 4] - v[i]) for i in range(4)]
        return np.vstack(sides)

    @property
    def centroid(self) -> Point:
        c = np.asarray(self.vertices).mean(axis=0)
        return float(c[0]), float(c[1])


def build_rhombus(params: ElasticityParams, area: float) -> Rhombus:
    """
    Rhombus of the given area on which `rhombus_eigenvalue` is attained by `U = (u, u)`.
    Phases are zero and the first vertex is the intersection of the `xi_1` and `hat xi_2` lines.

    Args:
        params (ElasticityParams): Material parameters.
        area (float): Requested area.

    Returns:
        (Rhombus): The rhombus.

    Raises:
        (DegenerateGeometry): If `alpha = a1 - a2` vanishes.
    """

    Lambda = rhombus_eigenvalue(params, area)
    a1, a2 = params.a1, params.a2
    alpha, beta = a1 - a2, a1 + a2
    if abs(alpha) < _ALPHA_FLOOR:
        raise DegenerateGeometry('Normals e1 and e2 are parallel!')

    scale = math.sqrt(2.0 / Lambda)
    xi = (0.0, 2.0 * math.pi * scale, -math.pi * scale, math.pi * scale)
    det = alpha * alpha - beta * beta

    def corner(s1: float, s2: float) -> Point:
        return (alpha * s1 - beta * s2) / det, (-beta * s1 + alpha * s2) / det

    corners = [corner(xi[0], xi[3]), corner(xi[0], xi[2]), corner(xi[1], xi[2]), corner(xi[1], xi[3])]
    if _shoelace(np.asarray(corners)) < 0:
        corners = [corners[0], corners[3], corners[2], corners[1]]

    omega = math.sqrt(Lambda / 2.0)
    rhombus = Rhombus(
        vertices=tuple(corners),
        e1=(alpha, beta),
        e2=(beta, alpha),
        xi=xi,
        area=_shoelace(np.asarray(corners)),
        Lambda=Lambda,
        omega1=omega * a1,
        omega2=omega * a2,
    )
    logger.debug('Rhombus area=%.12g Lambda=%.12g vertices=%s', rhombus.area, Lambda, rhombus.vertices)
    return rhombus


def _rhombus_u(rh: Rhombus, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sin(rh.omega1 * (x + y) - rh.theta[0]) - np.sin(rh.omega2 * (x - y) - rh.theta[1])


def rhombus_eigenfunction(params: ElasticityParams, rh: Rhombus, point: Point) -> Tuple[float, float]:
    """
    Eigenvector `U = (u, u)`, `u = sin(w1 (x + y) - t1) - sin(w2 (x - y) - t2)`, at a point of the rhombus.

    Args:
        params (ElasticityParams): Material parameters used to build `rh`.
        rh (Rhombus): The rhombus.
        point (Point): A point of the closed rhombus.

    Returns:
        (Tuple[float, float]): Both components of `U`.
    """

    x, y = float(point[0]), float(point[1])
    if not rh.contains(x, y):
        raise DomainError(f'Point {point} lies outside the rhombus!')
    u = float(_rhombus_u(rh, np.asarray(x), np.asarray(y)))
    return u, u


def rhombus_field(params: ElasticityParams, rh: Rhombus) -> VectorField2D:
    def evaluate(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = _rhombus_u(rh, x, y)
        return u, u.copy()

    return VectorField2D(evaluate, contains=rh.contains, name='rhombus')


def rhombus_disk_threshold() -> float:
    """Poisson ratio `(j^4 - 8 pi^2) / (2 (j^4 - 4 pi^2))`, `j = j_{1,1}`, below which the rhombus beats the disk."""
    j4 = bessel_zero(1, 1).value ** 4
    return (j4 - 8 * math.pi**2) / (2 * (j4 - 4 * math.pi**2))


class RectangleSpec(BaseModel):
    """Rectangle `(0, L) x (0, ell)` of area pi, `L = sqrt(pi / t)`, `ell = sqrt(t pi)`."""

    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0, le=1)
    L: float
    ell: float

    @model_validator(mode='before')
    @classmethod
    def _fill_sides(cls, data: Any) -> Any:
        if isinstance(data, dict) and 't' in data:
            t = float(data['t'])
            if t > 0:
                data = {'L': math.sqrt(math.pi / t), 'ell': math.sqrt(t * math.pi), **data}
        return data

    @model_validator(mode='after')
    def _check_area(self) -> Self:
        if abs(self.L * self.ell - math.pi) > 1e-12:
            raise ValueError(f'L * ell must equal pi, got {self.L * self.ell}!')
        return self


def rectangle_diagonal(a_ratio: float, t: float) -> Tuple[float, float, float, float]:
    a1 = math.pi * (1 + a_ratio) * t + math.pi / t
    a2 = 4 * math.pi * (1 + a_ratio) * t + 4 * math.pi / t
    a3 = math.pi * t + (1 + a_ratio) * math.pi / t
    a4 = 4 * math.pi * t + 4 * (1 + a_ratio) * math.pi / t
    return a1, a2, a3, a4


def rectangle_div_cross_term() -> float:
    """Cross integral `-128 / (9 pi)` of the divergence energy between the coupled trial modes."""
    return DIV_CROSS_TERM


def rectangle_coupling(a_ratio: float) -> float:
    """Off-diagonal entry `b = -64 a / (9 pi)`."""
    return a_ratio * rectangle_div_cross_term() / 2.0


def rectangle_qform(a_ratio: float, spec: RectangleSpec) -> np.ndarray:
    """
    Matrix of the Rayleigh quotient (divided by mu) on the four trial modes, ordered
    `(alpha_1, alpha_2, beta_1, beta_2)`. It splits into the blocks {0, 3} and {1, 2}.

    Args:
        a_ratio (float): `a = (lambda + mu) / mu`, positive.
        spec (RectangleSpec): The rectangle.

    Returns:
        (np.ndarray): Symmetric 4x4 matrix.
    """

    if a_ratio <= 0:
        raise DomainError(f'a must be positive, got {a_ratio}!')
    matrix = np.diag(rectangle_diagonal(a_ratio, spec.t))
    b = rectangle_coupling(a_ratio)
    for i, j in ((0, 3), (1, 2)):
        matrix[i, j] = matrix[j, i] = b
    return matrix


def rectangle_q1(a_ratio: float, t: float, x: float) -> float:
    """`q1(a, t, x) = (a_1 - x)(a_4 - x) - b^2`, the factor carrying the smallest eigenvalue."""
    a1, _, _, a4 = rectangle_diagonal(a_ratio, t)
    return (a1 - x) * (a4 - x) - rectangle_coupling(a_ratio) ** 2


def rectangle_q1_root(a_ratio: float, t: float) -> float:
    a1, _, _, a4 = rectangle_diagonal(a_ratio, t)
    b = rectangle_coupling(a_ratio)
    return 0.5 * ((a1 + a4) - math.sqrt((a1 - a4) ** 2 + 4 * b * b))


def rectangle_upper_bound(params: ElasticityParams, spec: RectangleSpec) -> float:
    """
    Upper bound `mu x_1` on the first eigenvalue of the rectangle, `x_1` the smaller root of `q1`.

    Args:
        params (ElasticityParams): Material parameters.
        spec (RectangleSpec): The rectangle.

    Returns:
        (float): The bound.
    """
    return params.mu * rectangle_q1_root(params.a, spec.t)


class RectangleVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    beats_disk: bool
    witness_t: float | None
    bound: float
    disk_value: float


def rectangle_beats_disk(params: ElasticityParams, t_grid: Iterable[float] = RECTANGLE_T_GRID) -> RectangleVerdict:
    """
    Whether some rectangle of area pi has an upper bound below the disk candidate `mu j_{1,1}^2`.

    Args:
        params (ElasticityParams): Material parameters.
        t_grid (Iterable[float]): Aspect parameters to try; the default covers 0.30 to 1.00 and 2/5.

    Returns:
        (RectangleVerdict): The smallest bound over the grid and the verdict.
    """

    j = bessel_zero(1, 1).value
    disk_value = params.mu * j * j
    bound, t_best = min((rectangle_upper_bound(params, RectangleSpec(t=t)), t) for t in t_grid)
    beats = bound < disk_value * (1 - 1e-12)
    return RectangleVerdict(beats_disk=beats, witness_t=t_best if beats else None, bound=bound, disk_value=disk_value)


def cuboid_dirichlet_eigenvalue(L: float, N: int) -> float:
    """First scalar Dirichlet eigenvalue `pi^2 (N - 1 + 1 / L^2)` of `(0, L) x (0, 1)^{N-1}`."""
    return math.pi**2 * (N - 1 + 1.0 / L**2)


def cuboid_upper_bound(params: ElasticityParams, L: float, N: int = 2) -> float:
    """
    Upper bound `mu lambda_1^D + (lambda + mu) pi^2 / L^2` on the first eigenvalue of the cuboid
    `(0, L) x (0, 1)^{N-1}`.

    Args:
        params (ElasticityParams): Material parameters.
        L (float): Length of the long side, at least 1.
        N (int): Space dimension, at least 2.

    Returns:
        (float): The bound.
    """

    if L < 1:
        raise DomainError(f'L must be at least 1, got {L}!')
    if N < 2:
        raise DomainError(f'N must be at least 2, got {N}!')
    return params.mu * cuboid_dirichlet_eigenvalue(L, N) + (params.lam + params.mu) * math.pi**2 / L**2


def dirichlet_bounds(params: ElasticityParams, lambda_d: float, N: int = 2) -> Tuple[float, float]:
    """
    Bounds `mu lambda_D < Lambda <= ((lambda + (N + 1) mu) / N) lambda_D` from the scalar Dirichlet eigenvalue.

    Returns:
        (Tuple[float, float]): `(lower, upper)`.
    """
    return params.mu * lambda_d, (params.lam + (N + 1) * params.mu) / N * lambda_d


def korn_constant(lambda_d: float) -> float:
    """Constant `C = 2 / lambda_D` of the Korn inequality `int |u|^2 <= C int |e(u)|^2` on `H^1_0`."""
    if lambda_d <= 0:
        raise DomainError(f'Dirichlet eigenvalue must be positive, got {lambda_d}!')
    return 2.0 / lambda_d


def disk_is_beaten(params: ElasticityParams) -> Dict[str, bool]:
    """
    Which explicit competitor shows that the disk does not minimize `Lambda` at fixed area.

    Returns:
        (Dict[str, bool]): Flags `double_regime`, `rhombus` and `rectangle`.
    """

    return {
        'double_regime': params.nu < nu_star(),
        'rhombus': params.nu < rhombus_disk_threshold(),
        'rectangle': rectangle_beats_disk(params).beats_disk,
    }
