from typing import Callable, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError
from .params import ElasticityParams


Evaluator = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]
Predicate = Callable[[np.ndarray, np.ndarray], np.ndarray]

_STENCIL_STEP = 1e-4


def _unit_disk(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x * x + y * y <= 1.0


class VectorField2D:
    """A planar vector field in Cartesian coordinates together with the closed set it lives on."""

    def __init__(self, evaluator: Evaluator, contains: Predicate = _unit_disk, name: str = 'field') -> None:
        self._evaluator = evaluator
        self._contains = contains
        self.name = name

    def __call__(self, x: ArrayLike, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self._evaluator(x, y)

    def polar(self, r: ArrayLike, theta: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        return self(r * np.cos(theta), r * np.sin(theta))

    def contains(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        return self._contains(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__} {self.name}>'


def zero_field() -> VectorField2D:
    return VectorField2D(lambda x, y: (np.zeros_like(x), np.zeros_like(y)), name='zero')


def pde_residual(
    field: VectorField2D, params: ElasticityParams, Lambda: float, point: Tuple[float, float]
) -> Tuple[float, float]:
    """
    Residual `-mu Lap u - (lambda + mu) grad div u - Lambda u` of the Lamé system at a point,
    from central differences with step `1e-4`.

    Args:
        field (VectorField2D): The field to test.
        params (ElasticityParams): Material parameters.
        Lambda (float): Eigenvalue the field is claimed to belong to.
        point (Tuple[float, float]): Evaluation point; the whole stencil must lie in the domain.

    Returns:
        (Tuple[float, float]): The two residual components.

    Raises:
        (DomainError): If the stencil leaves the domain of the field.
    """

    h = _STENCIL_STEP
    x0, y0 = float(point[0]), float(point[1])
    offsets = np.array([-2, -1, 0, 1, 2], dtype=float) * h
    gx, gy = np.meshgrid(x0 + offsets, y0 + offsets, indexing='ij')
    if not np.all(field.contains(gx, gy)):
        raise DomainError(f'Point {point} is not inside the domain of {field!r}!')

    u1, u2 = field(gx, gy)
    c = 2  # index of the centre in the 5x5 stencil

    def laplacian(u: np.ndarray) -> float:
        return (u[c + 1, c] + u[c - 1, c] + u[c, c + 1] + u[c, c - 1] - 4 * u[c, c]) / h**2

    def d_xx(u: np.ndarray) -> float:
        return (u[c + 1, c] - 2 * u[c, c] + u[c - 1, c]) / h**2

    def d_yy(u: np.ndarray) -> float:
        return (u[c, c + 1] - 2 * u[c, c] + u[c, c - 1]) / h**2

    def d_xy(u: np.ndarray) -> float:
        return (u[c + 1, c + 1] - u[c + 1, c - 1] - u[c - 1, c + 1] + u[c - 1, c - 1]) / (4 * h**2)

    grad_div = (d_xx(u1) + d_xy(u2), d_xy(u1) + d_yy(u2))
    weight = params.lam + params.mu
    r1 = -params.mu * laplacian(u1) - weight * grad_div[0] - Lambda * u1[c, c]
    r2 = -params.mu * laplacian(u2) - weight * grad_div[1] - Lambda * u2[c, c]
    return float(r1), float(r2)
