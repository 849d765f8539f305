"""
First Dirichlet eigenvalue of the Lamé system on the unit disk.

Above the Poisson threshold `nu_star` the first eigenvalue is `mu j_{1,1}^2` and its
eigenfunction is the divergence-free rotational field. Below it, the eigenvalue is the
smallest root of the transcendental equations `F_k(omega) = 0`, k >= 1, and is at least double.
"""

import logging
import math
from enum import Enum
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, model_validator
from typing_extensions import Self

from ..errors import DomainError, RootScanFailure
from ..fields import VectorField2D
from ..params import ElasticityParams
from ..special_fn import bessel_deriv_zero, bessel_j, bessel_j_deriv, bessel_zero, find_root_bracketed, psi


logger = logging.getLogger(__name__)

SCAN_START = 1e-6
SCAN_STEP = 1e-3
ROOT_TOL = 1e-12
TOL_CLASS = 1e-9
_R_MIN = 1e-150


class Regime(str, Enum):
    SIMPLE_BRANCH = 'simple'
    TRANSCENDENTAL_DOUBLE = 'double'
    TRIPLE_AT_THRESHOLD = 'triple'


class Branch(str, Enum):
    """Eigenfunction selector: the rotational field, or the cosine/sine potential pair of a double root."""

    ROTATIONAL = 'rotational'
    EVEN = 'even'
    ODD = 'odd'


class DiskEigenvalue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    regime: Regime
    mode_k: int | None = None
    omega_root: float | None = None

    @model_validator(mode='after')
    def _check_regime_data(self) -> Self:
        if self.regime == Regime.TRANSCENDENTAL_DOUBLE and (self.mode_k is None or self.omega_root is None):
            raise ValueError('A transcendental eigenvalue needs its mode index and root!')
        if self.value <= 0:
            raise ValueError(f'Eigenvalue must be positive, got {self.value}!')
        return self

    @property
    def multiplicity(self) -> int:
        return {Regime.SIMPLE_BRANCH: 1, Regime.TRANSCENDENTAL_DOUBLE: 2, Regime.TRIPLE_AT_THRESHOLD: 3}[self.regime]


def _arguments(omega: ArrayLike, params: ElasticityParams) -> Tuple[np.ndarray, np.ndarray]:
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError('omega must be positive!')
    return params.a1 * omega, params.a2 * omega


def _scalar(value: np.ndarray) -> float | np.ndarray:
    return float(value) if np.ndim(value) == 0 else value


def transcendental_f(k: int, omega: ArrayLike, params: ElasticityParams) -> float | np.ndarray:
    """
    `F_k(omega) = (k/x1) J_k(x1) J_{k-1}(x2) + (k/x2) J_{k-1}(x1) J_k(x2) - J_{k-1}(x1) J_{k-1}(x2)`
    with `x1 = a1 omega`, `x2 = a2 omega`. Its roots give the eigenvalues `omega^2` of mode k.

    Args:
        k (int): Fourier index, at least 1.
        omega (ArrayLike): Positive wave number(s).
        params (ElasticityParams): Material parameters.

    Returns:
        (float | np.ndarray): `F_k(omega)`.
    """

    x1, x2 = _arguments(omega, params)
    jk1, jk2 = bessel_j(k, x1), bessel_j(k, x2)
    jm1, jm2 = bessel_j(k - 1, x1), bessel_j(k - 1, x2)
    return _scalar((k / x1) * jk1 * jm2 + (k / x2) * jm1 * jk2 - jm1 * jm2)


def transcendental_f_shifted(k: int, omega: ArrayLike, params: ElasticityParams) -> float | np.ndarray:
    """The same function as `transcendental_f`, written with `J_{k+1}` in place of `J_{k-1}`."""

    x1, x2 = _arguments(omega, params)
    jk1, jk2 = bessel_j(k, x1), bessel_j(k, x2)
    jp1, jp2 = bessel_j(k + 1, x1), bessel_j(k + 1, x2)
    return _scalar((k / x1) * jk1 * jp2 + (k / x2) * jp1 * jk2 - jp1 * jp2)


def transcendental_f_det(k: int, omega: ArrayLike, params: ElasticityParams) -> float | np.ndarray:
    """
    Determinant form `x1 x2 J'_k(x1) J'_k(x2) - k^2 J_k(x1) J_k(x2)` of the boundary system,
    equal to `-a1 a2 omega^2 F_k(omega)`.
    """

    x1, x2 = _arguments(omega, params)
    return _scalar(
        x1 * x2 * bessel_j_deriv(k, x1) * bessel_j_deriv(k, x2) - k * k * bessel_j(k, x1) * bessel_j(k, x2)
    )


def transcendental_f_psi(k: int, omega: float, params: ElasticityParams) -> float:
    """
    Ratio form `psi_k(a1 omega) psi_k(a2 omega) - k^2`, defined while `a2 omega < j_{k,1}`.
    It has the sign of `transcendental_f_det`, hence the opposite sign of `F_k`.
    """
    x1, x2 = _arguments(omega, params)
    return psi(k, float(x1)) * psi(k, float(x2)) - k * k


def small_omega_coefficient(k: int, params: ElasticityParams) -> float:
    """Leading coefficient `c` of `F_k(omega) ~ c omega^{2k}` as `omega -> 0`."""
    a1, a2 = params.a1, params.a2
    return (
        (a1 * a2) ** (k - 1)
        * (a1 * a1 + a2 * a2)
        / (math.factorial(k - 1) ** 2 * 2 ** (2 * k + 1) * k * (k + 1))
    )


@lru_cache(maxsize=None)
def nu_star() -> float:
    """
    Poisson ratio `(j^2 - 2 j'^2) / (2 j^2 - 2 j'^2)`, `j = j_{1,1}`, `j' = j'_{1,1}`,
    where the first disk eigenvalue turns from double to simple.

    Returns:
        (float): The threshold, about 0.349895.
    """

    j = bessel_zero(1, 1).value
    jp = bessel_deriv_zero(1, 1).value
    return (j * j - 2 * jp * jp) / (2 * j * j - 2 * jp * jp)


def radial_candidates(params: ElasticityParams, n_max: int = 3) -> List[float]:
    """Eigenvalues `mu j_{1,n}^2` and `(lambda + 2 mu) j_{1,n}^2` carried by the constant Fourier mode."""
    values = []
    for n in range(1, n_max + 1):
        j = bessel_zero(1, n).value
        values.extend((params.mu * j * j, (params.lam + 2 * params.mu) * j * j))
    return sorted(values)


def _first_root(k: int, params: ElasticityParams, j: float) -> float | None:
    # Scan in a2 * omega, which runs over (0, j_{1,1}] whatever mu is.
    scaled = np.append(np.arange(SCAN_START, j, SCAN_STEP), j)
    omega = scaled / params.a2
    values = transcendental_f(k, omega, params)

    negative = np.flatnonzero(values < 0)
    if not negative.size:
        return None
    idx = int(negative[0])
    if idx == 0:
        raise RootScanFailure(f'F_{k} is negative at the start of the scan!')

    root = find_root_bracketed(lambda w: transcendental_f(k, w, params), omega[idx - 1], omega[idx], tol=ROOT_TOL)
    logger.debug('F_%d: root omega=%.15g after %d iterations', k, root.value, root.iterations)
    return root.value


def first_eigenvalue(params: ElasticityParams, k_max: int = 20, tol_class: float = TOL_CLASS) -> DiskEigenvalue:
    """
    First Dirichlet eigenvalue of the unit disk.

    Args:
        params (ElasticityParams): Material parameters.
        k_max (int): Largest Fourier index scanned in the transcendental regime.
        tol_class (float): Half-width of the band around `nu_star` classified as the triple point.

    Returns:
        (DiskEigenvalue): The eigenvalue with its regime, and the minimizing mode and root when double.

    Raises:
        (RootScanFailure): If no `F_k` changes sign below `sqrt(mu) j_{1,1}` while `nu < nu_star`.
    """

    if k_max < 1:
        raise DomainError(f'k_max must be at least 1, got {k_max}!')

    j = bessel_zero(1, 1).value
    candidate = params.mu * j * j
    offset = params.nu - nu_star()

    if offset > tol_class:
        return DiskEigenvalue(value=candidate, regime=Regime.SIMPLE_BRANCH)
    if offset >= -tol_class:
        return DiskEigenvalue(
            value=candidate, regime=Regime.TRIPLE_AT_THRESHOLD, mode_k=1, omega_root=math.sqrt(candidate)
        )

    roots = []
    for k in range(1, k_max + 1):
        root = _first_root(k, params, j)
        if root is not None:
            roots.append((root, k))

    if not roots:
        raise RootScanFailure(f'No transcendental root below sqrt(mu) j_1,1 for nu={params.nu}!')

    omega, k = min(roots)
    logger.info('Disk eigenvalue nu=%.6g: double, k=%d, Lambda=%.12g', params.nu, k, omega * omega)
    return DiskEigenvalue(value=omega * omega, regime=Regime.TRANSCENDENTAL_DOUBLE, mode_k=k, omega_root=omega)


def _polar(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return np.maximum(np.hypot(x, y), _R_MIN), np.arctan2(y, x)


def _in_unit_disk(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x * x + y * y <= 1.0 + 1e-12


def _rotational_field() -> VectorField2D:
    j = bessel_zero(1, 1).value
    alpha = 1.0 / (math.sqrt(math.pi) * abs(bessel_j(0, j)))

    def evaluate(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        r, _ = _polar(x, y)
        radial = alpha * np.asarray(bessel_j(1, j * np.minimum(r, 1.0))) / r
        return -radial * y, radial * x

    return VectorField2D(evaluate, contains=_in_unit_disk, name='disk rotational')


def _potential_field(params: ElasticityParams, eig: DiskEigenvalue, which: Branch) -> VectorField2D:
    k = eig.mode_k
    w1, w2 = params.a1 * eig.omega_root, params.a2 * eig.omega_root
    first = k * bessel_j(k, w2)
    second = w1 * bessel_j_deriv(k, w1)

    def evaluate(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        r, theta = _polar(x, y)
        s = np.minimum(r, 1.0)
        jk1, djk1 = np.asarray(bessel_j(k, w1 * s)), np.asarray(bessel_j_deriv(k, w1 * s))
        jk2, djk2 = np.asarray(bessel_j(k, w2 * s)), np.asarray(bessel_j_deriv(k, w2 * s))
        cos, sin = np.cos(k * theta), np.sin(k * theta)

        if which == Branch.EVEN:
            # psi1 = A J_k(w1 r) cos(k t), psi2 = B J_k(w2 r) sin(k t), A = k J_k(w2), B = -w1 J'_k(w1)
            a, b = first, -second
            u_r = (a * w1 * djk1 + b * k * jk2 / r) * cos
            u_t = (-a * k * jk1 / r - b * w2 * djk2) * sin
        else:
            # psi1 = C J_k(w1 r) sin(k t), psi2 = D J_k(w2 r) cos(k t), C = k J_k(w2), D = w1 J'_k(w1)
            c, d = first, second
            u_r = (c * w1 * djk1 - d * k * jk2 / r) * sin
            u_t = (c * k * jk1 / r - d * w2 * djk2) * cos

        ct, st = np.cos(theta), np.sin(theta)
        return u_r * ct - u_t * st, u_r * st + u_t * ct

    return VectorField2D(evaluate, contains=_in_unit_disk, name=f'disk k={k} {which.value}')


def eigenfunction(
    params: ElasticityParams, eig: DiskEigenvalue, which: Branch | str = Branch.ROTATIONAL
) -> VectorField2D:
    """
    Eigenfunction attached to a disk eigenvalue.

    The rotational field `alpha (-sin t, cos t) J_1(j_{1,1} r)`, `alpha = 1 / (sqrt(pi) |J_0(j_{1,1})|)`,
    has unit L2 norm. The two fields of a double eigenvalue are returned unnormalized.

    Args:
        params (ElasticityParams): Material parameters used to compute `eig`.
        eig (DiskEigenvalue): Result of `first_eigenvalue`.
        which (Branch | str): `rotational` in the simple and triple regimes, `even` or `odd` when double.

    Returns:
        (VectorField2D): The field on the closed unit disk.

    Raises:
        (DomainError): If the branch does not exist in the regime of `eig`.
    """

    try:
        which = Branch(which)
    except ValueError as exc:
        raise DomainError(f'Unknown branch {which!r}!') from exc
    if eig.regime == Regime.TRANSCENDENTAL_DOUBLE:
        if which == Branch.ROTATIONAL:
            raise DomainError('A transcendental double eigenvalue has only the even and odd branches!')
        return _potential_field(params, eig, which)

    if which != Branch.ROTATIONAL:
        raise DomainError(f'Branch {which.value} is not available in the {eig.regime.value} regime!')
    return _rotational_field()
