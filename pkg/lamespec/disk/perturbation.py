"""
Shape derivatives of `Lambda` and of `F = |Omega| Lambda` at the unit disk.

A boundary perturbation is described by its normal trace `phi = V.n` on the unit circle,
expanded as `alpha_0 + sum_k alpha_k cos(k t) + beta_k sin(k t)`. All sums run over
increasing k so that results are reproducible bit for bit.
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from ..errors import DegenerateCoefficient, RegimeMismatch
from ..params import ElasticityParams
from ..special_fn import bessel_j, bessel_j_deriv, bessel_zero
from .spectrum import DiskEigenvalue, Regime, first_eigenvalue, nu_star


logger = logging.getLogger(__name__)

K_MAX = 60
_DENOMINATOR_FLOOR = 1e-300
_BRACKET_REL_FLOOR = 1e-6


class FourierMode(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    alpha: float = 0.0
    beta: float = 0.0

    @property
    def energy(self) -> float:
        return self.alpha**2 + self.beta**2


class FourierPerturbation(BaseModel):
    """Normal trace `phi = V.n` of a boundary perturbation of the unit disk."""

    model_config = ConfigDict(frozen=True)

    alpha0: float = 0.0
    modes: Tuple[FourierMode, ...] = ()

    @model_validator(mode='after')
    def _distinct_modes(self) -> Self:
        ks = [mode.k for mode in self.modes]
        if len(ks) != len(set(ks)):
            raise ValueError(f'Fourier indices must be distinct, got {ks}!')
        return self

    @classmethod
    def single(cls, k: int, alpha: float = 1.0, beta: float = 0.0) -> Self:
        return cls(modes=(FourierMode(k=k, alpha=alpha, beta=beta),))

    @classmethod
    def from_coefficients(cls, alpha: ArrayLike, beta: ArrayLike, alpha0: float = 0.0, k_start: int = 1) -> Self:
        """
        Build a perturbation from coefficient arrays indexed from `k_start`.

        Args:
            alpha (ArrayLike): Cosine coefficients.
            beta (ArrayLike): Sine coefficients, same length.
            alpha0 (float): Mean of `phi`.
            k_start (int): Fourier index of the first entry.

        Returns:
            (FourierPerturbation): The perturbation.
        """

        modes = tuple(
            FourierMode(k=k_start + i, alpha=float(a), beta=float(b)) for i, (a, b) in enumerate(zip(alpha, beta))
        )
        return cls(alpha0=alpha0, modes=modes)

    @property
    def max_k(self) -> int:
        return max((mode.k for mode in self.modes), default=0)

    def sorted_modes(self) -> List[FourierMode]:
        return sorted(self.modes, key=lambda mode: mode.k)

    def swapped(self) -> Self:
        """The perturbation with every `(alpha_k, beta_k)` pair exchanged."""
        return self.__class__(
            alpha0=self.alpha0, modes=tuple(FourierMode(k=m.k, alpha=m.beta, beta=m.alpha) for m in self.modes)
        )

    def h1_seminorm_sq(self) -> float:
        """`sum_{k >= 2} (k^2 + 1)(alpha_k^2 + beta_k^2)`, the norm controlled by the second derivative."""
        return sum((m.k**2 + 1) * m.energy for m in self.sorted_modes() if m.k >= 2)

    def evaluate(self, theta: ArrayLike) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        value = np.full_like(theta, self.alpha0)
        for m in self.sorted_modes():
            value = value + m.alpha * np.cos(m.k * theta) + m.beta * np.sin(m.k * theta)
        return value


def _require_simple(params: ElasticityParams) -> None:
    if params.nu <= nu_star():
        raise RegimeMismatch(f'Disk shape derivatives need nu > nu_star, got nu={params.nu}!')


def _disk_constants(params: ElasticityParams) -> Tuple[float, float]:
    return bessel_zero(1, 1).value, params.omega_ratio


def first_shape_derivative(Lambda: float, phi: FourierPerturbation) -> float:
    """`dLambda = -2 Lambda alpha_0`: only dilations move a simple disk eigenvalue at first order."""
    return -2.0 * Lambda * phi.alpha0


def area_derivative(phi: FourierPerturbation) -> float:
    return 2.0 * math.pi * phi.alpha0


def second_derivative_area(phi: FourierPerturbation) -> float:
    """`d2|Omega| = pi (2 alpha_0^2 + sum_k (alpha_k^2 + beta_k^2))` for the unit circle, where H = 1."""
    return math.pi * (2.0 * phi.alpha0**2 + sum(m.energy for m in phi.sorted_modes()))


def first_derivative_F(Lambda: float, phi: FourierPerturbation) -> float:
    """`d(|Omega| Lambda) = Lambda d|Omega| + |Omega| dLambda`, zero at the disk for every `phi`."""
    return Lambda * area_derivative(phi) + math.pi * first_shape_derivative(Lambda, phi)


def _bessel_terms(k: int, j: float, omega: float) -> Tuple[float, float, float, float]:
    return bessel_j(k, j), bessel_j_deriv(k, j), bessel_j(k, omega * j), bessel_j_deriv(k, omega * j)


def c_coefficient(k: int, params: ElasticityParams) -> float:
    """
    Mode-k coefficient of the second derivative of `Lambda` at the disk:
    `d2Lambda = mu j^2 (6 alpha_0^2 + sum_k c_k (alpha_k^2 + beta_k^2))`.

    Args:
        k (int): Fourier index, at least 1.
        params (ElasticityParams): Material parameters with `nu > nu_star`.

    Returns:
        (float): `c_k`.

    Raises:
        (RegimeMismatch): If `nu <= nu_star`.
        (DegenerateCoefficient): If the denominator vanishes.
    """

    _require_simple(params)
    j, w = _disk_constants(params)
    jk, djk, jkw, djkw = _bessel_terms(k, j, w)

    numerator = k * k * jkw * jk - w * j * j * djk * djkw - 2 * k * w * j * j * jk * djkw
    denominator = j * j * w * djkw * djk - k * k * jk * jkw
    if abs(denominator) < _DENOMINATOR_FLOOR:
        raise DegenerateCoefficient(f'c_{k} denominator vanished ({denominator:.3e})!')
    return numerator / denominator


def big_c_coefficient(k: int, params: ElasticityParams) -> float:
    """
    Mode-k coefficient `C_k = 1 + c_k` of the second derivative of `F = |Omega| Lambda`.
    `C_1 = 0` because translations leave `F` unchanged.

    Args:
        k (int): Fourier index, at least 1.
        params (ElasticityParams): Material parameters with `nu > nu_star`.

    Returns:
        (float): `C_k`.
    """

    _require_simple(params)
    j, w = _disk_constants(params)
    jk, djk, jkw, djkw = _bessel_terms(k, j, w)

    numerator = 2 * j * j * w * k * djkw * jk
    denominator = k * k * jkw * jk - j * j * w * djkw * djk
    if abs(denominator) < _DENOMINATOR_FLOOR:
        raise DegenerateCoefficient(f'C_{k} denominator vanished ({denominator:.3e})!')
    return numerator / denominator


def second_derivative_lambda(params: ElasticityParams, phi: FourierPerturbation) -> float:
    """`mu j^2 (6 alpha_0^2 + sum_k c_k (alpha_k^2 + beta_k^2))`."""
    j, _ = _disk_constants(params)
    total = 6.0 * phi.alpha0**2 + sum(c_coefficient(m.k, params) * m.energy for m in phi.sorted_modes())
    return params.mu * j * j * total


def second_derivative_F(params: ElasticityParams, phi: FourierPerturbation, k_max: int = K_MAX) -> float:
    """
    `<d2F V, V> = pi Lambda sum_{k >= 1} C_k (alpha_k^2 + beta_k^2)` at the unit disk.

    Args:
        params (ElasticityParams): Material parameters with `nu > nu_star`.
        phi (FourierPerturbation): Normal trace of the perturbation.
        k_max (int): Largest Fourier index kept in the sum.

    Returns:
        (float): The second derivative; positive as soon as a mode k >= 2 is present.
    """

    _require_simple(params)
    j, _ = _disk_constants(params)
    Lambda = params.mu * j * j
    total = sum(big_c_coefficient(m.k, params) * m.energy for m in phi.sorted_modes() if m.k <= k_max)
    dropped = [m.k for m in phi.modes if m.k > k_max]
    if dropped:
        logger.warning('Modes %s above k_max=%d were dropped from d2F', dropped, k_max)
    return math.pi * Lambda * total


def coercivity_constant(params: ElasticityParams, k_max: int = K_MAX) -> float:
    """`A_0 = min_{2 <= k <= k_max} pi Lambda C_k / (k^2 + 1)`, so `d2F >= A_0 |phi|^2_{H1}`."""
    _require_simple(params)
    j, _ = _disk_constants(params)
    Lambda = params.mu * j * j
    return min(math.pi * Lambda * big_c_coefficient(k, params) / (k * k + 1) for k in range(2, k_max + 1))


def c_ratio_profile(params: ElasticityParams, k_values: ArrayLike) -> np.ndarray:
    """Measured `C_k / (k (k + 1))` on the given indices."""
    return np.array([big_c_coefficient(int(k), params) / (k * (k + 1)) for k in k_values])


def _double_root_data(k: int, params: ElasticityParams, eig: DiskEigenvalue) -> Tuple[float, float]:
    if eig.regime != Regime.TRANSCENDENTAL_DOUBLE:
        raise RegimeMismatch(f'The non-optimality witness needs a double eigenvalue, got {eig.regime.value}!')
    if eig.mode_k != k:
        raise RegimeMismatch(f'Eigenvalue belongs to mode {eig.mode_k}, not {k}!')
    return params.a1 * eig.omega_root, params.a2 * eig.omega_root


def m11_bracket(k: int, params: ElasticityParams, eig: DiskEigenvalue) -> Tuple[float, float]:
    """
    Bracketed factor `(lambda + 2 mu) k^2 w1^2 J_k(w1)^2 - mu w2^4 J'_k(w1)^2` of `M_11`
    and its magnitude relative to the two terms.

    Returns:
        (Tuple[float, float]): `(bracket, relative magnitude)`.
    """

    w1, w2 = _double_root_data(k, params, eig)
    first = (params.lam + 2 * params.mu) * k * k * w1 * w1 * bessel_j(k, w1) ** 2
    second = params.mu * w2**4 * bessel_j_deriv(k, w1) ** 2
    bracket = first - second
    scale = abs(first) + abs(second)
    return bracket, (abs(bracket) / scale if scale else 0.0)


def m11_gateaux(k: int, params: ElasticityParams, eig: DiskEigenvalue, amplitude: float) -> float:
    """
    Entry `M_11` of the derivative matrix of the double eigenvalue along `V(1, t) = amplitude cos(2 k t)`.

    The perturbation has zero mean, so the area is unchanged at first order, and `M_11` is
    linear in the amplitude: the sign of the amplitude picks the sign of `M_11`.

    Args:
        k (int): Mode index of the double eigenvalue.
        params (ElasticityParams): Material parameters with `nu < nu_star`.
        eig (DiskEigenvalue): Result of `first_eigenvalue` for `params`.
        amplitude (float): Amplitude of the perturbation.

    Returns:
        (float): `M_11`.

    Raises:
        (RegimeMismatch): If `eig` is not a double eigenvalue of mode k.
        (DegenerateCoefficient): If the bracketed factor vanishes.
    """

    bracket, relative = m11_bracket(k, params, eig)
    if relative < _BRACKET_REL_FLOOR:
        raise DegenerateCoefficient(f'M_11 bracket is degenerate (relative magnitude {relative:.3e})!')
    w1, w2 = _double_root_data(k, params, eig)
    return w1 * w1 * bessel_j(k, w2) ** 2 * (math.pi * amplitude / 2.0) * bracket


class NonOptimalityCertificate(BaseModel):
    """An area-preserving perturbation along which the double disk eigenvalue decreases."""

    model_config = ConfigDict(frozen=True)

    k: int
    omega: float
    Lambda: float
    bracket: float
    relative_bracket: float
    amplitude: float
    m11: float

    @property
    def decreases(self) -> bool:
        return self.m11 < 0


def non_optimality_certificate(params: ElasticityParams, amplitude: float = 1.0) -> NonOptimalityCertificate:
    """
    Witness that the disk does not minimize `Lambda` at fixed area when `nu < nu_star`:
    the amplitude of `cos(2 k t)` is signed so that `M_11 < 0`.

    Args:
        params (ElasticityParams): Material parameters with `nu < nu_star`.
        amplitude (float): Magnitude of the amplitude.

    Returns:
        (NonOptimalityCertificate): The witness.
    """

    eig = first_eigenvalue(params)
    if eig.regime != Regime.TRANSCENDENTAL_DOUBLE:
        raise RegimeMismatch(f'nu={params.nu} is not below nu_star; the disk eigenvalue is {eig.regime.value}!')

    k = eig.mode_k
    bracket, relative = m11_bracket(k, params, eig)
    signed = -abs(amplitude) if bracket > 0 else abs(amplitude)
    m11 = m11_gateaux(k, params, eig, signed)
    logger.info('Certificate nu=%.6g: k=%d, M11=%.6e', params.nu, k, m11)
    return NonOptimalityCertificate(
        k=k,
        omega=eig.omega_root,
        Lambda=eig.value,
        bracket=bracket,
        relative_bracket=relative,
        amplitude=signed,
        m11=m11,
    )
