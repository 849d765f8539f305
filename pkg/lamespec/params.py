import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from .errors import DomainError, InadmissibleParameters


class WaveScalings(BaseModel):
    """Compressional and shear wave scalings `a1 = 1/sqrt(lambda + 2 mu)`, `a2 = 1/sqrt(mu)`."""

    model_config = ConfigDict(frozen=True)

    a1: float
    a2: float
    omega_ratio: float

    @model_validator(mode='after')
    def _check_ordering(self) -> Self:
        if not 0 < self.a1 < self.a2:
            raise ValueError(f'Expected 0 < a1 < a2, got a1={self.a1}, a2={self.a2}!')
        if not 0 < self.omega_ratio < 1:
            raise ValueError(f'omega_ratio must lie in (0, 1), got {self.omega_ratio}!')
        return self


class ElasticityParams(BaseModel):
    """
    Lamé pair `(mu, lambda)` of an isotropic material.

    Every derived scalar (Poisson ratio, `a = (lambda + mu) / mu`, wave scalings)
    is computed from the pair, which is the only stored state.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    mu: float = Field(gt=0)
    lam: float = Field(alias='lambda')

    class Inadmissible(InadmissibleParameters):
        pass

    def __init__(self, **data) -> None:
        """
        Reject pairs outside the admissible set before pydantic validation,
        so callers see `Inadmissible` rather than a generic validation error.
        """

        mu = data.get('mu')
        lam = data.get('lam', data.get('lambda'))
        if mu is not None and lam is not None:
            self._check_admissible(float(mu), float(lam))
        super().__init__(**data)

    @classmethod
    def _check_admissible(cls, mu: float, lam: float) -> None:
        if not (math.isfinite(mu) and math.isfinite(lam)):
            raise cls.Inadmissible(f'Lamé coefficients must be finite, got mu={mu}, lambda={lam}!')
        if mu <= 0:
            raise cls.Inadmissible(f'Shear modulus must be positive, got mu={mu}!')
        if lam + mu <= 0:
            raise cls.Inadmissible(f'lambda + mu must be positive, got {lam + mu}!')
        # nu > -1 is equivalent to 3 lambda + 2 mu > 0
        if 3 * lam + 2 * mu <= 0:
            raise cls.Inadmissible(f'Poisson ratio must exceed -1 (lambda={lam}, mu={mu})!')

    @classmethod
    def from_lame(cls, lam: float, mu: float) -> Self:
        """
        Build parameters from the Lamé pair.

        Args:
            lam (float): First Lamé parameter.
            mu (float): Shear modulus.

        Returns:
            (ElasticityParams): The parameters.
        """
        return cls(mu=mu, lam=lam)

    @classmethod
    def from_poisson(cls, nu: float, mu: float) -> Self:
        """
        Build parameters from the Poisson ratio and the shear modulus.

        Args:
            nu (float): Poisson ratio in `(-1, 1/2)`.
            mu (float): Shear modulus.

        Returns:
            (ElasticityParams): The parameters with `lambda = 2 nu mu / (1 - 2 nu)`.
        """

        if not -1 < nu < 0.5:
            raise cls.Inadmissible(f'Poisson ratio must lie in (-1, 0.5), got {nu}!')
        return cls(mu=mu, lam=2 * nu * mu / (1 - 2 * nu))

    @classmethod
    def from_young(cls, young: float, nu: float) -> Self:
        """
        Build parameters from the Young modulus and the Poisson ratio.
        The modulus is converted right away; nothing downstream sees it.

        Args:
            young (float): Young modulus, positive.
            nu (float): Poisson ratio in `(-1, 1/2)`.

        Returns:
            (ElasticityParams): The parameters.
        """

        if young <= 0:
            raise cls.Inadmissible(f'Young modulus must be positive, got {young}!')
        return cls.from_poisson(nu, young / (2 * (1 + nu)))

    @classmethod
    def from_ratio(cls, a: float, mu: float = 1.0) -> Self:
        """
        Build parameters from `a = (lambda + mu) / mu`, the weight of the divergence term.

        Args:
            a (float): Ratio, greater than 1/3.
            mu (float): Shear modulus.

        Returns:
            (ElasticityParams): The parameters with `lambda = (a - 1) mu`.
        """

        if a <= 1.0 / 3.0:
            raise cls.Inadmissible(f'a = (lambda + mu) / mu must exceed 1/3, got {a}!')
        return cls(mu=mu, lam=(a - 1) * mu)

    @classmethod
    def korn_normalized(cls) -> Self:
        """`mu = 1/2, lambda = 0`, for which the energy is the Korn energy `int |e(u)|^2`."""
        return cls(mu=0.5, lam=0.0)

    def scaled(self, factor: float) -> Self:
        if factor <= 0:
            raise DomainError(f'Scaling factor must be positive, got {factor}!')
        return self.__class__(mu=self.mu * factor, lam=self.lam * factor)

    @property
    def nu(self) -> float:
        return self.lam / (2 * (self.lam + self.mu))

    @property
    def a(self) -> float:
        return (self.lam + self.mu) / self.mu

    @property
    def young(self) -> float:
        return self.mu * (3 * self.lam + 2 * self.mu) / (self.lam + self.mu)

    @property
    def a1(self) -> float:
        return 1.0 / math.sqrt(self.lam + 2 * self.mu)

    @property
    def a2(self) -> float:
        return 1.0 / math.sqrt(self.mu)

    @property
    def omega_ratio(self) -> float:
        return math.sqrt(self.mu / (self.lam + 2 * self.mu))

    @property
    def scalings(self) -> WaveScalings:
        return WaveScalings(a1=self.a1, a2=self.a2, omega_ratio=self.omega_ratio)


def wave_scalings(params: ElasticityParams, Lambda: float) -> Tuple[float, float, float]:
    """
    Wave numbers attached to an eigenvalue candidate.

    Args:
        params (ElasticityParams): Material parameters.
        Lambda (float): Eigenvalue candidate, positive.

    Returns:
        (Tuple[float, float, float]): `(omega, omega1, omega2)` with `omega = sqrt(Lambda)`,
            `omega1 = a1 omega` and `omega2 = a2 omega`.
    """

    if Lambda <= 0:
        raise DomainError(f'Lambda must be positive, got {Lambda}!')
    omega = math.sqrt(Lambda)
    return omega, params.a1 * omega, params.a2 * omega
