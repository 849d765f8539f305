import re
from abc import ABC
from enum import Enum
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


def _to_snake_case(value: str) -> str:
    return re.sub(r'(?<!^)(?=[A-Z])', '_', value).lower()


def render_value(value: Any) -> str:
    """
    Render one CSV cell. Floats keep 12 significant digits, booleans are `true`/`false`,
    `None` is an empty cell.

    Args:
        value (Any): The cell value.

    Returns:
        (str): The rendered cell.
    """

    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format(value, '.12g')
    return str(value)


class BaseRow(BaseModel, ABC):
    """Base model for report rows. Column order is field order; aliases are the CSV header names."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    class DoesNotExist(Exception):
        pass

    class MultipleObjectsReturned(Exception):
        pass

    @classmethod
    def experiment(cls) -> str:
        """
        Experiment id of the row type.
        Method converts the class name without the `Row` suffix to snake case.

        Returns:
            (str): The experiment id.
        """
        return _to_snake_case(cls.__name__.removesuffix('Row'))

    @classmethod
    def header(cls) -> List[str]:
        return [field.alias or name for name, field in cls.model_fields.items()]

    def render(self) -> List[str]:
        return [render_value(getattr(self, name)) for name in type(self).model_fields]

    @model_validator(mode='before')
    @classmethod
    def _coerce_numpy_scalars(cls, data: Any) -> Any:
        """
        Numerical code hands over numpy scalars; store plain Python values so that rendering
        and equality do not depend on the numpy type.

        Args:
            data (Any): The raw data.

        Returns:
            (Any): The data with numpy scalars converted.
        """

        if not isinstance(data, dict):
            return data
        result: Dict[str, Any] = {}
        for key, value in data.items():
            result[key] = value.item() if isinstance(value, np.generic) else value
        return result


class DiskSpectrumRow(BaseRow):
    nu: float
    mu: float
    lam: float = Field(alias='lambda')
    regime: str
    k: int | None = None
    Lambda: float


class CoefficientRow(BaseRow):
    k: int
    c_k: float
    C_k: float


class CertificateRow(BaseRow):
    nu: float
    mu: float
    k: int
    omega: float
    Lambda: float
    bracket: float
    amplitude: float
    m11: float
    decreases: bool


class RhombusRow(BaseRow):
    nu: float
    mu: float
    area: float
    Lambda: float
    disk_value: float
    beats_disk: bool


class RectangleRow(BaseRow):
    nu: float
    mu: float
    t: float
    L: float
    ell: float
    bound: float
    disk_value: float
    beats_disk: bool


class ThresholdRow(BaseRow):
    quantity: str
    nu: float | None = None
    value: float | None = None
    holds: bool | None = None


class FemRow(BaseRow):
    domain: str
    nu: float
    refine: int
    mode: int
    value: float
    residual: float
    gap: float | None = None
    below_reference: bool | None = None


class SweepRow(BaseRow):
    experiment_id: str = Field(alias='experiment')
    nu: float
    mu: float
    parameter: str
    parameter_value: float = Field(alias='value')
    Lambda_fem: float
    Lambda_reference: float | None = None
    refine: int
    residual: float
    timestamp: str = ''


class BoundsRow(BaseRow):
    domain: str
    nu: float
    mu: float
    refine: int
    lambda_d: float
    Lambda: float
    lower: float
    upper: float
    lower_holds: bool
    upper_holds: bool
    korn_constant: float
