"""
Bessel functions of the first kind, their zeros and a bracketed root finder.

`bessel_j` sums the power series for small arguments and switches to Miller's
backward recurrence, normalized by `J_0 + 2 * sum(J_2m) = 1`, for larger ones.
Both paths are vectorized over `x`.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.optimize import brentq

from .errors import DomainError, InvalidBracket, RootScanFailure


logger = logging.getLogger(__name__)

_SERIES_STOP = 1e-17
_SERIES_MAX_TERMS = 500
_RESCALE = 1e250
_ZERO_SCAN_STEP = 0.25
_ZERO_SCAN_END = 100.0
_ZERO_TABLE_SIZE = 20
_ZERO_TOL = 1e-14

Real = float | np.ndarray


class BracketedRoot(BaseModel):
    """A root located inside a sign-changing bracket."""

    model_config = ConfigDict(frozen=True)

    value: float
    bracket: Tuple[float, float]
    residual: float
    iterations: int

    @model_validator(mode='after')
    def _value_inside_bracket(self) -> 'BracketedRoot':
        lo, hi = self.bracket
        if not lo <= self.value <= hi:
            raise ValueError(f'Root {self.value} lies outside its bracket {self.bracket}!')
        return self


def _check_order(k: int, minimum: int = 0) -> int:
    if int(k) != k or k < minimum:
        raise DomainError(f'Bessel order must be an integer >= {minimum}, got {k}!')
    return int(k)


def _as_argument(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError('Bessel argument must be finite!')
    if np.any(arr < 0):
        raise DomainError('Bessel argument must be non-negative!')
    return arr


def _series_switch(k: int) -> float:
    # Past this point the alternating series cancels more than three digits.
    return min(k + 10.0, 2.0 * math.sqrt(k + 1.0) + 4.0)


def _series(k: int, x: np.ndarray) -> np.ndarray:
    half = x / 2.0
    term = half**k / math.factorial(k)
    total = term.copy()
    ratio = -half * half
    for m in range(1, _SERIES_MAX_TERMS):
        term = term * ratio / (m * (m + k))
        total += term
        if np.all(np.abs(term) <= _SERIES_STOP * np.abs(total)):
            break
    return total


def _miller(k: int, x: np.ndarray) -> np.ndarray:
    top = max(k, float(np.max(x)), 1.0)
    n_start = 2 * ((int(top) + 20 + int(math.sqrt(40.0 * top))) // 2)

    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    result = np.zeros_like(x)

    for n in range(n_start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev

        order = n - 1
        if order == k:
            result = j_cur.copy()
        if order == 0:
            norm += j_cur
        elif order % 2 == 0:
            norm += 2.0 * j_cur

        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            result *= scale

    return result / norm


def bessel_j(k: int, x: ArrayLike) -> Real:
    """
    Bessel function of the first kind `J_k(x)`.

    Args:
        k (int): Order, a non-negative integer.
        x (ArrayLike): Non-negative argument, scalar or array.

    Returns:
        (float | np.ndarray): `J_k(x)`, a float for scalar input.

    Raises:
        (DomainError): If `k` or `x` is negative.
    """

    k = _check_order(k)
    arr = _as_argument(x)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)

    small = flat < _series_switch(k)
    if np.any(small):
        out[small] = _series(k, flat[small])
    if np.any(~small):
        out[~small] = _miller(k, flat[~small])

    out = out.reshape(np.shape(arr))
    return float(out) if out.ndim == 0 else out


def bessel_j_deriv(k: int, x: ArrayLike) -> Real:
    """
    Derivative `J'_k(x)`, from `J'_0 = -J_1` and `J'_k = (J_{k-1} - J_{k+1}) / 2`.

    Args:
        k (int): Order, a non-negative integer.
        x (ArrayLike): Non-negative argument, scalar or array.

    Returns:
        (float | np.ndarray): `J'_k(x)`.
    """

    k = _check_order(k)
    if k == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x))


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> BracketedRoot:
    """
    Locate a root of `f` inside `[lo, hi]` with Brent's method.

    Args:
        f (Callable[[float], float]): Scalar function.
        lo (float): Left end of the bracket.
        hi (float): Right end of the bracket.
        tol (float): Absolute tolerance on the root location.

    Returns:
        (BracketedRoot): The root with its residual and iteration count.

    Raises:
        (InvalidBracket): If `f(lo)` and `f(hi)` have the same sign.
    """

    if tol <= 0:
        raise DomainError(f'Tolerance must be positive, got {tol}!')
    lo, hi = float(min(lo, hi)), float(max(lo, hi))
    f_lo, f_hi = float(f(lo)), float(f(hi))

    if f_lo == 0.0:
        return BracketedRoot(value=lo, bracket=(lo, hi), residual=0.0, iterations=0)
    if f_hi == 0.0:
        return BracketedRoot(value=hi, bracket=(lo, hi), residual=0.0, iterations=0)
    if f_lo * f_hi > 0:
        raise InvalidBracket(f'No sign change on [{lo}, {hi}]: f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}!')

    value, info = brentq(f, lo, hi, xtol=tol, full_output=True)
    return BracketedRoot(value=value, bracket=(lo, hi), residual=abs(float(f(value))), iterations=info.iterations)


@lru_cache(maxsize=None)
def _zero_table(k: int, derivative: bool) -> Tuple[BracketedRoot, ...]:
    def f(x):
        return bessel_j_deriv(k, x) if derivative else bessel_j(k, x)

    grid = np.arange(max(k, 1), _ZERO_SCAN_END + _ZERO_SCAN_STEP / 2, _ZERO_SCAN_STEP)
    values = f(grid)
    roots = []
    for i in range(len(grid) - 1):
        if values[i] * values[i + 1] < 0:
            roots.append(find_root_bracketed(f, grid[i], grid[i + 1], tol=_ZERO_TOL))
            if len(roots) == _ZERO_TABLE_SIZE:
                break

    logger.debug('Zero table k=%d derivative=%s: %d zeros', k, derivative, len(roots))
    return tuple(roots)


def _table_lookup(k: int, n: int, derivative: bool) -> BracketedRoot:
    if not 1 <= n <= _ZERO_TABLE_SIZE:
        raise DomainError(f'Zero index must lie in [1, {_ZERO_TABLE_SIZE}], got {n}!')
    table = _zero_table(k, derivative)
    if len(table) < n:
        raise RootScanFailure(f'Scan found only {len(table)} zeros for k={k} (derivative={derivative})!')
    return table[n - 1]


def bessel_zero(k: int, n: int) -> BracketedRoot:
    """
    The n-th positive zero `j_{k,n}` of `J_k`.

    Args:
        k (int): Order in `[0, 20]`.
        n (int): Zero index in `[1, 20]`.

    Returns:
        (BracketedRoot): The zero.
    """

    k = _check_order(k)
    if k > _ZERO_TABLE_SIZE:
        raise DomainError(f'Zero tables cover orders up to {_ZERO_TABLE_SIZE}, got {k}!')
    return _table_lookup(k, n, derivative=False)


def bessel_deriv_zero(k: int, n: int) -> BracketedRoot:
    """
    The n-th positive zero `j'_{k,n}` of `J'_k`.

    Args:
        k (int): Order in `[1, 20]`.
        n (int): Zero index in `[1, 20]`.

    Returns:
        (BracketedRoot): The zero.
    """

    k = _check_order(k, minimum=1)
    if k > _ZERO_TABLE_SIZE:
        raise DomainError(f'Zero tables cover orders up to {_ZERO_TABLE_SIZE}, got {k}!')
    return _table_lookup(k, n, derivative=True)


def psi(k: int, x: float) -> float:
    """
    Logarithmic-derivative ratio `x J'_k(x) / J_k(x)` on `[0, j_{k,1})`, with `psi(k, 0) = k`.

    Args:
        k (int): Order, at least 1.
        x (float): Argument below the first zero of `J_k`.

    Returns:
        (float): The ratio.

    Raises:
        (DomainError): If `x` is negative or reaches `j_{k,1}`.
    """

    k = _check_order(k, minimum=1)
    if x < 0:
        raise DomainError(f'psi is defined for x >= 0, got {x}!')
    if x == 0:
        return float(k)
    first_zero = bessel_zero(k, 1).value
    if x >= first_zero:
        raise DomainError(f'psi_{k} is undefined at x={x} >= j_{k},1={first_zero}!')
    return x * bessel_j_deriv(k, x) / bessel_j(k, x)
