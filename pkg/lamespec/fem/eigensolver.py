"""
Blocked inverse iteration for the smallest eigenpairs of a sparse symmetric pencil.
"""

import logging
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import linalg as la
from scipy.sparse import linalg as spla
from typing_extensions import Self

from ..errors import ConvergenceError, DomainError, FactorizationError
from .assembly import SymmetricSparsePencil


logger = logging.getLogger(__name__)

MAX_ITERATIONS = 500
MULTIPLICITY_GAP = 1e-3


class EigenResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    iterations: int

    @model_validator(mode='after')
    def _check_ascending(self) -> Self:
        if len(self.values) and np.any(np.diff(self.values) < 0):
            raise ValueError('Eigenvalues must be ascending!')
        return self

    @property
    def gaps(self) -> np.ndarray:
        """Relative gaps `(values[i+1] - values[i]) / values[i]` between consecutive modes."""
        return np.diff(self.values) / self.values[:-1]

    @property
    def gap(self) -> float:
        """Relative gap between the first and second requested modes (inf with a single mode)."""
        return float(self.gaps[0]) if len(self.values) > 1 else float('inf')

    def multiplicity(self, index: int = 0, threshold: float = MULTIPLICITY_GAP) -> int:
        """
        Size of the cluster of values starting at `index`, counting neighbours whose relative gap
        is below `threshold`.
        """

        count = 1
        for gap in self.gaps[index:]:
            if gap >= threshold:
                break
            count += 1
        return count


def _m_orthonormalize(X: np.ndarray, M) -> np.ndarray:
    gram = X.T @ (M @ X)
    gram = 0.5 * (gram + gram.T)
    w, V = la.eigh(gram)
    keep = w > w.max() * 1e-14
    return X @ (V[:, keep] / np.sqrt(w[keep]))


def solve_smallest(
    pencil: SymmetricSparsePencil,
    n_eigs: int,
    tol: float = 1e-8,
    seed: int = 0,
    max_iter: int = MAX_ITERATIONS,
) -> EigenResult:
    """
    Compute the `n_eigs` smallest eigenpairs of `A x = theta M x`.

    The stiffness matrix is factored once; a block of `n_eigs + 2` vectors is iterated with
    `A^{-1} M`, M-orthonormalized and projected by Rayleigh-Ritz until every requested residual
    `|A x - theta M x| / |M x|` is below `tol`.

    Args:
        pencil (SymmetricSparsePencil): The reduced pencil.
        n_eigs (int): Number of requested modes.
        tol (float): Relative residual tolerance.
        seed (int): Seed of the random starting block.
        max_iter (int): Iteration cap.

    Returns:
        (EigenResult): Values, M-orthonormal vectors and residuals of the requested modes.

    Raises:
        FactorizationError: The stiffness matrix could not be factored.
        ConvergenceError: Residuals stayed above `tol` after `max_iter` iterations.
    """

    if n_eigs < 1:
        raise DomainError(f'n_eigs must be at least 1, got {n_eigs}!')
    A, M = pencil.stiffness.tocsc(), pencil.mass.tocsr()
    n = pencil.dof_count
    block = min(n_eigs + 2, n)
    if n_eigs > n:
        raise DomainError(f'Requested {n_eigs} modes from a pencil with {n} degrees of freedom!')

    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise FactorizationError(f'Sparse factorization failed: {exc}') from exc

    rng = np.random.default_rng(seed)
    X = _m_orthonormalize(rng.standard_normal((n, block)), M)
    residuals: List[float] = []
    for iteration in range(1, max_iter + 1):
        Y = lu.solve(np.asarray(M @ X))
        if not np.all(np.isfinite(Y)):
            raise FactorizationError('Sparse solve produced non-finite values!')
        Y = _m_orthonormalize(Y, M)
        Ar = Y.T @ (A @ Y)
        Mr = Y.T @ (M @ Y)
        theta, C = la.eigh(0.5 * (Ar + Ar.T), 0.5 * (Mr + Mr.T))
        X = Y @ C
        AX, MX = A @ X[:, :n_eigs], M @ X[:, :n_eigs]
        R = AX - MX * theta[:n_eigs]
        residuals = list(np.linalg.norm(R, axis=0) / np.linalg.norm(MX, axis=0))
        logger.debug('iteration %d: max residual %.3e', iteration, max(residuals))
        if max(residuals) <= tol:
            if theta[0] <= 0:
                raise FactorizationError('Pencil is not positive definite!')
            return EigenResult(
                values=theta[:n_eigs].copy(),
                vectors=X[:, :n_eigs].copy(),
                residuals=np.asarray(residuals),
                iterations=iteration,
            )
    raise ConvergenceError(
        f'Inverse iteration did not converge in {max_iter} iterations (max residual {max(residuals):.3e})!'
    )
