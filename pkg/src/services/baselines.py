"""
Reference methods: the UPC subspace method for autonomous systems and
classic truncated-SVD DMD, plus the row projections they are written in.

A/B   = A B^+ B          (rows of A projected onto row(B))
A/B^⊥ = A (I - B^+ B)    (its complement)
"""

import numpy as np

from ..core.exceptions import DimensionMismatchError, InvalidInputError
from ..core.logging import get_logger
from ..models.schemas import ArrayModel, HankelPair, RealMatrix, RealVector
from .lowrank import regression_objective, sid_objective
from .matdecomp import eig, pinv, svd_truncated

logger = get_logger(__name__)


def _check_columns(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(f"row projection needs equal column counts, got {a.shape[1]} and {b.shape[1]}")


def project_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_columns(a, b)
    return a @ (pinv(b) @ b)


def project_complement(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_columns(a, b)
    return a @ (np.eye(b.shape[1]) - pinv(b) @ b)


class UpcSolution(ArrayModel):
    gamma: RealMatrix
    x: RealMatrix
    objective: float


def upc_identify(h: HankelPair, n: int) -> UpcSolution:
    """Gamma = U S^1/2 from the n-truncated SVD of Y_f/Y_p; X = S^-1/2 U^T Y_f Y_p^+ Y"""
    if n < 1:
        raise InvalidInputError(f"model order n must be >= 1, got {n}")
    y_past_pinv = pinv(h.y_past)
    projected = h.y_future @ (y_past_pinv @ h.y_past)
    truncated = svd_truncated(projected, n)

    root = np.sqrt(truncated.s)
    gamma = truncated.u * root
    x = (truncated.u / root).T @ h.y_future @ (y_past_pinv @ h.y_full)
    objective = sid_objective(gamma, x, h)

    logger.info("upc_identified", n=n, rank=truncated.rank, objective=objective)
    return UpcSolution(gamma=gamma, x=x, objective=objective)


class TruncatedDmd(ArrayModel):
    """Classic DMD map Theta = Y_f V~ S~^-1 U~^T stored as left @ right^T"""

    left: RealMatrix
    right: RealMatrix
    singular_values: RealVector
    objective: float

    @property
    def theta(self) -> np.ndarray:
        return self.left @ self.right.T

    def projected_operator(self) -> np.ndarray:
        """U~^T Theta U~ (the n x n operator classic DMD diagonalizes)"""
        return self.right.T @ self.left

    def eigenvalues(self) -> np.ndarray:
        operator = self.projected_operator()
        if operator.size == 0:
            return np.zeros(0, dtype=complex)
        return eig(operator).eigenvalues


def truncated_dmd(h: HankelPair, n: int) -> TruncatedDmd:
    if n < 1:
        raise InvalidInputError(f"model order n must be >= 1, got {n}")
    truncated = svd_truncated(h.y_past, n)
    left = (h.y_future @ truncated.v) / truncated.s
    right = truncated.u
    objective = regression_objective((left, right), h)

    logger.info("truncated_dmd_fitted", n=n, rank=truncated.rank, objective=objective)
    return TruncatedDmd(left=left, right=right, singular_values=truncated.s, objective=objective)
