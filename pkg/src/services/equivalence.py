"""
Constructive maps between the state-space and extended-AR descriptions of
the same data, and between solutions of the subspace problem (Gamma, X) and
of the rank-constrained regression (Theta).
"""

from typing import Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import CompletionError, InvalidInputError, NumericalConsistencyError, ObservabilityError
from ..core.logging import get_logger
from ..models.schemas import FactorProvenance, HankelPair, LowRankMap, StateSpaceModel
from .lowrank import regression_objective, sid_objective
from .matdecomp import numerical_rank, orthonormal_complement, pinv, svd_econ, svd_truncated
from .sysid import estimate_states, observability_matrix

logger = get_logger(__name__)


def _tolerance(scale: float) -> float:
    return settings.CONSISTENCY_REL_TOL * max(scale, 1.0)


def ar_from_ss(model: StateSpaceModel, s: int) -> np.ndarray:
    """Theta = Gamma_s A Gamma_s^+, rank <= n"""
    gamma = observability_matrix(model, s)
    rank = numerical_rank(gamma) if np.any(gamma) else 0
    if rank < model.n:
        raise ObservabilityError(f"Gamma_{s} has rank {rank} < n = {model.n}; observability index exceeds s")
    return gamma @ model.a @ pinv(gamma)


def window_basis(h: HankelPair) -> np.ndarray:
    """Orthonormal basis of the span of the observed windows (columns of Y)"""
    svd = svd_econ(h.y_full)
    return svd.u[:, :svd.rank]


def ss_from_ar(theta: np.ndarray, window_basis: np.ndarray, n: int, m: int) -> StateSpaceModel:
    """Order-n realization of an extended-AR map.

    Theta <- G G^T Theta, Theta = P Q^T (P = U S, Q = V from its SVD),
    A~ = Q^T P, C~ = P[:m], zero-padded to order n with C_perp columns
    orthogonal to C~.
    """
    theta = np.asarray(theta, dtype=float)
    g = np.asarray(window_basis, dtype=float)
    rows = theta.shape[0]
    if theta.shape != (rows, rows) or g.shape[0] != rows:
        raise InvalidInputError(f"theta {theta.shape} and window basis {g.shape} are inconsistent")
    if rows % m:
        raise InvalidInputError(f"map size {rows} is not a multiple of the output dimension {m}")

    theta_rank = numerical_rank(theta) if np.any(theta) else 0
    if theta_rank > n:
        raise InvalidInputError(f"rank(theta) = {theta_rank} exceeds the model order n = {n}")

    projected = g @ (g.T @ theta)
    if np.any(projected):
        factors = svd_truncated(projected, n)
        p = factors.u * factors.s
        q = factors.v
    else:
        p = np.zeros((rows, 0))
        q = np.zeros((rows, 0))
    r = p.shape[1]

    a_tilde = q.T @ p
    c_tilde = p[:m]
    pad = n - r
    if pad:
        c_rank = numerical_rank(c_tilde) if np.any(c_tilde) else 0
        if m < pad + c_rank:
            raise CompletionError(f"cannot complete C with {pad} orthogonal columns: m = {m} < {pad} + rank(C~) = {pad + c_rank}")
        complement = orthonormal_complement(c_tilde)[:, :pad]
        a = np.zeros((n, n))
        a[:r, :r] = a_tilde
        c = np.hstack([c_tilde, complement])
        q = np.hstack([q, np.zeros((rows, pad))])
        p = np.hstack([p, np.zeros((rows, pad))])
    else:
        a, c = a_tilde, c_tilde

    logger.debug("ar_realized", n=n, r=r, padded=pad)
    return StateSpaceModel(a=a, c=c, s=rows // m, m=m, provenance=FactorProvenance(method="ar-realization", p=p, q=q))


def map_sid_to_dmd(gamma: np.ndarray, x: np.ndarray, h: HankelPair) -> np.ndarray:
    """Theta = Gamma X_p Y_p^+; attains the same objective as (Gamma, X)"""
    x = np.asarray(x, dtype=float)
    sid_value = sid_objective(gamma, x, h)
    theta = np.asarray(gamma, dtype=float) @ x[:, :h.ell] @ pinv(h.y_past)
    dmd_value = regression_objective(theta, h)
    if abs(dmd_value - sid_value) > _tolerance(sid_value):
        raise NumericalConsistencyError(f"mapped regression objective {dmd_value:.6e} differs from subspace objective {sid_value:.6e}")
    return theta


def map_dmd_to_sid(lowrank: LowRankMap, h: HankelPair) -> Tuple[np.ndarray, np.ndarray]:
    """(Gamma, X) = (P, Q^T Y); feasible and optimal for the subspace problem"""
    x = estimate_states(lowrank, h)
    value = sid_objective(lowrank.p, x, h)
    if abs(value - lowrank.residual_frobenius) > _tolerance(lowrank.residual_frobenius):
        raise NumericalConsistencyError(f"subspace objective {value:.6e} differs from regression optimum {lowrank.residual_frobenius:.6e}")
    return lowrank.p, x
