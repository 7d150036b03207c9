"""
Rank-constrained matrix regression

    min_Theta ||Y_f - Theta Y_p||_F   s.t.  rank(Theta) <= n

solved in closed form from two SVDs, plus the checks that characterize its
solution set (projection identity, uniqueness, minimum norm, residual gap)
and the state-space objective evaluated for any (Gamma, X).
"""

from typing import Optional, Tuple, Union

import numpy as np

from ..core.config import settings
from ..core.exceptions import DimensionMismatchError, InfeasibleError, InvalidInputError, NumericalConsistencyError
from ..core.logging import get_logger
from ..models.schemas import GapReport, HankelPair, LowRankMap, OracleResult, SolutionCheck
from .matdecomp import numerical_rank, orthonormal_complement, pinv, svd_econ, svd_truncated

logger = get_logger(__name__)

Factors = Tuple[np.ndarray, np.ndarray]


def _past_basis(h: HankelPair) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(U2, S2, V2) restricted to the numerically nonzero singular values of y_past"""
    svd = svd_econ(h.y_past)
    r = svd.rank
    return svd.u[:, :r], svd.s[:r], svd.v[:, :r]


def regression_objective(theta: Union[np.ndarray, Factors], h: HankelPair) -> float:
    """||Y_f - Theta Y_p||_F for a dense map or a (p, q) factor pair"""
    if isinstance(theta, tuple):
        p, q = theta
        prediction = p @ (q.T @ h.y_past)
    else:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (h.rows, h.rows):
            raise DimensionMismatchError(f"map has shape {theta.shape}, expected {(h.rows, h.rows)}")
        prediction = theta @ h.y_past
    return float(np.linalg.norm(h.y_future - prediction))


def _consistency_scale(h: HankelPair) -> float:
    scale = float(np.linalg.norm(h.y_future))
    return settings.CONSISTENCY_REL_TOL * scale if scale > 0 else settings.CONSISTENCY_REL_TOL


def solve_rank_constrained(h: HankelPair, n: int) -> LowRankMap:
    """Closed-form global minimizer in factored form Theta* = P Q^T"""
    if n < 1:
        raise InvalidInputError(f"model order n must be >= 1, got {n}")

    # Step 1: economic SVD of the past data
    u2, s2, v2 = _past_basis(h)

    # Step 2: project the future data and truncate
    z = h.y_future @ v2
    if z.shape[1] == 0:
        p = np.zeros((h.rows, 0))
        q = np.zeros((h.rows, 0))
        z_singular = np.zeros(0)
        degenerate = False
    else:
        z_svd = svd_econ(z)
        z_singular = z_svd.s
        truncated = svd_truncated(z, n)
        degenerate = truncated.degenerate_boundary
        # Step 3: P = U1, Q = U2 S2^-1 V1 S1
        p = truncated.u
        q = (u2 / s2) @ (truncated.v * truncated.s)

    residual = regression_objective((p, q), h)
    result = LowRankMap(
        p=p,
        q=q,
        r=p.shape[1],
        requested_n=n,
        residual_frobenius=residual,
        degenerate_truncation=degenerate,
        m=h.m,
        s=h.s,
        z_singular_values=z_singular,
        y_past_rank=u2.shape[1],
        y_future_norm=float(np.linalg.norm(h.y_future)),
    )
    logger.info(
        "rank_constrained_solved",
        n=n,
        r=result.r,
        y_past_rank=result.y_past_rank,
        residual=residual,
        relative_residual=result.relative_residual,
        degenerate=degenerate,
    )
    return result


def objective_decomposition(h: HankelPair, n: int) -> Tuple[float, float]:
    """(||Y_f V2_perp||_F, sqrt(sum_{k>n} sigma_k(Z)^2)); the optimum is their root-sum-square"""
    if n < 1:
        raise InvalidInputError(f"model order n must be >= 1, got {n}")
    _, _, v2 = _past_basis(h)
    out_of_span = float(np.linalg.norm(h.y_future - (h.y_future @ v2) @ v2.T))
    if v2.shape[1] == 0:
        return out_of_span, 0.0
    sigma = svd_econ(h.y_future @ v2).s
    return out_of_span, float(np.sqrt(np.sum(sigma[n:] ** 2)))


def optimal_objective(h: HankelPair, n: int) -> float:
    out_of_span, truncation = objective_decomposition(h, n)
    return float(np.hypot(out_of_span, truncation))


def solve_full_rank(h: HankelPair) -> np.ndarray:
    """Unconstrained least-squares map Z S2^-1 U2^T"""
    u2, s2, v2 = _past_basis(h)
    z = h.y_future @ v2
    return (z / s2) @ u2.T


def residual_gap(h: HankelPair, n: int) -> GapReport:
    """||Theta_full Y_p - Theta* Y_p||_F against sqrt(sum_{k>n} sigma_k(Z)^2), computed independently"""
    lowrank = solve_rank_constrained(h, n)
    full = solve_full_rank(h)
    lhs = float(np.linalg.norm(full @ h.y_past - lowrank.p @ (lowrank.q.T @ h.y_past)))

    _, _, v2 = _past_basis(h)
    sigma = np.linalg.svd(h.y_future @ v2, compute_uv=False) if v2.shape[1] else np.zeros(0)
    rhs = float(np.sqrt(np.sum(sigma[n:] ** 2)))

    gap = abs(lhs - rhs)
    if gap > _consistency_scale(h):
        raise NumericalConsistencyError(f"residual gap identity violated: {lhs:.6e} vs {rhs:.6e}")
    return GapReport(n=n, lhs=lhs, rhs=rhs, gap=gap)


def is_solution(candidate: np.ndarray, h: HankelPair, n: int) -> SolutionCheck:
    """Optimality test: candidate U2 U2^T attains the optimum and rank(candidate) <= n"""
    candidate = np.asarray(candidate, dtype=float)
    if candidate.shape != (h.rows, h.rows):
        raise DimensionMismatchError(f"candidate has shape {candidate.shape}, expected {(h.rows, h.rows)}")
    u2, _, _ = _past_basis(h)
    projected = (candidate @ u2) @ u2.T
    objective = regression_objective(projected, h)
    optimum = optimal_objective(h, n)
    rank = numerical_rank(candidate) if np.any(candidate) else 0
    gap = objective - optimum
    return SolutionCheck(
        is_solution=bool(gap <= _consistency_scale(h) and rank <= n),
        objective=objective,
        optimum=optimum,
        objective_gap=gap,
        rank=rank,
        n=n,
    )


def has_unique_minimizer(lowrank: LowRankMap, h: HankelPair) -> bool:
    """Unique iff y_past has full row rank and the rank-n truncation is not degenerate"""
    return bool(lowrank.y_past_rank == h.rows and not lowrank.degenerate_truncation)


def is_unique(h: HankelPair, n: int) -> bool:
    return has_unique_minimizer(solve_rank_constrained(h, n), h)


def alternate_solution(lowrank: LowRankMap, h: HankelPair) -> np.ndarray:
    """Theta* + p1 q_perp^T with q_perp orthogonal to range(y_past); another solution when y_past is row-rank-deficient"""
    u2, _, _ = _past_basis(h)
    complement = orthonormal_complement(u2)
    if complement.shape[1] == 0:
        raise InvalidInputError("y_past has full row rank; the solution is unique")
    if lowrank.r == 0:
        raise InvalidInputError("zero map has no nonzero column to perturb with")
    return lowrank.theta + np.outer(lowrank.p[:, 0], complement[:, 0])


def sid_objective(gamma: np.ndarray, x: np.ndarray, h: HankelPair) -> float:
    """||Y_f - Gamma X_p||_F subject to row(X) in row(Y)"""
    gamma = np.asarray(gamma, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != h.ell + 1:
        raise DimensionMismatchError(f"state sequence must have ell+1 = {h.ell + 1} columns, got shape {x.shape}")
    if gamma.shape != (h.rows, x.shape[0]):
        raise DimensionMismatchError(f"gamma has shape {gamma.shape}, expected {(h.rows, x.shape[0])}")

    row_projector = pinv(h.y_full) @ h.y_full
    violation = float(np.linalg.norm(x @ row_projector - x))
    if violation > settings.FEASIBILITY_REL_TOL * float(np.linalg.norm(x)):
        raise InfeasibleError(f"row(X) is not contained in row(Y): projection residual {violation:.3e}")

    return float(np.linalg.norm(h.y_future - gamma @ x[:, :h.ell]))


def search_rank_constrained(
    h: HankelPair,
    n: int,
    seed: int,
    samples: Optional[int] = None,
    als_starts: Optional[int] = None,
) -> OracleResult:
    """Randomized rank-n search refined by alternating least squares.

    Built on numpy's own pinv so it shares no code path with the closed form.
    """
    samples = settings.ORACLE_SAMPLES if samples is None else samples
    als_starts = settings.ORACLE_ALS_STARTS if als_starts is None else als_starts
    rng = np.random.default_rng(seed)
    rows = h.rows

    # Random factorizations a b^T, evaluated in batch
    a = rng.standard_normal((samples, rows, n))
    b = rng.standard_normal((samples, rows, n))
    predictions = a @ (np.swapaxes(b, 1, 2) @ h.y_past)
    objectives = np.linalg.norm(h.y_future[None, :, :] - predictions, axis=(1, 2))
    best = float(objectives.min()) if samples else np.inf

    y_past_pinv = np.linalg.pinv(h.y_past)
    for _ in range(als_starts):
        right = rng.standard_normal((rows, n))
        previous = np.inf
        for _ in range(settings.ALS_MAX_ITERATIONS):
            states = right.T @ h.y_past
            left = h.y_future @ np.linalg.pinv(states)
            right = (np.linalg.pinv(left) @ h.y_future @ y_past_pinv).T
            current = float(np.linalg.norm(h.y_future - left @ (right.T @ h.y_past)))
            if abs(previous - current) < settings.ALS_TOL:
                break
            previous = current
        best = min(best, current)

    optimum = optimal_objective(h, n)
    return OracleResult(
        optimum=optimum,
        best_objective=best,
        improvement=optimum - best,
        candidates=samples + als_starts,
        seed=seed,
    )
