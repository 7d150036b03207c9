"""
Dense matrix decompositions with fixed sign and ordering conventions.

SVD and eigendecomposition are unique only up to column signs (phases) and
degenerate subspaces; every routine here normalizes its output so repeated
calls on identical input give identical results:

- SVD columns: the largest-magnitude entry of each left singular vector is
  nonnegative (first such row wins ties); the matching right vector is
  flipped with it.
- Eigenpairs: sorted by nonincreasing modulus, then nonincreasing real part;
  conjugate pairs adjacent with the positive-imaginary member first; each
  eigenvector has unit norm and its largest-magnitude entry real positive.
"""

from typing import Any, List, Tuple

import numpy as np
import scipy.linalg

from ..core.config import settings
from ..core.exceptions import InvalidInputError
from ..core.logging import get_logger
from ..models.schemas import EigResult, PairTag, SvdResult

logger = get_logger(__name__)


def _as_finite_matrix(M: Any) -> np.ndarray:
    arr = np.array(M, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return arr


def rank_tolerance(shape: Tuple[int, int], sigma_max: float) -> float:
    """LAPACK-style cutoff max(rows, cols) * sigma_max * eps"""
    return max(shape) * sigma_max * np.finfo(float).eps


def _fix_signs(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape[1] == 0:
        return
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u *= signs
    v *= signs


def _is_degenerate_boundary(s: np.ndarray, n: int, tol: float) -> bool:
    # sigma_n and sigma_{n+1} tie; only meaningful when sigma_n is numerically nonzero
    if n >= s.size or s.size == 0 or s[0] == 0.0 or s[n - 1] <= tol:
        return False
    return bool(s[n - 1] - s[n] < settings.DEGENERACY_REL_TOL * s[0])


def svd_econ(M: Any) -> SvdResult:
    """Economic SVD with min(rows, cols) triplets"""
    arr = _as_finite_matrix(M)
    u, s, vt = np.linalg.svd(arr, full_matrices=False)
    v = vt.T.copy()
    _fix_signs(u, v)
    rank = int(np.sum(s > rank_tolerance(arr.shape, s[0]))) if s.size else 0
    return SvdResult(u=u, s=s, v=v, rank=rank)


def numerical_rank(M: Any) -> int:
    return svd_econ(M).rank


def svd_truncated(M: Any, n: int) -> SvdResult:
    """Best rank-n approximation (Eckart-Young); numerically zero triplets are dropped"""
    if n < 1:
        raise InvalidInputError(f"truncation order must be >= 1, got {n}")
    full = svd_econ(M)
    keep = min(n, full.rank)
    tol = rank_tolerance(full.u.shape[:1] + full.v.shape[:1], full.s[0]) if full.s.size else 0.0
    degenerate = _is_degenerate_boundary(full.s, n, tol)
    if degenerate:
        logger.warning("degenerate_truncation_boundary", n=n, sigma_n=float(full.s[n - 1]), sigma_next=float(full.s[n]))
    return SvdResult(
        u=full.u[:, :keep],
        s=full.s[:keep],
        v=full.v[:, :keep],
        rank=keep,
        degenerate_boundary=degenerate,
    )


def pinv(M: Any) -> np.ndarray:
    """Moore-Penrose pseudoinverse over the numerically nonzero singular values"""
    svd = svd_econ(M)
    r = svd.rank
    return (svd.v[:, :r] / svd.s[:r]) @ svd.u[:, :r].T


def orthonormal_complement(M: Any) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of col(M), sign convention applied"""
    arr = np.array(M, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.shape[1] == 0 or not np.any(arr):
        basis = np.eye(arr.shape[0])
    else:
        svd = svd_econ(arr)
        rcond = rank_tolerance(arr.shape, svd.s[0]) / svd.s[0]
        basis = scipy.linalg.null_space(arr.T, rcond=rcond)
    _fix_signs(basis, np.zeros_like(basis))
    return basis


def _normalize_eigenvector(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / np.abs(vec[pivot])
    return vec / phase


def eig(A: Any) -> EigResult:
    """Real eigendecomposition with conjugate-pair bookkeeping"""
    arr = _as_finite_matrix(A)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"eigendecomposition needs a square matrix, got {arr.shape}")

    w, vecs = scipy.linalg.eig(arr)

    # Group eigenvalues: LAPACK returns conjugate pairs consecutively
    groups: List[Tuple[complex, List[Tuple[complex, np.ndarray, PairTag]]]] = []
    i = 0
    size = w.size
    while i < size:
        lam = complex(w[i])
        if lam.imag == 0.0:
            vec = _normalize_eigenvector(vecs[:, i].real.astype(complex))
            groups.append((lam, [(complex(lam.real, 0.0), vec, "real")]))
            i += 1
            continue
        lead = lam if lam.imag > 0 else complex(w[i + 1])
        lead_vec = vecs[:, i] if lam.imag > 0 else vecs[:, i + 1]
        lead_vec = _normalize_eigenvector(lead_vec)
        groups.append((lead, [(lead, lead_vec, "pair+"), (lead.conjugate(), lead_vec.conj(), "pair-")]))
        i += 2

    groups.sort(key=lambda g: (-abs(g[0]), -g[0].real))

    eigenvalues = np.array([lam for _, members in groups for lam, _, _ in members], dtype=complex)
    eigenvectors = np.column_stack([vec for _, members in groups for _, vec, _ in members]) if size else np.zeros((0, 0), dtype=complex)
    pairing: List[PairTag] = [tag for _, members in groups for _, _, tag in members]

    cond = float(np.linalg.cond(eigenvectors)) if size else 1.0
    diagnostics: List[str] = []
    defective = not np.isfinite(cond) or cond > settings.DEFECTIVE_CONDITION_LIMIT
    if defective:
        diagnostics.append(f"eigenvector matrix condition {cond:.3e} exceeds {settings.DEFECTIVE_CONDITION_LIMIT:.1e}; matrix is defective or nearly so")
        logger.warning("defective_eigendecomposition", condition=cond, order=size)

    return EigResult(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        pairing=pairing,
        condition=cond if np.isfinite(cond) else float("inf"),
        defective=defective,
        diagnostics=diagnostics,
    )
