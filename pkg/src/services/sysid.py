"""
State-space extraction, mode decomposition and prediction from a factored
low-rank map, and the end-to-end identification entry point.
"""

from typing import Literal, Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import DefectiveMatrixError, DimensionMismatchError, InvalidInputError
from ..core.logging import get_logger
from ..models.schemas import (
    FactorProvenance,
    HankelPair,
    IdentificationResult,
    LowRankMap,
    ModeSet,
    OutputSequence,
    Prediction,
    StateSpaceModel,
)
from .matdecomp import eig, pinv

logger = get_logger(__name__)

ExtractionMethod = Literal["factor", "shift"]
PredictionMethod = Literal["state-space", "extended-ar"]


def extract_system(lowrank: LowRankMap, method: ExtractionMethod = "factor") -> StateSpaceModel:
    """(A, C) from Theta* = P Q^T.

    "factor": A = Q^T P, C = P[:m].  "shift": A from the shift invariance of
    Gamma = P, i.e. A = Gamma[:m(s-1)]^+ Gamma[m:], kept for cross-validation.
    """
    p, q, m = lowrank.p, lowrank.q, lowrank.m
    if method == "factor":
        a = q.T @ p
    elif method == "shift":
        if lowrank.s < 2:
            raise InvalidInputError("shift-invariance extraction needs delay order s >= 2")
        if lowrank.r == 0:
            a = np.zeros((0, 0))
        else:
            a = pinv(p[:m * (lowrank.s - 1)]) @ p[m:]
    else:
        raise InvalidInputError(f"unknown extraction method {method!r}")

    return StateSpaceModel(
        a=a,
        c=p[:m].copy(),
        s=lowrank.s,
        m=m,
        provenance=FactorProvenance(method=f"siddmd-{method}", p=p, q=q),
    )


def observability_matrix(model: StateSpaceModel, s: int) -> np.ndarray:
    """Gamma_s = [C; CA; ...; CA^(s-1)]"""
    if s < 1:
        raise InvalidInputError(f"delay order s must be >= 1, got {s}")
    blocks = [model.c]
    for _ in range(s - 1):
        blocks.append(blocks[-1] @ model.a)
    return np.vstack(blocks)


def observability_index(model: StateSpaceModel, s_max: int) -> Optional[int]:
    """Smallest s <= s_max for which Gamma_s has full column rank, or None"""
    for s in range(1, s_max + 1):
        gamma = observability_matrix(model, s)
        if np.linalg.matrix_rank(gamma) == model.n:
            return s
    return None


def estimate_states(lowrank: LowRankMap, h: HankelPair) -> np.ndarray:
    """State sequence X = Q^T Y (n x (ell+1)); row(X) lies in row(Y) by construction"""
    if lowrank.q.shape[0] != h.rows:
        raise DimensionMismatchError(f"map rows {lowrank.q.shape[0]} do not match Hankel rows {h.rows}")
    return lowrank.q.T @ h.y_full


def one_step_objective(model: StateSpaceModel, lowrank: LowRankMap, h: HankelPair) -> float:
    """||[X_f; Y_f] - [A; C] X_p||_F for the induced states X = Q^T Y"""
    x = estimate_states(lowrank, h)
    stacked = np.vstack([x[:, 1:], h.y_future[:h.m]])
    predicted = np.vstack([model.a, model.c]) @ x[:, :-1]
    return float(np.linalg.norm(stacked - predicted))


def modes(model: StateSpaceModel, dt: float = None) -> ModeSet:
    """Spatial modes Psi = C Phi and temporal modes Lambda from A Phi = Phi Lambda"""
    dt = settings.DEFAULT_DT if dt is None else dt
    if model.n == 0:
        return ModeSet(
            spatial=np.zeros((model.m, 0), dtype=complex),
            temporal=np.zeros(0, dtype=complex),
            eigenvectors=np.zeros((0, 0), dtype=complex),
            pairing=[],
            dt=dt,
        )

    decomposition = eig(model.a)
    if decomposition.defective:
        raise DefectiveMatrixError("mode decomposition requires a diagonalizable A: " + "; ".join(decomposition.diagnostics))

    mode_set = ModeSet(
        spatial=model.c @ decomposition.eigenvectors,
        temporal=decomposition.eigenvalues,
        eigenvectors=decomposition.eigenvectors,
        pairing=decomposition.pairing,
        dt=dt,
    )
    logger.info("modes_computed", n=model.n, **mode_set.census())
    return mode_set


def predict(
    model: StateSpaceModel,
    lowrank: LowRankMap,
    window: np.ndarray,
    horizon: int,
    method: PredictionMethod = "state-space",
) -> Prediction:
    """Outputs y_{l+1..l+horizon} from the stacked window y_l"""
    if horizon < 1:
        raise InvalidInputError(f"prediction horizon must be >= 1, got {horizon}")
    window = np.asarray(window, dtype=float).reshape(-1)
    if window.shape[0] != lowrank.q.shape[0]:
        raise DimensionMismatchError(f"window has length {window.shape[0]}, expected m*s = {lowrank.q.shape[0]}")

    m = model.m
    outputs = np.empty((horizon, m))
    if method == "extended-ar":
        current = window
        for step in range(horizon):
            current = lowrank.p @ (lowrank.q.T @ current)
            outputs[step] = current[:m]
    elif method == "state-space":
        state = lowrank.q.T @ window
        for step in range(horizon):
            outputs[step] = model.c @ state
            state = model.a @ state
    else:
        raise InvalidInputError(f"unknown prediction method {method!r}")

    return Prediction(horizon=horizon, outputs=outputs, method=method)


def identify(seq: OutputSequence, n: int, s: int, dt: float = None) -> IdentificationResult:
    """Full pipeline: embed, regress, extract (A, C), decompose into modes"""
    # Deferred: the pipeline package imports this module. A fresh orchestrator
    # per call keeps stage step buffers unshared between threads.
    from ..pipeline.orchestrator import IdentificationOrchestrator

    return IdentificationOrchestrator().run(seq, n=n, s=s, dt=dt)
