from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from ..core.config import settings
from ..core.exceptions import DimensionMismatchError, IllConditionedError, InvalidInputError


def _as_real_matrix(value: Any) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D real matrix, got {arr.ndim}-D input")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix contains non-finite entries")
    return arr


def _as_real_vector(value: Any) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("vector contains non-finite entries")
    return arr


def _as_complex_matrix(value: Any) -> np.ndarray:
    arr = np.array(value, dtype=complex)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D complex matrix, got {arr.ndim}-D input")
    return arr


def _as_complex_vector(value: Any) -> np.ndarray:
    return np.array(value, dtype=complex).reshape(-1)


RealMatrix = Annotated[np.ndarray, BeforeValidator(_as_real_matrix)]
RealVector = Annotated[np.ndarray, BeforeValidator(_as_real_vector)]
ComplexMatrix = Annotated[np.ndarray, BeforeValidator(_as_complex_matrix)]
ComplexVector = Annotated[np.ndarray, BeforeValidator(_as_complex_vector)]

PairTag = Literal["real", "pair+", "pair-"]


class ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)


# Decomposition results
class SvdResult(ArrayModel):
    u: RealMatrix
    s: RealVector
    v: RealMatrix
    rank: int
    degenerate_boundary: bool = False

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


class EigResult(ArrayModel):
    eigenvalues: ComplexVector
    eigenvectors: ComplexMatrix
    pairing: List[PairTag]
    condition: float
    defective: bool = False
    diagnostics: List[str] = Field(default_factory=list)


# Data
class OutputSequence(ArrayModel):
    """Output samples y_i..y_j stored row-wise as an N x m array"""

    samples: RealMatrix
    dt: Optional[float] = None
    frame_shape: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def check_shape(self):
        n_samples, m = self.samples.shape
        if n_samples < 1 or m < 1:
            raise InvalidInputError("output sequence needs at least one sample of dimension >= 1")
        if self.dt is not None and not self.dt > 0:
            raise InvalidInputError("sampling interval dt must be positive")
        if self.frame_shape is not None and self.frame_shape[0] * self.frame_shape[1] != m:
            raise DimensionMismatchError(f"frame shape {self.frame_shape} does not match output dimension {m}")
        return self

    @classmethod
    def from_array(cls, values: Any, dt: Optional[float] = None, frame_shape: Optional[Tuple[int, int]] = None) -> "OutputSequence":
        arr = np.array(values, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls(samples=arr, dt=dt, frame_shape=frame_shape)

    @property
    def m(self) -> int:
        return self.samples.shape[1]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


class HankelPair(ArrayModel):
    y_full: RealMatrix
    y_past: RealMatrix
    y_future: RealMatrix
    s: int
    m: int
    ell: int
    structured: bool = True

    @model_validator(mode="after")
    def check_dimensions(self):
        rows = self.m * self.s
        if self.ell < 1:
            raise InvalidInputError("Hankel pair needs at least one column (ell >= 1)")
        expected = {
            "y_full": (rows, self.ell + 1),
            "y_past": (rows, self.ell),
            "y_future": (rows, self.ell),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatchError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        return self

    @classmethod
    def from_blocks(cls, y_past: Any, y_future: Any) -> "HankelPair":
        """Regression instance from arbitrary past/future matrices (no Hankel structure)"""
        y_past = _as_real_matrix(y_past)
        y_future = _as_real_matrix(y_future)
        if y_past.shape != y_future.shape:
            raise DimensionMismatchError(f"y_past {y_past.shape} and y_future {y_future.shape} must have equal shapes")
        rows, ell = y_past.shape
        if rows == 0 or ell == 0:
            raise InvalidInputError("empty regression instance")
        y_full = np.hstack([y_past, y_future[:, -1:]])
        return cls(y_full=y_full, y_past=y_past, y_future=y_future, s=1, m=rows, ell=ell, structured=False)

    @property
    def rows(self) -> int:
        return self.m * self.s


# Low-rank regression
class LowRankMap(ArrayModel):
    """Factorized solution Theta* = p q^T of the rank-constrained regression"""

    p: RealMatrix
    q: RealMatrix
    r: int
    requested_n: int
    residual_frobenius: float
    degenerate_truncation: bool = False
    m: int
    s: int
    z_singular_values: RealVector = Field(default_factory=lambda: np.zeros(0))
    y_past_rank: int = 0
    y_future_norm: float = 0.0

    @model_validator(mode="after")
    def check_factors(self):
        if self.p.shape != self.q.shape or self.p.shape[1] != self.r:
            raise DimensionMismatchError(f"factors p {self.p.shape} and q {self.q.shape} inconsistent with rank {self.r}")
        if self.p.shape[0] != self.m * self.s:
            raise DimensionMismatchError(f"factor rows {self.p.shape[0]} != m*s = {self.m * self.s}")
        return self

    @property
    def theta(self) -> np.ndarray:
        """Dense ms x ms map; only sensible for small problems"""
        return self.p @ self.q.T

    @property
    def relative_residual(self) -> float:
        if self.y_future_norm == 0.0:
            return 0.0
        return self.residual_frobenius / self.y_future_norm


class GapReport(BaseModel):
    n: int
    lhs: float
    rhs: float
    gap: float


class SolutionCheck(BaseModel):
    is_solution: bool
    objective: float
    optimum: float
    objective_gap: float
    rank: int
    n: int


class OracleResult(BaseModel):
    optimum: float
    best_objective: float
    improvement: float
    candidates: int
    seed: int


# State space and modes
class FactorProvenance(ArrayModel):
    method: str
    p: Optional[RealMatrix] = None
    q: Optional[RealMatrix] = None


class StateSpaceModel(ArrayModel):
    a: RealMatrix
    c: RealMatrix
    s: int
    m: int
    provenance: Optional[FactorProvenance] = None

    @model_validator(mode="after")
    def check_dimensions(self):
        n = self.a.shape[0]
        if self.a.shape != (n, n):
            raise DimensionMismatchError(f"A must be square, got {self.a.shape}")
        if self.c.shape != (self.m, n):
            raise DimensionMismatchError(f"C has shape {self.c.shape}, expected {(self.m, n)}")
        return self

    @property
    def n(self) -> int:
        return self.a.shape[0]


class ModeSet(ArrayModel):
    spatial: ComplexMatrix
    temporal: ComplexVector
    eigenvectors: ComplexMatrix
    pairing: List[PairTag]
    dt: float = 1.0

    def trend(self, times: Any) -> np.ndarray:
        """Temporal trends lambda_k^(t/dt); rows are modes, columns are times"""
        t = np.asarray(times, dtype=float).reshape(-1)
        return np.power(self.temporal[:, None], (t / self.dt)[None, :])

    def amplitudes(self, x: Any) -> np.ndarray:
        """Mode amplitudes b = Phi^-1 x by linear solve"""
        x = np.asarray(x, dtype=complex).reshape(-1)
        if x.shape[0] != self.eigenvectors.shape[0]:
            raise DimensionMismatchError(f"state has length {x.shape[0]}, expected {self.eigenvectors.shape[0]}")
        cond = np.linalg.cond(self.eigenvectors) if self.eigenvectors.size else 1.0
        if not np.isfinite(cond) or cond > settings.MODE_CONDITION_LIMIT:
            raise IllConditionedError(f"eigenvector matrix condition {cond:.3e} exceeds {settings.MODE_CONDITION_LIMIT:.1e}")
        return np.linalg.solve(self.eigenvectors, x)

    def predict(self, x: Any, horizon: int) -> np.ndarray:
        """Outputs Psi Lambda^k b for k = 0..horizon-1 given the current state estimate"""
        b = self.amplitudes(x)
        powers = np.power(self.temporal[:, None], np.arange(horizon)[None, :])
        return (self.spatial @ (powers * b[:, None])).T

    def census(self) -> Dict[str, int]:
        return {
            "real": sum(1 for tag in self.pairing if tag == "real"),
            "pairs": sum(1 for tag in self.pairing if tag == "pair+"),
        }


class Prediction(ArrayModel):
    horizon: int
    outputs: RealMatrix
    method: Literal["state-space", "extended-ar"]

    @model_validator(mode="after")
    def check_outputs(self):
        if self.horizon < 1 or self.outputs.shape[0] != self.horizon:
            raise InvalidInputError("prediction horizon must be >= 1 and match the output rows")
        return self


# Pipeline traceability
class StageStep(BaseModel):
    stage: str
    action: str
    detail: str
    output: Dict[str, Any] = Field(default_factory=dict)


class IdentificationResult(ArrayModel):
    model: StateSpaceModel
    modes: ModeSet
    lowrank: LowRankMap
    hankel: HankelPair
    unique: bool
    steps: List[StageStep] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.lowrank.residual_frobenius

    @property
    def relative_residual(self) -> float:
        return self.lowrank.relative_residual
