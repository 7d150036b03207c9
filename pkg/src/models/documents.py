"""Persisted model document (model.json)"""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.config import settings
from ..core.exceptions import DimensionMismatchError, SchemaVersionError
from .schemas import FactorProvenance, IdentificationResult, LowRankMap, StateSpaceModel


class ComplexNumber(BaseModel):
    re: float
    im: float


class ComplexColumn(BaseModel):
    re: List[float]
    im: List[float]


class ModelDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = settings.MODEL_SCHEMA_VERSION
    m: int
    n: int
    s: int
    dt: float
    a: List[List[float]] = Field(alias="A")
    c: List[List[float]] = Field(alias="C")
    p: List[List[float]] = Field(alias="P")
    q: List[List[float]] = Field(alias="Q")
    eigenvalues: List[ComplexNumber]
    spatial_modes: List[ComplexColumn]
    residual_frobenius: float
    relative_residual: float
    requested_n: int
    degenerate_truncation: bool = False
    provenance: str = "siddmd-factor"
    mean: Optional[List[float]] = None
    frame_shape: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def check_dimensions(self):
        rows = self.m * self.s
        if len(self.a) != self.n or any(len(row) != self.n for row in self.a):
            raise DimensionMismatchError(f"A must be {self.n}x{self.n}")
        if len(self.c) != self.m or any(len(row) != self.n for row in self.c):
            raise DimensionMismatchError(f"C must be {self.m}x{self.n}")
        for name in ("p", "q"):
            block = getattr(self, name)
            if len(block) != rows or any(len(row) != self.n for row in block):
                raise DimensionMismatchError(f"{name.upper()} must be {rows}x{self.n}")
        if len(self.eigenvalues) != self.n or len(self.spatial_modes) != self.n:
            raise DimensionMismatchError(f"expected {self.n} eigenvalues and spatial modes")
        if self.mean is not None and len(self.mean) != self.m:
            raise DimensionMismatchError(f"mean has length {len(self.mean)}, expected {self.m}")
        return self

    @classmethod
    def from_result(
        cls,
        result: IdentificationResult,
        mean: Optional[np.ndarray] = None,
        frame_shape: Optional[Tuple[int, int]] = None,
    ) -> "ModelDocument":
        model, lowrank, mode_set = result.model, result.lowrank, result.modes
        return cls(
            m=model.m,
            n=model.n,
            s=model.s,
            dt=mode_set.dt,
            A=model.a.tolist(),
            C=_matrix(model.c, model.m, model.n),
            P=_matrix(lowrank.p, lowrank.p.shape[0], model.n),
            Q=_matrix(lowrank.q, lowrank.q.shape[0], model.n),
            eigenvalues=[ComplexNumber(re=float(v.real), im=float(v.imag)) for v in mode_set.temporal],
            spatial_modes=[
                ComplexColumn(re=column.real.tolist(), im=column.imag.tolist())
                for column in mode_set.spatial.T
            ],
            residual_frobenius=lowrank.residual_frobenius,
            relative_residual=lowrank.relative_residual,
            requested_n=lowrank.requested_n,
            degenerate_truncation=lowrank.degenerate_truncation,
            provenance=model.provenance.method if model.provenance else "siddmd-factor",
            mean=None if mean is None else np.asarray(mean, dtype=float).tolist(),
            frame_shape=frame_shape,
        )

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "ModelDocument":
        version = payload.get("schema_version") if isinstance(payload, dict) else None
        if version != settings.MODEL_SCHEMA_VERSION:
            raise SchemaVersionError(f"unsupported model schema_version {version!r}; expected {settings.MODEL_SCHEMA_VERSION}")
        return cls.model_validate(payload)

    def to_payload(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")

    def to_lowrank(self) -> LowRankMap:
        rows = self.m * self.s
        return LowRankMap(
            p=_array(self.p, rows, self.n),
            q=_array(self.q, rows, self.n),
            r=self.n,
            requested_n=self.requested_n,
            residual_frobenius=self.residual_frobenius,
            degenerate_truncation=self.degenerate_truncation,
            m=self.m,
            s=self.s,
        )

    def to_model(self) -> StateSpaceModel:
        rows = self.m * self.s
        return StateSpaceModel(
            a=_array(self.a, self.n, self.n),
            c=_array(self.c, self.m, self.n),
            s=self.s,
            m=self.m,
            provenance=FactorProvenance(method=self.provenance, p=_array(self.p, rows, self.n), q=_array(self.q, rows, self.n)),
        )


# numpy drops the column count of empty rows, so n = 0 needs explicit shapes
def _matrix(values: np.ndarray, rows: int, cols: int) -> List[List[float]]:
    return np.asarray(values, dtype=float).reshape(rows, cols).tolist()


def _array(values: List[List[float]], rows: int, cols: int) -> np.ndarray:
    return np.array(values, dtype=float).reshape(rows, cols)
