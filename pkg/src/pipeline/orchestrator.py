import time
from typing import Any, Dict, List, Optional

from ..core.config import settings
from ..core.exceptions import SidDmdError
from ..core.logging import get_logger
from ..models.schemas import IdentificationResult, LowRankMap, OutputSequence, StageStep
from .base_stage import BaseStage
from .modes_stage import ModesStage
from .regression_stage import RegressionStage
from .system_stage import SystemStage

logger = get_logger(__name__)


class IdentificationOrchestrator:
    """Runs the three identification stages in order and collects their steps"""

    def __init__(self):
        self.regression = RegressionStage()
        self.system = SystemStage()
        self.mode_decomposition = ModesStage()

        self.stages = [
            self.regression,
            self.system,
            self.mode_decomposition,
        ]
        self.current_stage: Optional[BaseStage] = None

    def run(self, seq: OutputSequence, n: int, s: int, dt: float = None, method: str = "factor") -> IdentificationResult:
        """Process an output sequence through the identification pipeline"""
        start_time = time.perf_counter()
        dt = dt if dt is not None else (seq.dt if seq.dt is not None else settings.DEFAULT_DT)

        for stage in self.stages:
            stage.reset_steps()

        try:
            # Stage (a): rank-constrained regression
            self.current_stage = self.regression
            regression_result = self.regression.process({"sequence": seq, "n": n, "s": s})

            # Stage (b): system matrices
            self.current_stage = self.system
            system_result = self.system.process({"lowrank": regression_result["lowrank"], "method": method})

            # Stage (c): modes
            self.current_stage = self.mode_decomposition
            modes_result = self.mode_decomposition.process({"model": system_result["model"], "dt": dt})
        except SidDmdError as e:
            logger.debug("identification_failed", error=e.code, detail=e.detail, stage=self.current_stage.name)
            raise
        finally:
            self.current_stage = None

        elapsed_ms = int((time.perf_counter() - start_time) * 1000)
        lowrank = regression_result["lowrank"]
        warnings = self._warnings(lowrank, regression_result["unique"])
        for warning in warnings:
            logger.warning("identification_warning", detail=warning)
        logger.info(
            "identification_completed",
            n=n,
            s=s,
            m=seq.m,
            relative_residual=lowrank.relative_residual,
            elapsed_ms=elapsed_ms,
        )

        return IdentificationResult(
            model=system_result["model"],
            modes=modes_result["modes"],
            lowrank=lowrank,
            hankel=regression_result["hankel"],
            unique=regression_result["unique"],
            steps=self._collect_steps(),
            warnings=warnings,
        )

    @staticmethod
    def _warnings(lowrank: LowRankMap, unique: bool) -> List[str]:
        warnings = []
        if lowrank.r < lowrank.requested_n:
            warnings.append(f"data support only rank {lowrank.r}; model order reduced from {lowrank.requested_n}")
        if lowrank.degenerate_truncation:
            warnings.append(f"singular values {lowrank.requested_n} and {lowrank.requested_n + 1} of Y_f V2 coincide; the minimizer is not unique")
        elif not unique:
            warnings.append("Y_p lacks full row rank; the minimizer is not unique (minimum-norm solution returned)")
        return warnings

    def _collect_steps(self) -> List[StageStep]:
        all_steps = []
        for stage in self.stages:
            all_steps.extend(stage.get_steps())
        return all_steps

    def get_pipeline_status(self) -> Dict[str, Any]:
        return {
            "stages": [stage.name for stage in self.stages],
            "total_stages": len(self.stages),
            "pipeline_stages": [
                "Rank-Constrained Matrix Regression",
                "System Matrices Estimation",
                "Mode Decomposition",
            ],
        }

