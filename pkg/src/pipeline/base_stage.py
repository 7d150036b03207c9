from abc import ABC, abstractmethod
from typing import Any, Dict, List

from ..core.logging import get_logger
from ..models.schemas import StageStep


class BaseStage(ABC):
    """Abstract base class for the stages of the identification pipeline"""

    def __init__(self, name: str):
        self.name = name
        self.steps: List[StageStep] = []
        self.logger = get_logger(f"pipeline.{name}")

    @abstractmethod
    def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """Process input data and return output"""

    def log_step(self, action: str, detail: str, output: Dict[str, Any]):
        """Record a stage step for traceability"""
        self.steps.append(StageStep(stage=self.name, action=action, detail=detail, output=output))
        self.logger.debug(action, detail=detail, **output)

    def get_steps(self) -> List[StageStep]:
        return self.steps

    def reset_steps(self):
        self.steps = []
