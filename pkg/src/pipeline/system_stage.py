from typing import Any, Dict

from ..services.sysid import extract_system
from .base_stage import BaseStage


class SystemStage(BaseStage):
    """Stage (b): system matrices from the factored map"""

    def __init__(self):
        super().__init__("SystemStage")

    def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        lowrank = input_data["lowrank"]
        method = input_data.get("method", "factor")

        model = extract_system(lowrank, method=method)
        self.log_step(
            action="extract_system",
            detail=f"Extracted (A, C) with the {method} method",
            output={"n": model.n, "m": model.m, "s": model.s},
        )
        return {"model": model}
