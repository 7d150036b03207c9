from typing import Any, Dict

import numpy as np

from ..services.sysid import modes
from .base_stage import BaseStage


class ModesStage(BaseStage):
    """Stage (c): spatiotemporal mode decomposition"""

    def __init__(self):
        super().__init__("ModesStage")

    def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        model = input_data["model"]
        dt = input_data["dt"]

        mode_set = modes(model, dt)
        self.log_step(
            action="mode_decomposition",
            detail="Computed spatial and temporal modes",
            output={
                **mode_set.census(),
                "moduli": [float(v) for v in np.abs(mode_set.temporal)],
            },
        )
        return {"modes": mode_set}
