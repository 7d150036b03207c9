from typing import Any, Dict

from ..services.embedding import hankel_embed
from ..services.lowrank import has_unique_minimizer, solve_rank_constrained
from .base_stage import BaseStage


class RegressionStage(BaseStage):
    """Stage (a): Hankel embedding and rank-constrained matrix regression"""

    def __init__(self):
        super().__init__("RegressionStage")

    def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        seq = input_data["sequence"]
        n = input_data["n"]
        s = input_data["s"]

        hankel = hankel_embed(seq, s)
        self.log_step(
            action="hankel_embed",
            detail="Built block-Hankel past/future matrices",
            output={"m": hankel.m, "s": hankel.s, "ell": hankel.ell},
        )

        lowrank = solve_rank_constrained(hankel, n)
        unique = has_unique_minimizer(lowrank, hankel)
        self.log_step(
            action="solve_rank_constrained",
            detail="Solved the rank-constrained regression in closed form",
            output={
                "requested_n": n,
                "effective_rank": lowrank.r,
                "y_past_rank": lowrank.y_past_rank,
                "residual": lowrank.residual_frobenius,
                "relative_residual": lowrank.relative_residual,
                "degenerate_truncation": lowrank.degenerate_truncation,
                "unique": unique,
            },
        )
        if lowrank.r < n:
            self.log_step(
                action="rank_deficit",
                detail=f"Data support only rank {lowrank.r} < requested order {n}",
                output={"effective_rank": lowrank.r},
            )

        return {"hankel": hankel, "lowrank": lowrank, "unique": unique}
