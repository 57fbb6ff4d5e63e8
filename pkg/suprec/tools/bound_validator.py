"""
Bound validator tool comparing the closed-form tail bound with Monte Carlo estimates
"""

import logging
from typing import List, Optional, Type

import pandas as pd
from pydantic import BaseModel, Field

from suprec.analysis.tail_bounds import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_NS,
    DEFAULT_RATIOS,
    DEFAULT_SIGMA_V2S,
    U_PROFILES,
    validate_bounds_grid,
)
from suprec.tools.base_tool import SuprecTool
from suprec.utils.io import build_manifest, resolve_seed, write_run

logger = logging.getLogger(__name__)

BOUNDS_NAME = "bounds.csv"
DEFAULT_BOUND_TRIALS = 1_000_000


class BoundValidatorInput(BaseModel):
    """Input schema for BoundValidator tool."""
    trials: int = Field(DEFAULT_BOUND_TRIALS, ge=1000, description="Monte Carlo draws per cell")
    seed: Optional[int] = Field(None, ge=0)
    ns: List[int] = Field(default_factory=lambda: list(DEFAULT_NS))
    ratios: List[float] = Field(default_factory=lambda: list(DEFAULT_RATIOS))
    sigma_v2s: List[float] = Field(default_factory=lambda: list(DEFAULT_SIGMA_V2S))
    profiles: List[str] = Field(default_factory=lambda: list(U_PROFILES))
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    jobs: int = Field(1, ge=1)
    out_dir: Optional[str] = Field(None, description="Write bounds.csv and manifest.json here")


class BoundValidator(SuprecTool):
    """
    Tool validating the tail bound cell by cell. A cell is a violation when the empirical
    frequency exceeds the bound by more than settings.bound_slack_se standard errors;
    ratios <= 1 give invalid cells, reported but not counted as violations.
    """

    name: str = "bound_validator"
    description: str = """
    Evaluate the tail bound ((alpha - beta)/gamma)^(-n/2) and its Monte Carlo estimate over a
    grid of n, (alpha - beta)/gamma, sigma_v2 and u profiles. Returns one row per cell with a
    pass / violation / invalid verdict.
    """
    args_schema: Type[BaseModel] = BoundValidatorInput

    def _run(
        self,
        trials: int = DEFAULT_BOUND_TRIALS,
        seed: Optional[int] = None,
        ns: Optional[List[int]] = None,
        ratios: Optional[List[float]] = None,
        sigma_v2s: Optional[List[float]] = None,
        profiles: Optional[List[str]] = None,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        jobs: int = 1,
        out_dir: Optional[str] = None,
    ) -> str:
        try:
            query = BoundValidatorInput(
                trials=trials, seed=seed,
                ns=ns if ns is not None else list(DEFAULT_NS),
                ratios=ratios if ratios is not None else list(DEFAULT_RATIOS),
                sigma_v2s=sigma_v2s if sigma_v2s is not None else list(DEFAULT_SIGMA_V2S),
                profiles=profiles if profiles is not None else list(U_PROFILES),
                alpha=alpha, beta=beta, jobs=jobs, out_dir=out_dir,
            )
            master_seed, seed_source = resolve_seed(seed)
            cells = validate_bounds_grid(
                trials, master_seed,
                ns=query.ns, ratios=query.ratios, sigma_v2s=query.sigma_v2s,
                profiles=query.profiles, alpha=alpha, beta=beta, jobs=jobs,
            )
            paths = {}
            if out_dir is not None:
                frame = pd.DataFrame([cell.model_dump() for cell in cells])
                csv_text = frame.to_csv(index=False, lineterminator="\n", float_format="%.12g")
                config = query.model_copy(update={"seed": master_seed, "out_dir": None})
                manifest = build_manifest("validate-bounds", config, master_seed, seed_source, jobs)
                csv_path, manifest_path = write_run(out_dir, BOUNDS_NAME, csv_text, manifest)
                paths = {"bounds_csv": str(csv_path), "manifest": str(manifest_path)}
        except Exception as e:
            return self._failure(e)

        violations = [cell for cell in cells if cell.verdict == "violation"]
        response = {
            "success": not violations,
            "error": f"{len(violations)} cells exceed the bound" if violations else None,
            "cells": [cell.model_dump() for cell in cells],
            "violations": len(violations),
            "invalid": sum(cell.verdict == "invalid" for cell in cells),
            "master_seed": master_seed,
            "seed_source": seed_source,
            **paths,
        }
        if violations:
            response["error_type"] = "BOUND_VIOLATION"
        return self._format_response(response)
