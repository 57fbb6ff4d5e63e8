"""
Outage reporter tool: outage probability P{c(W) <= r} for random activities, optionally
next to the empirical decoding failure rate at that rate
"""

import logging
from typing import Optional, Type

from pydantic import BaseModel, Field

from suprec.analysis.thresholds import design_rate, outage_probability, outage_probability_exact
from suprec.experiments.outage import run_outage_experiment
from suprec.models.config_models import (
    ActivityModel,
    DecoderName,
    DecoderParams,
    ModelConfig,
    NoiseKind,
    NoiseModel,
)
from suprec.tools.base_tool import SuprecTool
from suprec.utils.io import resolve_seed

logger = logging.getLogger(__name__)


class OutageReporterInput(BaseModel):
    """Input schema for OutageReporter tool."""
    activity: ActivityModel = Field(description="Bounded distribution of the nonzero values")
    rate: float = Field(gt=0.0, description="Rate r in bits per measurement")
    trials: int = Field(1000, ge=1)
    m: Optional[int] = Field(None, ge=2, description="Also run the decoding experiment at this m")
    sigma_a2: float = Field(1.0, gt=0.0)
    sigma_z2: float = Field(1.0, gt=0.0)
    noise: NoiseKind = "gaussian"
    decoder: Optional[DecoderName] = None
    epsilon: Optional[float] = Field(None, gt=0.0)
    design_p: Optional[float] = Field(None, ge=0.0, lt=1.0, description="Target outage for a design rate")
    seed: Optional[int] = Field(None, ge=0)
    jobs: int = Field(1, ge=1)


class OutageReporter(SuprecTool):
    """
    Tool reporting the outage bound for a random activity. With m given it also runs the full
    pipeline at n = ceil(log2 m / r) and reports the failure rate and its gap to the bound;
    the bound is asymptotic, so a positive gap at finite m is reported, not flagged.
    """

    name: str = "outage_reporter"
    description: str = """
    Estimate P{c(W) <= r} with a Wilson interval (and by quadrature for single-value
    activities), the empirical failure rate when m is given, and the design rate for a
    target outage.
    """
    args_schema: Type[BaseModel] = OutageReporterInput

    def _run(
        self,
        activity: ActivityModel,
        rate: float,
        trials: int = 1000,
        m: Optional[int] = None,
        sigma_a2: float = 1.0,
        sigma_z2: float = 1.0,
        noise: str = "gaussian",
        decoder: Optional[str] = None,
        epsilon: Optional[float] = None,
        design_p: Optional[float] = None,
        seed: Optional[int] = None,
        jobs: int = 1,
    ) -> str:
        try:
            master_seed, seed_source = resolve_seed(seed)
            response = {"success": True, "error": None, "rate_bits": rate}

            if m is not None:
                template = ModelConfig(
                    m=m, n=1, k=activity.k, sigma_a2=sigma_a2,
                    noise=NoiseModel(kind=noise, sigma_z2=sigma_z2),
                )
                report = run_outage_experiment(
                    activity, template, rate, trials, master_seed,
                    decoder=decoder, params=DecoderParams(epsilon=epsilon), jobs=jobs,
                )
                response.update({
                    "m": report.m,
                    "n": report.n,
                    "failure": report.failure.model_dump(),
                    "outage": report.outage.model_dump(),
                    "outage_exact": report.outage_exact,
                    "gap": report.gap,
                })
            else:
                outage = outage_probability(activity, rate, trials, master_seed, sigma_a2, sigma_z2)
                response["outage"] = outage.model_dump()
                if activity.k == 1:
                    response["outage_exact"] = outage_probability_exact(
                        activity, rate, sigma_a2, sigma_z2
                    )

            if design_p is not None:
                response["design"] = design_rate(
                    activity, design_p, trials, master_seed, sigma_a2, sigma_z2, m=m
                ).model_dump()

            response.update({"master_seed": master_seed, "seed_source": seed_source})
        except Exception as e:
            return self._failure(e)

        return self._format_response(response)
