"""
Random-activity experiment: empirical decoding failure at a fixed rate next to the outage
probability P{c(W) <= r} that bounds it for large m
"""

import logging
import math
from typing import Optional

from suprec.analysis.thresholds import outage_probability, outage_probability_exact
from suprec.config.settings import settings
from suprec.experiments.harness import estimate_error_prob
from suprec.models.config_models import (
    ActivityModel,
    DecoderName,
    DecoderParams,
    ModelConfig,
    TrialConfig,
)
from suprec.models.result_models import OutageReport
from suprec.utils.errors import InvalidConfigError, UnboundedActivityError

logger = logging.getLogger(__name__)


def measurements_for_rate(m: int, rate: float) -> int:
    """ceil(log2 m / r)"""
    if m < 2 or rate <= 0:
        raise InvalidConfigError("Need m >= 2 and rate > 0")
    value = math.log2(m) / rate
    return max(1, int(math.ceil(value - settings.count_tolerance * max(1.0, value))))


def run_outage_experiment(
    activity: ActivityModel,
    template: ModelConfig,
    rate: float,
    trials: int,
    seed: int,
    decoder: Optional[DecoderName] = None,
    params: Optional[DecoderParams] = None,
    jobs: int = 1,
) -> OutageReport:
    """
    Draw W from the activity for every trial and run the full pipeline at n = ceil(log2 m / r).

    Args:
        activity: Bounded activity distribution; its k overrides the template's
        template: Supplies m, sigma_a2 and the noise model; its n is replaced
        rate: Rate r in bits per measurement
        trials: Trials for both the failure rate and the outage estimate
        seed: Master seed
        decoder: Defaults to distance_k1 for k = 1 and ml otherwise

    Returns:
        OutageReport with both numbers and their gap. The outage value is an asymptotic bound;
        at finite m the failure rate may exceed it.
    """
    if not activity.is_bounded:
        raise UnboundedActivityError(f"Activity '{activity.kind}' has unbounded support")

    n = measurements_for_rate(template.m, rate)
    model = template.model_copy(update={"n": n, "k": activity.k})
    if decoder is None:
        decoder = "distance_k1" if activity.k == 1 else "ml"
    cfg = TrialConfig(
        model=ModelConfig(**model.model_dump()),
        activity=activity,
        decoder=decoder,
        params=params or DecoderParams(),
        seed=seed,
    )

    failure = estimate_error_prob(cfg, trials, jobs)
    outage = outage_probability(activity, rate, trials, seed, template.sigma_a2, template.sigma_z2)
    exact = None
    if activity.k == 1:
        exact = outage_probability_exact(activity, rate, template.sigma_a2, template.sigma_z2)

    reference = exact if exact is not None else outage.estimate
    gap = failure.pe - reference if failure.pe is not None else None
    logger.info(f"Outage experiment m={template.m} n={n} r={rate}: pe={failure.pe} outage={reference}")
    return OutageReport(
        rate_bits=rate,
        m=template.m,
        n=n,
        failure=failure,
        outage=outage,
        outage_exact=exact,
        gap=gap,
    )
