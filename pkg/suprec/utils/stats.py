"""
Binomial proportion estimates with Wilson score intervals
"""

import math
from typing import Optional, Tuple

from scipy.stats import norm

from suprec.config.settings import settings
from suprec.models.result_models import ProportionEstimate


def wilson_interval(
    events: int,
    trials: int,
    confidence: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Wilson score interval for a Bernoulli proportion.

    Args:
        events: Number of counted events
        trials: Number of trials
        confidence: Two-sided level, defaults to settings.confidence_level

    Returns:
        (lower, upper), always containing events / trials
    """
    if trials <= 0:
        return (0.0, 1.0)
    if not 0 <= events <= trials:
        raise ValueError(f"Events {events} outside [0, {trials}]")

    level = settings.confidence_level if confidence is None else confidence
    z = float(norm.ppf(0.5 + level / 2.0))
    p_hat = events / trials
    z2_over_n = z * z / trials
    denom = 1.0 + z2_over_n
    center = (p_hat + z2_over_n / 2.0) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z2_over_n / (4.0 * trials)) / denom

    lower = max(0.0, center - half)
    upper = min(1.0, center + half)
    # clip rounding so the interval contains the point estimate
    return (min(lower, p_hat), max(upper, p_hat))


def proportion(events: int, trials: int, confidence: Optional[float] = None) -> ProportionEstimate:
    """Point estimate plus Wilson interval"""
    lower, upper = wilson_interval(events, trials, confidence)
    estimate = events / trials if trials > 0 else float("nan")
    return ProportionEstimate(
        estimate=estimate,
        ci_lo=lower,
        ci_hi=upper,
        events=events,
        trials=trials,
    )


def standard_error(p: float, trials: int) -> float:
    """Binomial standard error sqrt(p(1-p)/trials)"""
    if trials <= 0:
        return float("inf")
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / trials)
