"""
Rate thresholds and sample-complexity formulas.

All logarithms are base 2, so rates are in bits per measurement. The growing-k formulas
evaluate asymptotic conditions at finite m with the limsup dropped; their outputs are
guidance, not finite-m guarantees.
"""

import itertools
import logging
import math
import re
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from suprec.config.settings import settings
from suprec.models.config_models import ActivityModel
from suprec.models.result_models import (
    DesignRate,
    MacRegionCheck,
    ProportionEstimate,
    RateThreshold,
    RegimeTag,
)
from suprec.signal.types import SignalValues
from suprec.utils.errors import InvalidConfigError, UnboundedActivityError
from suprec.utils.rng import DESIGN, OUTAGE, StreamFactory, batch_ranges
from suprec.utils.stats import proportion

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _log2_1p(x):
    return np.log1p(x) / LN2


def _ceil_count(value: float) -> int:
    """ceil with a relative guard so 2.0000000001 from rounding noise counts as 2"""
    return int(math.ceil(value - settings.count_tolerance * max(1.0, abs(value))))


def _floor_count(value: float) -> int:
    return int(math.floor(value + settings.count_tolerance * max(1.0, abs(value))))


def _check_noise_levels(sigma_a2: float, sigma_z2: float) -> None:
    if sigma_a2 <= 0 or sigma_z2 <= 0:
        raise InvalidConfigError("Need sigma_a2 > 0 and sigma_z2 > 0")


##### c(w) #####

def _subset_tables(w2: np.ndarray):
    """Subset sums and sizes for every bitmask 0 .. 2^k - 1 (bit j <-> index j)"""
    sums = np.zeros(1)
    sizes = np.zeros(1, dtype=np.int16)
    for value in w2:
        sums = np.concatenate([sums, sums + value])
        sizes = np.concatenate([sizes, sizes + 1])
    return sums, sizes


def _mask_to_subset(mask: int, k: int) -> tuple:
    return tuple(j for j in range(k) if mask >> j & 1)


def c_of_w(w: SignalValues, sigma_a2: float, sigma_z2: float) -> RateThreshold:
    """
    c(w) = min over nonempty T of (1/(2|T|)) log2(1 + (sigma_a2/sigma_z2) sum_{j in T} w_j^2).

    Exact enumeration of all 2^k - 1 subsets; ties go to the lexicographically smallest
    subset (as a sorted index tuple).

    Raises:
        InvalidConfigError: k above settings.max_exact_subset_k or non-positive variances
    """
    _check_noise_levels(sigma_a2, sigma_z2)
    k = w.k
    if k > settings.max_exact_subset_k:
        raise InvalidConfigError(
            f"Exact subset enumeration refused for k={k} > {settings.max_exact_subset_k}"
        )

    snr = sigma_a2 / sigma_z2
    # sums over sorted squares, so permuted inputs give bit-identical values
    order = np.argsort(w.w ** 2, kind="stable")
    sums, sizes = _subset_tables((w.w ** 2)[order])
    values = _log2_1p(snr * sums[1:]) / (2.0 * sizes[1:])
    best = values.min()
    tied = np.flatnonzero(values == best) + 1
    argmin = min(
        tuple(sorted(int(order[j]) for j in _mask_to_subset(int(mask), k))) for mask in tied
    )

    return RateThreshold(value=float(best), argmin_subset=argmin, subsets_examined=int(values.size))


def c_of_w_batch(w2: np.ndarray, sigma_a2: float, sigma_z2: float) -> np.ndarray:
    """
    c(w) for each row of a (batch, k) array of squared values; values only, no argmin.
    """
    _check_noise_levels(sigma_a2, sigma_z2)
    w2 = np.atleast_2d(np.asarray(w2, dtype=float))
    k = w2.shape[1]
    if k > settings.max_exact_subset_k:
        raise InvalidConfigError(
            f"Exact subset enumeration refused for k={k} > {settings.max_exact_subset_k}"
        )
    snr = sigma_a2 / sigma_z2
    if k == 1:
        return _log2_1p(snr * w2[:, 0]) / 2.0

    masks = np.arange(1, 1 << k)
    membership = ((masks[:, None] >> np.arange(k)) & 1).astype(float)
    sizes = membership.sum(axis=1)
    sums = w2 @ membership.T
    return np.min(_log2_1p(snr * sums) / (2.0 * sizes), axis=1)


##### Sample complexity #####

def achievable_n(
    m: int,
    w: SignalValues,
    sigma_a2: float,
    sigma_z2: float,
    margin: float,
) -> int:
    """
    Sufficient measurement count ceil(log2 m / (c(w) - margin)) at rate margin `margin`.
    """
    if m < 2:
        raise InvalidConfigError("Need m >= 2")
    c = c_of_w(w, sigma_a2, sigma_z2).value
    if not 0 < margin < c:
        raise InvalidConfigError(f"Margin must lie in (0, c(w)={c:.6g}), got {margin}")
    return _ceil_count(math.log2(m) / (c - margin))


def sufficient_n_growing(
    m: int,
    k: int,
    w_min: float,
    sigma_a2: float,
    sigma_z2: float,
) -> int:
    """
    Growing-k sufficient count: ceil of max over j in [k] of
    (6 k log2 k + 2 j log2 m) / log2(j w_min^2 sigma_a2 / sigma_z2 + 1).
    """
    _check_noise_levels(sigma_a2, sigma_z2)
    if k < 2:
        raise InvalidConfigError("Growing-k formula needs k >= 2; use achievable_n for k = 1")
    if w_min <= 0:
        raise InvalidConfigError("Need w_min > 0")
    if m < k:
        raise InvalidConfigError(f"Need m >= k, got m={m}, k={k}")

    j = np.arange(1, k + 1)
    numerators = 6.0 * k * math.log2(k) + 2.0 * j * math.log2(m)
    denominators = _log2_1p(j * w_min ** 2 * sigma_a2 / sigma_z2)
    return _ceil_count(float(np.max(numerators / denominators)))


def necessary_n_growing(
    m: int,
    k: int,
    w_max: float,
    sigma_a2: float,
    sigma_z2: float,
) -> int:
    """
    Growing-k necessary count floor(2 k log2(m/k) / log2(2 k w_max^2 sigma_a2 / sigma_z2 + 1)).
    Any n at or below it is asymptotically insufficient.
    """
    _check_noise_levels(sigma_a2, sigma_z2)
    if m <= k:
        raise InvalidConfigError(f"Need m > k, got m={m}, k={k}")
    if k < 1 or w_max <= 0:
        raise InvalidConfigError("Need k >= 1 and w_max > 0")
    numerator = 2.0 * k * math.log2(m / k)
    denominator = float(_log2_1p(2.0 * k * w_max ** 2 * sigma_a2 / sigma_z2))
    return _floor_count(numerator / denominator)


##### Regimes #####

_REGIME_ROWS: Dict[str, RegimeTag] = {
    "m_poly_in_k": RegimeTag(
        label="m_poly_in_k",
        m_relation="m = k^Omega(log k)",
        sufficient_order="k·log m / log k",
        necessary_order="k·log(m/k) / log k",
        example="m = k^(log k)",
    ),
    "mid": RegimeTag(
        label="mid",
        m_relation="e^omega(log k) <= m <= k^o(log k)",
        sufficient_order="k·log k",
        necessary_order="k·log(m/k) / log k",
        example="m = k^(log log k)",
    ),
    "low": RegimeTag(
        label="low",
        m_relation="omega(k) <= m <= e^Theta(log k)",
        sufficient_order="k·log m",
        necessary_order="k·log(m/k) / log k",
        example="m = k^2",
    ),
    "linear": RegimeTag(
        label="linear",
        m_relation="m = Theta(k)",
        sufficient_order="k·log m",
        necessary_order="m",
        example="m = 2k",
    ),
}

_REGIME_ALIASES = {
    "m_poly_in_k": "m_poly_in_k",
    "k^(logk)": "m_poly_in_k",
    "k^logk": "m_poly_in_k",
    "k^omega(logk)": "m_poly_in_k",
    "k^(omega(logk))": "m_poly_in_k",
    "mid": "mid",
    "k^(loglogk)": "mid",
    "k^loglogk": "mid",
    "e^omega(logk)": "mid",
    "e^(omega(logk))": "mid",
    "low": "low",
    "k^2": "low",
    "k**2": "low",
    "omega(k)": "low",
    "linear": "linear",
    "theta(k)": "linear",
    "2k": "linear",
    "ck": "linear",
}


_BRACES = str.maketrans("{}", "()")


def classify_regime(growth_spec: str) -> RegimeTag:
    """
    Map a symbolic m-versus-k relation to its sufficient-order row. Braced exponents such
    as k^{log k} read like k^(log k) and LaTeX backslashes are ignored. Unrecognized patterns
    come back labelled "unclassified", never guessed.
    """
    key = re.sub(r"[\s\\$]+", "", growth_spec).lower().translate(_BRACES).removeprefix("m=")
    label = _REGIME_ALIASES.get(key)
    if label is None:
        logger.info(f"Unrecognized growth pattern '{growth_spec}'")
        return RegimeTag(label="unclassified", m_relation=growth_spec)
    return _REGIME_ROWS[label].model_copy()


##### Random activities #####

def _require_bounded(activity: ActivityModel) -> None:
    if not activity.is_bounded:
        raise UnboundedActivityError(
            f"Activity '{activity.kind}' has unbounded support; the outage bound needs bounded support"
        )


def outage_probability(
    activity: ActivityModel,
    rate: float,
    trials: int,
    seed: int,
    sigma_a2: float = 1.0,
    sigma_z2: float = 1.0,
    confidence: Optional[float] = None,
) -> ProportionEstimate:
    """
    Monte Carlo estimate of P{c(W) <= rate} with a Wilson interval.

    Draws are made in fixed-size blocks, each block from its own (OUTAGE, block) stream,
    so the estimate depends only on the seed and the trial count.
    """
    _require_bounded(activity)
    if trials < 1:
        raise InvalidConfigError("Need trials >= 1")

    factory = StreamFactory.get_factory(seed)
    hits = 0
    for block, (start, stop) in enumerate(batch_ranges(trials, settings.outage_batch_size)):
        draws = activity.sample_batch(stop - start, factory.stream(OUTAGE, block))
        hits += int(np.count_nonzero(c_of_w_batch(draws ** 2, sigma_a2, sigma_z2) <= rate))
    return proportion(hits, trials, confidence)


def outage_probability_exact(
    activity: ActivityModel,
    rate: float,
    sigma_a2: float = 1.0,
    sigma_z2: float = 1.0,
) -> float:
    """
    P{c(W) <= rate} by direct integration for single-value (k = 1) activities.
    """
    _require_bounded(activity)
    _check_noise_levels(sigma_a2, sigma_z2)
    if activity.k != 1:
        raise InvalidConfigError("Exact outage probability is available for k = 1 only")

    # c(w) <= r  <=>  |w| <= sqrt((2^(2r) - 1) sigma_z2 / sigma_a2)
    cutoff = math.sqrt(max(2.0 ** (2.0 * rate) - 1.0, 0.0) * sigma_z2 / sigma_a2)

    if activity.kind == "deterministic":
        return float(abs(activity.values[0]) <= cutoff)
    if activity.kind == "discrete":
        return float(sum(p for x, p in zip(activity.points, activity.probs) if abs(x) <= cutoff))

    low, high = activity.low, activity.high
    if cutoff >= high:
        return 1.0
    if cutoff <= low:
        return 0.0
    density = 1.0 / (high - low)
    inside = lambda x: density if x <= cutoff else 0.0
    value, _ = integrate.quad(inside, low, high, points=[cutoff])
    return float(min(max(value, 0.0), 1.0))


def design_rate(
    activity: ActivityModel,
    target_outage: float,
    trials: int,
    seed: int,
    sigma_a2: float = 1.0,
    sigma_z2: float = 1.0,
    m: Optional[int] = None,
) -> DesignRate:
    """
    Largest rate r with estimated P{c(W) <= r} <= target_outage: the (floor(p T) + 1)-th
    smallest sampled c(W), approached from below.
    """
    _require_bounded(activity)
    if not 0 <= target_outage < 1:
        raise InvalidConfigError("Target outage must lie in [0, 1)")
    if trials < 1:
        raise InvalidConfigError("Need trials >= 1")

    factory = StreamFactory.get_factory(seed)
    values: List[np.ndarray] = []
    for block, (start, stop) in enumerate(batch_ranges(trials, settings.outage_batch_size)):
        draws = activity.sample_batch(stop - start, factory.stream(DESIGN, block))
        values.append(c_of_w_batch(draws ** 2, sigma_a2, sigma_z2))
    samples = np.sort(np.concatenate(values))

    order = int(math.floor(target_outage * trials))
    rate = float(samples[order])
    achieved = float(np.count_nonzero(samples < rate)) / trials
    measurements = _ceil_count(math.log2(m) / rate) if m is not None and m >= 2 else None
    return DesignRate(
        target_outage=target_outage,
        rate_bits=rate,
        achieved_outage=achieved,
        trials=trials,
        measurements=measurements,
    )


##### Multiple access capacity region #####

def mac_region_contains(
    rates: Sequence[float],
    gains: Sequence[float],
    sigma_c2: float,
    sigma_z2: float,
    tolerance: float = 1e-12,
) -> MacRegionCheck:
    """
    Check sum_{i in T} R_i <= (1/2) log2(1 + (sigma_c2/sigma_z2) sum_{i in T} h_i^2)
    for every nonempty T.
    """
    _check_noise_levels(sigma_c2, sigma_z2)
    rates = np.asarray(rates, dtype=float)
    gains = np.asarray(gains, dtype=float)
    if rates.shape != gains.shape or rates.ndim != 1 or rates.size < 1:
        raise InvalidConfigError("Rates and gains must be vectors of equal length")
    k = rates.size
    if k > settings.max_exact_subset_k:
        raise InvalidConfigError(f"Region check refused for k={k} > {settings.max_exact_subset_k}")

    snr = sigma_c2 / sigma_z2
    tightest, tightest_slack = None, math.inf
    violated = []
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(k), size):
            idx = list(subset)
            capacity = 0.5 * math.log2(1.0 + snr * float(np.sum(gains[idx] ** 2)))
            slack = capacity - float(np.sum(rates[idx]))
            if slack < tightest_slack:
                tightest, tightest_slack = subset, slack
            if slack < -tolerance:
                violated.append(subset)

    return MacRegionCheck(
        contained=not violated,
        tightest_subset=tightest,
        slack_bits=tightest_slack,
        violated_subsets=violated,
    )
