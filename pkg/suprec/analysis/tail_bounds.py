"""
Chernoff tail bound for the normalized squared distance (1/n) sum (u_i - V_i)^2 with
V_i ~ N(0, sigma_v2), plus the union bounds built on it and a Monte Carlo validator.

Exponents are worked out in nats and reported in bits.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Union

import numpy as np

from suprec.config.settings import settings
from suprec.models.config_models import TailQuery
from suprec.models.result_models import BoundCell, ProportionEstimate, UnionBound
from suprec.utils.errors import InvalidConfigError
from suprec.utils.rng import TAIL, StreamFactory, batch_ranges
from suprec.utils.stats import proportion, standard_error

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
MIN_TAIL_TRIALS = 1000
U_PROFILES = ("constant", "ramp", "alternating")

DEFAULT_NS = (10, 50, 200)
DEFAULT_RATIOS = (1.5, 2.0, 4.0)
DEFAULT_SIGMA_V2S = (0.5, 1.0, 2.0)
DEFAULT_ALPHA = 2.0
DEFAULT_BETA = 0.5


def lemma1_bound(q: TailQuery) -> float:
    """P{(1/n) sum (u_i - V_i)^2 <= gamma} <= ((alpha - beta) / gamma)^(-n/2)"""
    return float(q.ratio ** (-q.n / 2.0))


def _check_exponent_args(alpha_s: float, theta: float, gamma: float) -> None:
    if theta <= 0:
        raise InvalidConfigError("Need theta > 0")
    if gamma <= 0:
        raise InvalidConfigError("Need gamma > 0")
    if gamma >= alpha_s:
        raise InvalidConfigError(f"Need gamma < alpha_s, got gamma={gamma}, alpha_s={alpha_s}")


def minimizing_lambda(alpha_s: float, theta: float, gamma: float) -> float:
    """lambda* = (2 gamma - theta - sqrt(theta^2 + 4 alpha_s gamma)) / (4 theta gamma)"""
    if theta <= 0 or gamma <= 0:
        raise InvalidConfigError("Need theta > 0 and gamma > 0")
    root = math.sqrt(theta * theta + 4.0 * alpha_s * gamma)
    return (2.0 * gamma - theta - root) / (4.0 * theta * gamma)


def chernoff_objective(lam: float, alpha_s: float, theta: float, gamma: float) -> float:
    """
    Per-sample log Chernoff bound g(lambda)/n in nats:
    -lambda gamma + lambda alpha_s / (1 - 2 theta lambda) - (1/2) ln(1 - 2 theta lambda).
    Defined for lambda < 1 / (2 theta).
    """
    slack = 1.0 - 2.0 * theta * lam
    if slack <= 0:
        raise InvalidConfigError(f"lambda={lam} outside the MGF domain lambda < 1/(2 theta)")
    return -lam * gamma + lam * alpha_s / slack - 0.5 * math.log(slack)


def _exponent_nats(alpha_s: float, theta: float, gamma: float) -> float:
    lam = minimizing_lambda(alpha_s, theta, gamma)
    slack = 1.0 - 2.0 * lam * theta
    return lam * gamma - lam * alpha_s / slack + 0.5 * math.log(slack)


def chernoff_exponent(alpha_s: float, theta: float, gamma: float) -> float:
    """
    Lambda(alpha_s, theta, gamma) in bits, evaluated at the closed-form minimizer lambda*.
    The tail probability is at most 2^(-n Lambda).
    """
    _check_exponent_args(alpha_s, theta, gamma)
    return _exponent_nats(alpha_s, theta, gamma) / LN2


def chernoff_exponent_closed_form(alpha_s: float, theta: float, gamma: float) -> float:
    """Lambda in bits with lambda* substituted and simplified"""
    _check_exponent_args(alpha_s, theta, gamma)
    root = math.sqrt(theta * theta + 4.0 * alpha_s * gamma)
    nats = (
        (alpha_s + gamma) / (2.0 * theta)
        - 0.5
        - 2.0 * alpha_s * gamma / (theta * (theta + root))
        + 0.5 * math.log((theta + root) / (2.0 * gamma))
    )
    return nats / LN2


##### Monte Carlo oracle #####

def make_u_profile(profile: str, n: int, alpha: float) -> np.ndarray:
    """
    Deterministic sequence u with (1/n) sum u_i^2 = alpha.

    Profiles:
        constant: all entries equal
        ramp: proportional to 1, 2, ..., n
        alternating: signs alternate and magnitudes alternate between 1 and 1/2
    """
    i = np.arange(1, n + 1, dtype=float)
    if profile == "constant":
        base = np.ones(n)
    elif profile == "ramp":
        base = i
    elif profile == "alternating":
        base = np.where(i % 2 == 1, 1.0, -0.5)
    else:
        raise InvalidConfigError(f"Unknown u profile '{profile}', expected one of {U_PROFILES}")
    return base * math.sqrt(alpha / np.mean(base ** 2))


def empirical_tail(
    q: TailQuery,
    u_profile: Union[str, Sequence[float]],
    trials: int,
    seed: int,
    cell: int = 0,
    confidence: Optional[float] = None,
) -> ProportionEstimate:
    """
    Frequency of (1/n) sum (u_i - V_i)^2 <= gamma over `trials` draws of V ~ N(0, sigma_v2 I).

    Args:
        q: Tail query
        u_profile: Profile name (scaled to second moment alpha) or an explicit length-n sequence
        trials: Number of draws, at least 1000
        seed: Master seed
        cell: Index of the query within a validation grid, part of the stream key

    Raises:
        InvalidConfigError: Too few trials, or u outside the second-moment window
    """
    if trials < MIN_TAIL_TRIALS:
        raise InvalidConfigError(f"Need at least {MIN_TAIL_TRIALS} trials, got {trials}")

    if isinstance(u_profile, str):
        u = make_u_profile(u_profile, q.n, q.alpha)
    else:
        u = np.asarray(u_profile, dtype=float)
        if u.shape != (q.n,):
            raise InvalidConfigError(f"u has shape {u.shape}, expected ({q.n},)")
    moment = float(np.mean(u ** 2))
    if not q.alpha - q.beta < moment < q.alpha + q.beta:
        raise InvalidConfigError(
            f"u second moment {moment:.6g} outside the window "
            f"({q.alpha - q.beta:.6g}, {q.alpha + q.beta:.6g})"
        )

    factory = StreamFactory.get_factory(seed)
    sigma = math.sqrt(q.sigma_v2)
    batch = max(1, settings.tail_batch_size)
    hits = 0
    for block, (start, stop) in enumerate(batch_ranges(trials, batch)):
        V = factory.stream(TAIL, cell, block).normal(0.0, sigma, size=(stop - start, q.n))
        stat = np.mean((u - V) ** 2, axis=1)
        hits += int(np.count_nonzero(stat <= q.gamma))
    return proportion(hits, trials, confidence)


##### Union bounds #####

def union_bound_k1(
    m: int,
    n: int,
    w: float,
    sigma_a2: float,
    sigma_z2: float,
    epsilon: float,
) -> UnionBound:
    """
    Union bound 2 (m - 1) 2^(-(n/2) log2(alpha/gamma)) on accepting a wrong index with the
    single-value distance rule, alpha = w^2 sigma_a2 + sigma_z2, gamma = sigma_z2 + epsilon^2 sigma_a2.
    The per-measurement exponent (1/2) log2(alpha/gamma) tends to c(w) as epsilon -> 0.
    """
    if m < 2 or n < 1:
        raise InvalidConfigError("Need m >= 2 and n >= 1")
    alpha = w * w * sigma_a2 + sigma_z2
    gamma = sigma_z2 + epsilon * epsilon * sigma_a2
    if not 0 < gamma < alpha:
        raise InvalidConfigError(f"Need 0 < gamma < alpha, got gamma={gamma:.6g}, alpha={alpha:.6g}")

    exponent_rate = 0.5 * math.log2(alpha / gamma)
    exponent = math.log2(2.0 * (m - 1)) - n * exponent_rate
    return UnionBound(
        exponent_bits=exponent,
        bound=min(1.0, 2.0 ** min(exponent, 0.0)),
        rate_bits=math.log2(m) / n,
        exponent_rate_bits=exponent_rate,
    )


def union_bound_growing(
    m: int,
    k: int,
    n: int,
    w_min: float,
    w_max: float,
    epsilon: float,
    sigma_a2: float,
    sigma_z2: float,
    eta1: float = 10.0,
) -> UnionBound:
    """
    Growing-sparsity union bound for the relaxed distance rule, in bits:
    k log k + k log(eta1 k^2 w_max / epsilon) + k
      + max_j [ j log m - (n/2) log((1 - epsilon)(j w_min^2 sigma_a2 + sigma_z2)
                                     / ((1 + epsilon) sigma_z2 + 2 epsilon^2 sigma_a2)) ].
    eta1 = 10 is the grid construction's own cardinality constant.
    """
    if k < 2 or m < k or n < 1:
        raise InvalidConfigError("Need k >= 2, m >= k and n >= 1")
    if not 0 < epsilon < 1:
        raise InvalidConfigError("Need epsilon in (0, 1)")
    if not 0 < w_min <= w_max:
        raise InvalidConfigError("Need 0 < w_min <= w_max")
    if sigma_a2 <= 0 or sigma_z2 <= 0:
        raise InvalidConfigError("Need sigma_a2 > 0 and sigma_z2 > 0")

    log_m = math.log2(m)
    j = np.arange(1, k + 1)
    accept = (1.0 + epsilon) * sigma_z2 + 2.0 * epsilon ** 2 * sigma_a2
    terms = j * log_m - (n / 2.0) * np.log2(
        (1.0 - epsilon) * (j * w_min ** 2 * sigma_a2 + sigma_z2) / accept
    )
    exponent = (
        k * math.log2(k)
        + k * math.log2(eta1 * k * k * w_max / epsilon)
        + k
        + float(np.max(terms))
    )
    return UnionBound(
        exponent_bits=exponent,
        bound=min(1.0, 2.0 ** min(exponent, 0.0)),
        rate_bits=log_m / n,
    )


##### Validation grid #####

def _evaluate_cell(args) -> BoundCell:
    cell, n, ratio, sigma_v2, profile, alpha, beta, trials, seed = args
    gamma = (alpha - beta) / ratio
    base = dict(
        n=n, ratio=ratio, sigma_v2=sigma_v2, profile=profile,
        alpha=alpha, beta=beta, gamma=gamma, trials=trials,
    )
    try:
        q = TailQuery(n=n, alpha=alpha, beta=beta, gamma=gamma, sigma_v2=sigma_v2)
    except ValueError as e:
        return BoundCell(bound=float("nan"), verdict="invalid", detail=str(e), **base)

    bound = lemma1_bound(q)
    estimate = empirical_tail(q, profile, trials, seed, cell=cell)
    slack = settings.bound_slack_se * standard_error(estimate.estimate, trials)
    verdict = "pass" if estimate.estimate <= bound + slack else "violation"
    return BoundCell(
        bound=bound,
        empirical=estimate.estimate,
        ci_lo=estimate.ci_lo,
        ci_hi=estimate.ci_hi,
        verdict=verdict,
        **base,
    )


def validate_bounds_grid(
    trials: int,
    seed: int,
    ns: Sequence[int] = DEFAULT_NS,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    sigma_v2s: Sequence[float] = DEFAULT_SIGMA_V2S,
    profiles: Sequence[str] = U_PROFILES,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    jobs: int = 1,
) -> List[BoundCell]:
    """
    Compare the closed-form bound with the Monte Carlo tail over n x ratio x sigma_v2 x profile.
    gamma = (alpha - beta) / ratio, so a ratio <= 1 yields an invalid cell rather than an error.
    Cells are keyed by their grid position, so results do not depend on `jobs`.
    """
    tasks = []
    for n in ns:
        for ratio in ratios:
            for sigma_v2 in sigma_v2s:
                for profile in profiles:
                    tasks.append(
                        (len(tasks), n, ratio, sigma_v2, profile, alpha, beta, trials, seed)
                    )
    logger.info(f"Validating tail bound on {len(tasks)} cells with {trials} trials each")

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_evaluate_cell, tasks))
    else:
        cells = [_evaluate_cell(task) for task in tasks]

    violations = sum(cell.verdict == "violation" for cell in cells)
    if violations:
        logger.warning(f"{violations} of {len(cells)} cells exceed the bound beyond slack")
    return cells
