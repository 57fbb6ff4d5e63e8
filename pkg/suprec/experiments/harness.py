"""
Monte Carlo harness: single trials, error-probability estimates and phase-transition sweeps.

Trial i draws everything (support, values, matrix, noise) from the stream (TRIAL, i) of the
config's master seed, so estimates are identical for any number of workers.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np

from suprec.analysis.thresholds import c_of_w
from suprec.config.settings import settings
from suprec.decoders import run_decoder
from suprec.models.config_models import SweepSpec, TrialConfig
from suprec.models.result_models import (
    DecodeResult,
    ErrorEstimate,
    SweepResult,
    SweepRow,
    TrialOutcome,
)
from suprec.signal.model import assemble_signal, draw_matrix, draw_support, measure
from suprec.signal.types import MeasurementMatrix, SignalValues, SparseSignal, SupportIndices
from suprec.utils.errors import WorkCapExceededError
from suprec.utils.rng import MATRIX, SWEEP, TRIAL, StreamFactory
from suprec.utils.stats import wilson_interval

logger = logging.getLogger(__name__)

# (y or Y stack, A, cfg) -> DecodeResult, used to swap the configured decoder
DecoderFn = Callable[[np.ndarray, np.ndarray, TrialConfig], DecodeResult]


@lru_cache(maxsize=16)
def fixed_matrix(seed: int, n: int, m: int, sigma_a2: float) -> MeasurementMatrix:
    """The single matrix realization shared by every trial in fixed-matrix mode"""
    rng = StreamFactory.get_factory(seed).stream(MATRIX, 0)
    return draw_matrix(n, m, sigma_a2, rng)


def draw_values(cfg: TrialConfig, rng: np.random.Generator) -> SignalValues:
    if cfg.w is not None:
        return SignalValues(w=np.asarray(cfg.w, dtype=float))
    return SignalValues(w=cfg.activity.sample(rng))


def draw_instance(
    cfg: TrialConfig,
    rng: np.random.Generator,
    signals: int = 1,
) -> Tuple[SupportIndices, List[SparseSignal], MeasurementMatrix]:
    """Support, `signals` sparse signals on it, then the matrix, in that draw order"""
    model = cfg.model
    support = draw_support(model.m, model.k, rng)
    xs = [assemble_signal(draw_values(cfg, rng), support, model.m) for _ in range(signals)]
    if cfg.fixed_matrix:
        A = fixed_matrix(cfg.seed, model.n, model.m, model.sigma_a2)
    else:
        A = draw_matrix(model.n, model.m, model.sigma_a2, rng)
    return support, xs, A


def decode_outcome(
    cfg: TrialConfig,
    trial_index: int,
    support: SupportIndices,
    y: np.ndarray,
    A: MeasurementMatrix,
    decoder: Optional[DecoderFn] = None,
) -> TrialOutcome:
    """Run the decoder and score it; a work-cap refusal is its own outcome"""
    planted = sorted(support.indices)
    try:
        if decoder is not None:
            result = decoder(y, A.entries, cfg)
        else:
            result = run_decoder(
                cfg.decoder, y, A.entries, cfg.model.k, cfg.params,
                cfg.model.sigma_a2, cfg.model.sigma_z2,
            )
    except WorkCapExceededError as e:
        logger.info(f"Trial {trial_index} refused: {e}")
        return TrialOutcome(trial_index=trial_index, status="refused", planted=planted, detail=str(e))

    recovered = sorted(result.support) if result.support is not None else None
    return TrialOutcome(
        trial_index=trial_index,
        status="success" if recovered == planted else "failure",
        planted=planted,
        recovered=recovered,
        ambiguous=result.ambiguous,
        detail=result.detail if result.status != "numerical_failure" else result.status,
    )


def run_trial(
    cfg: TrialConfig,
    trial_index: int,
    decoder: Optional[DecoderFn] = None,
) -> TrialOutcome:
    """
    One draw of the full pipeline: support, values, matrix and noise, then decoding.
    Success means the recovered set equals the planted set exactly.
    """
    rng = StreamFactory.get_factory(cfg.seed).stream(TRIAL, trial_index)
    support, (X,), A = draw_instance(cfg, rng)
    y = measure(A, X, cfg.model.noise, rng).y
    return decode_outcome(cfg, trial_index, support, y, A, decoder)


def _run_range(args) -> List[TrialOutcome]:
    trial_fn, cfg, start, stop, decoder = args
    return [trial_fn(cfg, i, decoder) for i in range(start, stop)]


def run_trials(
    cfg: TrialConfig,
    trials: int,
    jobs: int = 1,
    decoder: Optional[DecoderFn] = None,
    trial_fn: Callable[..., TrialOutcome] = run_trial,
) -> List[TrialOutcome]:
    """Outcomes of trials 0 .. trials-1 in index order; processes when jobs > 1"""
    if jobs > 1 and trials > 1:
        step = max(1, math.ceil(trials / (jobs * 4)))
        tasks = [
            (trial_fn, cfg, start, min(start + step, trials), decoder)
            for start in range(0, trials, step)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_range, tasks))
        return [outcome for chunk in chunks for outcome in chunk]
    return [trial_fn(cfg, i, decoder) for i in range(trials)]


def summarize(outcomes: List[TrialOutcome], confidence: Optional[float] = None) -> ErrorEstimate:
    """Failure frequency over non-refused trials, with its Wilson interval"""
    successes = sum(o.status == "success" for o in outcomes)
    failures = sum(o.status == "failure" for o in outcomes)
    refusals = sum(o.status == "refused" for o in outcomes)
    decided = successes + failures
    if decided == 0:
        return ErrorEstimate(
            trials=len(outcomes), successes=0, failures=0, refusals=refusals, no_data=True
        )
    lower, upper = wilson_interval(failures, decided, confidence)
    return ErrorEstimate(
        trials=len(outcomes),
        successes=successes,
        failures=failures,
        refusals=refusals,
        pe=failures / decided,
        ci_lo=lower,
        ci_hi=upper,
    )


def estimate_error_prob(
    cfg: TrialConfig,
    trials: int,
    jobs: int = 1,
    decoder: Optional[DecoderFn] = None,
) -> ErrorEstimate:
    """
    Empirical average error probability over `trials` independent trials.

    Args:
        cfg: Trial configuration with its master seed
        trials: Number of trials, at least 1
        jobs: Worker processes; results do not depend on it
        decoder: Optional replacement decoder (must be picklable when jobs > 1)
    """
    if trials < 1:
        raise ValueError("Need trials >= 1")
    logger.info(
        f"Estimating error probability: m={cfg.model.m} n={cfg.model.n} k={cfg.model.k} "
        f"decoder={cfg.decoder} trials={trials} seed={cfg.seed}"
    )
    estimate = summarize(run_trials(cfg, trials, jobs, decoder))
    if estimate.no_data:
        logger.warning(f"All {trials} trials refused; no error estimate")
    return estimate


def _threshold_for(spec: SweepSpec) -> Optional[float]:
    """c(w) for a fixed value vector, None when it is undefined or random"""
    if spec.noise.sigma_z2 == 0:
        return None
    values = spec.w
    if values is None and spec.activity is not None and spec.activity.kind == "deterministic":
        values = spec.activity.values
    if values is None:
        return None
    return c_of_w(SignalValues(w=np.asarray(values, dtype=float)), spec.sigma_a2, spec.noise.sigma_z2).value


def sweep_phase_transition(
    spec: SweepSpec,
    jobs: int = 1,
    master_seed: Optional[int] = None,
) -> SweepResult:
    """
    One error estimate per (m, n) grid point. Point i runs under the seed derived from
    (SWEEP, i) of the master seed, recorded in its row.
    """
    if master_seed is None:
        master_seed = spec.seed if spec.seed is not None else settings.default_seed
    factory = StreamFactory.get_factory(master_seed)
    c_w = _threshold_for(spec)

    rows = []
    for point_index, (m, n) in enumerate(spec.grid()):
        point_seed = factory.derive_seed(SWEEP, point_index)
        estimate = estimate_error_prob(spec.trial_config(m, n, point_seed), spec.trials, jobs)
        rows.append(
            SweepRow(
                m=m,
                n=n,
                rate_bits=math.log2(m) / n,
                c_w_bits=c_w,
                pe=estimate.pe,
                ci_lo=estimate.ci_lo,
                ci_hi=estimate.ci_hi,
                trials=estimate.trials,
                refusals=estimate.refusals,
                decoder=spec.decoder,
                seed=point_seed,
            )
        )
        logger.info(f"Sweep point {point_index}: m={m} n={n} pe={estimate.pe}")
    return SweepResult(rows=rows, master_seed=master_seed)
