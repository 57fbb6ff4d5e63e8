"""
Multiple measurement vectors: t signals sharing one support, measured through the same
matrix and decoded jointly by least squares summed over the measurement vectors.
"""

import logging
from functools import partial
from typing import List

import numpy as np

from suprec.decoders.baselines import ml_decode
from suprec.experiments.harness import decode_outcome, draw_instance, run_trials, summarize
from suprec.models.config_models import TrialConfig
from suprec.models.result_models import ErrorEstimate, TrialOutcome
from suprec.signal.model import measure_mmv
from suprec.utils.errors import InvalidConfigError
from suprec.utils.rng import TRIAL, StreamFactory

logger = logging.getLogger(__name__)


def _joint_ml(Y: np.ndarray, A: np.ndarray, cfg: TrialConfig):
    return ml_decode(Y, A, cfg.model.k, work_cap=cfg.params.cap)


def mmv_trial(cfg: TrialConfig, trial_index: int, decoder=None, t: int = 1) -> TrialOutcome:
    """
    Trial i of the t-vector experiment. Draw order matches the single-vector trial, so
    t = 1 reproduces it exactly.
    """
    rng = StreamFactory.get_factory(cfg.seed).stream(TRIAL, trial_index)
    support, signals, A = draw_instance(cfg, rng, signals=t)
    Y = np.column_stack([v.y for v in measure_mmv(A, signals, cfg.model.noise, rng)])
    return decode_outcome(cfg, trial_index, support, Y, A, _joint_ml)


def run_mmv_trial(t: int, cfg: TrialConfig, trials: int, jobs: int = 1) -> ErrorEstimate:
    """
    Error probability of joint support recovery from t measurement vectors.
    Only the ml decoder generalizes to several vectors.
    """
    if t < 1:
        raise InvalidConfigError("Need t >= 1 measurement vectors")
    if cfg.decoder != "ml":
        raise InvalidConfigError(f"Multiple-vector recovery uses the ml decoder, got {cfg.decoder}")
    if trials < 1:
        raise InvalidConfigError("Need trials >= 1")

    logger.info(f"MMV estimate: t={t} m={cfg.model.m} n={cfg.model.n} k={cfg.model.k} trials={trials}")
    outcomes: List[TrialOutcome] = run_trials(
        cfg, trials, jobs, trial_fn=partial(mmv_trial, t=t)
    )
    return summarize(outcomes)
