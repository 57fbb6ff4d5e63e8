"""
Decoder registry. Every decoder returns a DecodeResult with 0-based indices.
"""

from typing import Callable, Dict

import numpy as np

from suprec.decoders.baselines import ml_decode, omp_decode
from suprec.decoders.distance import distance_decode, distance_decode_k1, estimate_magnitude
from suprec.models.config_models import DecoderParams
from suprec.models.result_models import DecodeResult
from suprec.utils.errors import InvalidConfigError


def _run_distance_k1(y, A, k, params, sigma_a2, sigma_z2, jobs):
    if k != 1:
        raise InvalidConfigError("distance_k1 decodes k=1 only")
    return distance_decode_k1(y, A, params, sigma_a2, sigma_z2)


def _run_distance(y, A, k, params, sigma_a2, sigma_z2, jobs):
    return distance_decode(y, A, k, params, sigma_a2, sigma_z2, jobs=jobs)


def _run_ml(y, A, k, params, sigma_a2, sigma_z2, jobs):
    return ml_decode(y, A, k, work_cap=params.cap, jobs=jobs)


def _run_omp(y, A, k, params, sigma_a2, sigma_z2, jobs):
    return omp_decode(y, A, k)


DECODERS: Dict[str, Callable[..., DecodeResult]] = {
    "distance_k1": _run_distance_k1,
    "distance": _run_distance,
    "ml": _run_ml,
    "omp": _run_omp,
}


def run_decoder(
    name: str,
    y: np.ndarray,
    A: np.ndarray,
    k: int,
    params: DecoderParams,
    sigma_a2: float,
    sigma_z2: float,
    jobs: int = 1,
) -> DecodeResult:
    """Dispatch to a decoder by name"""
    if name not in DECODERS:
        raise InvalidConfigError(f"Unknown decoder '{name}', expected one of {sorted(DECODERS)}")
    return DECODERS[name](y, A, k, params, sigma_a2, sigma_z2, jobs)


__all__ = [
    "DECODERS",
    "distance_decode",
    "distance_decode_k1",
    "estimate_magnitude",
    "ml_decode",
    "omp_decode",
    "run_decoder",
]
