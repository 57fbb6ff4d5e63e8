"""
Sparse signals, Gaussian measurement matrices and noisy linear measurements
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from suprec.config.settings import settings
from suprec.models.config_models import NoiseModel
from suprec.signal.types import (
    MeasurementMatrix,
    MeasurementVector,
    SignalValues,
    SparseSignal,
    SupportIndices,
)
from suprec.utils.errors import InvalidConfigError

logger = logging.getLogger(__name__)


def draw_support(m: int, k: int, rng: np.random.Generator) -> SupportIndices:
    """
    Draw k indices from [m] without replacement; the unordered set is uniform
    over all C(m, k) subsets.

    Args:
        m: Signal dimension
        k: Sparsity level, 1 <= k <= m
        rng: Stream to draw from

    Returns:
        SupportIndices in draw order (0-based)
    """
    if k < 1 or k > m:
        raise InvalidConfigError(f"Need 1 <= k <= m, got k={k}, m={m}")
    indices = rng.choice(m, size=k, replace=False)
    return SupportIndices(indices=tuple(int(i) for i in indices), m=m)


def assemble_signal(w: SignalValues, support: SupportIndices, m: int) -> SparseSignal:
    """Place w_j at position S_j and zeros elsewhere"""
    if w.k != support.k:
        raise InvalidConfigError(f"Got {w.k} values for {support.k} support indices")
    if support.m != m:
        raise InvalidConfigError(f"Support drawn for m={support.m}, signal has m={m}")
    entries = np.zeros(m)
    entries[list(support.indices)] = w.w
    return SparseSignal(entries=entries)


def draw_matrix(n: int, m: int, sigma_a2: float, rng: np.random.Generator) -> MeasurementMatrix:
    """i.i.d. N(0, sigma_a2) entries"""
    if n < 1 or m < 1:
        raise InvalidConfigError(f"Matrix shape must be positive, got {n}x{m}")
    if sigma_a2 <= 0:
        raise InvalidConfigError("Matrix variance must be positive")
    entries = rng.normal(0.0, np.sqrt(sigma_a2), size=(n, m))
    return MeasurementMatrix(entries=entries, sigma_a2=sigma_a2)


def power_ratio(A: MeasurementMatrix) -> float:
    """(1/(n m)) ||A||_F^2 / sigma_a2, which concentrates at 1 for the random ensemble"""
    return float(np.sum(A.entries ** 2) / (A.n * A.m * A.sigma_a2))


def satisfies_power_constraint(A: MeasurementMatrix, tolerance: Optional[float] = None) -> bool:
    """Power constraint with slack tau_pow; random matrices meet it only in expectation"""
    tau = settings.power_tolerance if tolerance is None else tolerance
    return power_ratio(A) <= 1.0 + tau


def measure(
    A: MeasurementMatrix,
    X: SparseSignal,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> MeasurementVector:
    """Y = A X + Z with Z i.i.d. from the noise model"""
    if X.m != A.m:
        raise InvalidConfigError(f"Signal has m={X.m}, matrix has {A.m} columns")
    support = sorted(X.support())
    # only the support columns contribute
    clean = A.entries[:, support] @ X.entries[support] if support else np.zeros(A.n)
    return MeasurementVector(y=clean + noise.sample(A.n, rng))


def measure_mmv(
    A: MeasurementMatrix,
    signals: Sequence[SparseSignal],
    noise: NoiseModel,
    rng: np.random.Generator,
) -> List[MeasurementVector]:
    """
    Multiple measurement vectors Y_j = A X_j + Z_j for signals sharing one support.
    With a single signal this is exactly `measure` on the same stream.
    """
    if len(signals) < 1:
        raise InvalidConfigError("Need at least one signal")
    common = signals[0].support()
    for j, X in enumerate(signals[1:], start=2):
        if X.support() != common:
            raise InvalidConfigError(f"Signal {j} does not share the common support")
    return [measure(A, X, noise, rng) for X in signals]
