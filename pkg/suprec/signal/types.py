"""
Immutable value types of the measurement model.

Arrays are copied on construction and marked read-only so instances can be shared
across trial workers.
"""

from dataclasses import dataclass
from typing import FrozenSet, Tuple

import numpy as np

from suprec.utils.errors import InvalidConfigError


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SignalValues:
    """The k nonzero amplitudes w"""
    w: np.ndarray

    def __post_init__(self):
        w = _frozen(np.atleast_1d(self.w))
        if w.ndim != 1 or w.size < 1:
            raise InvalidConfigError("Signal values must be a non-empty vector")
        if np.any(w == 0.0):
            raise InvalidConfigError("Signal values must be nonzero")
        object.__setattr__(self, "w", w)

    @property
    def k(self) -> int:
        return int(self.w.size)

    @property
    def w_min(self) -> float:
        return float(np.min(np.abs(self.w)))

    @property
    def w_max(self) -> float:
        return float(np.max(np.abs(self.w)))


@dataclass(frozen=True)
class SupportIndices:
    """Ordered tuple of k distinct 0-based indices into [m]"""
    indices: Tuple[int, ...]
    m: int

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if len(indices) < 1:
            raise InvalidConfigError("Support must contain at least one index")
        if len(set(indices)) != len(indices):
            raise InvalidConfigError(f"Support indices are not distinct: {indices}")
        if any(not 0 <= i < self.m for i in indices):
            raise InvalidConfigError(f"Support indices outside [0, {self.m}): {indices}")
        object.__setattr__(self, "indices", indices)

    @property
    def k(self) -> int:
        return len(self.indices)

    def as_set(self) -> FrozenSet[int]:
        return frozenset(self.indices)

    def one_based(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in self.indices)


@dataclass(frozen=True)
class SparseSignal:
    """Length-m vector X whose nonzero positions are its support"""
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 1:
            raise InvalidConfigError("Signal entries must be a vector")
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return int(self.entries.size)

    def support(self) -> FrozenSet[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.entries))


@dataclass(frozen=True)
class MeasurementMatrix:
    """n x m matrix A with its generation variance"""
    entries: np.ndarray
    sigma_a2: float

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2:
            raise InvalidConfigError("Measurement matrix must be two-dimensional")
        if self.sigma_a2 <= 0:
            raise InvalidConfigError("Matrix variance must be positive")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def m(self) -> int:
        return int(self.entries.shape[1])


@dataclass(frozen=True)
class MeasurementVector:
    """Length-n measurement Y"""
    y: np.ndarray

    def __post_init__(self):
        y = _frozen(self.y)
        if y.ndim != 1:
            raise InvalidConfigError("Measurement must be a vector")
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.y.size)
