"""
Finite covering grids Q(r, zeta) of the k-dimensional Euclidean ball.

A cubic lattice of spacing zeta / (2 sqrt(k)) is intersected with the ball of radius
r + zeta/2 and every lattice point outside B_k(r) is pulled radially onto its surface.
Each ball point is within zeta/4 of a lattice point and the projection onto the ball
is non-expansive, so the grid covers B_k(r) to within zeta/2.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from suprec.config.settings import settings
from suprec.utils.errors import InvalidConfigError, WorkCapExceededError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantizationGrid:
    r: float
    zeta: float
    k: int
    points: np.ndarray

    def __post_init__(self):
        self.points.flags.writeable = False

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def spacing(self) -> float:
        return lattice_spacing(self.zeta, self.k)


def lattice_spacing(zeta: float, k: int) -> float:
    return zeta / (2.0 * math.sqrt(k))


def _check_args(r: float, zeta: float, k: int) -> None:
    if r < 0:
        raise InvalidConfigError(f"Grid radius must be non-negative, got {r}")
    if zeta <= 0:
        raise InvalidConfigError(f"Grid parameter zeta must be positive, got {zeta}")
    if k < 1:
        raise InvalidConfigError(f"Grid dimension must be at least 1, got {k}")


def estimate_grid_size(r: float, zeta: float, k: int) -> float:
    """Volume estimate of the lattice points inside the radius r + zeta/2 ball"""
    _check_args(r, zeta, k)
    if r == 0:
        return 1.0
    outer = r + zeta / 2.0
    log_volume = (k / 2.0) * math.log(math.pi) - gammaln(k / 2.0 + 1.0) + k * math.log(outer)
    log_cell = k * math.log(lattice_spacing(zeta, k))
    return float(math.exp(min(log_volume - log_cell, 700.0)))


def grid_cardinality_bound(r: float, zeta: float, k: int) -> float:
    """
    (4 sqrt(k) (r + zeta/2) / zeta + 1)^k, the lattice count of the enclosing cube.
    For r >= zeta/2 this is at most (10 k r / zeta)^k.
    """
    _check_args(r, zeta, k)
    return float((4.0 * math.sqrt(k) * (r + zeta / 2.0) / zeta + 1.0) ** k)


def build_grid(r: float, zeta: float, k: int, cap: Optional[int] = None) -> QuantizationGrid:
    """
    Build Q(r, zeta) in dimension k.

    Args:
        r: Ball radius
        zeta: Covering parameter, every ball point has a grid point within zeta/2
        k: Dimension
        cap: Largest admissible estimated grid size, defaults to settings.grid_point_cap

    Raises:
        WorkCapExceededError: The size estimate is above the cap
    """
    _check_args(r, zeta, k)
    cap = settings.grid_point_cap if cap is None else cap

    if r == 0:
        return QuantizationGrid(r=r, zeta=zeta, k=k, points=np.zeros((1, k)))

    estimate = estimate_grid_size(r, zeta, k)
    if estimate > cap:
        raise WorkCapExceededError("quantization grid", estimate, cap)

    h = lattice_spacing(zeta, k)
    outer2 = (r + zeta / 2.0) ** 2
    steps = int(math.floor((r + zeta / 2.0) / h))
    axis = np.arange(-steps, steps + 1) * h

    # grow one coordinate at a time, pruning prefixes already outside the outer ball
    points = np.zeros((1, 0))
    norms2 = np.zeros(1)
    for _ in range(k):
        cand2 = norms2[:, None] + axis[None, :] ** 2
        keep_row, keep_col = np.nonzero(cand2 <= outer2)
        points = np.hstack([points[keep_row], axis[keep_col, None]])
        norms2 = cand2[keep_row, keep_col]

    norms = np.sqrt(norms2)
    outside = norms > r
    points[outside] *= (r / norms[outside])[:, None]
    points = np.unique(np.round(points, 12), axis=0)

    logger.debug(f"Built grid r={r:.6g} zeta={zeta:.6g} k={k}: {len(points)} points")
    return QuantizationGrid(r=r, zeta=zeta, k=k, points=points)
