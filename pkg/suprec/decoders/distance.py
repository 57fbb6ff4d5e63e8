"""
Distance decoders: accept a candidate support when some admissible value vector brings the
normalized residual below a noise-level threshold.

The value search runs over the quantization grid Q(W_hat + zeta/2, zeta), where W_hat is
estimated from the measurement energy.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from suprec.decoders.common import (
    GramSystem,
    count_candidates,
    iter_subset_blocks,
    leading_indices,
    residual,
)
from suprec.decoders.grid import QuantizationGrid, build_grid, estimate_grid_size
from suprec.models.config_models import DecoderParams
from suprec.models.result_models import DecodeResult
from suprec.utils.errors import InvalidConfigError, WorkCapExceededError

logger = logging.getLogger(__name__)

# budget of (candidate set, grid point) pairs held in memory per block
SEARCH_BLOCK_ELEMENTS = 2_000_000

Accepted = Tuple[Tuple[int, ...], np.ndarray, float]


def estimate_magnitude(y: np.ndarray, n: int, sigma_a2: float, sigma_z2: float) -> float:
    """W_hat = sqrt(| ||y||^2 / n - sigma_z2 | / sigma_a2)"""
    if n < 1:
        raise InvalidConfigError("Need n >= 1")
    y = np.asarray(y, dtype=float)
    return math.sqrt(abs(float(y @ y) / n - sigma_z2) / sigma_a2)


def _check_shapes(y: np.ndarray, A: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or y.ndim != 1 or y.shape[0] != A.shape[0]:
        raise InvalidConfigError(f"Shape mismatch: y {y.shape}, A {A.shape}")
    if not 1 <= k <= A.shape[1]:
        raise InvalidConfigError(f"Need 1 <= k <= m, got k={k}, m={A.shape[1]}")
    return y, A


def _map_in_order(fn: Callable, items: Iterable, jobs: int) -> List:
    """Map preserving input order; threads when jobs > 1"""
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def distance_decode_k1(
    y: np.ndarray,
    A: np.ndarray,
    params: DecoderParams,
    sigma_a2: float,
    sigma_z2: float,
) -> DecodeResult:
    """
    Single-value rule: index s is accepted when (1/n)||y -/+ W_hat A_s||^2 <= threshold for
    either sign. A unique accepted index is returned; otherwise the smallest accepted index,
    or the failure sentinel, with the ambiguity flag set.
    """
    y, A = _check_shapes(y, A, 1)
    n, m = A.shape
    threshold = params.threshold(sigma_a2, sigma_z2)
    if 2 * m > params.cap:
        raise WorkCapExceededError("single-value distance decoder", 2 * m, params.cap)

    w_hat = estimate_magnitude(y, n, sigma_a2, sigma_z2)
    plus = np.mean((y[:, None] - w_hat * A) ** 2, axis=0)
    minus = np.mean((y[:, None] + w_hat * A) ** 2, axis=0)
    best = np.minimum(plus, minus)
    signs = np.where(plus <= minus, 1.0, -1.0)
    accepted = np.flatnonzero(best <= threshold)

    base = dict(
        decoder="distance_k1",
        threshold=threshold,
        magnitude_estimate=w_hat,
        satisfying_sets=int(accepted.size),
        candidates_examined=m,
        grid_evaluations=2 * m,
    )
    if accepted.size == 0 and m > 1:
        return DecodeResult(support=None, status="failure", ambiguous=True, **base)

    s = int(accepted[0]) if accepted.size else 0
    return DecodeResult(
        support=[s],
        ambiguous=accepted.size != 1,
        forced=accepted.size == 0,
        witness_values=[float(signs[s] * w_hat)],
        residual=float(best[s]),
        **base,
    )


def _best_grid_points(system: GramSystem, idx: np.ndarray, points: np.ndarray):
    """
    Smallest residual sum of squares over the grid, and its argmin, for each set in the block,
    from the quadratic form ||y||^2 - 2 p^T b_T + p^T G_T p.
    """
    G, b = system.block_terms(idx)
    b = b[:, :, 0]
    cross = b @ points.T
    quad = np.sum((points[None, :, :] @ G) * points[None, :, :], axis=2)
    rss = system.energy - 2.0 * cross + quad
    best = np.argmin(rss, axis=1)
    return best, rss[np.arange(idx.shape[0]), best]


def _search_sets(
    system: GramSystem,
    y: np.ndarray,
    idx: np.ndarray,
    grid: QuantizationGrid,
    threshold: float,
) -> List[Accepted]:
    """Sets in the block that pass the rule at some grid point, with their best point"""
    n = system.n
    limit = n * threshold * (1.0 + 1e-9) + 1e-12 * system.energy
    rows = max(1, SEARCH_BLOCK_ELEMENTS // len(grid))
    accepted = []
    for start in range(0, idx.shape[0], rows):
        block = idx[start:start + rows]
        best, value = _best_grid_points(system, block, grid.points)
        for row in np.flatnonzero(value <= limit):
            subset = tuple(int(i) for i in block[row])
            point = grid.points[best[row]]
            exact = residual(y, system.A, subset, point)
            if exact <= threshold:
                accepted.append((subset, point, exact))
    return accepted


def _screen(system: GramSystem, m: int, k: int, threshold: float, jobs: int) -> np.ndarray:
    """
    Sets whose least-squares residual is within the threshold. The least-squares fit lower
    bounds every grid residual, so no set that could pass the rule is dropped.
    """
    limit = system.n * threshold + 1e-9 * (system.energy + 1.0)

    def survivors_for(lead: int) -> np.ndarray:
        kept = []
        for idx in iter_subset_blocks(m, k, lead):
            rss, _ = system.least_squares(idx)
            kept.append(idx[rss <= limit])
        return np.vstack(kept) if kept else np.zeros((0, k), dtype=np.int64)

    parts = _map_in_order(survivors_for, leading_indices(m, k), jobs)
    return np.vstack(parts) if parts else np.zeros((0, k), dtype=np.int64)


def distance_decode(
    y: np.ndarray,
    A: np.ndarray,
    k: int,
    params: DecoderParams,
    sigma_a2: float,
    sigma_z2: float,
    jobs: int = 1,
) -> DecodeResult:
    """
    Multi-value distance decoder over all C(m, k) index sets.

    Args:
        y: Measurement vector (n,)
        A: Measurement matrix (n, m)
        k: Sparsity level, at least 2
        params: Rule, epsilon, zeta, search mode and work cap
        sigma_a2: Matrix entry variance
        sigma_z2: Noise variance
        jobs: Worker threads; the outcome does not depend on it

    Returns:
        DecodeResult with the lexicographically smallest accepted set

    Raises:
        WorkCapExceededError: The estimated number of rule evaluations exceeds params.cap
    """
    y, A = _check_shapes(y, A, k)
    if k < 2:
        raise InvalidConfigError("distance_decode needs k >= 2; use distance_decode_k1")
    n, m = A.shape
    resolved = params.resolved(sigma_a2, sigma_z2)
    threshold = params.threshold(sigma_a2, sigma_z2)
    cap = params.cap

    w_hat = estimate_magnitude(y, n, sigma_a2, sigma_z2)
    radius = w_hat + resolved.zeta / 2.0
    candidates = count_candidates(m, k)
    screens = candidates * (k + 1)
    if params.search == "exhaustive":
        work = candidates * estimate_grid_size(radius, resolved.zeta, k)
    else:
        work = screens
    if work > cap:
        raise WorkCapExceededError("distance decoder", work, cap)

    grid = build_grid(radius, resolved.zeta, k)
    system = GramSystem(A, y)

    if params.search == "screened":
        survivors = _screen(system, m, k, threshold, jobs)
        evaluated = survivors.shape[0]
        if screens + evaluated * len(grid) > cap:
            raise WorkCapExceededError("distance decoder", screens + evaluated * len(grid), cap)
        step = max(1, math.ceil(evaluated / max(jobs, 1)))
        chunks = [survivors[i:i + step] for i in range(0, evaluated, step)]
        found = _map_in_order(
            lambda idx: _search_sets(system, y, idx, grid, threshold), chunks, jobs
        )
    else:
        evaluated = candidates

        def search_lead(lead: int) -> List[Accepted]:
            out = []
            for idx in iter_subset_blocks(m, k, lead):
                out.extend(_search_sets(system, y, idx, grid, threshold))
            return out

        found = _map_in_order(search_lead, leading_indices(m, k), jobs)

    accepted = [item for part in found for item in part]
    logger.debug(
        f"distance decoder: {evaluated} of {candidates} sets searched, {len(accepted)} accepted"
    )

    base = dict(
        decoder="distance",
        threshold=threshold,
        magnitude_estimate=w_hat,
        grid_size=len(grid),
        satisfying_sets=len(accepted),
        candidates_examined=candidates,
        grid_evaluations=evaluated * len(grid),
    )
    if accepted:
        subset, point, value = min(accepted, key=lambda item: item[0])
        return DecodeResult(
            support=list(subset),
            ambiguous=len(accepted) > 1,
            witness_values=[float(v) for v in point],
            residual=value,
            **base,
        )

    if candidates == 1:
        only = np.arange(k)[None, :]
        best, _ = _best_grid_points(system, only, grid.points)
        point = grid.points[best[0]]
        return DecodeResult(
            support=list(range(k)),
            ambiguous=True,
            forced=True,
            witness_values=[float(v) for v in point],
            residual=residual(y, A, range(k), point),
            **base,
        )

    return DecodeResult(support=None, status="failure", ambiguous=True, **base)
