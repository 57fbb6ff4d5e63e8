"""
Reference decoders: exhaustive least-squares (maximum likelihood under Gaussian noise)
and orthogonal matching pursuit
"""

import logging
from typing import Optional

import numpy as np

from suprec.config.settings import settings
from suprec.decoders.common import (
    GramSystem,
    as_columns,
    count_candidates,
    iter_subset_blocks,
    leading_indices,
)
from suprec.decoders.distance import _map_in_order
from suprec.models.result_models import DecodeResult
from suprec.utils.errors import InvalidConfigError, WorkCapExceededError

logger = logging.getLogger(__name__)

# relative gap below which two residuals are re-ranked by a direct solve
TIE_TOLERANCE = 1e-9


def ml_decode(
    y: np.ndarray,
    A: np.ndarray,
    k: int,
    work_cap: Optional[int] = None,
    jobs: int = 1,
) -> DecodeResult:
    """
    Support minimizing min_v ||Y - A_T v||^2 over all size-k sets T, ties to the
    lexicographically smallest set.

    `y` may be an (n, t) stack of measurement vectors sharing one support; residuals are then
    summed over the columns, the reported residual is divided by n and witness_values holds
    one list of k values per column.
    """
    A = np.asarray(A, dtype=float)
    Y = as_columns(y)
    y_is_vector = np.ndim(y) == 1
    n, m = A.shape
    if not 1 <= k <= m:
        raise InvalidConfigError(f"Need 1 <= k <= m, got k={k}, m={m}")
    if n < k:
        raise InvalidConfigError(f"ml decoder needs n >= k, got n={n}, k={k}")
    cap = settings.decoder_work_cap if work_cap is None else work_cap
    candidates = count_candidates(m, k)
    if candidates > cap:
        raise WorkCapExceededError("ml decoder", candidates, cap)

    system = GramSystem(A, Y)

    def scan(lead: int):
        """Smallest residual for this leading index plus every set within tolerance of it"""
        slack = TIE_TOLERANCE * (system.energy + 1.0)
        best_value, near = np.inf, []
        for idx in iter_subset_blocks(m, k, lead):
            rss, _ = system.least_squares(idx)
            best_value = min(best_value, float(rss.min()))
            keep = rss <= best_value + slack
            near.append((idx[keep], rss[keep]))
        cut = best_value + slack
        sets = [tuple(int(i) for i in row) for idx, rss in near for row in idx[rss <= cut]]
        return best_value, sets

    scans = _map_in_order(scan, leading_indices(m, k), jobs)
    overall = min(value for value, _ in scans)
    cut = overall + TIE_TOLERANCE * (system.energy + 1.0)
    contenders = [s for value, sets in scans if value <= cut for s in sets]

    # re-rank near-ties exactly
    best_set, best_rss, best_coef = None, np.inf, None
    for subset in contenders:
        rss, coef = system.exact_rss(subset)
        if rss < best_rss or (rss == best_rss and subset < best_set):
            best_set, best_rss, best_coef = subset, rss, coef

    return DecodeResult(
        decoder="ml",
        support=list(best_set),
        witness_values=best_coef[:, 0].tolist() if y_is_vector else best_coef.T.tolist(),
        residual=best_rss / n,
        forced=candidates == 1,
        candidates_examined=candidates,
        detail=f"{len(contenders)} near-tied sets re-ranked" if len(contenders) > 1 else None,
    )


def omp_decode(y: np.ndarray, A: np.ndarray, k: int) -> DecodeResult:
    """
    Orthogonal matching pursuit: k rounds of picking the column most correlated with the
    current residual, each followed by a least-squares refit on all picked columns.
    A rank-deficient refit ends with status "numerical_failure".
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = A.shape
    if not 1 <= k <= m:
        raise InvalidConfigError(f"Need 1 <= k <= m, got k={k}, m={m}")
    if k > n:
        raise InvalidConfigError(f"omp needs k <= n, got k={k}, n={n}")

    picked = []
    current = y.copy()
    coef = np.zeros(0)
    for round_index in range(k):
        scores = np.abs(A.T @ current)
        scores[picked] = -np.inf
        picked.append(int(np.argmax(scores)))
        cols = A[:, picked]
        coef, _, rank, _ = np.linalg.lstsq(cols, y, rcond=None)
        if rank < len(picked):
            logger.info(f"OMP refit rank {rank} < {len(picked)} in round {round_index + 1}")
            return DecodeResult(
                decoder="omp",
                support=None,
                status="numerical_failure",
                candidates_examined=m * (round_index + 1),
                detail=f"rank-deficient projection: rank {rank} with {len(picked)} columns",
            )
        current = y - cols @ coef

    order = np.argsort(picked)
    return DecodeResult(
        decoder="omp",
        support=sorted(picked),
        witness_values=[float(coef[i]) for i in order],
        residual=float(current @ current) / n,
        candidates_examined=m * k,
    )
