"""
Shared pieces of the subset-search decoders: the normalized residual, enumeration of
candidate index sets in lexicographic order, and batched least squares over those sets
through the Gram matrix.
"""

import itertools
import logging
import math
from typing import Iterator, Sequence, Tuple

import numpy as np

from suprec.config.settings import settings
from suprec.utils.errors import InvalidConfigError

logger = logging.getLogger(__name__)


def residual(y: np.ndarray, A: np.ndarray, subset: Sequence[int], values: Sequence[float]) -> float:
    """(1/n) ||y - sum_j values_j A_{subset_j}||^2"""
    subset = list(subset)
    values = np.asarray(values, dtype=float)
    if len(subset) != values.size:
        raise InvalidConfigError(f"Got {values.size} values for {len(subset)} indices")
    y = np.asarray(y, dtype=float)
    fit = A[:, subset] @ values if subset else np.zeros_like(y)
    diff = y - fit
    return float(diff @ diff) / y.shape[0]


def as_columns(y: np.ndarray) -> np.ndarray:
    """View a single measurement vector or an n x t stack as n x t"""
    y = np.asarray(y, dtype=float)
    return y[:, None] if y.ndim == 1 else y


def count_candidates(m: int, k: int) -> int:
    return math.comb(m, k)


def leading_indices(m: int, k: int) -> range:
    """Leading indices of the lexicographic enumeration, one partition per value"""
    return range(m - k + 1)


def iter_subset_blocks(
    m: int,
    k: int,
    lead: int,
    chunk: int = 0,
) -> Iterator[np.ndarray]:
    """
    Size-k index sets starting with `lead`, in lexicographic order, as (B, k) int arrays.
    """
    chunk = chunk or settings.candidate_chunk_size
    if k == 1:
        yield np.array([[lead]])
        return
    tails = itertools.combinations(range(lead + 1, m), k - 1)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(tails, chunk)),
            dtype=np.int64,
        )
        if flat.size == 0:
            return
        rest = flat.reshape(-1, k - 1)
        yield np.hstack([np.full((rest.shape[0], 1), lead, dtype=np.int64), rest])


def iter_all_subsets(m: int, k: int, chunk: int = 0) -> Iterator[np.ndarray]:
    """All C(m, k) index sets in lexicographic order"""
    for lead in leading_indices(m, k):
        yield from iter_subset_blocks(m, k, lead, chunk)


class GramSystem:
    """
    Precomputed A^T A, A^T Y and ||Y||_F^2 for least squares on column subsets.
    Y may hold several measurement vectors as columns; residuals are summed over them.
    """

    def __init__(self, A: np.ndarray, Y: np.ndarray):
        self.A = np.asarray(A, dtype=float)
        self.Y = as_columns(Y)
        if self.Y.shape[0] != self.A.shape[0]:
            raise InvalidConfigError(
                f"Measurement has {self.Y.shape[0]} rows, matrix has {self.A.shape[0]}"
            )
        self.gram = self.A.T @ self.A
        self.corr = self.A.T @ self.Y
        self.energy = float(np.sum(self.Y ** 2))

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    def block_terms(self, idx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(B, k, k) Gram blocks and (B, k, t) correlations for a block of index sets"""
        G = self.gram[idx[:, :, None], idx[:, None, :]]
        b = self.corr[idx]
        return G, b

    def least_squares(self, idx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Residual sums of squares (B,) and coefficients (B, k, t) for every set in the block.
        Singular Gram blocks fall back to the pseudo-inverse.
        """
        G, b = self.block_terms(idx)
        try:
            coef = np.linalg.solve(G, b)
        except np.linalg.LinAlgError:
            logger.debug("Singular Gram block, falling back to pseudo-inverse")
            coef = np.linalg.pinv(G) @ b
        explained = np.sum(b * coef, axis=(1, 2))
        return np.maximum(self.energy - explained, 0.0), coef

    def exact_rss(self, subset: Sequence[int]) -> Tuple[float, np.ndarray]:
        """Residual sum of squares of one set by a direct least-squares solve"""
        cols = self.A[:, list(subset)]
        coef, _, _, _ = np.linalg.lstsq(cols, self.Y, rcond=None)
        diff = self.Y - cols @ coef
        return float(np.sum(diff ** 2)), coef
