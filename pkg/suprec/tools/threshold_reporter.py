"""
Threshold reporter tool: c(w), measurement counts and regime classification
"""

import logging
from typing import List, Optional, Type

import numpy as np
from pydantic import BaseModel, Field

from suprec.analysis.thresholds import (
    achievable_n,
    c_of_w,
    classify_regime,
    necessary_n_growing,
    sufficient_n_growing,
)
from suprec.signal.types import SignalValues
from suprec.tools.base_tool import SuprecTool
from suprec.utils.errors import InvalidConfigError

logger = logging.getLogger(__name__)


class ThresholdReporterInput(BaseModel):
    """Input schema for ThresholdReporter tool."""
    w: Optional[List[float]] = Field(None, description="Nonzero signal values")
    sigma_a2: float = Field(1.0, gt=0.0, description="Matrix entry variance")
    sigma_z2: float = Field(1.0, gt=0.0, description="Noise variance")
    m: Optional[int] = Field(None, ge=1, description="Signal dimension")
    k: Optional[int] = Field(None, ge=1, description="Sparsity level, defaults to len(w)")
    w_min: Optional[float] = Field(None, gt=0.0, description="Smallest |w_j|, defaults to min |w|")
    w_max: Optional[float] = Field(None, gt=0.0, description="Largest |w_j|, defaults to max |w|")
    margin: Optional[float] = Field(None, gt=0.0, description="Rate margin below c(w)")
    growth: Optional[str] = Field(None, description="Symbolic growth of m in k, e.g. 'k^2'")


class ThresholdReporter(SuprecTool):
    """
    Tool reporting the rate threshold c(w) and the measurement counts derived from it.
    Growing-k counts evaluate asymptotic conditions at finite m and are guidance only.
    """

    name: str = "threshold_reporter"
    description: str = """
    Compute c(w) in bits per measurement with the subset attaining it, the sufficient count
    at a rate margin, the growing-k sufficient and necessary counts, and the regime of a
    symbolic m-versus-k growth relation.
    """
    args_schema: Type[BaseModel] = ThresholdReporterInput

    def _run(
        self,
        w: Optional[List[float]] = None,
        sigma_a2: float = 1.0,
        sigma_z2: float = 1.0,
        m: Optional[int] = None,
        k: Optional[int] = None,
        w_min: Optional[float] = None,
        w_max: Optional[float] = None,
        margin: Optional[float] = None,
        growth: Optional[str] = None,
    ) -> str:
        """
        Returns:
            JSON string with every quantity that the given inputs determine
        """
        if w is None and m is None and growth is None:
            return self._failure(InvalidConfigError("Give w, or m and k, or a growth pattern"))

        response = {"success": True, "error": None}
        try:
            if w is not None:
                values = SignalValues(w=np.asarray(w, dtype=float))
                threshold = c_of_w(values, sigma_a2, sigma_z2)
                response.update({
                    "c_w_bits": threshold.value,
                    "argmin_subset": [j + 1 for j in threshold.argmin_subset],
                    "subsets_examined": threshold.subsets_examined,
                })
                k = k if k is not None else values.k
                w_min = w_min if w_min is not None else values.w_min
                w_max = w_max if w_max is not None else values.w_max
                if k != values.k:
                    raise InvalidConfigError(f"k={k} does not match len(w)={values.k}")
                if m is not None and margin is not None:
                    response["achievable_n"] = achievable_n(m, values, sigma_a2, sigma_z2, margin)

            if m is not None and k is not None:
                notes = []
                if k >= 2 and w_min is not None:
                    response["sufficient_n_growing"] = sufficient_n_growing(
                        m, k, w_min, sigma_a2, sigma_z2
                    )
                    notes.append("sufficient_n_growing")
                if m > k and w_max is not None:
                    response["necessary_n_growing"] = necessary_n_growing(
                        m, k, w_max, sigma_a2, sigma_z2
                    )
                    notes.append("necessary_n_growing")
                if notes:
                    response["note"] = f"{', '.join(notes)}: asymptotic guidance"

            if growth is not None:
                response["regime"] = classify_regime(growth).model_dump()

        except Exception as e:
            return self._failure(e)

        logger.info(f"Threshold report: {sorted(response)}")
        return self._format_response(response)
