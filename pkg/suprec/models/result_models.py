"""
Result models returned by the analysis, decoder and experiment layers
"""

from datetime import datetime, timezone
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import pandas as pd
from pydantic import BaseModel, Field, model_validator


##### Thresholds #####

class RateThreshold(BaseModel):
    """c(w) in bits per measurement and the subset attaining the minimum (0-based indices)"""
    value: float
    argmin_subset: Tuple[int, ...]
    subsets_examined: int


class RegimeTag(BaseModel):
    """Row of the sufficient-order table for a growth relation between m and k"""
    label: Literal["m_poly_in_k", "mid", "low", "linear", "unclassified"]
    m_relation: Optional[str] = None
    sufficient_order: Optional[str] = None
    necessary_order: Optional[str] = None
    example: Optional[str] = None


class MacRegionCheck(BaseModel):
    """Membership of a rate tuple in the Gaussian multiple access capacity region"""
    contained: bool
    tightest_subset: Tuple[int, ...]
    slack_bits: float
    violated_subsets: List[Tuple[int, ...]] = Field(default_factory=list)


class DesignRate(BaseModel):
    """Largest rate whose estimated outage stays at or below the target"""
    target_outage: float
    rate_bits: float
    achieved_outage: float
    trials: int
    measurements: Optional[int] = None


##### Proportions #####

class ProportionEstimate(BaseModel):
    """Empirical proportion with a Wilson score interval"""
    estimate: float
    ci_lo: float
    ci_hi: float
    events: int
    trials: int


##### Decoding #####

class DecodeResult(BaseModel):
    """
    Outcome of one support recovery call. `support` is None for the explicit failure sentinel.
    Indices are 0-based; tools convert to 1-based for output.
    """
    decoder: str
    support: Optional[List[int]] = None
    status: Literal["recovered", "failure", "numerical_failure"] = "recovered"
    ambiguous: bool = False
    forced: bool = False
    satisfying_sets: int = 0
    # one list per measurement vector when the decoder was given a stack
    witness_values: Optional[Union[List[float], List[List[float]]]] = None
    residual: Optional[float] = None
    threshold: Optional[float] = None
    magnitude_estimate: Optional[float] = None
    grid_size: Optional[int] = None
    candidates_examined: int = 0
    grid_evaluations: int = 0
    detail: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.support is None

    def support_one_based(self) -> Optional[List[int]]:
        if self.support is None:
            return None
        return [int(s) + 1 for s in sorted(self.support)]


##### Experiments #####

class TrialOutcome(BaseModel):
    """Result of a single Monte Carlo trial"""
    trial_index: int
    status: Literal["success", "failure", "refused"]
    planted: List[int]
    recovered: Optional[List[int]] = None
    ambiguous: bool = False
    detail: Optional[str] = None


class ErrorEstimate(BaseModel):
    """Empirical support-recovery error probability over non-refused trials"""
    trials: int
    successes: int
    failures: int
    refusals: int
    pe: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    no_data: bool = False

    @model_validator(mode="after")
    def _check_accounting(self) -> "ErrorEstimate":
        if self.successes + self.failures + self.refusals != self.trials:
            raise ValueError("trials must equal successes + failures + refusals")
        return self


SWEEP_COLUMNS = [
    "m", "n", "rate_bits", "c_w_bits", "pe", "ci_lo", "ci_hi",
    "trials", "refusals", "decoder", "seed",
]


class SweepRow(BaseModel):
    """One grid point of a phase-transition sweep"""
    m: int
    n: int
    rate_bits: float
    c_w_bits: Optional[float] = None
    pe: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    trials: int
    refusals: int
    decoder: str
    seed: int


class SweepResult(BaseModel):
    """Table of sweep rows in grid order"""
    rows: List[SweepRow] = Field(default_factory=list)
    master_seed: int

    def to_frame(self) -> pd.DataFrame:
        records = [row.model_dump() for row in self.rows]
        return pd.DataFrame.from_records(records, columns=SWEEP_COLUMNS)

    def to_csv(self) -> str:
        return self.to_frame().to_csv(
            index=False,
            lineterminator="\n",
            float_format="%.12g",
        )


class OutageReport(BaseModel):
    """Empirical failure rate against the outage bound P{c(W) <= r}"""
    rate_bits: float
    m: int
    n: int
    failure: ErrorEstimate
    outage: ProportionEstimate
    outage_exact: Optional[float] = None
    gap: Optional[float] = None


##### Tail bounds #####

class UnionBound(BaseModel):
    """Finite-n union bound on the distance decoder's false-acceptance probability"""
    exponent_bits: float
    bound: float
    rate_bits: float
    exponent_rate_bits: Optional[float] = None


class BoundCell(BaseModel):
    """One cell of the tail-bound validation table"""
    n: int
    ratio: float
    sigma_v2: float
    profile: str
    alpha: float
    beta: float
    gamma: float
    bound: float
    empirical: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    trials: int = 0
    verdict: Literal["pass", "violation", "invalid"] = "pass"
    detail: Optional[str] = None


##### Run manifests #####

class RunManifest(BaseModel):
    """Everything needed to repeat a run"""
    command: str
    config: Dict[str, Any]
    master_seed: int
    seed_source: str = "config"
    version: str
    jobs: int = 1
    created_at: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
