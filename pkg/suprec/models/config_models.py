"""
Configuration models for signals, decoders, trials and sweeps using Pydantic
"""

import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from suprec.config.settings import settings
from suprec.utils.errors import InvalidConfigError

NoiseKind = Literal["gaussian", "uniform", "laplace", "rademacher"]
DecoderName = Literal["distance_k1", "distance", "ml", "omp"]
RuleName = Literal["fixed_k", "growing_k"]


##### Signal model #####

class NoiseModel(BaseModel):
    """Additive noise law, scaled so that every sample has variance sigma_z2"""
    model_config = ConfigDict(frozen=True)

    kind: NoiseKind = "gaussian"
    sigma_z2: float = Field(1.0, ge=0.0)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw `size` i.i.d. samples"""
        if self.sigma_z2 == 0.0:
            return np.zeros(size)
        sigma = math.sqrt(self.sigma_z2)
        if self.kind == "gaussian":
            return rng.normal(0.0, sigma, size=size)
        if self.kind == "uniform":
            half_width = math.sqrt(3.0 * self.sigma_z2)
            return rng.uniform(-half_width, half_width, size=size)
        if self.kind == "laplace":
            return rng.laplace(0.0, sigma / math.sqrt(2.0), size=size)
        # rademacher
        return sigma * (2.0 * rng.integers(0, 2, size=size) - 1.0)


class ModelConfig(BaseModel):
    """One experiment's full measurement-model parameterization"""
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1, description="Signal dimension")
    n: int = Field(ge=1, description="Number of measurements")
    k: int = Field(ge=1, description="Sparsity level")
    sigma_a2: float = Field(1.0, gt=0.0, description="Matrix entry variance")
    noise: NoiseModel = Field(default_factory=NoiseModel)

    @model_validator(mode="after")
    def _check_sparsity(self) -> "ModelConfig":
        if self.k > self.m:
            raise InvalidConfigError(f"Sparsity k={self.k} exceeds dimension m={self.m}")
        return self

    @property
    def sigma_z2(self) -> float:
        return self.noise.sigma_z2


##### Activity distributions #####

class ActivityModel(BaseModel):
    """Distribution of the nonzero values W for random-activity experiments"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["deterministic", "uniform", "discrete", "gaussian"]
    k: int = Field(1, ge=1)
    values: Optional[List[float]] = None
    low: Optional[float] = None
    high: Optional[float] = None
    random_sign: bool = False
    points: Optional[List[float]] = None
    probs: Optional[List[float]] = None
    mean: float = 0.0
    std: float = 1.0

    @model_validator(mode="after")
    def _check_parameters(self) -> "ActivityModel":
        if self.kind == "deterministic":
            if not self.values or len(self.values) != self.k:
                raise InvalidConfigError("Deterministic activity needs exactly k values")
            if any(v == 0 for v in self.values):
                raise InvalidConfigError("Signal values must be nonzero")
        elif self.kind == "uniform":
            if self.low is None or self.high is None:
                raise InvalidConfigError("Uniform activity needs low and high")
            if not 0 < self.low <= self.high:
                raise InvalidConfigError("Uniform activity needs 0 < low <= high")
        elif self.kind == "discrete":
            if not self.points or not self.probs or len(self.points) != len(self.probs):
                raise InvalidConfigError("Discrete activity needs matching points and probs")
            if any(p == 0 for p in self.points):
                raise InvalidConfigError("Discrete activity points must be nonzero")
            if any(p < 0 for p in self.probs) or not math.isclose(sum(self.probs), 1.0, abs_tol=1e-9):
                raise InvalidConfigError("Discrete activity probs must be a distribution")
        elif self.std <= 0:
            raise InvalidConfigError("Gaussian activity needs std > 0")
        return self

    @property
    def is_bounded(self) -> bool:
        return self.kind != "gaussian"

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One draw of the k nonzero values"""
        return self.sample_batch(1, rng)[0]

    def sample_batch(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """`size` independent draws as a (size, k) array"""
        shape = (size, self.k)
        if self.kind == "deterministic":
            return np.broadcast_to(np.asarray(self.values, dtype=float), shape).copy()
        if self.kind == "uniform":
            draws = rng.uniform(self.low, self.high, size=shape)
            if self.random_sign:
                draws *= 2.0 * rng.integers(0, 2, size=shape) - 1.0
            return draws
        if self.kind == "discrete":
            return rng.choice(np.asarray(self.points, dtype=float), size=shape, p=self.probs)
        draws = rng.normal(self.mean, self.std, size=shape)
        # a draw of exactly zero would break the nonzero-value model
        draws[draws == 0.0] = np.finfo(float).tiny
        return draws


##### Decoders #####

class DecoderParams(BaseModel):
    """
    Distance-decoder parameters. epsilon and zeta default to
    0.1 * sqrt(sigma_z2 / sigma_a2) and epsilon respectively.
    """
    model_config = ConfigDict(frozen=True)

    epsilon: Optional[float] = Field(None, gt=0.0)
    zeta: Optional[float] = Field(None, gt=0.0)
    rule: RuleName = "fixed_k"
    search: Literal["screened", "exhaustive"] = "screened"
    threshold_override: Optional[float] = Field(None, gt=0.0)
    work_cap: Optional[int] = Field(None, ge=1)

    def resolved(self, sigma_a2: float, sigma_z2: float) -> "DecoderParams":
        """
        Copy with epsilon and zeta filled in. For a noiseless model epsilon stays unset when
        the threshold override and zeta are both given.
        """
        epsilon = self.epsilon
        if epsilon is None:
            epsilon = settings.default_epsilon_scale * math.sqrt(sigma_z2 / sigma_a2)
            if epsilon <= 0:
                if self.threshold_override is None or self.zeta is None:
                    raise InvalidConfigError(
                        "Default epsilon is zero for noiseless models; pass epsilon explicitly"
                    )
                epsilon = None
        zeta = self.zeta if self.zeta is not None else epsilon
        return self.model_copy(update={"epsilon": epsilon, "zeta": zeta})

    def threshold(self, sigma_a2: float, sigma_z2: float) -> float:
        """Right-hand side of the acceptance rule"""
        if self.threshold_override is not None:
            return self.threshold_override
        epsilon = self.resolved(sigma_a2, sigma_z2).epsilon
        if self.rule == "growing_k":
            return (1.0 + epsilon) * sigma_z2 + 2.0 * epsilon ** 2 * sigma_a2
        return sigma_z2 + epsilon ** 2 * sigma_a2

    @property
    def cap(self) -> int:
        return self.work_cap if self.work_cap is not None else settings.decoder_work_cap


##### Experiments #####

class TrialConfig(BaseModel):
    """Everything one Monte Carlo trial needs, including its master seed"""
    model_config = ConfigDict(frozen=True)

    model: ModelConfig
    w: Optional[List[float]] = None
    activity: Optional[ActivityModel] = None
    decoder: DecoderName = "ml"
    params: DecoderParams = Field(default_factory=DecoderParams)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0)
    fixed_matrix: bool = False

    @model_validator(mode="after")
    def _check_compatibility(self) -> "TrialConfig":
        k = self.model.k
        if (self.w is None) == (self.activity is None):
            raise InvalidConfigError("Give exactly one of w and activity")
        if self.w is not None:
            if len(self.w) != k:
                raise InvalidConfigError(f"w has {len(self.w)} entries, expected k={k}")
            if any(v == 0 for v in self.w):
                raise InvalidConfigError("Signal values must be nonzero")
        if self.activity is not None and self.activity.k != k:
            raise InvalidConfigError(f"Activity draws {self.activity.k} values, expected k={k}")
        if self.decoder == "distance_k1" and k != 1:
            raise InvalidConfigError("distance_k1 decodes k=1 only")
        if self.decoder == "distance" and k < 2:
            raise InvalidConfigError("distance decodes k>=2; use distance_k1")
        if self.decoder in ("ml", "omp") and self.model.n < k:
            raise InvalidConfigError(f"{self.decoder} needs n >= k")
        return self


class SweepPoint(BaseModel):
    m: int = Field(ge=1)
    n: int = Field(ge=1)


class SweepSpec(BaseModel):
    """Grid of (m, n) points, given directly or as m values times rates log2(m)/n"""
    points: Optional[List[SweepPoint]] = None
    m_values: Optional[List[int]] = None
    rates: Optional[List[float]] = None
    k: int = Field(1, ge=1)
    w: Optional[List[float]] = None
    activity: Optional[ActivityModel] = None
    sigma_a2: float = Field(1.0, gt=0.0)
    noise: NoiseModel = Field(default_factory=NoiseModel)
    decoder: DecoderName = "ml"
    params: DecoderParams = Field(default_factory=DecoderParams)
    trials: int = Field(100, ge=1)
    seed: Optional[int] = Field(None, ge=0)
    fixed_matrix: bool = False

    @field_validator("rates")
    @classmethod
    def _positive_rates(cls, rates: Optional[List[float]]) -> Optional[List[float]]:
        if rates is not None and any(r <= 0 for r in rates):
            raise InvalidConfigError("Rates must be positive")
        return rates

    @model_validator(mode="after")
    def _check_grid(self) -> "SweepSpec":
        has_points = bool(self.points)
        has_rates = bool(self.m_values) and bool(self.rates)
        if has_points == has_rates:
            raise InvalidConfigError("Give either points or both m_values and rates")
        return self

    def grid(self) -> List[Tuple[int, int]]:
        """(m, n) pairs in sweep order"""
        if self.points:
            return [(p.m, p.n) for p in self.points]
        pairs = []
        for rate in self.rates:
            for m in self.m_values:
                n = max(1, math.ceil(math.log2(m) / rate - settings.count_tolerance))
                pairs.append((m, n))
        return pairs

    def trial_config(self, m: int, n: int, seed: int) -> TrialConfig:
        return TrialConfig(
            model=ModelConfig(m=m, n=n, k=self.k, sigma_a2=self.sigma_a2, noise=self.noise),
            w=self.w,
            activity=self.activity,
            decoder=self.decoder,
            params=self.params,
            seed=seed,
            fixed_matrix=self.fixed_matrix,
        )


##### Tail bounds #####

class TailQuery(BaseModel):
    """Parameters of the tail event (1/n) sum (u_i - V_i)^2 <= gamma"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    alpha: float
    beta: float
    gamma: float
    sigma_v2: float

    @model_validator(mode="after")
    def _check_window(self) -> "TailQuery":
        if not 0 < self.beta < self.alpha:
            raise InvalidConfigError("Need 0 < beta < alpha")
        if not 0 < self.gamma < self.alpha - self.beta:
            raise InvalidConfigError("Need gamma in (0, alpha - beta)")
        if self.sigma_v2 <= 0:
            raise InvalidConfigError("Need sigma_v2 > 0")
        return self

    @property
    def ratio(self) -> float:
        return (self.alpha - self.beta) / self.gamma


##### Decode instances #####

class DecodeInstance(BaseModel):
    """A stored measurement: JSON header plus row-major matrix and measurement vector"""
    m: int = Field(ge=1)
    n: int = Field(ge=1)
    k: int = Field(ge=1)
    sigma_a2: float = Field(1.0, gt=0.0)
    sigma_z2: float = Field(1.0, ge=0.0)
    params: DecoderParams = Field(default_factory=DecoderParams)
    decoder: Optional[DecoderName] = None
    matrix: List[float]
    y: List[float]
    planted: Optional[List[int]] = Field(None, description="1-based planted support, if known")

    @model_validator(mode="after")
    def _check_shapes(self) -> "DecodeInstance":
        if self.k > self.m:
            raise InvalidConfigError(f"Sparsity k={self.k} exceeds dimension m={self.m}")
        if len(self.matrix) != self.n * self.m:
            raise InvalidConfigError(
                f"Matrix has {len(self.matrix)} entries, expected n*m={self.n * self.m}"
            )
        if len(self.y) != self.n:
            raise InvalidConfigError(f"Measurement vector has {len(self.y)} entries, expected n={self.n}")
        if self.planted is not None and any(not 1 <= s <= self.m for s in self.planted):
            raise InvalidConfigError("Planted indices must lie in [1, m]")
        return self

    def matrix_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float).reshape(self.n, self.m)

    def y_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)

    def default_decoder(self) -> DecoderName:
        if self.decoder is not None:
            return self.decoder
        return "distance_k1" if self.k == 1 else "distance"
