"""
Instance decoder tool for recovering the support of a stored measurement
"""

import logging
from typing import Literal, Optional, Type

from pydantic import BaseModel, Field

from suprec.decoders import run_decoder
from suprec.models.config_models import DecoderName
from suprec.tools.base_tool import SuprecTool
from suprec.utils.errors import InvalidConfigError
from suprec.utils.instance_loader import InstanceLoader

logger = logging.getLogger(__name__)


class InstanceDecoderInput(BaseModel):
    """Input schema for InstanceDecoder tool."""
    path: str = Field(description="Path to a JSON decode instance")
    decoder: Optional[DecoderName] = Field(None, description="Decoder, defaults to the instance's")
    k: Optional[int] = Field(None, ge=1, description="Expected sparsity; must match the file")
    threshold: Optional[float] = Field(None, gt=0.0, description="Replaces the rule threshold")
    epsilon: Optional[float] = Field(None, gt=0.0)
    zeta: Optional[float] = Field(None, gt=0.0)
    search: Optional[Literal["screened", "exhaustive"]] = None
    jobs: int = Field(1, ge=1)


class InstanceDecoder(SuprecTool):
    """
    Tool for decoding a stored instance (A, y, k, parameters) with any registered decoder.
    Support indices in the response are 1-based and sorted.
    """

    name: str = "instance_decoder"
    description: str = """
    Load a JSON decode instance and recover its support. Returns the support, the failure and
    ambiguity flags, the achieved residual, the rule threshold and the search counts.
    """
    args_schema: Type[BaseModel] = InstanceDecoderInput

    def _run(
        self,
        path: str,
        decoder: Optional[str] = None,
        k: Optional[int] = None,
        threshold: Optional[float] = None,
        epsilon: Optional[float] = None,
        zeta: Optional[float] = None,
        search: Optional[str] = None,
        jobs: int = 1,
    ) -> str:
        """
        Args:
            path: Instance file
            decoder: Decoder name override
            k: Sparsity expected by the caller

        Returns:
            JSON string with the decode result or error information
        """
        try:
            instance = InstanceLoader(path).load()
            if k is not None and k != instance.k:
                raise InvalidConfigError(f"k={k} does not match the instance's k={instance.k}")

            overrides = {
                key: value
                for key, value in {
                    "threshold_override": threshold,
                    "epsilon": epsilon,
                    "zeta": zeta,
                    "search": search,
                }.items()
                if value is not None
            }
            params = instance.params.model_copy(update=overrides)
            name = decoder or instance.default_decoder()

            logger.info(f"Decoding {path} with {name} (m={instance.m}, n={instance.n}, k={instance.k})")
            result = run_decoder(
                name,
                instance.y_array(),
                instance.matrix_array(),
                instance.k,
                params,
                instance.sigma_a2,
                instance.sigma_z2,
                jobs=jobs,
            )
        except Exception as e:
            return self._failure(e, path=path)

        response = {
            "success": True,
            "error": None,
            "decoder": result.decoder,
            "support": result.support_one_based(),
            "failure": result.failed,
            "status": result.status,
            "ambiguous": result.ambiguous,
            "forced": result.forced,
            "satisfying_sets": result.satisfying_sets,
            "witness_values": result.witness_values,
            "residual": result.residual,
            "threshold": result.threshold,
            "magnitude_estimate": result.magnitude_estimate,
            "grid_size": result.grid_size,
            "candidates_examined": result.candidates_examined,
            "grid_evaluations": result.grid_evaluations,
            "detail": result.detail,
        }
        if instance.planted is not None:
            response["matches_planted"] = response["support"] == sorted(instance.planted)
        return self._format_response(response)
