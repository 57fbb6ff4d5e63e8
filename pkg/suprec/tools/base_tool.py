"""
Shared behaviour of the suprec tools on top of LangChain's BaseTool: schema failures and
library errors become a JSON answer with an error_type that callers branch on
"""

import json
import logging
import math
from typing import Any, Callable, Dict, Optional, Union

from langchain_core.tools import BaseTool
from pydantic import ValidationError

from suprec.utils.errors import InvalidConfigError, WorkCapExceededError

logger = logging.getLogger(__name__)


def invalid_config_response(error: ValidationError) -> str:
    """Answer for arguments rejected by a tool's args_schema"""
    logger.error(f"Tool arguments rejected: {error}")
    return format_response({"success": False, "error": str(error), "error_type": "INVALID_CONFIG"})


def format_response(response_dict: Dict[str, Any]) -> str:
    """JSON string with non-finite floats written as null"""
    return json.dumps(_finite(response_dict), indent=2)


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


class SuprecTool(BaseTool):
    """
    Base class for the suprec tools. `invoke` validates its input against `args_schema`;
    tools never raise, failures come back as {"success": false, "error": ..., "error_type": ...}.
    """

    handle_validation_error: Optional[
        Union[bool, str, Callable[[ValidationError], str]]
    ] = invalid_config_response

    def _failure(self, error: Exception, **extra) -> str:
        error_type = self._classify_error(error)
        logger.error(f"{self.name} failed ({error_type}): {error}")
        response = {"success": False, "error": str(error), "error_type": error_type}
        if isinstance(error, WorkCapExceededError):
            response.update({"estimate": error.estimate, "cap": error.cap})
        response.update(extra)
        return self._format_response(response)

    def _classify_error(self, error: Exception) -> str:
        """
        Classify the error type for callers.

        Args:
            error: The exception raised while running the tool

        Returns:
            Error classification
        """
        if isinstance(error, WorkCapExceededError):
            return "WORK_CAP_EXCEEDED"
        elif isinstance(error, (InvalidConfigError, ValidationError, json.JSONDecodeError)):
            return "INVALID_CONFIG"
        elif isinstance(error, OSError):
            return "IO_ERROR"
        elif isinstance(error, ValueError):
            return "INVALID_CONFIG"
        else:
            return "EXECUTION_ERROR"

    def _format_response(self, response_dict: Dict[str, Any]) -> str:
        """Format response as JSON string."""
        return format_response(response_dict)
