import json
from pathlib import Path

from suprec.models.config_models import DecodeInstance


class InstanceLoader:
    """Loader for JSON decode instances: header fields plus row-major matrix and measurement"""

    def __init__(self, path: str):
        if not path:
            raise ValueError("Instance path cannot be empty")
        self.path = Path(path)

    @classmethod
    def bundled(cls, name: str) -> "InstanceLoader":
        """Loader for an instance shipped in suprec/instances (name without .json)"""
        return cls(str(Path(__file__).resolve().parent.parent / "instances" / f"{name}.json"))

    def load(self) -> DecodeInstance:
        """
        Read and validate the instance file

        Returns:
            The validated DecodeInstance

        Raises:
            FileNotFoundError: If the file doesn't exist
            ValueError: If the file is not valid JSON or fails schema validation
        """
        if not self.path.exists():
            raise FileNotFoundError(f"Instance file not found: {self.path}")

        payload = json.loads(self.path.read_text(encoding="utf-8"))
        return DecodeInstance.model_validate(payload)
