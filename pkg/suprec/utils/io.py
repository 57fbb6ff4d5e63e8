"""
Reading run configurations and writing result files with their manifests
"""

import json
import logging
from pathlib import Path
from typing import Optional, Tuple, Type, TypeVar

from pydantic import BaseModel

from suprec import __version__
from suprec.config.settings import Settings, settings
from suprec.models.result_models import RunManifest

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

MANIFEST_NAME = "manifest.json"


def load_config(path: str, model_cls: Type[ModelT]) -> Tuple[ModelT, Optional[RunManifest]]:
    """
    Load a JSON config file into `model_cls`. A run manifest is accepted in place of the
    config it records, and is returned alongside.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If the file is not valid JSON or fails validation
    """
    file = Path(path)
    if not file.exists():
        raise FileNotFoundError(f"Config file not found: {file}")
    payload = json.loads(file.read_text(encoding="utf-8"))
    if isinstance(payload, dict) and {"command", "config", "master_seed"} <= payload.keys():
        manifest = RunManifest.model_validate(payload)
        return model_cls.model_validate(manifest.config), manifest
    return model_cls.model_validate(payload), None


def resolve_seed(explicit: Optional[int], configured: Optional[int] = None) -> Tuple[int, str]:
    """
    Master seed and where it came from. SUPREC_SEED wins over everything, then an explicit
    argument, then the config file, then settings.default_seed.
    """
    env_seed = Settings().seed
    if env_seed is not None:
        logger.info(f"Using master seed {env_seed} from SUPREC_SEED")
        return env_seed, "env:SUPREC_SEED"
    if explicit is not None:
        return explicit, "argument"
    if configured is not None:
        return configured, "config"
    return settings.default_seed, "default"


def build_manifest(
    command: str,
    config: BaseModel,
    master_seed: int,
    seed_source: str,
    jobs: int = 1,
) -> RunManifest:
    return RunManifest(
        command=command,
        config=config.model_dump(mode="json"),
        master_seed=master_seed,
        seed_source=seed_source,
        version=__version__,
        jobs=jobs,
    )


def write_run(out_dir: str, filename: str, csv_text: str, manifest: RunManifest) -> Tuple[Path, Path]:
    """
    Write the CSV and its manifest into out_dir, creating the directory if needed.

    Raises:
        OSError: If the directory or files cannot be written
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / filename
    manifest_path = directory / MANIFEST_NAME
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        f.write(csv_text)
    with open(manifest_path, "w", encoding="utf-8", newline="") as f:
        f.write(manifest.model_dump_json(indent=2) + "\n")
    logger.info(f"Wrote {csv_path} and {manifest_path}")
    return csv_path, manifest_path
