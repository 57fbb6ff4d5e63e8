"""
Sweep runner tool: phase-transition sweeps written as CSV with a run manifest
"""

import logging
from typing import Optional, Type

from pydantic import BaseModel, Field

from suprec.experiments.harness import sweep_phase_transition
from suprec.models.config_models import SweepSpec
from suprec.tools.base_tool import SuprecTool
from suprec.utils.io import build_manifest, load_config, resolve_seed, write_run

logger = logging.getLogger(__name__)

RESULTS_NAME = "results.csv"


class SweepRunnerInput(BaseModel):
    """Input schema for SweepRunner tool."""
    spec_path: str = Field(description="SweepSpec JSON file, or a manifest.json from an earlier run")
    out_dir: str = Field(description="Directory receiving results.csv and manifest.json")
    seed: Optional[int] = Field(None, ge=0, description="Master seed, overrides the file's")
    jobs: int = Field(1, ge=1, description="Worker processes; results do not depend on it")


class SweepRunner(SuprecTool):
    """
    Tool for running a phase-transition sweep. The manifest records the resolved spec,
    master seed and library version, and can be passed back as spec_path to repeat the run.
    """

    name: str = "sweep_runner"
    description: str = """
    Run an error-probability sweep over (m, n) points and write results.csv
    (m,n,rate_bits,c_w_bits,pe,ci_lo,ci_hi,trials,refusals,decoder,seed) plus manifest.json.
    """
    args_schema: Type[BaseModel] = SweepRunnerInput

    def _run(self, spec_path: str, out_dir: str, seed: Optional[int] = None, jobs: int = 1) -> str:
        try:
            spec, manifest = load_config(spec_path, SweepSpec)
            configured = manifest.master_seed if manifest is not None else spec.seed
            master_seed, seed_source = resolve_seed(seed, configured)
            spec = spec.model_copy(update={"seed": master_seed})

            result = sweep_phase_transition(spec, jobs=jobs, master_seed=master_seed)
            run_manifest = build_manifest("sweep", spec, master_seed, seed_source, jobs)
            csv_path, manifest_path = write_run(out_dir, RESULTS_NAME, result.to_csv(), run_manifest)
        except Exception as e:
            return self._failure(e, spec_path=spec_path)

        return self._format_response({
            "success": True,
            "error": None,
            "rows": len(result.rows),
            "results_csv": str(csv_path),
            "manifest": str(manifest_path),
            "master_seed": master_seed,
            "seed_source": seed_source,
            "refusals": sum(row.refusals for row in result.rows),
        })
