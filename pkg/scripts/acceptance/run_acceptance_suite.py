"""
Desk-scale acceptance runs.

Each criterion runs at its full desk-scale size and logs the measured numbers next to its
target. Criteria that are Monte Carlo trends are reported, not enforced, unless --strict is set.

Usage:
    python scripts/acceptance/run_acceptance_suite.py --criteria 1,6,7 --jobs 4
"""

import argparse
import itertools
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
from dotenv import load_dotenv
from scipy.spatial import cKDTree

from suprec.analysis.tail_bounds import validate_bounds_grid
from suprec.analysis.thresholds import c_of_w, outage_probability_exact
from suprec.decoders import distance_decode_k1, ml_decode
from suprec.decoders.grid import build_grid
from suprec.experiments.harness import sweep_phase_transition
from suprec.experiments.outage import run_outage_experiment
from suprec.models.config_models import (
    ActivityModel,
    DecoderParams,
    ModelConfig,
    NoiseModel,
    SweepSpec,
)
from suprec.signal.types import SignalValues
from suprec.utils.errors import WorkCapExceededError

load_dotenv()

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logger = logging.getLogger(__name__)

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"
SEED = 20100301
# the (k=3, r=2, zeta=0.05) covering cell needs about 1.2e7 points
COVERING_GRID_CAP = 20_000_000


def load_spec(name: str) -> SweepSpec:
    return SweepSpec.model_validate(json.loads((SPECS_DIR / name).read_text(encoding="utf-8")))


def brute_force_c(w, sigma_a2=1.0, sigma_z2=1.0):
    k = len(w)
    return min(
        math.log2(1 + sigma_a2 / sigma_z2 * sum(w[j] ** 2 for j in T)) / (2 * len(T))
        for size in range(1, k + 1)
        for T in itertools.combinations(range(k), size)
    )


def lstsq_rss(A, y, T):
    cols = A[:, list(T)]
    coef = np.linalg.lstsq(cols, y, rcond=None)[0]
    return float(np.sum((y - cols @ coef) ** 2))


def nonincreasing_with_one_inversion(rows) -> bool:
    inversions = sum(
        1 for a, b in zip(rows, rows[1:])
        if b.pe > a.pe and b.ci_lo > a.ci_hi
    )
    strict = sum(1 for a, b in zip(rows, rows[1:]) if b.pe > a.pe)
    return inversions == 0 and strict <= 1


def criterion_1(jobs):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(1, 9))
        w = rng.uniform(0.1, 3.0, size=k) * rng.choice([-1.0, 1.0], size=k)
        worst = max(worst, abs(c_of_w(SignalValues(w=w), 1.0, 1.0).value - brute_force_c(list(w))))
    closed = (
        abs(c_of_w(SignalValues(w=[1.0]), 1.0, 1.0).value - 0.5) < 1e-12
        and abs(c_of_w(SignalValues(w=[1.0, 1.0]), 1.0, 1.0).value - 0.25 * math.log2(3)) < 1e-12
    )
    return worst < 1e-12 and closed, {"max_abs_diff": worst, "closed_forms": closed}


def criterion_2(jobs):
    cells = validate_bounds_grid(1_000_000, SEED, jobs=jobs)
    violations = [c for c in cells if c.verdict != "pass"]
    return not violations, {"cells": len(cells), "violations": len(violations)}


def criterion_3(jobs):
    low = sweep_phase_transition(load_spec("phase_k1_rate035.json"), jobs=jobs)
    high = sweep_phase_transition(load_spec("phase_k1_rate080.json"), jobs=jobs)
    trend = nonincreasing_with_one_inversion(low.rows)
    final = low.rows[-1].pe < 0.15
    converse = all(row.pe >= 0.3 for row in high.rows)
    return trend and final and converse, {
        "rate_0.35_pe": [row.pe for row in low.rows],
        "rate_0.8_pe": [row.pe for row in high.rows],
    }


def criterion_4(jobs):
    result = sweep_phase_transition(load_spec("phase_k2_rate030.json"), jobs=jobs)
    ok = nonincreasing_with_one_inversion(result.rows) and result.rows[-1].pe < 0.3
    return ok, {"pe": [row.pe for row in result.rows], "refusals": [r.refusals for r in result.rows]}


def criterion_5(jobs):
    activity = ActivityModel(kind="uniform", k=1, low=0.5, high=1.5)
    template = ModelConfig(m=4096, n=1, k=1, noise=NoiseModel(sigma_z2=1.0))
    report = run_outage_experiment(activity, template, 0.45, 500, SEED, jobs=jobs)
    exact = outage_probability_exact(activity, 0.45)
    return report.failure.pe <= exact + 0.15, {"failure": report.failure.pe, "outage": exact}


def criterion_6(jobs):
    rng = np.random.default_rng(SEED)
    worst_ratio = 0.0
    refused = []
    for k, r, zeta in itertools.product((1, 2, 3), (0.5, 1.0, 2.0), (0.05, 0.2)):
        try:
            grid = build_grid(r, zeta, k, cap=COVERING_GRID_CAP)
        except WorkCapExceededError as e:
            logger.error(f"Grid k={k} r={r} zeta={zeta} refused: {e}")
            refused.append([k, r, zeta])
            continue
        directions = rng.normal(size=(10_000, k))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        points = directions * r * rng.uniform(size=(10_000, 1)) ** (1.0 / k)
        distances, _ = cKDTree(grid.points).query(points)
        worst_ratio = max(worst_ratio, float(distances.max()) / (zeta / 2))
    sizes = [len(build_grid(r, 0.2, 2)) for r in np.linspace(0.0, 2.0, 21)]
    monotone = all(b >= a for a, b in zip(sizes, sizes[1:]))
    passed = worst_ratio <= 1.0 and monotone and not refused
    return passed, {"worst_distance_over_half_zeta": worst_ratio, "refused_cells": refused}


def criterion_7(jobs):
    rng = np.random.default_rng(SEED)
    agree = 0
    for _ in range(50):
        m = int(rng.integers(4, 11))
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k, 12))
        A = rng.normal(size=(n, m))
        y = rng.normal(size=n)
        best = min(itertools.combinations(range(m), k), key=lambda T: lstsq_rss(A, y, T))
        agree += ml_decode(y, A, k).support == list(best)
    recovered = 0
    params = DecoderParams(epsilon=0.1)
    for trial in range(100):
        trial_rng = np.random.default_rng([SEED, trial])
        A = trial_rng.normal(size=(1000, 32))
        s = int(trial_rng.integers(32))
        y = A[:, s] + trial_rng.normal(0.0, 1e-6, size=1000)
        recovered += distance_decode_k1(y, A, params, 1.0, 1e-12).support == [s]
    return agree == 50 and recovered >= 99, {"ml_agreement": agree, "distance_recovered": recovered}


def criterion_8(jobs):
    spec = load_spec("phase_k1_rate035.json").model_copy(update={"trials": 50})
    reference = sweep_phase_transition(spec, jobs=1).to_csv()
    same = all(sweep_phase_transition(spec, jobs=j).to_csv() == reference for j in (1, 2, 8))
    return same, {"identical_for_jobs": [1, 2, 8] if same else None}


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}
ENFORCED = {1, 2, 6, 7, 8}


def main():
    parser = argparse.ArgumentParser(description="Run the desk-scale acceptance criteria.")
    parser.add_argument("--criteria", default="1,2,3,4,5,6,7,8", help="Comma-separated criterion numbers")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes")
    parser.add_argument("--strict", action="store_true", help="Also fail on Monte Carlo trend criteria")
    args = parser.parse_args()

    selected = [int(c) for c in args.criteria.split(",")]
    failed = []
    for number in selected:
        start = time.perf_counter()
        ok, details = CRITERIA[number](args.jobs)
        elapsed = time.perf_counter() - start
        logger.info(f"Criterion {number}: {'PASS' if ok else 'MISS'} in {elapsed:.1f}s {details}")
        if not ok and (args.strict or number in ENFORCED):
            failed.append(number)

    if failed:
        logger.error(f"Failed criteria: {failed}")
        sys.exit(1)
    logger.info("All enforced criteria passed")


if __name__ == "__main__":
    main()
