"""
Command-line interface: threshold, decode, sweep, validate-bounds and outage.

Every command prints the JSON answer of its tool on stdout and logs to stderr.
Exit codes: 0 success, 2 configuration or usage error, 3 work-cap refusal,
4 bound violation (validate-bounds only), 1 anything else.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from suprec import __version__
from suprec.config.settings import settings
from suprec.tools.bound_validator import DEFAULT_BOUND_TRIALS, BoundValidator
from suprec.tools.instance_decoder import InstanceDecoder
from suprec.tools.outage_reporter import OutageReporter
from suprec.tools.sweep_runner import SweepRunner
from suprec.tools.threshold_reporter import ThresholdReporter

logger = logging.getLogger(__name__)

EXIT_CODES = {
    "INVALID_CONFIG": 2,
    "IO_ERROR": 2,
    "WORK_CAP_EXCEEDED": 3,
    "BOUND_VIOLATION": 4,
}


def _float_list(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _str_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _drop_none(**kwargs) -> dict:
    return {key: value for key, value in kwargs.items() if value is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suprec",
        description="Sparse support recovery: thresholds, decoders and Monte Carlo experiments.",
    )
    parser.add_argument("--version", action="version", version=f"suprec {__version__}")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    commands = parser.add_subparsers(dest="command", required=True)

    threshold = commands.add_parser("threshold", help="Rate threshold c(w) and measurement counts")
    threshold.add_argument("--config", help="JSON file with any of the flags below")
    threshold.add_argument("--w", type=_float_list, help="Signal values, e.g. 1,1")
    threshold.add_argument("--sigma-a2", type=float)
    threshold.add_argument("--sigma-z2", type=float)
    threshold.add_argument("--m", type=int)
    threshold.add_argument("--k", type=int)
    threshold.add_argument("--wmin", type=float)
    threshold.add_argument("--wmax", type=float)
    threshold.add_argument("--margin", type=float, help="Rate margin below c(w)")
    threshold.add_argument("--growth", help="Growth of m in k, e.g. 'k^2' or 'k^(log k)'")

    decode = commands.add_parser("decode", help="Decode a stored instance")
    decode.add_argument("instance", help="JSON instance file")
    decode.add_argument("--decoder", choices=["distance_k1", "distance", "ml", "omp"])
    decode.add_argument("--k", type=int, help="Expected sparsity; must match the file")
    decode.add_argument("--threshold", type=float, help="Replace the rule threshold")
    decode.add_argument("--epsilon", type=float)
    decode.add_argument("--zeta", type=float)
    decode.add_argument("--search", choices=["screened", "exhaustive"])
    decode.add_argument("--jobs", type=int, default=settings.jobs)

    sweep = commands.add_parser("sweep", help="Phase-transition sweep to CSV")
    sweep.add_argument("spec", help="SweepSpec JSON or an earlier manifest.json")
    sweep.add_argument("--out", default=settings.results_dir, help="Output directory")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--jobs", type=int, default=settings.jobs)

    bounds = commands.add_parser("validate-bounds", help="Tail bound against Monte Carlo")
    bounds.add_argument("--trials", type=int, default=DEFAULT_BOUND_TRIALS)
    bounds.add_argument("--seed", type=int)
    bounds.add_argument("--ns", type=_int_list)
    bounds.add_argument("--ratios", type=_float_list)
    bounds.add_argument("--sigma-v2", type=_float_list)
    bounds.add_argument("--profiles", type=_str_list)
    bounds.add_argument("--alpha", type=float)
    bounds.add_argument("--beta", type=float)
    bounds.add_argument("--jobs", type=int, default=settings.jobs)
    bounds.add_argument("--out", help="Write bounds.csv and manifest.json here")

    outage = commands.add_parser("outage", help="Outage probability for random activities")
    outage.add_argument(
        "--activity", required=True, choices=["deterministic", "uniform", "discrete", "gaussian"]
    )
    outage.add_argument("--k", type=int, default=1)
    outage.add_argument("--values", type=_float_list, help="deterministic values")
    outage.add_argument("--low", type=float)
    outage.add_argument("--high", type=float)
    outage.add_argument("--random-sign", action="store_true")
    outage.add_argument("--points", type=_float_list)
    outage.add_argument("--probs", type=_float_list)
    outage.add_argument("--mean", type=float)
    outage.add_argument("--std", type=float)
    outage.add_argument("--rate", type=float, required=True)
    outage.add_argument("--trials", type=int, default=1000)
    outage.add_argument("--m", type=int, help="Also run the decoding experiment at this m")
    outage.add_argument("--sigma-a2", type=float)
    outage.add_argument("--sigma-z2", type=float)
    outage.add_argument("--noise", choices=["gaussian", "uniform", "laplace", "rademacher"])
    outage.add_argument("--decoder", choices=["distance_k1", "distance", "ml", "omp"])
    outage.add_argument("--epsilon", type=float)
    outage.add_argument("--design-p", type=float, help="Target outage for the design rate")
    outage.add_argument("--seed", type=int)
    outage.add_argument("--jobs", type=int, default=settings.jobs)

    return parser


def cmd_threshold(args) -> str:
    options = {}
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            options.update(json.load(f))
    options.update(_drop_none(
        w=args.w, sigma_a2=args.sigma_a2, sigma_z2=args.sigma_z2, m=args.m, k=args.k,
        w_min=args.wmin, w_max=args.wmax, margin=args.margin, growth=args.growth,
    ))
    return ThresholdReporter().invoke(options)


def cmd_decode(args) -> str:
    return InstanceDecoder().invoke(_drop_none(
        path=args.instance, decoder=args.decoder, k=args.k, threshold=args.threshold,
        epsilon=args.epsilon, zeta=args.zeta, search=args.search, jobs=args.jobs,
    ))


def cmd_sweep(args) -> str:
    return SweepRunner().invoke(_drop_none(
        spec_path=args.spec, out_dir=args.out, seed=args.seed, jobs=args.jobs,
    ))


def cmd_validate_bounds(args) -> str:
    return BoundValidator().invoke(_drop_none(
        trials=args.trials, seed=args.seed, ns=args.ns, ratios=args.ratios,
        sigma_v2s=args.sigma_v2, profiles=args.profiles, alpha=args.alpha, beta=args.beta,
        jobs=args.jobs, out_dir=args.out,
    ))


def cmd_outage(args) -> str:
    activity = _drop_none(
        kind=args.activity, k=args.k, values=args.values, low=args.low, high=args.high,
        points=args.points, probs=args.probs, mean=args.mean, std=args.std,
    )
    activity["random_sign"] = args.random_sign
    return OutageReporter().invoke(_drop_none(
        activity=activity, rate=args.rate, trials=args.trials, m=args.m,
        sigma_a2=args.sigma_a2, sigma_z2=args.sigma_z2, noise=args.noise, decoder=args.decoder,
        epsilon=args.epsilon, design_p=args.design_p, seed=args.seed, jobs=args.jobs,
    ))


COMMANDS = {
    "threshold": cmd_threshold,
    "decode": cmd_decode,
    "sweep": cmd_sweep,
    "validate-bounds": cmd_validate_bounds,
    "outage": cmd_outage,
}


def exit_code(response: dict) -> int:
    if response.get("success"):
        return 0
    return EXIT_CODES.get(response.get("error_type"), 1)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=args.log_level or settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        output = COMMANDS[args.command](args)
    except (OSError, ValueError) as e:
        # config files read by the CLI itself
        logger.error(f"{args.command}: {e}")
        output = json.dumps({"success": False, "error": str(e), "error_type": "INVALID_CONFIG"}, indent=2)

    print(output)
    return exit_code(json.loads(output))


if __name__ == "__main__":
    sys.exit(main())
