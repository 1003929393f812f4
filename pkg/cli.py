#!/usr/bin/env python3
import argparse
import logging
import sys

from uaconvert.app import RUNNERS, run_command
from uaconvert.errors import (
    CalibrationFailed,
    ConfigError,
    DatasetError,
    NumericalError,
    TrainingError,
)
from uaconvert.logging_utils import level_from_flags, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CALIBRATION = 3
EXIT_NUMERICAL = 4

HELP = {
    "toyworld": "Compare classification strategies on a GMM world",
    "convert": "Draw K-member posterior ensembles for each observation",
    "train": "Train the MLP denoiser and/or logistic classifiers",
    "calibrate": "Certify a confidence threshold for selective classification (LTT + Hoeffding)",
    "metrics": "ROC/risk-coverage summaries and ensemble uncertainty diagnostics",
    "select": "Pick representative ensemble members and score the selection strategies",
    "preprocess": "Resample, band-pass, detrend and normalize signals",
    "cycle": "X -> Y -> X conversion quality compared with direct conversion",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uaconvert",
        description="Uncertainty-aware signal conversion: posterior ensembles, ensemble "
        "classification and certified selective decisions.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    # Global logging flags
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Enable DEBUG logs (to stderr)."
    )
    parser.add_argument("--quiet", "-q", action="store_true", help="Reduce logs to WARN and above.")
    parser.add_argument("--log-json", action="store_true", help="Emit logs as JSON lines (stderr).")

    for name in RUNNERS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument(
            "--config", type=str, default=None, help="YAML/JSON config (default: all defaults)"
        )
        p.add_argument(
            "--out", type=str, default="runs", help="Parent directory for the run (default runs/)"
        )
        p.add_argument(
            "--workers", type=int, default=None, help="Worker threads (outputs do not depend on it)"
        )
        p.add_argument("--seed", type=int, default=None, help="Override the config seed")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose and args.quiet:
        print("Cannot use --verbose and --quiet together.", file=sys.stderr)
        return EXIT_CONFIG
    setup_logging(level=level_from_flags(args.verbose, args.quiet), json_logs=args.log_json)
    logger.debug("CLI args parsed: %s", vars(args))

    overrides = {"seed": args.seed, "workers": args.workers}
    try:
        run_dir = run_command(args.cmd, args.config, args.out, overrides)
    except CalibrationFailed as e:
        logger.error("Calibration failed: %s", e)
        return EXIT_CALIBRATION
    except (NumericalError, TrainingError) as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERICAL
    except (ConfigError, DatasetError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except (ValueError, OSError) as e:
        logger.error("%s failed: %s", args.cmd, e)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("%s failed: %s", args.cmd, e)
        return EXIT_FAILURE

    print(run_dir)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
