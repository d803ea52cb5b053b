#!/usr/bin/env python3
"""
Dirac Quantum Cellular Automaton Experiments

Runs the numerical experiments of the one-dimensional Dirac automaton
(refraction curve, Gaussian packets, double slit, two-particle collision,
dispersion) and the verification suites of its qubit and Fock-space
realisations. Tables are written as CSV or JSON.

Usage:
    python main.py <experiment> [options]
    python main.py verify <suite> [options]

Exit codes: 0 success, 1 verification failure or unexpected error,
2 configuration error.
"""

# Standard library imports
import argparse
import logging
import sys
import traceback
from typing import Any, Dict, List, Optional

# Third-party imports
from pydantic import ValidationError

# Local application imports
import config.logging_config as logging_config
from processor.errors import ConfigError
from processor.experiments.executor import ExperimentExecutor
from processor.experiments.output import write_result
from processor.experiments.schemas import SUITES, build_config, read_config_file

# Configure logger for this module
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# Parsed arguments that are not experiment parameters
_CONTROL_KEYS = ("command", "config", "log_mode")


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", help="Output file (relative paths use LQCA_OUTPUT_DIR); stdout when omitted")
    parser.add_argument("--config", help="JSON configuration file; flags override its keys")
    parser.add_argument("--threads", type=int, help="Worker cap for parallel sections")
    parser.add_argument("--format", choices=("csv", "json"), help="Output format")
    parser.add_argument("--log-mode", choices=("normal", "quiet", "debug", "clean_output"),
                        help="Console logging mode (default from LQCA_LOG_MODE)")
    return parser


def _lattice_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--theta", help="Mass angle in radians or an expression such as pi/8")
    parser.add_argument("--m-ratio", type=float, help="Mass in Planck units (excludes --theta)")
    parser.add_argument("--sites", type=int, help="Number of field sites N")
    parser.add_argument("--steps", type=int, help="Number of time steps")
    return parser


def _packet_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--delta", type=float, help="Packet width in sites")
    parser.add_argument("--k", type=float, help="Phase period in sites (carrier momentum 2 pi / k)")
    parser.add_argument("--sign", choices=("+", "-"), help="Relative sign of the - component")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Args:
        argv: Argument list; sys.argv[1:] when None

    Returns:
        argparse.Namespace: The parsed command line arguments

    Raises:
        SystemExit: If required arguments are missing or invalid (exit code 2)
    """
    parser = argparse.ArgumentParser(
        description="Run Dirac quantum cellular automaton experiments and verification suites",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""Examples:
  python main.py refraction-curve --out zeta.csv
  python main.py packet --theta pi/8 --sites 64 --steps 180 --out packet.csv
  python main.py double-slit --slit-n 10 --format json
  python main.py collide --x0 10 --out collision.csv
  python main.py verify jw1d""",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common, lattice, packet = _common_parser(), _lattice_parser(), _packet_parser()

    refraction = subparsers.add_parser("refraction-curve", parents=[common],
                                       help="Inverse refraction index zeta against m / m_planck")
    refraction.add_argument("--samples", type=int, help="Number of grid points")

    for name, text in (("packet", "Single-particle Gaussian packet"),
                       ("packet-detail", "Gaussian packet on the small detail lattice"),
                       ("planck-halt", "Gaussian packet at the Planck mass")):
        sub = subparsers.add_parser(name, parents=[common, lattice, packet], help=text)
        sub.add_argument("--n0", type=float, help="Packet centre")

    slit = subparsers.add_parser("double-slit", parents=[common, lattice], help="Two-site double-slit state")
    slit.add_argument("--slit-n", type=int, help="Slits at sites n and -n")

    collide = subparsers.add_parser("collide", parents=[common, lattice, packet],
                                    help="Two-fermion packet collision")
    collide.add_argument("--x0", type=float, help="Packets start at -x0 and +x0")
    collide.add_argument("--dump-every", type=int, help="Dump the probability matrix every n steps")

    dispersion = subparsers.add_parser("dispersion", parents=[common, lattice], help="Dispersion relation E(phi)")
    dispersion.add_argument("--samples", type=int, help="Number of momentum samples")

    verify = subparsers.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", choices=SUITES, help="Suite name")
    verify.add_argument("--seed", type=int, help="Seed for random test states")

    return parser.parse_args(argv)


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags given on the command line, keyed like the configuration fields."""
    return {key: value for key, value in vars(args).items() if key not in _CONTROL_KEYS and value is not None}


def describe_validation_error(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        field = ".".join(str(item) for item in error["loc"]) or "<config>"
        parts.append(f"{field}: {error['msg']}")
    return "; ".join(parts)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the application.

    - Parses arguments and merges them over the optional config file
    - Validates the configuration before any computation
    - Runs the experiment and writes its table and summary

    Returns:
        int: Exit code (0 success, 1 verification failure or unexpected error, 2 configuration error)
    """
    try:
        args = parse_args(argv)
        if args.log_mode:
            logging_config.configure_logging(args.log_mode)

        file_values = read_config_file(args.config) if args.config else {}
        config = build_config(args.command, file_values, collect_overrides(args))

        executor = ExperimentExecutor(args.command, config)
        result = executor.run()
        if result is None:
            logger.error(f"Experiment {args.command} rejected its parameters. Exiting.")
            return EXIT_CONFIG

        write_result(result, config.format, config.out)

        if args.command == "verify" and not result.summary["passed"]:
            failures = result.summary["counts"]["FAIL"]
            logger.error(f"Suite {result.summary['suite']} has {failures} failing checks")
            return EXIT_FAILURE

        logger.info("Processing completed successfully.")
        return EXIT_OK

    except ValidationError as exc:
        logger.error(f"Invalid configuration: {describe_validation_error(exc)}")
        return EXIT_CONFIG
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG
    except KeyboardInterrupt:
        logger.info("Process interrupted by user.")
        return EXIT_FAILURE
    except Exception as exc:
        logger.error(f"Unexpected error: {exc}")
        logger.debug(f"Exception details: {traceback.format_exc()}")
        return EXIT_FAILURE


def main_entry():
    """Entry point for the application when installed via pip."""
    exit_code = main()
    sys.exit(exit_code)


if __name__ == "__main__":
    main_entry()
