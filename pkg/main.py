"""
Main entry point for lie-eigenlab
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

from loguru import logger

from src.commands import run_command
from src.config import config, load_config_file, update_config
from src.errors import ConfigError, LabError
from src.models import COMMANDS, RunConfig
from src.reporting import envelope_json, write_report


def setup_logging(level: Optional[str] = None):
    """Setup logging configuration"""
    logger.remove()  # Remove default handler
    logger.add(
        sys.stderr,
        level=level or config.logging_level,
        format="{time:HH:mm:ss} | {level} | {message}"
    )


def _comma_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in _comma_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lie-eigenlab",
        description="Eigenfamilies, harmonic morphisms and minimal submanifolds of SU(n), SO(n) and Sp(n)",
    )
    parser.add_argument("command", choices=COMMANDS, help="Experiment to run")
    parser.add_argument("--config", help="YAML config file with run/tolerances/... sections")
    parser.add_argument("--group", help="Group family: su, so or sp")
    parser.add_argument("--n", type=int, help="Rank parameter of the group")
    parser.add_argument("--family", help="Family or representation label (standard, dual, tensor, ...)")
    parser.add_argument("--gen-a", dest="gen_a", help="File with generator vector a ('re im' pairs)")
    parser.add_argument("--gen-b", dest="gen_b", help="File with generator vector b ('re im' pairs)")
    parser.add_argument("--s", type=int, help="Number of summands of the extended family")
    parser.add_argument("--poly-p", dest="poly_p", help="Sparse polynomial file for P")
    parser.add_argument("--poly-q", dest="poly_q", help="Sparse polynomial file for Q")
    parser.add_argument("--h-matrix", dest="h_matrix", help="H matrix file, inline rows, or random-distinct")
    parser.add_argument("--samples", type=int, help="Number of sample points")
    parser.add_argument("--seed", type=int, help="Random seed (required for randomized commands)")
    parser.add_argument("--tol", type=float, help="Pass/fail tolerance")
    parser.add_argument("--h-step", dest="h_step", type=float, help="Step for the mean-curvature estimate")
    parser.add_argument("--curvature-points", dest="curvature_points", type=int,
                        help="Number of points given a mean-curvature spot check")
    parser.add_argument("--chart", type=_int_list, help="Three coordinate indices for PLY output")
    parser.add_argument("--out", help="Output path (report for json, point cloud for csv/ply)")
    parser.add_argument("--format", choices=("json", "csv", "ply"), help="Output format")
    parser.add_argument("--only", type=_comma_list, help="Comma-separated acceptance criteria to run")
    parser.add_argument("--log-level", dest="log_level", help="Logging level")
    parser.add_argument("--threads", type=int, help="Worker threads for sample-parallel work")
    return parser


def merge_run(args: argparse.Namespace) -> Dict[str, Any]:
    """Config-file run section overridden by every flag given on the command line"""
    values: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "log_level", "threads") and v is not None}
    values.update(flags)
    return values


def execute(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"--threads must be at least 1, got {args.threads}")
            update_config(threads=args.threads)
        run = RunConfig.build(**merge_run(args))
        envelope = run_command(run)
        text = envelope_json(envelope)
        if run.format == "json" and run.out:
            write_report(envelope, run.out)
        else:
            sys.stdout.write(text)
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return 3

    logger.info(f"Verdict: {envelope.verdict}")
    return 0 if envelope.verdict == "pass" else 1


def main():
    """Main CLI entry point"""
    sys.exit(execute())


if __name__ == "__main__":
    main()
