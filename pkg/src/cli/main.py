"""
susd 명령행 진입점

    susd analytic|simulate|montecarlo|validate --config <file> [--s <v>|--s-grid <csv>]
         [--seed <u64>] [--trials <n>] [--out <path>] [--format csv|json] [--workers <n>]

종료 코드: 0 성공, 2 설정 오류, 3 검증 스위트 실패, 1 그 밖의 오류
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional, Sequence

from src import __version__
from src.cli.commands import COMMANDS
from src.cli.io import write_bundle
from src.config.susd_config import RunConfig
from src.utils.env_validator import validate_environment
from src.utils.error_handler import StandardError, error_handler, handle_errors
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_VALIDATION = 3


def _parse_grid(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--s-grid expects comma-separated numbers, got {text!r}") from e


def _parse_seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--seed expects an unsigned 64-bit integer, got {text!r}") from e
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"--seed must lie in [0, 2^64), got {value}")
    return value


def create_cli_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susd",
        description="Sequential unambiguous state discrimination simulator.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (unknown keys are rejected).")
    grid = common.add_mutually_exclusive_group()
    grid.add_argument("--s", type=float, help="Single inner-product value.")
    grid.add_argument("--s-grid", type=_parse_grid, help="Comma-separated inner-product grid.")
    common.add_argument("--seed", type=_parse_seed, help="Master seed (falls back to SUSD_SEED).")
    common.add_argument("--trials", type=int, help="Trials per grid point.")
    common.add_argument("--out", help="Output path; stdout when omitted.")
    common.add_argument("--format", choices=["csv", "json"], help="Output format.")
    common.add_argument("--workers", type=int, help="Worker processes (never changes results).")

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("analytic", parents=[common], help="Closed-form detector probabilities and P_succ.")
    subparsers.add_parser("simulate", parents=[common], help="Trial simulation with photon-counting statistics.")
    subparsers.add_parser("montecarlo", parents=[common], help="Imperfection Monte Carlo envelopes.")
    subparsers.add_parser("validate", parents=[common], help="Oracle-equivalence and invariant checks.")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if args.s is not None:
        overrides["s_grid"] = [args.s]
    if args.s_grid is not None:
        overrides["s_grid"] = args.s_grid
    if "s_grid" in overrides:
        overrides["s_grid_source"] = "user"
    for key in ("seed", "trials", "format", "workers"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.out is not None:
        overrides["output"] = args.out
    return overrides


@handle_errors()
def load_config(args: argparse.Namespace) -> RunConfig:
    """설정 파일 + 명령행 재정의. 결과는 다시 스키마 검증됩니다."""
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    data = base.model_dump(mode="json")
    data.update(_overrides(args))
    return RunConfig.from_dict(data)


def _log_error_summary() -> None:
    """실행 중 처리된 에러 통계"""
    stats = error_handler.get_error_stats()
    logger.warning(
        f"Errors handled in this process: {stats['total_errors']} (most common: {stats['most_common']})",
        extra={"extra_fields": stats},
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_cli_parser()
    args = parser.parse_args(argv)
    validate_environment()

    try:
        config = load_config(args)
        logger.info(
            f"Running {args.command} over {len(config.s_grid)} grid point(s)",
            extra={"extra_fields": {"seed": config.seed, "config_hash": config.config_hash()}},
        )
        bundle = COMMANDS[args.command](config)
        written = write_bundle(bundle, config.format, config.output)
        for path in written:
            logger.info(f"Results saved: {path}")
    except StandardError as e:
        logger.critical(f"[{e.error_code}] {e.message}")
        _log_error_summary()
        return e.exit_code
    except OSError as e:
        logger.critical(f"Could not write results: {e}")
        _log_error_summary()
        return EXIT_FAILURE

    if bundle.checks and not bundle.passed:
        failed = [check.name for check in bundle.checks if not check.passed]
        logger.error(f"Validation failed: {', '.join(failed)}")
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
