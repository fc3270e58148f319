"""
명령행 인터페이스

analytic, simulate, montecarlo, validate 명령과 결과 번들 출력을 제공합니다.
"""

from .commands import COMMANDS, cmd_analytic, cmd_montecarlo, cmd_simulate, cmd_validate
from .io import CheckResult, DetectorRow, ResultBundle, SuccessRow, write_bundle
from .main import create_cli_parser, main

__all__ = [
    "COMMANDS",
    "CheckResult",
    "DetectorRow",
    "ResultBundle",
    "SuccessRow",
    "cmd_analytic",
    "cmd_montecarlo",
    "cmd_simulate",
    "cmd_validate",
    "create_cli_parser",
    "main",
    "write_bundle",
]
