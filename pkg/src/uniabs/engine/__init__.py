from .channels import BufferChannel, IOChannel, NullChannel, TerminalChannel
from .core import Analyzer, Cancelled, EngineError, EngineOptions, ExecPoint, run
from .env import AbstractEnv, EnvSettings
from .report import CheckResult, Report, strip_ansi

__all__ = [
    "Analyzer", "Cancelled", "EngineError", "EngineOptions", "ExecPoint", "run",
    "AbstractEnv", "EnvSettings", "CheckResult", "Report", "strip_ansi",
    "BufferChannel", "IOChannel", "NullChannel", "TerminalChannel",
]
