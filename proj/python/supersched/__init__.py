"""Real-time scheduling simulator with a critical-task super scheduler."""

from ._core import (
    ConfigError,
    ParseError,
    Scenario,
    Trace,
    ValidationError,
    analyze,
    generate,
    ll_bound,
    load_scenario,
    parse_scenario,
    parse_trace,
    report,
    run,
)

__all__ = [
    "ConfigError",
    "ParseError",
    "Scenario",
    "Trace",
    "ValidationError",
    "analyze",
    "generate",
    "ll_bound",
    "load_scenario",
    "parse_scenario",
    "parse_trace",
    "report",
    "run",
]
