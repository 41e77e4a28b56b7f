"""Symbolic monitoring of timed data logs against parametric timed data automata."""

from ._core import (  # noqa: F401
    Monitor,
    check_point,
    generate_log,
    minimize,
    monitor_log,
    validate,
)

__all__ = ["Monitor", "check_point", "generate_log", "minimize", "monitor_log", "validate"]
