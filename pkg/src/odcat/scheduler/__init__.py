"""Trigger scheduling, pipe definitions, run launching, and the run log."""

from .triggers import Trigger, next_fire_time
from .core import (
    DispatchError,
    PipeDefinition,
    RunLog,
    Scheduler,
    TerminalOverwriteError,
    UnknownRunError,
)

__all__ = [
    "Trigger",
    "next_fire_time",
    "PipeDefinition",
    "Scheduler",
    "RunLog",
    "DispatchError",
    "UnknownRunError",
    "TerminalOverwriteError",
]
