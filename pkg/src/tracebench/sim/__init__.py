from .engine import MetricsBundle, Simulation, init_simulation, run_simulation
from .entities import (
    END_KILLED,
    END_NORMAL,
    EVENT_KINDS,
    EventLog,
    Job,
    LogRecord,
    Machine,
    MODE_SYNTHETIC,
    MODE_TRACE,
    SimConfig,
    Task,
)

__all__ = [
    "END_KILLED",
    "END_NORMAL",
    "EVENT_KINDS",
    "EventLog",
    "Job",
    "LogRecord",
    "Machine",
    "MODE_SYNTHETIC",
    "MODE_TRACE",
    "MetricsBundle",
    "SimConfig",
    "Simulation",
    "Task",
    "init_simulation",
    "run_simulation",
]
