from .config import Config, Message, Node, ObjectRecord, Thread
from .explore import ExplorationLimit, ExploreResult, explore
from .formats import (
    format_trace, load_location_map, parse_location_map, parse_trace_line, write_trace,
)
from .machine import (
    HEAP_RULES, Redex, RuntimeFault, TraceEvent, decompose, enabled, init_config, step,
    subst_var,
)
from .run import FifoScheduler, RandomScheduler, RunResult, ScriptScheduler, make_scheduler, run

__all__ = [
    "Config",
    "Message",
    "Node",
    "ObjectRecord",
    "Thread",
    "ExplorationLimit",
    "ExploreResult",
    "explore",
    "format_trace",
    "load_location_map",
    "parse_location_map",
    "parse_trace_line",
    "write_trace",
    "HEAP_RULES",
    "Redex",
    "RuntimeFault",
    "TraceEvent",
    "decompose",
    "enabled",
    "init_config",
    "step",
    "subst_var",
    "FifoScheduler",
    "RandomScheduler",
    "RunResult",
    "ScriptScheduler",
    "make_scheduler",
    "run",
]
