"""Schedulers and the top-level run loop."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .machine import enabled, init_config, step


class FifoScheduler:
    """Always fires the first enabled redex."""

    def choose(self, redexes):
        return redexes[0]


class RandomScheduler:

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, redexes):
        return self.rng.choice(redexes)


class ScriptScheduler:
    """Fires threads in the given order, then falls back to FIFO."""

    def __init__(self, tids):
        self.script = list(tids)

    def choose(self, redexes):
        if not self.script:
            return redexes[0]
        tid = self.script.pop(0)
        for r in redexes:
            if r.thread == tid:
                return r
        raise ValueError(f"scripted thread {tid} is not enabled")


def make_scheduler(spec=None, seed: int = 0):
    if spec is None or spec == "random":
        return RandomScheduler(seed)
    if spec == "fifo":
        return FifoScheduler()
    if isinstance(spec, (list, tuple)):
        return ScriptScheduler(spec)
    if hasattr(spec, "choose"):
        return spec
    raise ValueError(f"unknown scheduler {spec!r}")


@dataclass
class RunResult:
    config: object
    trace: list = field(default_factory=list)
    exhausted: bool = False
    fault: Optional[str] = None
    halted: bool = False

    @property
    def labels(self) -> list:
        return [ev.label for ev in self.trace if ev.label is not None]


def run(program, locmap, scheduler=None, max_steps: int = 100_000, seed: int = 0,
        observer=None, config=None) -> RunResult:
    """Execute until quiescence, a fault or `max_steps`.

    `observer(before, event, after)` is called after every step; returning
    False halts the run.
    """
    sched = make_scheduler(scheduler, seed)
    cfg = config if config is not None else init_config(program, locmap)
    result = RunResult(cfg)
    for i in range(max_steps):
        redexes = enabled(cfg)
        if not redexes:
            return result
        nxt, ev = step(cfg, sched.choose(redexes), i)
        result.trace.append(ev)
        result.config = nxt
        if observer is not None and observer(cfg, ev, nxt) is False:
            result.halted = True
            return result
        cfg = nxt
        if ev.fault:
            result.fault = ev.fault
            return result
    result.exhausted = bool(enabled(cfg))
    return result
