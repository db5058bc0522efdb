"""Exhaustive interleaving exploration.

Pure steps only touch their own thread, so they commute with everything
and are fired eagerly (one at a time, lowest thread first). Branching
happens only among heap-touching steps and dispatches. Successor sets are
memoised per configuration, so each transition is expanded once.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .machine import enabled, init_config, step


class ExplorationLimit(RuntimeError):
    pass


@dataclass
class ExploreResult:
    traces: set = field(default_factory=set)
    steps: int = 0
    states: int = 0
    faults: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.faults and not self.failures


def _choices(cfg):
    redexes = enabled(cfg)
    for r in redexes:
        if r.rule == "Pure":
            return [r]
    return redexes


def explore(program, locmap, depth_limit: int = 10_000, check=None, visit=None,
            config=None) -> ExploreResult:
    """Enumerate every maximal interleaving.

    `traces` holds each distinct sequence of remote-access labels. `check`
    is called as `check(before, event, after)` on every expanded transition
    and may return a failure record; `visit(cfg)` sees each distinct
    reachable configuration once.
    """
    result = ExploreResult()
    memo = {}
    start = config if config is not None else init_config(program, locmap)

    def suffixes(cfg, depth):
        key = cfg.fingerprint()
        hit = memo.get(key)
        if hit is not None:
            traces, height = hit
            if depth + height > depth_limit:
                raise ExplorationLimit(f"depth limit {depth_limit} exceeded")
            return traces
        result.states += 1
        if visit is not None:
            visit(cfg)
        redexes = _choices(cfg)
        if not redexes:
            memo[key] = (frozenset({()}), 0)
            return memo[key][0]
        if depth >= depth_limit:
            raise ExplorationLimit(f"depth limit {depth_limit} exceeded")
        out = set()
        height = 0
        for r in redexes:
            nxt, ev = step(cfg, r, depth)
            result.steps += 1
            if check is not None:
                failure = check(cfg, ev, nxt)
                if failure is not None:
                    result.failures.append(failure)
            head = () if ev.label is None else (ev.label,)
            if ev.fault:
                result.faults.append(ev)
                out.add(head + (("fault", ev.fault),))
                continue
            for tail in suffixes(nxt, depth + 1):
                out.add(head + tail)
            height = max(height, 1 + memo[nxt.fingerprint()][1])
        memo[key] = (frozenset(out), height)
        return memo[key][0]

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20_000))
    try:
        result.traces = set(suffixes(start, 0))
    finally:
        sys.setrecursionlimit(old)
    return result
