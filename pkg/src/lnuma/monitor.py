"""Dynamic soundness checking.

A configuration's global behaviour assigns each thread the filtered
behaviour of its in-flight expression followed by the bodies of the
messages waiting in its actor's queue. Every machine step labelled `π`
must be matched by a reduction of that global behaviour; `verify_run` and
`explore_verified` check this step by step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import Diagnostic, TypingError
from .effects import concat, filter_behaviour, silent_steps
from .runtime.explore import explore
from .runtime.machine import init_config
from .runtime.run import run
from .syntax.nodes import (
    BOOL, EPS, INT, MAIN, NIL, Addr, FalseLit, IntLit, NodeId, Null, OwnedType, Seq, TrueLit,
)
from .syntax.printer import pretty_behaviour, pretty_op
from .typer import Typer, conforms


class UntypableConfiguration(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Typing runtime terms
# ---------------------------------------------------------------------------

def ownership(cfg, addr: Addr):
    obj = cfg.lookup(addr)
    if obj is None:
        return None
    return OwnedType(obj.cls, tuple(NodeId(k) for k in obj.owners))


def type_of(cfg, v):
    if isinstance(v, (TrueLit, FalseLit)):
        return BOOL
    if isinstance(v, Null):
        return NIL
    if isinstance(v, IntLit):
        return INT
    if isinstance(v, Addr):
        return ownership(cfg, v)
    return None


def build_context(cfg, frames) -> list:
    """Typing frames for a stack, oldest activation last."""
    ctx = []
    for frame in reversed(frames):
        gamma = {}
        for name, v in frame.items():
            t = type_of(cfg, v)
            if t is None:
                raise TypingError([Diagnostic(f"{name} holds {v!r}, which is not in any heap",
                                              rule="buildGammas")])
            gamma[name] = t
        ctx.append(gamma)
    return ctx


def type_at_runtime(cfg, frames, expr):
    typer = Typer(cfg.table, heap_types=lambda a: ownership(cfg, a), strict=False)
    return typer.type_expr(build_context(cfg, frames), expr)


def message_behaviour(cfg, actor: Addr, message):
    """Behaviour of running `message` at `actor`, unfiltered."""
    obj = cfg.lookup(actor)
    sig = cfg.table.method_sig(obj.cls, message.method, tuple(NodeId(k) for k in obj.owners))
    frame = {"this": actor}
    if sig.param_name is not None:
        frame[sig.param_name] = message.arg
    return type_at_runtime(cfg, [frame], sig.body)[1]


def thread_behaviour(cfg, thread):
    _, b = type_at_runtime(cfg, thread.frames, thread.expr)
    obj = cfg.lookup(thread.actor)
    if obj is not None and obj.queue:
        for m in obj.queue:
            b = concat(b, message_behaviour(cfg, thread.actor, m))
    return filter_behaviour(b)


@dataclass(frozen=True)
class GlobalBehaviour:
    """One filtered behaviour per thread, in node-then-thread order."""
    entries: tuple

    def __getitem__(self, tid):
        for t, b in self.entries:
            if t == tid:
                return b
        raise KeyError(tid)

    def __iter__(self):
        return iter(b for _, b in self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def tids(self) -> list:
        return [t for t, _ in self.entries]

    def as_dict(self) -> dict:
        return dict(self.entries)

    def format(self) -> str:
        return "[" + ", ".join(f"{t}:{pretty_behaviour(b)}" for t, b in self.entries) + "]"


def global_behaviour(cfg) -> GlobalBehaviour:
    entries = []
    for _, th in cfg.threads():
        try:
            entries.append((th.tid, thread_behaviour(cfg, th)))
        except (TypingError, LookupError) as err:
            raise UntypableConfiguration(f"thread {th.tid} is untypable: {err}") from None
    return GlobalBehaviour(tuple(entries))


# ---------------------------------------------------------------------------
# Well-formed configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WFViolation:
    clause: int
    message: str

    def __str__(self) -> str:
        return f"clause ({self.clause}): {self.message}"


def agrees(cfg, v, t) -> bool:
    vt = type_of(cfg, v)
    return vt is not None and conforms(vt, t)


def _frame_values_ok(cfg, frame) -> bool:
    for v in frame.values():
        if isinstance(v, Addr):
            if cfg.lookup(v) is None:
                return False
        elif not isinstance(v, (TrueLit, FalseLit, Null, IntLit)):
            return False
    return True


def _check_object(cfg, addr, obj) -> list:
    table = cfg.table
    out = []
    where = f"object @{addr.node}.{addr.index}"
    try:
        cls = table.get(obj.cls)
        ftypes = table.field_types(obj.cls, tuple(NodeId(k) for k in obj.owners))
    except LookupError as err:
        return [WFViolation(3, f"{where}: {err.args[0]}")]
    if cls.active != (obj.queue is not None):
        out.append(WFViolation(3, f"{where}: queue marker disagrees with class {cls.name}"))
    if set(ftypes) != set(obj.fields):
        out.append(WFViolation(3, f"{where}: fields do not match class {cls.name}"))
    for f, t in ftypes.items():
        if f in obj.fields and not agrees(cfg, obj.fields[f], t):
            out.append(WFViolation(3, f"{where}: field {f} does not agree with {t}"))
    for m in obj.queue or ():
        try:
            sig = table.method_sig(obj.cls, m.method, tuple(NodeId(k) for k in obj.owners))
        except LookupError as err:
            out.append(WFViolation(3, f"{where}: queued {err.args[0]}"))
            continue
        if (sig.param_name is None) != (m.arg is None):
            out.append(WFViolation(3, f"{where}: queued {m.method} has wrong arity"))
        elif m.arg is not None and not agrees(cfg, m.arg, sig.param_type):
            out.append(WFViolation(3, f"{where}: queued {m.method} argument "
                                      f"does not agree with {sig.param_type}"))
    return out


def wf_config(cfg) -> list:
    """Violations of configuration well-formedness; empty iff well formed."""
    out = []
    ids = [n.id for n in cfg.nodes]
    if len(set(ids)) != len(ids):
        out.append(WFViolation(1, f"duplicate node ids in {ids}"))
    for node in cfg.nodes:
        for addr, obj in node.heap.items():
            if addr.node != node.id or not obj.owners or obj.owners[0] != node.id:
                out.append(WFViolation(2, f"object @{addr.node}.{addr.index} "
                                          f"stored at node {node.id}"))
            out += _check_object(cfg, addr, obj)
        for th in node.threads:
            actor = cfg.lookup(th.actor)
            if actor is None:
                out.append(WFViolation(4, f"thread {th.tid}: actor is not in any heap"))
            elif actor.queue is None and actor.cls != MAIN:
                # Main is passive yet owns the root thread
                out.append(WFViolation(3, f"thread {th.tid} runs on a passive object"))
            for frame in th.frames:
                if not isinstance(frame.get("this"), Addr) or not _frame_values_ok(cfg, frame):
                    out.append(WFViolation(5, f"thread {th.tid}: frame value outside the heap"))
            try:
                type_at_runtime(cfg, th.frames, th.expr)
            except (TypingError, LookupError) as err:
                out.append(WFViolation(2, f"thread {th.tid} is untypable: {err}"))
    return out


# ---------------------------------------------------------------------------
# Global behaviour reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepVerdict:
    ok: bool
    clause: str = ""
    detail: str = ""


def _closure(states: dict) -> dict:
    """Extend {(behaviour, migrated): clauses} with every silent successor."""
    out = dict(states)
    todo = list(states)
    while todo:
        cur = todo.pop()
        b, migs = cur
        for clause, nxt, mig in silent_steps(b):
            state = (nxt, migs + ((mig,) if mig is not None else ()))
            if state not in out:
                out[state] = out[cur] + (clause,)
                todo.append(state)
    return out


def weak_successors(b, label) -> dict:
    """States reachable by silent steps, one `label` step, then silent steps.

    Returns {(behaviour, migrated branches): clause path}.
    """
    pre = _closure({(b, ()): ()})
    if label is None:
        return pre
    mid = {}
    for (c, migs), path in pre.items():
        if isinstance(c, Seq) and c.op == label:
            mid.setdefault((c.rest, migs), path + ("prefix",))
    return _closure(mid)


def normalize_label(label):
    if label is not None and label.src == label.dst:
        return None
    return label


def _describe(path, migs) -> str:
    parts = list(path) or ["identity"]
    text = "+".join(parts)
    if migs:
        text += "+migrate"
    return text


def check_step(sigma: GlobalBehaviour, label, sigma2: GlobalBehaviour,
               acting: Optional[int] = None, receiver: Optional[int] = None,
               hinted: bool = False) -> StepVerdict:
    """Does `sigma` reduce to `sigma2` under `label`?

    Exactly one entry moves (silent steps around at most one `label`
    step); every branch split off by a parallel projection must be appended
    to another entry. With `hinted`, the moving entry is `acting` and split
    branches go to `receiver` only; otherwise all choices are searched.
    """
    label = normalize_label(label)
    before = sigma.as_dict()
    after = sigma2.as_dict()
    if not set(before) <= set(after):
        return StepVerdict(False, detail="threads disappeared")
    fresh = [t for t in after if t not in before]
    for t in fresh:
        if after[t] != EPS:
            return StepVerdict(False, detail=f"new thread {t} starts with "
                                             f"{pretty_behaviour(after[t])}, expected eps")
    positions = [acting] if hinted else list(before)
    if not hinted and label is None:
        # a silent step may also leave every entry as it is
        if all(after[t] == before[t] for t in before):
            return StepVerdict(True, "identity")
    for a in positions:
        if a not in before:
            continue
        for (b1, migs), path in weak_successors(before[a], label).items():
            if migs:
                targets = [receiver] if hinted else list(before)
                targets = [t for t in targets if t is not None]
            else:
                targets = [None]
            for j in targets:
                expected = dict(before)
                expected[a] = b1
                for m in migs:
                    expected[j] = concat(expected[j], m)
                if all(after[t] == expected.get(t, EPS) for t in after):
                    return StepVerdict(True, _describe(path, migs))
    mismatch = next((t for t in before if after[t] != before[t]), acting)
    shown = "eps" if label is None else pretty_op(label)
    detail = (f"no reduction under {shown}; first differing thread {mismatch}: "
              f"{pretty_behaviour(before.get(mismatch, EPS))} -> "
              f"{pretty_behaviour(after.get(mismatch, EPS))}")
    return StepVerdict(False, detail=detail)


# ---------------------------------------------------------------------------
# Step-by-step verification
# ---------------------------------------------------------------------------

@dataclass
class StepRecord:
    event: object
    before: Optional[GlobalBehaviour]
    after: Optional[GlobalBehaviour]
    verdict: StepVerdict

    def format(self) -> str:
        v = self.verdict
        line = f"{self.event.format()} verdict={'pass' if v.ok else 'fail'}"
        if v.clause:
            line += f" clause={v.clause}"
        if not v.ok and v.detail:
            line += f" detail={v.detail!r}"
        return line


@dataclass
class SoundnessReport:
    records: list = field(default_factory=list)
    initial: list = field(default_factory=list)
    fault: Optional[str] = None
    exhausted: bool = False

    @property
    def ok(self) -> bool:
        return not self.initial and all(r.verdict.ok for r in self.records)

    @property
    def first_failure(self) -> Optional[StepRecord]:
        return next((r for r in self.records if not r.verdict.ok), None)

    @property
    def trace(self) -> list:
        return [r.event for r in self.records]

    def lines(self) -> list:
        out = [f"initial verdict=fail wf={v}" for v in self.initial]
        out += [r.format() for r in self.records]
        return out


class Checker:
    """Checks transitions, caching each configuration's global behaviour."""

    def __init__(self, check_wf: bool = False):
        self.check_wf = check_wf
        self._cache = {}

    def sigma(self, cfg) -> GlobalBehaviour:
        key = cfg.fingerprint()
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = global_behaviour(cfg)
        return hit

    def transition(self, before, ev, after) -> StepRecord:
        if ev.fault:
            # faults are reported by the runtime, not judged here
            return StepRecord(ev, None, None, StepVerdict(True, "fault", ev.fault))
        try:
            s1 = self.sigma(before)
            s2 = self.sigma(after)
        except UntypableConfiguration as err:
            return StepRecord(ev, None, None, StepVerdict(False, detail=str(err)))
        receiver = None
        if ev.target is not None:
            th = after.thread_of(ev.target)
            receiver = None if th is None else th.tid
        verdict = check_step(s1, ev.label, s2, acting=ev.thread, receiver=receiver, hinted=True)
        if verdict.ok and self.check_wf:
            problems = wf_config(after)
            if problems:
                verdict = StepVerdict(False, detail="; ".join(map(str, problems)))
        return StepRecord(ev, s1, s2, verdict)


def verify_run(program, locmap, scheduler=None, max_steps: int = 100_000, seed: int = 0,
               check_wf: bool = True) -> SoundnessReport:
    """Run and check every step; halts at the first failing step."""
    report = SoundnessReport()
    cfg = init_config(program, locmap)
    report.initial = wf_config(cfg)
    if report.initial:
        return report
    checker = Checker(check_wf)

    def observe(before, ev, after):
        rec = checker.transition(before, ev, after)
        report.records.append(rec)
        return rec.verdict.ok

    result = run(program, locmap, scheduler, max_steps, seed, observer=observe, config=cfg)
    report.fault = result.fault
    report.exhausted = result.exhausted
    return report


@dataclass
class VerifiedExploration:
    result: object
    failures: list
    wf_violations: list
    configs: int

    @property
    def ok(self) -> bool:
        return not self.failures and not self.wf_violations and not self.result.faults


def explore_verified(program, locmap, depth_limit: int = 10_000) -> VerifiedExploration:
    """Explore all interleavings, checking every transition and every
    reachable configuration."""
    checker = Checker()
    violations = []
    seen = [0]

    def check(before, ev, after):
        rec = checker.transition(before, ev, after)
        return None if rec.verdict.ok else rec

    def visit(cfg):
        seen[0] += 1
        violations.extend(wf_config(cfg))

    res = explore(program, locmap, depth_limit, check=check, visit=visit)
    return VerifiedExploration(res, res.failures, violations, seen[0])
