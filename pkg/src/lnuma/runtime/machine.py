"""Labelled small-step semantics over configurations.

Evaluation is left-to-right call-by-value. Each thread has at most one
redex; a step either touches a heap (field access, allocation, message
send, dispatch) or is a thread-local `Pure` step (variable lookup, let, if,
for-unrolling, synchronous call, return, finishing).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..syntax.nodes import (
    MAIN, Addr, AsyncSend, BoolType, FalseLit, FieldRead, FieldWrite, For, If, IntLit, Let,
    New, NodeId, Null, RemAccess, Return, SyncCall, This, TrueLit, Var, is_value,
)
from ..syntax.printer import pretty_op
from ..typer import ClassTable, WILDCARD
from .config import Config, Message, Node, ObjectRecord, Thread

HEAP_RULES = ("FReadL", "FReadR", "FWriteL", "FWriteR", "NewL", "NewR", "MsgL", "MsgR")


class RuntimeFault(Exception):
    pass


@dataclass(frozen=True)
class Redex:
    node: int
    thread: int
    rule: str


@dataclass(frozen=True)
class TraceEvent:
    step: int
    rule: str
    label: Optional[RemAccess]
    node: int
    thread: int
    target: Optional[Addr] = None
    fault: Optional[str] = None

    @property
    def label_text(self) -> str:
        return "eps" if self.label is None else pretty_op(self.label)

    def format(self) -> str:
        line = (f"step={self.step} rule={self.rule} label={self.label_text} "
                f"node={self.node} thread={self.thread}")
        if self.fault:
            line += f" fault={self.fault!r}"
        return line


def access_label(kind: str, src: int, dst: int, method: str = None):
    if src == dst:
        return None
    return RemAccess(kind, NodeId(src), NodeId(dst), method)


def _new_label(src: int, dst: int):
    return access_label("write", src, dst)


def _dequeue(queue: list) -> Message:
    return queue.pop(0)


def init_value(t):
    return FalseLit() if isinstance(t, BoolType) else Null()


# ---------------------------------------------------------------------------
# Initial configuration
# ---------------------------------------------------------------------------

def init_config(program, locmap: dict) -> Config:
    """Nodes for every id in the map's range, a Main instance at the node of
    its first location, and one thread running `main`."""
    table = program if isinstance(program, ClassTable) else ClassTable(program)
    main = table.get(MAIN)
    missing = [p for p in main.owners if p not in locmap]
    if missing:
        raise ValueError(f"location map does not cover {', '.join(missing)}")
    node_ids = sorted(set(locmap.values()))
    cfg = Config(table, [Node(k) for k in node_ids], dict(locmap))
    owners = tuple(locmap[p] for p in main.owners)
    home = cfg.node(owners[0])
    addr = _allocate(cfg, home, MAIN, owners)
    sig = table.method_sig(MAIN, "main", tuple(NodeId(k) for k in owners))
    th = cfg.thread_of(addr)
    if th is None:
        th = _spawn(cfg, home, addr)
    th.frames = [{"this": addr}]
    th.expr = sig.body
    return cfg


def _spawn(cfg: Config, node: Node, actor: Addr) -> Thread:
    th = Thread(cfg.next_tid, actor, [], Null())
    cfg.next_tid += 1
    node.threads.append(th)
    return th


def _allocate(cfg: Config, node: Node, cls: str, owners: tuple) -> Addr:
    table = cfg.table
    addr = Addr(node.id, node.next_index)
    assert addr not in node.heap, "fresh address already in use"
    node.next_index += 1
    ftypes = table.field_types(cls, tuple(NodeId(k) for k in owners))
    active = table.is_active(cls)
    node.heap[addr] = ObjectRecord(cls, owners, {f: init_value(t) for f, t in ftypes.items()},
                                   [] if active else None)
    if active:
        _spawn(cfg, node, addr)
    return addr


# ---------------------------------------------------------------------------
# Evaluation contexts
# ---------------------------------------------------------------------------

def decompose(e):
    """Split `e` into (redex, plug) or return None when `e` is a value."""
    if is_value(e):
        return None
    if isinstance(e, Let):
        if not is_value(e.bound):
            r, plug = decompose(e.bound)
            return r, lambda x: Let(e.var, plug(x), e.body, span=e.span)
    elif isinstance(e, If):
        if not is_value(e.cond):
            r, plug = decompose(e.cond)
            return r, lambda x: If(plug(x), e.then, e.orelse, span=e.span)
    elif isinstance(e, FieldRead):
        if not is_value(e.recv):
            r, plug = decompose(e.recv)
            return r, lambda x: FieldRead(plug(x), e.field, span=e.span)
    elif isinstance(e, FieldWrite):
        if not is_value(e.recv):
            r, plug = decompose(e.recv)
            return r, lambda x: FieldWrite(plug(x), e.field, e.value, span=e.span)
        if not is_value(e.value):
            r, plug = decompose(e.value)
            return r, lambda x: FieldWrite(e.recv, e.field, plug(x), span=e.span)
    elif isinstance(e, (SyncCall, AsyncSend)):
        cls = type(e)
        if not is_value(e.recv):
            r, plug = decompose(e.recv)
            return r, lambda x: cls(plug(x), e.method, e.arg, span=e.span)
        if e.arg is not None and not is_value(e.arg):
            r, plug = decompose(e.arg)
            return r, lambda x: cls(e.recv, e.method, plug(x), span=e.span)
    elif isinstance(e, Return):
        if not is_value(e.expr):
            r, plug = decompose(e.expr)
            return r, lambda x: Return(plug(x), span=e.span)
    return e, lambda x: x


def subst_var(e, name: str, v):
    """`e[v/name]`, stopping under binders of the same name."""
    s = lambda x: subst_var(x, name, v)
    if isinstance(e, Var):
        return v if e.name == name else e
    if isinstance(e, Let):
        body = e.body if e.var == name else s(e.body)
        return Let(e.var, s(e.bound), body, span=e.span)
    if isinstance(e, For):
        return e if e.var == name else For(e.var, e.lo, e.hi, s(e.body), span=e.span)
    if isinstance(e, If):
        return If(s(e.cond), s(e.then), s(e.orelse), span=e.span)
    if isinstance(e, FieldRead):
        return FieldRead(s(e.recv), e.field, span=e.span)
    if isinstance(e, FieldWrite):
        return FieldWrite(s(e.recv), e.field, s(e.value), span=e.span)
    if isinstance(e, (SyncCall, AsyncSend)):
        return type(e)(s(e.recv), e.method, None if e.arg is None else s(e.arg), span=e.span)
    if isinstance(e, Return):
        return Return(s(e.expr), span=e.span)
    return e


def _classify(node: Node, r) -> str:
    def side(kind, recv):
        if isinstance(recv, Addr) and recv.node != node.id:
            return kind + "R"
        return kind + "L"

    if isinstance(r, FieldRead):
        return side("FRead", r.recv)
    if isinstance(r, FieldWrite):
        return side("FWrite", r.recv)
    if isinstance(r, AsyncSend):
        return side("Msg", r.recv)
    if isinstance(r, New):
        k = r.locs[0]
        return "NewR" if isinstance(k, NodeId) and k.id != node.id else "NewL"
    return "Pure"


def _thread_rule(cfg: Config, node: Node, th: Thread) -> Optional[str]:
    if th.terminated:
        obj = cfg.lookup(th.actor)
        if obj is not None and obj.queue:
            return "Dispatch"
        return None
    if is_value(th.expr):
        return "Pure" if len(th.frames) == 1 else None
    r, _ = decompose(th.expr)
    return _classify(node, r)


def enabled(cfg: Config) -> list:
    """Every redex that can fire, in node-then-thread order."""
    if cfg.fault:
        return []
    out = []
    for node, th in cfg.threads():
        rule = _thread_rule(cfg, node, th)
        if rule is not None:
            out.append(Redex(node.id, th.tid, rule))
    return out


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------

def step(cfg: Config, redex: Redex, index: int = 0):
    """Fire `redex`, returning the successor configuration and its event.

    A runtime fault yields a configuration with `fault` set and an event
    carrying the message; the input configuration is never modified.
    """
    nxt = cfg.clone()
    node, th = nxt.thread(redex.thread)
    try:
        rule, label, target = _fire(nxt, node, th)
    except RuntimeFault as err:
        nxt.fault = str(err)
        return nxt, TraceEvent(index, redex.rule, None, node.id, th.tid, fault=str(err))
    return nxt, TraceEvent(index, rule, label, node.id, th.tid, target)


def _object(cfg: Config, recv, what: str) -> ObjectRecord:
    if isinstance(recv, Null):
        raise RuntimeFault(f"{what} on null")
    if not isinstance(recv, Addr):
        raise RuntimeFault(f"{what} on non-object value")
    obj = cfg.lookup(recv)
    if obj is None:
        raise RuntimeFault(f"{what} on dangling address @{recv.node}.{recv.index}")
    return obj


def _instantiate(cfg: Config, obj: ObjectRecord, method: str):
    try:
        return cfg.table.method_sig(obj.cls, method, tuple(NodeId(k) for k in obj.owners))
    except LookupError as err:
        raise RuntimeFault(str(err.args[0])) from None


def _frame(this: Addr, sig, arg) -> dict:
    frame = {"this": this}
    if sig.param_name is not None:
        frame[sig.param_name] = arg
    return frame


def _fire(cfg: Config, node: Node, th: Thread):
    if th.terminated:
        obj = cfg.lookup(th.actor)
        m = _dequeue(obj.queue)
        sig = _instantiate(cfg, obj, m.method)
        th.frames = [_frame(th.actor, sig, m.arg)]
        th.expr = sig.body
        return "Dispatch", None, None
    if is_value(th.expr):
        th.frames.pop()
        th.expr = Null()
        return "Pure", None, None

    r, plug = decompose(th.expr)
    label = target = None
    here = node.id
    rule = _classify(node, r)

    if isinstance(r, (Var, This)):
        name = "this" if isinstance(r, This) else r.name
        if not th.frames or name not in th.frames[-1]:
            raise RuntimeFault(f"unbound variable {name!r}")
        out = th.frames[-1][name]
    elif isinstance(r, Let):
        out = r.body if r.var == WILDCARD else subst_var(r.body, r.var, r.bound)
    elif isinstance(r, If):
        if isinstance(r.cond, TrueLit):
            out = r.then
        elif isinstance(r.cond, FalseLit):
            out = r.orelse
        else:
            raise RuntimeFault("condition is not a boolean")
    elif isinstance(r, For):
        first = subst_var(r.body, r.var, IntLit(r.lo))
        if r.lo < r.hi:
            out = Let(WILDCARD, first, For(r.var, r.lo + 1, r.hi, r.body, span=r.span))
        else:
            out = first
    elif isinstance(r, Return):
        th.frames.pop()
        out = r.expr
    elif isinstance(r, SyncCall):
        obj = _object(cfg, r.recv, "call")
        sig = _instantiate(cfg, obj, r.method)
        th.frames.append(_frame(r.recv, sig, r.arg))
        out = Return(sig.body)
    elif isinstance(r, FieldRead):
        obj = _object(cfg, r.recv, "field read")
        if r.field not in obj.fields:
            raise RuntimeFault(f"no field {r.field!r}")
        out = obj.fields[r.field]
        label = access_label("read", here, r.recv.node)
    elif isinstance(r, FieldWrite):
        obj = _object(cfg, r.recv, "field write")
        if r.field not in obj.fields:
            raise RuntimeFault(f"no field {r.field!r}")
        obj.fields[r.field] = r.value
        out = r.value
        label = access_label("write", here, r.recv.node)
    elif isinstance(r, New):
        if not all(isinstance(l, NodeId) for l in r.locs):
            raise RuntimeFault("new with unresolved locations")
        owners = tuple(l.id for l in r.locs)
        if not cfg.has_node(owners[0]):
            raise RuntimeFault(f"no node {owners[0]}")
        out = _allocate(cfg, cfg.node(owners[0]), r.cls, owners)
        label = _new_label(here, owners[0])
    elif isinstance(r, AsyncSend):
        obj = _object(cfg, r.recv, "message send")
        if obj.queue is None:
            raise RuntimeFault(f"message {r.method!r} sent to passive object of class {obj.cls}")
        obj.queue.append(Message(r.method, r.arg))
        out = Null()
        label = access_label("msg", here, r.recv.node, r.method)
        target = r.recv
    else:
        raise RuntimeFault(f"stuck expression {r!r}")
    th.expr = plug(out)
    return rule, label, target
