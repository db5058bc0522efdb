"""Machine state: nodes, heaps, objects, threads."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..syntax.nodes import Addr, Null


@dataclass(frozen=True)
class Message:
    method: str
    arg: Optional[object] = None


@dataclass
class ObjectRecord:
    cls: str
    owners: tuple
    fields: dict
    # None marks a passive object; actors hold a FIFO list of Messages
    queue: Optional[list] = None

    @property
    def active(self) -> bool:
        return self.queue is not None

    def clone(self) -> "ObjectRecord":
        q = None if self.queue is None else list(self.queue)
        return ObjectRecord(self.cls, self.owners, dict(self.fields), q)


@dataclass
class Thread:
    tid: int
    actor: Addr
    frames: list
    expr: object

    @property
    def terminated(self) -> bool:
        return not self.frames and isinstance(self.expr, Null)

    def clone(self) -> "Thread":
        return Thread(self.tid, self.actor, [dict(f) for f in self.frames], self.expr)


@dataclass
class Node:
    id: int
    heap: dict = field(default_factory=dict)
    threads: list = field(default_factory=list)
    next_index: int = 0

    def clone(self) -> "Node":
        return Node(self.id, {a: o.clone() for a, o in self.heap.items()},
                    [t.clone() for t in self.threads], self.next_index)


@dataclass
class Config:
    table: object
    nodes: list
    locmap: dict
    next_tid: int = 0
    fault: Optional[str] = None

    def clone(self) -> "Config":
        return Config(self.table, [n.clone() for n in self.nodes], self.locmap,
                      self.next_tid, self.fault)

    def node(self, k: int) -> Node:
        for n in self.nodes:
            if n.id == k:
                return n
        raise KeyError(f"no node {k}")

    def has_node(self, k: int) -> bool:
        return any(n.id == k for n in self.nodes)

    def lookup(self, addr: Addr) -> Optional[ObjectRecord]:
        """Object at `addr` in the union of all heaps."""
        for n in self.nodes:
            o = n.heap.get(addr)
            if o is not None:
                return o
        return None

    def threads(self):
        """(node, thread) pairs in node-then-thread order."""
        for n in self.nodes:
            for t in n.threads:
                yield n, t

    def thread(self, tid: int):
        for n, t in self.threads():
            if t.tid == tid:
                return n, t
        raise KeyError(f"no thread {tid}")

    def thread_of(self, actor: Addr):
        for n, t in self.threads():
            if t.actor == actor:
                return t
        return None

    @property
    def quiescent(self) -> bool:
        from .machine import enabled
        return not enabled(self)

    def fingerprint(self) -> tuple:
        """Hashable snapshot identifying the state up to equality."""
        nodes = []
        for n in self.nodes:
            heap = tuple(sorted(
                ((a.node, a.index), o.cls, o.owners, tuple(sorted(o.fields.items())),
                 None if o.queue is None else tuple(o.queue))
                for a, o in n.heap.items()))
            threads = tuple(
                (t.tid, t.actor, tuple(tuple(sorted(f.items())) for f in t.frames), t.expr)
                for t in n.threads)
            nodes.append((n.id, n.next_index, heap, threads))
        return (tuple(nodes), self.next_tid, self.fault)
