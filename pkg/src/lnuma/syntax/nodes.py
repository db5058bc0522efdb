"""Abstract syntax: classes, types, locations, expressions and behaviours.

Every node is a frozen dataclass, so terms compare structurally and can be
used as dictionary keys. Source spans are carried on expressions and
declarations but never take part in equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Locations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OwnerParam:
    """Ownership parameter `p` of a non-main class."""
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class AbstractLoc:
    """Abstract location `L`, an ownership parameter of Main."""
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class NodeId:
    """A machine node; only appears after runtime substitution."""
    id: int

    def __str__(self) -> str:
        return str(self.id)


Location = Union[OwnerParam, AbstractLoc, NodeId]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolType:
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class NilType:
    def __str__(self) -> str:
        return "nil"


@dataclass(frozen=True)
class IntType:
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class OwnedType:
    cls: str
    locs: tuple

    def __str__(self) -> str:
        return f"{self.cls}<{', '.join(map(str, self.locs))}>"


Type = Union[BoolType, NilType, IntType, OwnedType]

BOOL = BoolType()
NIL = NilType()
INT = IntType()


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class This:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TrueLit:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FalseLit:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Null:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class IntLit:
    """Loop counter value; produced by for-unrolling, never parsed."""
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Addr:
    """Heap address `node.index`; runtime only."""
    node: int
    index: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SyncCall:
    recv: "Expr"
    method: str
    arg: Optional["Expr"]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AsyncSend:
    recv: "Expr"
    method: str
    arg: Optional["Expr"]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FieldRead:
    recv: "Expr"
    field: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FieldWrite:
    recv: "Expr"
    field: str
    value: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class New:
    cls: str
    locs: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class For:
    var: str
    lo: int
    hi: int
    body: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Let:
    var: str
    bound: "Expr"
    body: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Return:
    """Pops one frame when its operand is a value; runtime only."""
    expr: "Expr"
    span: Optional[Span] = _span()


Expr = Union[Var, This, TrueLit, FalseLit, Null, IntLit, Addr, If, SyncCall,
             AsyncSend, FieldRead, FieldWrite, New, For, Let, Return]

VALUE_TYPES = (TrueLit, FalseLit, Null, IntLit, Addr)


def is_value(e) -> bool:
    return isinstance(e, VALUE_TYPES)


# ---------------------------------------------------------------------------
# Behaviours
# ---------------------------------------------------------------------------

ACCESS_KINDS = ("read", "write", "msg")


@dataclass(frozen=True)
class RemAccess:
    kind: str
    src: Location
    dst: Location
    method: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ACCESS_KINDS:
            raise ValueError(f"unknown access kind {self.kind!r}")
        if (self.kind == "msg") != (self.method is not None):
            raise ValueError("a method name is required for msg and only for msg")


@dataclass(frozen=True)
class Choice:
    left: "Behaviour"
    right: "Behaviour"


@dataclass(frozen=True)
class Loop:
    count: int
    body: "Behaviour"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"loop count must be positive, got {self.count}")


BOp = Union[RemAccess, Choice, Loop]


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Seq:
    op: BOp
    rest: "Behaviour"


@dataclass(frozen=True)
class Par:
    left: "Behaviour"
    right: "Behaviour"


Behaviour = Union[Eps, Seq, Par]

EPS = Eps()


def read(src, dst) -> RemAccess:
    return RemAccess("read", src, dst)


def write(src, dst) -> RemAccess:
    return RemAccess("write", src, dst)


def msg(src, dst, method) -> RemAccess:
    return RemAccess("msg", src, dst, method)


def seq(*ops, tail: Behaviour = EPS) -> Behaviour:
    """Build `op1.op2. ... .tail`."""
    b = tail
    for op in reversed(ops):
        b = Seq(op, b)
    return b


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    type: Type


@dataclass(frozen=True)
class MethodDecl:
    name: str
    param: Optional[Param]
    return_type: Type
    behaviour: Behaviour
    body: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: Type
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ClassDecl:
    active: bool
    name: str
    owners: tuple
    fields: tuple = ()
    methods: tuple = ()
    span: Optional[Span] = _span()

    @property
    def is_main(self) -> bool:
        return self.name == MAIN

    def param_locations(self) -> tuple:
        """Locations standing for the owners inside this class's text."""
        kind = AbstractLoc if self.is_main else OwnerParam
        return tuple(kind(p) for p in self.owners)

    def field(self, name: str) -> Optional[FieldDecl]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class Program:
    classes: tuple

    def get(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


MAIN = "Main"


# ---------------------------------------------------------------------------
# Location substitution on types and expressions
# ---------------------------------------------------------------------------

class UnmappedLocation(KeyError):
    pass


def subst_loc(loc, mapping):
    if isinstance(loc, NodeId) and loc not in mapping:
        return loc
    try:
        return mapping[loc]
    except KeyError:
        raise UnmappedLocation(loc) from None


def subst_type(t: Type, mapping) -> Type:
    if isinstance(t, OwnedType):
        return OwnedType(t.cls, tuple(subst_loc(l, mapping) for l in t.locs))
    return t


def subst_expr(e: Expr, mapping) -> Expr:
    """Replace every location mentioned in `e` pointwise."""
    s = lambda x: subst_expr(x, mapping)
    if isinstance(e, New):
        return New(e.cls, tuple(subst_loc(l, mapping) for l in e.locs), span=e.span)
    if isinstance(e, If):
        return If(s(e.cond), s(e.then), s(e.orelse), span=e.span)
    if isinstance(e, (SyncCall, AsyncSend)):
        arg = None if e.arg is None else s(e.arg)
        return type(e)(s(e.recv), e.method, arg, span=e.span)
    if isinstance(e, FieldRead):
        return FieldRead(s(e.recv), e.field, span=e.span)
    if isinstance(e, FieldWrite):
        return FieldWrite(s(e.recv), e.field, s(e.value), span=e.span)
    if isinstance(e, For):
        return For(e.var, e.lo, e.hi, s(e.body), span=e.span)
    if isinstance(e, Let):
        return Let(e.var, s(e.bound), s(e.body), span=e.span)
    if isinstance(e, Return):
        return Return(s(e.expr), span=e.span)
    return e
