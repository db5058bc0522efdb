"""Type-and-effect checking.

Typing judgments take a context `ctx`: a sequence of frames (dicts from
variable name to type). Variables are looked up in the LAST frame;
`return e` types `e` with the last frame removed. The runtime builds the
sequence from a thread's stack in reverse, so the oldest activation is last.
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import Diagnostic, TypingError
from .effects import concat, concat_all, equiv, filter_behaviour, subst_locations
from .syntax.nodes import (
    BOOL, EPS, INT, MAIN, NIL, Addr, AsyncSend, BoolType, ClassDecl, FalseLit, FieldRead,
    FieldWrite, For, If, IntLit, Let, Loop, NilType, New, Null, OwnedType,
    Par, Program, Return, Seq, SyncCall, This, TrueLit, Var, Choice, msg, read, subst_expr,
    subst_type, write,
)
from .syntax.printer import pretty_behaviour

WILDCARD = "_"


@dataclass(frozen=True)
class MethodSig:
    name: str
    return_type: object
    param_name: Optional[str]
    param_type: object
    body: object
    behaviour: object


class ClassTable:
    """Lookup functions over the globally accessible program."""

    def __init__(self, program: Program):
        self.program = program
        self.classes = {c.name: c for c in program.classes}

    def get(self, name: str) -> ClassDecl:
        try:
            return self.classes[name]
        except KeyError:
            raise LookupError(f"unknown class {name!r}") from None

    def owners(self, name: str) -> list:
        return list(self.get(name).owners)

    def is_active(self, name: str) -> bool:
        return self.get(name).active

    def _mapping(self, cls: ClassDecl, locs) -> dict:
        params = cls.param_locations()
        if len(locs) != len(params):
            raise LookupError(f"class {cls.name} expects {len(params)} locations, got {len(locs)}")
        return dict(zip(params, locs))

    def field_type(self, name: str, f: str, locs):
        cls = self.get(name)
        fd = cls.field(f)
        if fd is None:
            raise LookupError(f"class {name} has no field {f!r}")
        return subst_type(fd.type, self._mapping(cls, locs))

    def field_types(self, name: str, locs) -> dict:
        cls = self.get(name)
        mapping = self._mapping(cls, locs)
        return {fd.name: subst_type(fd.type, mapping) for fd in cls.fields}

    def method_sig(self, name: str, m: str, locs) -> MethodSig:
        cls = self.get(name)
        md = cls.method(m)
        if md is None:
            raise LookupError(f"class {name} has no method {m!r}")
        mapping = self._mapping(cls, locs)
        ptype = None if md.param is None else subst_type(md.param.type, mapping)
        return MethodSig(
            md.name,
            subst_type(md.return_type, mapping),
            None if md.param is None else md.param.name,
            ptype,
            subst_expr(md.body, mapping),
            subst_locations(md.behaviour, mapping),
        )


def conforms(actual, expected) -> bool:
    """Value compatibility: exact match, `null` into any ownership type, or
    any value discarded into `nil`."""
    if actual == expected or isinstance(expected, NilType):
        return True
    return isinstance(actual, NilType) and isinstance(expected, OwnedType)


def loc_of(ctx):
    """Location of `this` in the innermost frame: its first location."""
    if not ctx:
        raise TypingError([Diagnostic("no frame binds 'this'", rule="loc")])
    t = ctx[-1].get("this")
    if not isinstance(t, OwnedType):
        raise TypingError([Diagnostic(f"'this' is not an ownership type: {t}", rule="loc")])
    return t.locs[0]


@dataclass
class Typer:
    """Applies the typing rules.

    `heap_types` maps runtime addresses to their ownership types. With
    `strict=False` the premises that only make sense for source programs are
    relaxed: a `for` whose bounds coincide (left by unrolling) types as a
    single iteration, and `new` may repeat a node among its locations.
    """
    table: ClassTable
    heap_types: Optional[object] = None
    strict: bool = True
    calls: list = field(default_factory=list)

    def error(self, e, rule: str, message: str):
        raise TypingError([Diagnostic(message, getattr(e, "span", None), rule)])

    def type_expr(self, ctx, e):
        ctx = tuple(ctx)
        if isinstance(e, (Var, This)):
            name = "this" if isinstance(e, This) else e.name
            if not ctx or name not in ctx[-1] or name == WILDCARD:
                self.error(e, "T-Var", f"unbound variable {name!r}")
            return ctx[-1][name], EPS
        if isinstance(e, Addr):
            if self.heap_types is None:
                self.error(e, "T-Addr", "addresses cannot be typed statically")
            t = self.heap_types(e)
            if t is None:
                self.error(e, "T-Addr", f"dangling address @{e.node}.{e.index}")
            return t, EPS
        if isinstance(e, (TrueLit, FalseLit)):
            return BOOL, EPS
        if isinstance(e, Null):
            return NIL, EPS
        if isinstance(e, IntLit):
            return INT, EPS
        if isinstance(e, Let):
            return self._let(ctx, e)
        if isinstance(e, If):
            return self._cond(ctx, e)
        if isinstance(e, For):
            return self._for(ctx, e)
        if isinstance(e, Return):
            if not ctx:
                self.error(e, "T-Ret", "return with no frame to pop")
            return self.type_expr(ctx[:-1], e.expr)
        if isinstance(e, New):
            return self._new(ctx, e)
        if isinstance(e, FieldRead):
            t, b1 = self._receiver(ctx, e.recv, "T-FRead")
            ft = self._lookup(e, "T-FRead", self.table.field_type, t.cls, e.field, t.locs)
            return ft, concat(b1, Seq(read(self._loc(ctx, e, "T-FRead"), t.locs[0]), EPS))
        if isinstance(e, FieldWrite):
            t, b1 = self._receiver(ctx, e.recv, "T-FWrite")
            ft = self._lookup(e, "T-FWrite", self.table.field_type, t.cls, e.field, t.locs)
            vt, b2 = self.type_expr(ctx, e.value)
            if not conforms(vt, ft):
                self.error(e, "T-FWrite", f"cannot assign {vt} to field {e.field!r} of type {ft}")
            eff = Seq(write(self._loc(ctx, e, "T-FWrite"), t.locs[0]), EPS)
            return ft, concat_all(b1, b2, eff)
        if isinstance(e, SyncCall):
            return self._call(ctx, e)
        if isinstance(e, AsyncSend):
            return self._message(ctx, e)
        raise TypeError(f"not an expression: {e!r}")

    # -- helpers -------------------------------------------------------------

    def _loc(self, ctx, e, rule):
        try:
            return loc_of(ctx)
        except TypingError as err:
            self.error(e, rule, err.diagnostics[0].message)

    def _lookup(self, e, rule, fn, *args):
        try:
            return fn(*args)
        except LookupError as err:
            self.error(e, rule, str(err.args[0]))

    def _receiver(self, ctx, recv, rule):
        t, b = self.type_expr(ctx, recv)
        if not isinstance(t, OwnedType):
            self.error(recv, rule, f"receiver has type {t}, expected an ownership type")
        return t, b

    def _extend(self, ctx, e, name, t, rule):
        if not ctx:
            self.error(e, rule, "no frame to bind in")
        if name == WILDCARD:
            return ctx
        last = ctx[-1]
        if name in last:
            self.error(e, rule, f"variable {name!r} is already bound")
        return ctx[:-1] + ({**last, name: t},)

    def _let(self, ctx, e):
        t1, b1 = self.type_expr(ctx, e.bound)
        t2, b2 = self.type_expr(self._extend(ctx, e, e.var, t1, "T-Let"), e.body)
        return t2, concat(b1, b2)

    def _cond(self, ctx, e):
        tc, b1 = self.type_expr(ctx, e.cond)
        if not isinstance(tc, BoolType):
            self.error(e.cond, "T-Cond", f"condition has type {tc}, expected bool")
        t2, b2 = self.type_expr(ctx, e.then)
        t3, b3 = self.type_expr(ctx, e.orelse)
        if t2 == t3:
            t = t2
        elif isinstance(t2, NilType) or isinstance(t3, NilType):
            t = NIL
        else:
            self.error(e, "T-Cond", f"branches have different types {t2} and {t3}")
        return t, concat(b1, Seq(Choice(b2, b3), EPS))

    def _for(self, ctx, e):
        if e.hi < e.lo or (self.strict and e.hi == e.lo):
            self.error(e, "T-For", f"loop bounds {e.lo}..{e.hi} need upper > lower")
        t, b = self.type_expr(self._extend(ctx, e, e.var, INT, "T-For"), e.body)
        return t, Seq(Loop(e.hi - e.lo + 1, b), EPS)

    def _new(self, ctx, e):
        try:
            cls = self.table.get(e.cls)
        except LookupError as err:
            self.error(e, "T-NewO", str(err.args[0]))
        problems = []
        if len(e.locs) != len(cls.owners):
            problems.append(f"class {cls.name} expects {len(cls.owners)} locations, "
                            f"got {len(e.locs)}")
        if cls.active:
            this = ctx[-1].get("this") if ctx else None
            if not (isinstance(this, OwnedType) and this.cls == MAIN):
                problems.append(f"active class {cls.name} may only be created in {MAIN}")
        if self.strict and len(set(e.locs)) != len(e.locs):
            problems.append("locations of a new object must be pairwise distinct")
        if problems:
            raise TypingError([Diagnostic(p, e.span, "T-NewO") for p in problems])
        eff = Seq(write(self._loc(ctx, e, "T-NewO"), e.locs[0]), EPS)
        return OwnedType(e.cls, tuple(e.locs)), eff

    def _invoke(self, ctx, e, rule):
        t, b1 = self._receiver(ctx, e.recv, rule)
        sig = self._lookup(e, rule, self.table.method_sig, t.cls, e.method, t.locs)
        self.calls.append((t.cls, e.method))
        b2 = EPS
        if (e.arg is None) != (sig.param_name is None):
            self.error(e, rule, f"method {t.cls}.{e.method} takes "
                                f"{0 if sig.param_name is None else 1} argument(s)")
        if e.arg is not None:
            at, b2 = self.type_expr(ctx, e.arg)
            if not conforms(at, sig.param_type):
                self.error(e.arg, rule, f"argument of type {at} where {sig.param_type} expected")
        return t, sig, b1, b2

    def _call(self, ctx, e):
        t, sig, b1, b2 = self._invoke(ctx, e, "T-Call")
        here = self._loc(ctx, e, "T-Call")
        if here != t.locs[0]:
            self.error(e, "T-Call", f"synchronous call to {t} from location {here}: "
                                    "receiver must be in the same location")
        return sig.return_type, concat_all(b1, b2, sig.behaviour)

    def _message(self, ctx, e):
        t, sig, b1, b2 = self._invoke(ctx, e, "T-Message")
        if not isinstance(sig.return_type, NilType):
            self.error(e, "T-Message", f"message {t.cls}.{e.method} must return nil")
        eff = Seq(msg(self._loc(ctx, e, "T-Message"), t.locs[0], e.method),
                  Par(EPS, sig.behaviour))
        return NIL, concat_all(b1, b2, eff)


def type_expr(table: ClassTable, ctx, e, **kw):
    return Typer(table, **kw).type_expr(ctx, e)


# ---------------------------------------------------------------------------
# Well-formedness of classes and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MethodReport:
    cls: str
    method: str
    declared: object
    inferred: object = None
    filtered: object = None
    ok: bool = False

    def as_record(self) -> dict:
        show = lambda b: None if b is None else pretty_behaviour(b)
        return {"class": self.cls, "method": self.method, "declared": show(self.declared),
                "inferred": show(self.inferred), "filtered": show(self.filtered),
                "verdict": "ok" if self.ok else "error"}


def _check_type(table, t, span, where):
    if not isinstance(t, OwnedType):
        return []
    if t.cls not in table.classes:
        return [Diagnostic(f"{where}: unknown class {t.cls!r}", span, "WF-type")]
    want = len(table.get(t.cls).owners)
    if len(t.locs) != want:
        return [Diagnostic(f"{where}: {t.cls} expects {want} locations, got {len(t.locs)}",
                           span, "WF-type")]
    return []


def check_class(table: ClassTable, cd: ClassDecl, reports=None, calls=None) -> list:
    """Diagnostics for one class; empty iff it is well formed."""
    diags = []
    for fd in cd.fields:
        diags += _check_type(table, fd.type, fd.span, f"field {cd.name}.{fd.name}")
    this_t = OwnedType(cd.name, cd.param_locations())
    for md in cd.methods:
        where = f"method {cd.name}.{md.name}"
        diags += _check_type(table, md.return_type, md.span, where)
        frame = {"this": this_t}
        if md.param is not None:
            diags += _check_type(table, md.param.type, md.span, where)
            if md.param.name in ("this", WILDCARD):
                diags.append(Diagnostic(f"{where}: invalid parameter name", md.span, "WF-class"))
            frame[md.param.name] = md.param.type
        typer = Typer(table)
        try:
            t, b = typer.type_expr([frame], md.body)
        except TypingError as err:
            diags += err.diagnostics
            if reports is not None:
                reports.append(MethodReport(cd.name, md.name, md.behaviour))
            continue
        if calls is not None:
            calls[(cd.name, md.name)] = set(typer.calls)
        filtered = filter_behaviour(b)
        ok = True
        if not conforms(t, md.return_type):
            ok = False
            diags.append(Diagnostic(f"{where}: body has type {t}, declared {md.return_type}",
                                    md.span, "WF-class"))
        if not equiv(filtered, md.behaviour):
            ok = False
            diags.append(Diagnostic(
                f"{where}: declared behaviour {pretty_behaviour(md.behaviour)} "
                f"does not match inferred {pretty_behaviour(filtered)}",
                md.span, "WF-class"))
        if reports is not None:
            reports.append(MethodReport(cd.name, md.name, md.behaviour, b, filtered, ok))
    return diags


def check_program(program: Program, reports=None) -> list:
    """Diagnostics for a whole program; empty iff it is accepted."""
    table = ClassTable(program)
    diags = []
    main = program.get(MAIN)
    if main is None:
        diags.append(Diagnostic(f"program has no class {MAIN}", rule="WF-program"))
    else:
        md = main.method("main")
        if md is None:
            diags.append(Diagnostic(f"class {MAIN} has no method 'main'", main.span, "WF-program"))
        elif md.param is not None or not isinstance(md.return_type, NilType):
            diags.append(Diagnostic("main must take no parameter and return nil",
                                    md.span, "WF-program"))
    calls = {}
    for cd in program.classes:
        diags += check_class(table, cd, reports, calls)
    diags += _check_acyclic(program, calls)
    return diags


def _check_acyclic(program, calls) -> list:
    graph = {k: {c for c in v if c in calls} for k, v in calls.items()}
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as err:
        cycle = err.args[1]
        chain = " -> ".join(f"{c}.{m}" for c, m in reversed(cycle))
        cls = program.get(cycle[0][0])
        span = cls.method(cycle[0][1]).span if cls else None
        return [Diagnostic(f"recursive method invocation: {chain}", span, "WF-program")]
    return []
