"""Pretty-printer producing text that parses back to the same term."""
from __future__ import annotations

from .nodes import (
    Addr, AsyncSend, Choice, ClassDecl, Eps, FalseLit, FieldRead, FieldWrite, For,
    If, IntLit, Let, Loop, MethodDecl, New, Null, Par, Program, RemAccess, Return,
    Seq, SyncCall, This, TrueLit, Var,
)

_INDENT = "  "


def pretty(x) -> str:
    if isinstance(x, Program):
        return pretty_program(x)
    if isinstance(x, ClassDecl):
        return pretty_class(x)
    if isinstance(x, (Eps, Seq, Par)):
        return pretty_behaviour(x)
    if isinstance(x, (RemAccess, Choice, Loop)):
        return pretty_op(x)
    return pretty_expr(x)


# -- behaviours ---------------------------------------------------------------

def pretty_op(op) -> str:
    if isinstance(op, RemAccess):
        if op.kind == "msg":
            return f"msg({op.src},{op.dst},{op.method})"
        return f"{op.kind}({op.src},{op.dst})"
    if isinstance(op, Choice):
        return f"({pretty_behaviour(op.left)} + {pretty_behaviour(op.right)})"
    if isinstance(op, Loop):
        return f"{op.count}*{{{pretty_behaviour(op.body)}}}"
    raise TypeError(f"not a behaviour operator: {op!r}")


def pretty_behaviour(b) -> str:
    parts = []
    while isinstance(b, Seq):
        parts.append(pretty_op(b.op))
        b = b.rest
    if isinstance(b, Par):
        parts.append(f"({pretty_behaviour(b.left)} || {pretty_behaviour(b.right)})")
    elif not parts:
        parts.append("eps")
    return ".".join(parts)


# -- expressions --------------------------------------------------------------

def _locs(locs) -> str:
    return "<" + ", ".join(map(str, locs)) + ">"


def _arg(arg, depth) -> str:
    return "" if arg is None else pretty_expr(arg, depth)


def _receiver(e, depth) -> str:
    text = pretty_expr(e, depth)
    if isinstance(e, (Let, If, FieldWrite, Return)):
        return f"({text})"
    return text


def pretty_expr(e, depth: int = 0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, This):
        return "this"
    if isinstance(e, TrueLit):
        return "true"
    if isinstance(e, FalseLit):
        return "false"
    if isinstance(e, Null):
        return "null"
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Addr):
        return f"@{e.node}.{e.index}"
    if isinstance(e, New):
        return f"new {e.cls}{_locs(e.locs)}"
    if isinstance(e, FieldRead):
        return f"{_receiver(e.recv, depth)}.{e.field}"
    if isinstance(e, FieldWrite):
        return f"{_receiver(e.recv, depth)}.{e.field} = {pretty_expr(e.value, depth)}"
    if isinstance(e, SyncCall):
        return f"{_receiver(e.recv, depth)}.{e.method}({_arg(e.arg, depth)})"
    if isinstance(e, AsyncSend):
        return f"{_receiver(e.recv, depth)} ! {e.method}({_arg(e.arg, depth)})"
    if isinstance(e, If):
        return (f"if {pretty_expr(e.cond, depth)} then {pretty_expr(e.then, depth)} "
                f"else {pretty_expr(e.orelse, depth)}")
    if isinstance(e, For):
        return f"for {e.var} in {e.lo}..{e.hi} {{ {pretty_expr(e.body, depth)} }}"
    if isinstance(e, Let):
        pad = "\n" + _INDENT * depth
        return (f"let {e.var} = {pretty_expr(e.bound, depth + 1)} in"
                f"{pad}{pretty_expr(e.body, depth)}")
    if isinstance(e, Return):
        return f"return {pretty_expr(e.expr, depth)}"
    raise TypeError(f"not an expression: {e!r}")


# -- declarations ---------------------------------------------------------------

def pretty_method(m: MethodDecl) -> str:
    param = "" if m.param is None else f"{m.param.name}: {m.param.type}"
    head = f"def {m.name}({param}): {m.return_type} as {pretty_behaviour(m.behaviour)} {{"
    body = _INDENT * 2 + pretty_expr(m.body, 2)
    return f"{_INDENT}{head}\n{body}\n{_INDENT}}}"


def pretty_class(c: ClassDecl) -> str:
    head = ("active " if c.active else "") + f"class {c.name}<{', '.join(c.owners)}>"
    lines = [head]
    lines += [f"{_INDENT}{f.name}: {f.type}" for f in c.fields]
    lines += [pretty_method(m) for m in c.methods]
    return "\n".join(lines)


def pretty_program(p: Program) -> str:
    return "\n\n".join(pretty_class(c) for c in p.classes) + "\n"
