"""Behaviour algebra: concatenation, local-access filtering, substitution and
single-step reduction of behaviours."""
from __future__ import annotations

from .syntax.nodes import (
    EPS, Choice, Eps, Loop, Par, RemAccess, Seq, UnmappedLocation, subst_loc,
)

EPSILON = None  # the silent label


def concat(b1, b2):
    """`b1 ∘ b2`. A trailing parallel split keeps the continuation on its left branch."""
    if isinstance(b1, Eps):
        return b2
    if isinstance(b1, Par):
        return Par(concat(b1.left, b2), b1.right)
    ops = []
    while isinstance(b1, Seq):
        ops.append(b1.op)
        b1 = b1.rest
    tail = concat(b1, b2)
    for op in reversed(ops):
        tail = Seq(op, tail)
    return tail


def concat_all(*bs):
    out = EPS
    for b in reversed(bs):
        out = concat(b, out)
    return out


def is_local(op) -> bool:
    return isinstance(op, RemAccess) and op.src == op.dst


def filter_behaviour(b):
    """Drop every access whose source and destination coincide.

    Choices and loops left with empty bodies disappear; parallel branches are
    filtered independently.
    """
    if isinstance(b, Eps):
        return b
    if isinstance(b, Par):
        return Par(filter_behaviour(b.left), filter_behaviour(b.right))
    rest = filter_behaviour(b.rest)
    op = b.op
    if isinstance(op, RemAccess):
        return rest if op.src == op.dst else Seq(op, rest)
    if isinstance(op, Choice):
        left, right = filter_behaviour(op.left), filter_behaviour(op.right)
        if left == EPS and right == EPS:
            return rest
        return Seq(Choice(left, right), rest)
    body = filter_behaviour(op.body)
    if body == EPS:
        return rest
    return Seq(Loop(op.count, body), rest)


def _subst_op(op, mapping):
    if isinstance(op, RemAccess):
        return RemAccess(op.kind, subst_loc(op.src, mapping), subst_loc(op.dst, mapping), op.method)
    if isinstance(op, Choice):
        return Choice(subst_locations(op.left, mapping), subst_locations(op.right, mapping))
    return Loop(op.count, subst_locations(op.body, mapping))


def subst_locations(b, mapping):
    """Rename every location in `b` through `mapping`.

    Node ids absent from the mapping are left alone; any other unmapped
    location raises UnmappedLocation.
    """
    if isinstance(b, Eps):
        return b
    if isinstance(b, Par):
        return Par(subst_locations(b.left, mapping), subst_locations(b.right, mapping))
    return Seq(_subst_op(b.op, mapping), subst_locations(b.rest, mapping))


def locations(b) -> set:
    out = set()

    def walk(b):
        if isinstance(b, Par):
            walk(b.left)
            walk(b.right)
        elif isinstance(b, Seq):
            op = b.op
            if isinstance(op, RemAccess):
                out.update((op.src, op.dst))
            elif isinstance(op, Choice):
                walk(op.left)
                walk(op.right)
            else:
                walk(op.body)
            walk(b.rest)

    walk(b)
    return out


def accesses(b):
    """All access prefixes occurring anywhere in `b`."""
    if isinstance(b, Eps):
        return
    if isinstance(b, Par):
        yield from accesses(b.left)
        yield from accesses(b.right)
        return
    op = b.op
    if isinstance(op, RemAccess):
        yield op
    elif isinstance(op, Choice):
        yield from accesses(op.left)
        yield from accesses(op.right)
    else:
        yield from accesses(op.body)
    yield from accesses(b.rest)


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------

def silent_steps(b):
    """Non-identity silent successors of `b`.

    Yields `(clause, successor, migrated)` where `migrated` is the right
    branch dropped by a parallel projection (None otherwise).
    """
    if isinstance(b, Par):
        yield "par", b.left, b.right
        return
    if not isinstance(b, Seq):
        return
    op = b.op
    if isinstance(op, Choice):
        yield "choice-left", concat(op.left, b.rest), None
        yield "choice-right", concat(op.right, b.rest), None
    elif isinstance(op, Loop):
        if op.count - 1 >= 1:
            after = Seq(Loop(op.count - 1, op.body), b.rest)
        else:
            after = b.rest
        yield "unroll", concat(op.body, after), None


def reduce(b, label=EPSILON) -> set:
    """Every `b'` with `b --label--> b'` in one step."""
    if label is EPSILON:
        out = {b}
        out.update(s for _, s, _ in silent_steps(b))
        return out
    if isinstance(b, Seq) and b.op == label:
        return {b.rest}
    return set()


def epsilon_closure(b) -> set:
    seen = {b}
    todo = [b]
    while todo:
        cur = todo.pop()
        for _, nxt, _ in silent_steps(cur):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def reduce_closure(b, label=EPSILON) -> set:
    """Successors reachable by silent steps followed by one `label` step."""
    pre = epsilon_closure(b)
    if label is EPSILON:
        return pre
    out = set()
    for c in pre:
        out |= reduce(c, label)
    return out


def canonical(b):
    """Normal form used for comparison: every Seq tail re-associated."""
    if isinstance(b, Eps):
        return b
    if isinstance(b, Par):
        return Par(canonical(b.left), canonical(b.right))
    op = b.op
    if isinstance(op, Choice):
        op = Choice(canonical(op.left), canonical(op.right))
    elif isinstance(op, Loop):
        op = Loop(op.count, canonical(op.body))
    return Seq(op, canonical(b.rest))


def equiv(b1, b2) -> bool:
    return canonical(b1) == canonical(b2)


__all__ = [
    "EPSILON", "UnmappedLocation", "accesses", "canonical", "concat", "concat_all",
    "epsilon_closure", "equiv", "filter_behaviour", "is_local", "locations",
    "reduce", "reduce_closure", "silent_steps", "subst_locations",
]
